//! Stochastic curvature-guided rewiring.
//!
//! The pipeline has three stages, all deterministic given the graph and an
//! RNG seed:
//!
//! 1. **Candidate bank** ([`EdgeBank::build`]): walk the existing edges in
//!    ascending JLC order (most negatively curved first); for each seed edge
//!    `(i′, j′)` propose the non-edges `(u, j′)` for `u ∈ N_{i′}` and
//!    `(v, i′)` for `v ∈ N_{j′}` — every proposal closes at least one
//!    triangle with an existing edge. Stop once `2·p_add·|E|` candidates are
//!    collected (or the edge list is exhausted).
//! 2. **Scores**: each candidate `(r, s)` is scored by the mean JLC
//!    improvement `σ` of the edges it forms triangles with, measured by
//!    materializing `G + (r,s)`. Candidates get `add_score = minmax(σ)`;
//!    existing edges get `drop_score = 1 − minmax(JLC)`, so the most
//!    negatively curved (bridge-like) edges are the likeliest drops.
//! 3. **Per-epoch view** ([`epoch_view`]): mix the stored scores with
//!    current embedding distances (far endpoints: likelier to drop, less
//!    likely to add), then sample `round(p_drop·|E|)` drops and
//!    `round(p_add·|E|)` adds without replacement from the induced softmax
//!    distributions via Gumbel top-k. The result is a [`RewiredView`] on the
//!    original graph; the original is never mutated.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

use crate::curvature::{jlc_all, jlc_edge, CurvatureError};
use crate::graph::{EdgeId, Graph, GraphError, RewiredView};

#[derive(Debug, Error)]
pub enum RewiringError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error("{name} = {value} outside [0, 1]")]
    BadFraction { name: &'static str, value: f64 },
    #[error("edge bank was built for fingerprint {found:#018x}, graph has {expected:#018x}")]
    FingerprintMismatch { expected: u64, found: u64 },
    #[error("embedding matrix has {got} rows, graph has {expected} nodes")]
    EmbeddingRows { got: usize, expected: usize },
    #[error("candidate ({r},{s}) has no common neighbor; bank construction guarantees one")]
    CandidateNoCommonNeighbor { r: usize, s: usize },
}

/// Fractions of `|E|` to drop/add per epoch and the curvature-vs-distance
/// mixing weight.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RewiringConfig {
    /// Fraction of `|E|` to add each epoch (also sizes the candidate bank).
    pub p_add: f64,
    /// Fraction of `|E|` to drop each epoch.
    pub p_drop: f64,
    /// Weight of the precomputed curvature scores; `1 − alpha` weights the
    /// live embedding distances.
    pub alpha: f64,
}

impl RewiringConfig {
    pub fn validate(&self) -> Result<(), RewiringError> {
        for (name, value) in [
            ("p_add", self.p_add),
            ("p_drop", self.p_drop),
            ("alpha", self.alpha),
        ] {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(RewiringError::BadFraction { name, value });
            }
        }
        Ok(())
    }
}

/// Precomputed rewiring state: candidate edges with their improvement
/// scores, plus normalized add/drop scores. Built once per graph and reused
/// across epochs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeBank {
    /// Candidate non-edges in discovery order, canonicalized `(min, max)`.
    pub candidates: Vec<(usize, usize)>,
    /// Mean JLC improvement of each candidate's triangle-closing edges.
    pub improvement: Vec<f64>,
    /// Per-candidate normalized add score (min–max of `improvement`).
    pub add_score: Vec<f64>,
    /// Per-existing-edge normalized drop score, `1 − minmax(JLC)`: most
    /// negatively curved edges score highest.
    pub drop_score: Vec<f64>,
    /// Fingerprint of the graph the bank was built on.
    pub fingerprint: u64,
}

fn check_fraction(name: &'static str, value: f64) -> Result<(), RewiringError> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(RewiringError::BadFraction { name, value });
    }
    Ok(())
}

/// Edge ids sorted by (JLC ascending, edge id ascending).
fn edges_by_ascending_jlc(jlc: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..jlc.len()).collect();
    order.sort_unstable_by(|&a, &b| jlc[a].total_cmp(&jlc[b]).then(a.cmp(&b)));
    order
}

/// Candidate enumeration with an explicit target count: seeds are existing
/// edges in ascending JLC order; each seed `(i′,j′)` proposes `(u,j′)` for
/// `u ∈ N_{i′}∖{j′}` (ascending) then `(v,i′)` for `v ∈ N_{j′}∖{i′}`
/// (ascending), skipping existing edges and earlier discoveries. Collection
/// stops once `target` candidates exist, checked between seed edges.
pub fn bank_candidates_with_target(g: &Graph, jlc: &[f64], target: f64) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for &eid in &edges_by_ascending_jlc(jlc) {
        if out.len() as f64 >= target {
            break;
        }
        let (i, j) = g.edges()[eid];
        let propose = |a: usize, b: usize, seen: &mut HashSet<(usize, usize)>,
                           out: &mut Vec<(usize, usize)>| {
            if a == b {
                return;
            }
            let pair = (a.min(b), a.max(b));
            if g.contains_edge(pair.0, pair.1) || !seen.insert(pair) {
                return;
            }
            out.push(pair);
        };
        for &u in g.neighbors(i) {
            propose(u, j, &mut seen, &mut out);
        }
        for &v in g.neighbors(j) {
            propose(v, i, &mut seen, &mut out);
        }
    }
    out
}

/// Candidate enumeration sized by the add fraction: stops once
/// `2·p_add·|E|` candidates are collected.
pub fn bank_candidates(g: &Graph, p_add: f64) -> Result<Vec<(usize, usize)>, RewiringError> {
    check_fraction("p_add", p_add)?;
    let jlc = jlc_all(g);
    Ok(bank_candidates_with_target(
        g,
        &jlc,
        2.0 * p_add * g.num_edges() as f64,
    ))
}

fn improvement_one(
    g: &Graph,
    jlc: &[f64],
    r: usize,
    s: usize,
) -> Result<f64, RewiringError> {
    let common = g.common_neighbors(r, s);
    if common.is_empty() {
        return Err(RewiringError::CandidateNoCommonNeighbor { r, s });
    }
    let with_edge = RewiredView::new(g, Vec::new(), vec![(r, s)])?.materialize();
    let mut sum = 0.0;
    let mut count = 0usize;
    for &t in &common {
        for &(a, b) in &[(t, r), (t, s)] {
            let eid = g
                .edge_index(a, b)
                .expect("common neighbor implies both edges exist");
            sum += jlc_edge(&with_edge, a, b)? - jlc[eid.0];
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

/// Mean JLC improvement per candidate: for `(r, s)` with common neighbors
/// `T`, the affected edges are `(t, r)` and `(t, s)` for `t ∈ T`; the score
/// is the mean of `JLC_{G+(r,s)}(e) − JLC_G(e)` over those edges. Errors on
/// a candidate with no common neighbor (bank construction rules that out).
pub fn improvement_scores_seq(
    g: &Graph,
    candidates: &[(usize, usize)],
    jlc: &[f64],
) -> Result<Vec<f64>, RewiringError> {
    candidates
        .iter()
        .map(|&(r, s)| improvement_one(g, jlc, r, s))
        .collect()
}

/// Parallel variant of [`improvement_scores_seq`] (identical output; the
/// per-candidate computation is pure).
#[cfg(feature = "parallel")]
pub fn improvement_scores(
    g: &Graph,
    candidates: &[(usize, usize)],
    jlc: &[f64],
) -> Result<Vec<f64>, RewiringError> {
    use rayon::prelude::*;
    candidates
        .par_iter()
        .map(|&(r, s)| improvement_one(g, jlc, r, s))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn improvement_scores(
    g: &Graph,
    candidates: &[(usize, usize)],
    jlc: &[f64],
) -> Result<Vec<f64>, RewiringError> {
    improvement_scores_seq(g, candidates, jlc)
}

/// Min–max normalization into `[0, 1]`. A degenerate range (all values
/// within 1e−12 of each other, including a single value) maps everything to
/// 0.5.
pub fn minmax_normalize(xs: &[f64]) -> Vec<f64> {
    if xs.is_empty() {
        return Vec::new();
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &x in xs {
        min = min.min(x);
        max = max.max(x);
    }
    if max - min <= 1e-12 {
        return vec![0.5; xs.len()];
    }
    xs.iter().map(|&x| (x - min) / (max - min)).collect()
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    if logits.is_empty() {
        return Vec::new();
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&x| (x - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Samples `k` distinct indices from the softmax distribution over `logits`
/// without replacement (successive renormalization semantics), via Gumbel
/// top-k: perturb every logit with independent Gumbel noise `−ln(−ln U)` and
/// keep the k largest. Returns indices sorted ascending.
///
/// `k = 0` returns empty and `k ≥ len` returns all indices, both **without
/// consuming any randomness**, so disabled rewiring leaves the RNG stream
/// untouched.
pub fn sample_without_replacement<R: Rng + ?Sized>(
    logits: &[f64],
    k: usize,
    rng: &mut R,
) -> Vec<usize> {
    if k == 0 {
        return Vec::new();
    }
    if k >= logits.len() {
        return (0..logits.len()).collect();
    }
    let mut keyed: Vec<(f64, usize)> = logits
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut u: f64 = rng.random();
            while u <= 0.0 {
                u = rng.random();
            }
            (s - (-u.ln()).ln(), i)
        })
        .collect();
    keyed.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<usize> = keyed[..k].iter().map(|&(_, i)| i).collect();
    out.sort_unstable();
    out
}

impl EdgeBank {
    /// Builds the candidate bank and all scores for `g`. Pure given the
    /// graph; involves no randomness.
    pub fn build(g: &Graph, p_add: f64) -> Result<EdgeBank, RewiringError> {
        check_fraction("p_add", p_add)?;
        let jlc = jlc_all(g);
        let candidates = bank_candidates_with_target(g, &jlc, 2.0 * p_add * g.num_edges() as f64);
        let improvement = improvement_scores(g, &candidates, &jlc)?;
        let add_score = minmax_normalize(&improvement);
        let drop_score: Vec<f64> = minmax_normalize(&jlc).iter().map(|&x| 1.0 - x).collect();
        Ok(EdgeBank {
            candidates,
            improvement,
            add_score,
            drop_score,
            fingerprint: g.fingerprint(),
        })
    }

    /// Errors unless the bank was built on (a graph identical to) `g`.
    pub fn check_graph(&self, g: &Graph) -> Result<(), RewiringError> {
        if self.fingerprint != g.fingerprint() {
            return Err(RewiringError::FingerprintMismatch {
                expected: g.fingerprint(),
                found: self.fingerprint,
            });
        }
        Ok(())
    }
}

fn row_distance(h: &Array2<f64>, a: usize, b: usize) -> f64 {
    let ra = h.row(a);
    let rb = h.row(b);
    ra.iter()
        .zip(rb.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Samples one epoch's rewiring: drops `round(p_drop·|E|)` edges from
/// `softmax(alpha·drop_score + (1−alpha)·d_n)` and adds
/// `round(p_add·|E|)` candidates (capped at the bank size) from
/// `softmax(alpha·add_score − (1−alpha)·a_n)`, where `d_n`/`a_n` are
/// min–max-normalized embedding distances of edge/candidate endpoints —
/// distant endpoints are likelier to be dropped and less likely to be
/// added. Drops are sampled before adds on the same RNG stream. With
/// `p_add = p_drop = 0` the RNG is not consumed and the view is empty.
pub fn epoch_view<'g, R: Rng + ?Sized>(
    g: &'g Graph,
    bank: &EdgeBank,
    embeddings: &Array2<f64>,
    cfg: &RewiringConfig,
    rng: &mut R,
) -> Result<RewiredView<'g>, RewiringError> {
    cfg.validate()?;
    bank.check_graph(g)?;
    if embeddings.nrows() != g.n() {
        return Err(RewiringError::EmbeddingRows {
            got: embeddings.nrows(),
            expected: g.n(),
        });
    }
    let m = g.num_edges();
    let alpha = cfg.alpha;

    let k_drop = (cfg.p_drop * m as f64).round_ties_even() as usize;
    let dropped: Vec<EdgeId> = if k_drop == 0 {
        Vec::new()
    } else {
        let d_raw: Vec<f64> = g
            .edges()
            .iter()
            .map(|&(u, v)| row_distance(embeddings, u, v))
            .collect();
        let d_n = minmax_normalize(&d_raw);
        let logits: Vec<f64> = bank
            .drop_score
            .iter()
            .zip(&d_n)
            .map(|(&phi, &d)| alpha * phi + (1.0 - alpha) * d)
            .collect();
        sample_without_replacement(&logits, k_drop, rng)
            .into_iter()
            .map(EdgeId)
            .collect()
    };

    let k_add = ((cfg.p_add * m as f64).round_ties_even() as usize).min(bank.candidates.len());
    let added: Vec<(usize, usize)> = if k_add == 0 {
        Vec::new()
    } else {
        let a_raw: Vec<f64> = bank
            .candidates
            .iter()
            .map(|&(r, s)| row_distance(embeddings, r, s))
            .collect();
        let a_n = minmax_normalize(&a_raw);
        let logits: Vec<f64> = bank
            .add_score
            .iter()
            .zip(&a_n)
            .map(|(&phi, &a)| alpha * phi - (1.0 - alpha) * a)
            .collect();
        sample_without_replacement(&logits, k_add, rng)
            .into_iter()
            .map(|c| bank.candidates[c])
            .collect()
    };

    Ok(RewiredView::new(g, dropped, added)?)
}
