//! Edge curvature measures.
//!
//! Three notions of discrete curvature on an edge `(i, j)`, all driven by the
//! local structure around the edge:
//!
//! - **JLC** (Jost–Liu style combinatorial curvature): a closed-form lower
//!   bound on Ollivier curvature computable from the endpoint degrees and the
//!   triangle count alone, in O(d_i + d_j) per edge. Values lie in `[−2, 1]`.
//! - **BFC** (balanced Forman curvature): degree/triangle/4-cycle based,
//!   with the 4-cycle census requiring a node-indexed scratch table per edge.
//! - **Ollivier curvature** `κ(i,j) = 1 − W₁(μ_i, μ_j)`: exact, with `μ_u`
//!   uniform on the neighbors of `u` and `W₁` the 1-Wasserstein distance
//!   under shortest-path costs, solved as an integer min-cost flow after
//!   scaling both measures by `lcm(d_i, d_j)`. Exact but expensive; guarded
//!   to small graphs and used as the ground truth the cheap bound is tested
//!   against.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};

/// Largest node count for exact Ollivier computation.
pub const OLLIVIER_MAX_NODES: usize = 50;

/// Histogram bins used by [`curvature_profile`].
pub const PROFILE_BINS: usize = 20;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("exact Ollivier curvature refused: {n} nodes > {max}")]
    TooLargeForExact { n: usize, max: usize },
    #[error("curvature file was computed for fingerprint {found:#018x}, graph has {expected:#018x}")]
    FingerprintMismatch { expected: u64, found: u64 },
    #[error("curvature CSV line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown curvature metric {0:?} (expected \"jlc\" or \"bfc\")")]
    UnknownMetric(String),
    #[error("graph has no edges")]
    NoEdges,
}

/// Which curvature metric a vector or profile refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureMetric {
    Jlc,
    Bfc,
}

impl std::fmt::Display for CurvatureMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurvatureMetric::Jlc => write!(f, "jlc"),
            CurvatureMetric::Bfc => write!(f, "bfc"),
        }
    }
}

impl std::str::FromStr for CurvatureMetric {
    type Err = CurvatureError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jlc" => Ok(CurvatureMetric::Jlc),
            "bfc" => Ok(CurvatureMetric::Bfc),
            other => Err(CurvatureError::UnknownMetric(other.to_string())),
        }
    }
}

fn jlc_from_parts(di: usize, dj: usize, t: usize) -> f64 {
    let (fi, fj, ft) = (di as f64, dj as f64, t as f64);
    let dmin = di.min(dj) as f64;
    let dmax = di.max(dj) as f64;
    let a = (1.0 - 1.0 / fi - 1.0 / fj - ft / dmin).max(0.0);
    let b = (1.0 - 1.0 / fi - 1.0 / fj - ft / dmax).max(0.0);
    -a - b + ft / dmax
}

/// JLC curvature of one edge:
/// `−(1 − 1/d_i − 1/d_j − t/(d_i∧d_j))₊ − (1 − 1/d_i − 1/d_j − t/(d_i∨d_j))₊
///  + t/(d_i∨d_j)` with `t = |N_i ∩ N_j|`. Lies in `[−2, 1]` and lower-bounds
/// the Ollivier curvature of the edge.
pub fn jlc_edge(g: &Graph, i: usize, j: usize) -> Result<f64, CurvatureError> {
    if g.edge_index(i, j).is_none() {
        return Err(GraphError::MissingEdge { u: i, v: j }.into());
    }
    Ok(jlc_from_parts(g.degree(i), g.degree(j), g.common_neighbors(i, j).len()))
}

/// JLC for every edge, indexed by canonical edge id. Sequential.
pub fn jlc_all_seq(g: &Graph) -> Vec<f64> {
    g.edges()
        .iter()
        .map(|&(u, v)| jlc_from_parts(g.degree(u), g.degree(v), g.common_neighbors(u, v).len()))
        .collect()
}

/// JLC for every edge, indexed by canonical edge id. Data-parallel over
/// edges with the `parallel` feature; results are identical to the
/// sequential path (pure per-edge computation).
#[cfg(feature = "parallel")]
pub fn jlc_all(g: &Graph) -> Vec<f64> {
    use rayon::prelude::*;
    g.edges()
        .par_iter()
        .map(|&(u, v)| jlc_from_parts(g.degree(u), g.degree(v), g.common_neighbors(u, v).len()))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn jlc_all(g: &Graph) -> Vec<f64> {
    jlc_all_seq(g)
}

/// BFC of one edge given a node-indexed scratch table (one byte per node:
/// bit 0 = neighbor of `i`, bit 1 = neighbor of `j`). The triangle and
/// 4-cycle terms of the defining formula range over the whole vertex set, and
/// this transcribes them directly: every edge re-initializes the table and
/// scans all `n` entries, the dense Θ(n)-per-edge profile this metric is
/// known for (and the reason the local JLC form is the cheap alternative).
fn bfc_edge_scratch(g: &Graph, i: usize, j: usize, flags: &mut Vec<u8>) -> f64 {
    let di = g.degree(i);
    let dj = g.degree(j);
    if di.min(dj) == 1 {
        return 0.0;
    }
    flags.clear();
    flags.resize(g.n(), 0u8);
    for &u in g.neighbors(i) {
        flags[u] |= 1;
    }
    for &u in g.neighbors(j) {
        flags[u] |= 2;
    }

    // First vertex-set pass: triangles (common neighbors) and the side-i
    // 4-cycle census. k ∈ N_i ∖ (N_j ∪ {j}) joins a 4-cycle i–k–w–j when it
    // has a neighbor w ∈ N_j ∖ (N_i ∪ {i}); γ is the largest number of such
    // 4-cycles through any single middle node on either side.
    let mut t = 0u64;
    let mut sq_i = 0u64;
    let mut sq_j = 0u64;
    let mut gamma = 0u64;
    for k in 0..g.n() {
        match flags[k] {
            3 => t += 1,
            1 if k != j => {
                let c = g
                    .neighbors(k)
                    .iter()
                    .filter(|&&w| w != i && flags[w] & 2 != 0 && flags[w] & 1 == 0)
                    .count() as u64;
                if c > 0 {
                    sq_i += 1;
                    gamma = gamma.max(c);
                }
            }
            _ => {}
        }
    }
    // Second vertex-set pass: the side-j census.
    for w in 0..g.n() {
        if flags[w] != 2 || w == i {
            continue;
        }
        let c = g
            .neighbors(w)
            .iter()
            .filter(|&&k| k != j && flags[k] & 1 != 0 && flags[k] & 2 == 0)
            .count() as u64;
        if c > 0 {
            sq_j += 1;
            gamma = gamma.max(c);
        }
    }

    let (fi, fj, ft) = (di as f64, dj as f64, t as f64);
    let dmax = di.max(dj) as f64;
    let dmin = di.min(dj) as f64;
    let mut out = 2.0 / fi + 2.0 / fj - 2.0 + 2.0 * ft / dmax + ft / dmin;
    if sq_i + sq_j > 0 {
        out += (sq_i + sq_j) as f64 / (gamma as f64 * dmax);
    }
    out
}

/// Balanced Forman curvature of one edge. Zero when either endpoint has
/// degree 1; otherwise
/// `2/d_i + 2/d_j − 2 + 2t/(d_i∨d_j) + t/(d_i∧d_j)
///  + (#²_i + #²_j)/(γ_max · (d_i∨d_j))`,
/// where `t` counts triangles at the edge, `#²_u` counts the neighbors of
/// `u` lying on chordless 4-cycles through the edge, and `γ_max` is the
/// largest number of those 4-cycles through one middle node (the last term
/// is dropped when there are no such 4-cycles).
pub fn bfc_edge(g: &Graph, i: usize, j: usize) -> Result<f64, CurvatureError> {
    if g.edge_index(i, j).is_none() {
        return Err(GraphError::MissingEdge { u: i, v: j }.into());
    }
    let mut flags = Vec::new();
    Ok(bfc_edge_scratch(g, i, j, &mut flags))
}

/// BFC for every edge, indexed by canonical edge id. Sequential.
pub fn bfc_all_seq(g: &Graph) -> Vec<f64> {
    let mut flags = Vec::new();
    g.edges()
        .iter()
        .map(|&(u, v)| bfc_edge_scratch(g, u, v, &mut flags))
        .collect()
}

/// BFC for every edge, data-parallel over edges with the `parallel` feature
/// (one scratch table per worker via `map_init`).
#[cfg(feature = "parallel")]
pub fn bfc_all(g: &Graph) -> Vec<f64> {
    use rayon::prelude::*;
    g.edges()
        .par_iter()
        .map_init(Vec::new, |flags, &(u, v)| bfc_edge_scratch(g, u, v, flags))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn bfc_all(g: &Graph) -> Vec<f64> {
    bfc_all_seq(g)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Min-cost flow by successive shortest augmenting paths with Johnson
/// potentials (all arc costs are nonnegative BFS distances, so Dijkstra
/// applies throughout).
struct MinCostFlow {
    // arcs[a] = (to, capacity, cost); arc a^1 is the reverse of arc a.
    arcs: Vec<(usize, i64, i64)>,
    head: Vec<Vec<usize>>,
}

impl MinCostFlow {
    fn new(nodes: usize) -> Self {
        MinCostFlow {
            arcs: Vec::new(),
            head: vec![Vec::new(); nodes],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: i64) {
        self.head[from].push(self.arcs.len());
        self.arcs.push((to, cap, cost));
        self.head[to].push(self.arcs.len());
        self.arcs.push((from, 0, -cost));
    }

    /// Routes exactly `target` units from `s` to `t`; returns the total cost,
    /// or `None` if the network cannot carry that much flow.
    fn run(&mut self, s: usize, t: usize, target: i64) -> Option<i64> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        let n = self.head.len();
        let mut potential = vec![0i64; n];
        let mut flow = 0i64;
        let mut total_cost = 0i64;
        while flow < target {
            let mut dist = vec![i64::MAX; n];
            let mut prev_arc = vec![usize::MAX; n];
            dist[s] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i64, s)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &a in &self.head[u] {
                    let (to, cap, cost) = self.arcs[a];
                    if cap <= 0 {
                        continue;
                    }
                    let nd = d + cost + potential[u] - potential[to];
                    if nd < dist[to] {
                        dist[to] = nd;
                        prev_arc[to] = a;
                        heap.push(Reverse((nd, to)));
                    }
                }
            }
            if dist[t] == i64::MAX {
                return None;
            }
            for v in 0..n {
                if dist[v] < i64::MAX {
                    potential[v] += dist[v];
                }
            }
            // Bottleneck along the shortest path.
            let mut push = target - flow;
            let mut v = t;
            while v != s {
                let a = prev_arc[v];
                push = push.min(self.arcs[a].1);
                v = self.arcs[a ^ 1].0;
            }
            let mut v = t;
            while v != s {
                let a = prev_arc[v];
                self.arcs[a].1 -= push;
                self.arcs[a ^ 1].1 += push;
                total_cost += push * self.arcs[a].2;
                v = self.arcs[a ^ 1].0;
            }
            flow += push;
        }
        Some(total_cost)
    }
}

/// Exact Ollivier curvature `κ(i,j) = 1 − W₁(μ_i, μ_j)` with `μ_u` uniform
/// on the neighbors of `u` and shortest-path transport costs. Both measures
/// are scaled by `lcm(d_i, d_j)` so the transport problem is an integer
/// min-cost flow, solved exactly. Refuses graphs larger than
/// [`OLLIVIER_MAX_NODES`].
pub fn ollivier_exact(g: &Graph, i: usize, j: usize) -> Result<f64, CurvatureError> {
    if g.n() > OLLIVIER_MAX_NODES {
        return Err(CurvatureError::TooLargeForExact {
            n: g.n(),
            max: OLLIVIER_MAX_NODES,
        });
    }
    if g.edge_index(i, j).is_none() {
        return Err(GraphError::MissingEdge { u: i, v: j }.into());
    }
    let src_nodes = g.neighbors(i);
    let dst_nodes = g.neighbors(j);
    let (di, dj) = (src_nodes.len() as u64, dst_nodes.len() as u64);
    let scale = di / gcd(di, dj) * dj; // lcm
    let supply = (scale / di) as i64;
    let demand = (scale / dj) as i64;

    // Both supports live in the connected component of the edge, so all
    // pairwise distances below are finite.
    let a = src_nodes.len();
    let b = dst_nodes.len();
    let source = a + b;
    let sink = a + b + 1;
    let mut net = MinCostFlow::new(a + b + 2);
    for (ui, &u) in src_nodes.iter().enumerate() {
        net.add_arc(source, ui, supply, 0);
        let dist = g.bfs_distances(u);
        for (vi, &v) in dst_nodes.iter().enumerate() {
            let d = dist[v].expect("supports share the edge's component") as i64;
            net.add_arc(ui, a + vi, i64::MAX / 4, d);
        }
    }
    for vi in 0..b {
        net.add_arc(a + vi, sink, demand, 0);
    }
    let cost = net
        .run(source, sink, scale as i64)
        .expect("supply equals demand; transport is always feasible");
    Ok(1.0 - cost as f64 / scale as f64)
}

/// Exact Ollivier curvature for every edge, indexed by canonical edge id.
pub fn ollivier_all(g: &Graph) -> Result<Vec<f64>, CurvatureError> {
    g.edges()
        .iter()
        .map(|&(u, v)| ollivier_exact(g, u, v))
        .collect()
}

/// Per-edge curvature values bound to the graph they were computed on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvatureVector {
    pub metric: CurvatureMetric,
    /// Fingerprint of the graph the values belong to.
    pub fingerprint: u64,
    /// One value per canonical edge id.
    pub values: Vec<f64>,
}

impl CurvatureVector {
    /// Computes the requested metric for every edge of `g`.
    pub fn compute(g: &Graph, metric: CurvatureMetric) -> Self {
        let values = match metric {
            CurvatureMetric::Jlc => jlc_all(g),
            CurvatureMetric::Bfc => bfc_all(g),
        };
        CurvatureVector {
            metric,
            fingerprint: g.fingerprint(),
            values,
        }
    }

    /// Errors unless this vector was computed on (a graph identical to) `g`.
    pub fn check_graph(&self, g: &Graph) -> Result<(), CurvatureError> {
        if self.fingerprint != g.fingerprint() {
            return Err(CurvatureError::FingerprintMismatch {
                expected: g.fingerprint(),
                found: self.fingerprint,
            });
        }
        Ok(())
    }
}

/// Serializes per-edge curvature as CSV: two comment lines carrying the
/// metric and graph fingerprint, a header, then one `u,v,value` row per
/// canonical edge. Floats are written with 17 significant digits so parsing
/// recovers them bit-exactly.
pub fn write_curvature_csv(g: &Graph, cv: &CurvatureVector) -> Result<String, CurvatureError> {
    cv.check_graph(g)?;
    let mut out = String::new();
    out.push_str(&format!("# metric={}\n", cv.metric));
    out.push_str(&format!("# fingerprint={:#018x}\n", cv.fingerprint));
    out.push_str("u,v,value\n");
    for (&(u, v), &x) in g.edges().iter().zip(&cv.values) {
        out.push_str(&format!("{u},{v},{}\n", crate::fmt_f64(x)));
    }
    Ok(out)
}

/// Inverse of [`write_curvature_csv`]: returns the vector together with the
/// edge list it was written against (for validation against a graph).
pub fn parse_curvature_csv(
    text: &str,
) -> Result<(CurvatureVector, Vec<(usize, usize)>), CurvatureError> {
    let mut metric: Option<CurvatureMetric> = None;
    let mut fingerprint: Option<u64> = None;
    let mut edges = Vec::new();
    let mut values = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(m) = rest.strip_prefix("metric=") {
                metric = Some(m.trim().parse()?);
            } else if let Some(fp) = rest.strip_prefix("fingerprint=") {
                let fp = fp.trim();
                let digits = fp.strip_prefix("0x").unwrap_or(fp);
                fingerprint =
                    Some(u64::from_str_radix(digits, 16).map_err(|e| CurvatureError::Parse {
                        line: lineno,
                        msg: format!("bad fingerprint {fp:?}: {e}"),
                    })?);
            }
            continue;
        }
        if !seen_header {
            if line != "u,v,value" {
                return Err(CurvatureError::Parse {
                    line: lineno,
                    msg: format!("expected header \"u,v,value\", got {line:?}"),
                });
            }
            seen_header = true;
            continue;
        }
        let mut parts = line.split(',');
        let mut field = |name: &str| {
            parts.next().ok_or_else(|| CurvatureError::Parse {
                line: lineno,
                msg: format!("missing field {name}"),
            })
        };
        let u: usize = field("u")?.trim().parse().map_err(|e| CurvatureError::Parse {
            line: lineno,
            msg: format!("bad u: {e}"),
        })?;
        let v: usize = field("v")?.trim().parse().map_err(|e| CurvatureError::Parse {
            line: lineno,
            msg: format!("bad v: {e}"),
        })?;
        let x: f64 = field("value")?
            .trim()
            .parse()
            .map_err(|e| CurvatureError::Parse {
                line: lineno,
                msg: format!("bad value: {e}"),
            })?;
        edges.push((u, v));
        values.push(x);
    }
    let metric = metric.ok_or(CurvatureError::Parse {
        line: 0,
        msg: "missing \"# metric=\" line".to_string(),
    })?;
    let fingerprint = fingerprint.ok_or(CurvatureError::Parse {
        line: 0,
        msg: "missing \"# fingerprint=\" line".to_string(),
    })?;
    Ok((
        CurvatureVector {
            metric,
            fingerprint,
            values,
        },
        edges,
    ))
}

/// One histogram bin of a curvature profile.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Distribution summary of a curvature vector over a graph.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureProfile {
    pub metric: CurvatureMetric,
    pub nodes: usize,
    pub edges: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// 20 bins over `[−2, 1]` for JLC (its hard range), over the observed
    /// range for BFC.
    pub histogram: Vec<HistBin>,
    /// Edge with the smallest curvature (first canonical edge on ties).
    pub most_negative_edge: (usize, usize),
    pub most_negative_value: f64,
}

/// Summarizes a curvature vector: extremes, mean, a fixed-width histogram,
/// and the most negative edge (the canonical rewiring target).
pub fn curvature_profile(
    g: &Graph,
    cv: &CurvatureVector,
) -> Result<CurvatureProfile, CurvatureError> {
    cv.check_graph(g)?;
    if cv.values.is_empty() {
        return Err(CurvatureError::NoEdges);
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut argmin = 0usize;
    for (idx, &x) in cv.values.iter().enumerate() {
        if x < min {
            min = x;
            argmin = idx;
        }
        if x > max {
            max = x;
        }
        sum += x;
    }
    let (lo, hi) = match cv.metric {
        CurvatureMetric::Jlc => (-2.0, 1.0),
        CurvatureMetric::Bfc => {
            if max - min > 1e-12 {
                (min, max)
            } else {
                (min - 0.5, min + 0.5)
            }
        }
    };
    let width = (hi - lo) / PROFILE_BINS as f64;
    let mut counts = vec![0usize; PROFILE_BINS];
    for &x in &cv.values {
        let bin = (((x - lo) / width) as usize).min(PROFILE_BINS - 1);
        counts[bin] += 1;
    }
    let histogram = counts
        .into_iter()
        .enumerate()
        .map(|(b, count)| HistBin {
            lo: lo + b as f64 * width,
            hi: lo + (b + 1) as f64 * width,
            count,
        })
        .collect();
    Ok(CurvatureProfile {
        metric: cv.metric,
        nodes: g.n(),
        edges: g.num_edges(),
        min,
        max,
        mean: sum / cv.values.len() as f64,
        histogram,
        most_negative_edge: g.edges()[argmin],
        most_negative_value: min,
    })
}
