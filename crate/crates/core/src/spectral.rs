//! Spectral diagnostics for undirected graphs.
//!
//! Everything here is phrased in terms of the symmetric normalized Laplacian
//! `L = I − D^{−1/2} A D^{−1/2}`, whose eigenvalues satisfy
//! `0 = λ₁ ≤ λ₂ ≤ … ≤ λ_N ≤ 2` with `λ₂ > 0` iff the graph is connected:
//!
//! - exact extreme eigenvalues (`λ₂`, `λ_N`), dense up to [`DENSE_EIG_LIMIT`]
//!   nodes and matrix-free shifted power iteration beyond;
//! - the exact Cheeger constant by exhaustive subset scan (≤ 20 nodes),
//!   Gray-code ordered so volume and boundary update incrementally;
//! - random-walk convergence: distance of `fᵀPˢ` to the degree-proportional
//!   stationary distribution, against the spectral bound
//!   `e^{−sλ′}·√(dmax/dmin)` with `λ′ = λ₂` when `1−λ₂ ≥ λ_N−1`, else
//!   `2−λ_N` (i.e. the slower end of the spectrum decides); the lazy variant
//!   walks on `A + D`, which exactly halves the spectrum;
//! - the mixing-steps estimate `f(λ₂, ε) = (1/λ₂)·ln(√dmax/(ε·√dmin))`, a
//!   degree-diameter upper bound on `λ₂`, and a conductance-based upper
//!   bound on the ε-mixing time `(2/h²)(ln(1/ε) + ln(1/π_*))`.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError};

/// Largest node count for the dense symmetric eigensolver; beyond this the
/// matrix-free iterative path is used.
pub const DENSE_EIG_LIMIT: usize = 4000;

/// Largest node count for the exhaustive Cheeger scan (2^{n−1} subsets).
pub const CHEEGER_MAX_NODES: usize = 20;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("node {0} is isolated; the normalized Laplacian / random walk is undefined")]
    IsolatedNode(usize),
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("graph has {n} nodes; need at least {need}")]
    TooFewNodes { n: usize, need: usize },
    #[error("exhaustive Cheeger scan refused: {n} nodes > {max} (2^{{n-1}} subsets)", max = CHEEGER_MAX_NODES)]
    CheegerTooLarge { n: usize },
    #[error("dense eigensolve refused for {n} nodes (> {max}); use the iterative path", max = DENSE_EIG_LIMIT)]
    TooLargeForDense { n: usize },
    #[error("smallest eigenvalue {0:.3e} deviates from 0 beyond tolerance; eigensolve unreliable")]
    SpuriousLambda1(f64),
    #[error("power iteration did not converge within {iters} iterations (residual {residual:.3e})")]
    NonConvergence { iters: usize, residual: f64 },
    #[error("lambda2 = {0} is not positive (graph disconnected?)")]
    Lambda2NonPositive(f64),
    #[error("epsilon = {0} outside (0, 1)")]
    EpsilonOutOfRange(f64),
    #[error("invalid degree extremes dmin={dmin}, dmax={dmax}")]
    BadDegrees { dmin: usize, dmax: usize },
    #[error("input is not a probability distribution: {0}")]
    BadDistribution(String),
    #[error("diameter {0} < 4; the degree-diameter bound needs diameter ≥ 4")]
    DiameterTooSmall(usize),
    #[error("Cheeger constant {0} is not positive")]
    CheegerNonPositive(f64),
    #[error("stationary minimum {0} outside (0, 1]")]
    BadStationaryMin(f64),
    #[error("walk target depth {target} exceeds tree depth {depth}")]
    WalkTargetTooDeep { target: u32, depth: u32 },
}

fn degrees_checked(g: &Graph) -> Result<Vec<usize>, SpectralError> {
    if g.n() == 0 {
        return Err(SpectralError::EmptyGraph);
    }
    for u in 0..g.n() {
        if g.degree(u) == 0 {
            return Err(SpectralError::IsolatedNode(u));
        }
    }
    Ok((0..g.n()).map(|u| g.degree(u)).collect())
}

/// Symmetric normalized Laplacian `I − D^{−1/2} A D^{−1/2}` as a dense
/// matrix. Errors on isolated nodes.
pub fn normalized_laplacian(g: &Graph) -> Result<DMatrix<f64>, SpectralError> {
    let deg = degrees_checked(g)?;
    let n = g.n();
    let mut m = DMatrix::<f64>::identity(n, n);
    for &(u, v) in g.edges() {
        let w = -1.0 / ((deg[u] as f64) * (deg[v] as f64)).sqrt();
        m[(u, v)] = w;
        m[(v, u)] = w;
    }
    Ok(m)
}

/// Normalized Laplacian of the lazy walk graph: weights `A + D` (a self-loop
/// of weight `d_i` at every node), weighted degrees `2D`. Its spectrum is
/// exactly half the plain spectrum.
pub fn lazy_normalized_laplacian(g: &Graph) -> Result<DMatrix<f64>, SpectralError> {
    let deg = degrees_checked(g)?;
    let n = g.n();
    // Diagonal: 1 − d_i/(2 d_i) = 1/2.
    let mut m = DMatrix::<f64>::from_diagonal_element(n, n, 0.5);
    for &(u, v) in g.edges() {
        let w = -0.5 / ((deg[u] as f64) * (deg[v] as f64)).sqrt();
        m[(u, v)] = w;
        m[(v, u)] = w;
    }
    Ok(m)
}

/// All eigenvalues of the normalized Laplacian, ascending. Dense solve;
/// refuses graphs beyond [`DENSE_EIG_LIMIT`]. The smallest eigenvalue is
/// checked to be 0 within 1e−8.
pub fn full_spectrum(g: &Graph) -> Result<Vec<f64>, SpectralError> {
    if g.n() > DENSE_EIG_LIMIT {
        return Err(SpectralError::TooLargeForDense { n: g.n() });
    }
    let m = normalized_laplacian(g)?;
    let mut vals: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_unstable_by(|a, b| a.total_cmp(b));
    if vals[0].abs() > 1e-8 {
        return Err(SpectralError::SpuriousLambda1(vals[0]));
    }
    Ok(vals)
}

/// The extreme nontrivial eigenvalues of the normalized Laplacian.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpectralExtremes {
    /// Second-smallest eigenvalue (the spectral gap).
    pub lambda2: f64,
    /// Largest eigenvalue.
    pub lambda_n: f64,
}

/// `λ₂` and `λ_N` of the normalized Laplacian. Dense up to
/// [`DENSE_EIG_LIMIT`] nodes, matrix-free power iteration beyond.
pub fn spectral_extremes(g: &Graph) -> Result<SpectralExtremes, SpectralError> {
    if g.n() < 2 {
        return Err(SpectralError::TooFewNodes { n: g.n(), need: 2 });
    }
    if g.n() <= DENSE_EIG_LIMIT {
        let vals = full_spectrum(g)?;
        Ok(SpectralExtremes {
            lambda2: vals[1],
            lambda_n: vals[vals.len() - 1],
        })
    } else {
        iterative_extremes(g, 1e-10, 100_000)
    }
}

/// `y = L x` without forming `L`: `y_i = x_i − Σ_{j∼i} x_j / √(d_i d_j)`.
fn laplacian_matvec(g: &Graph, inv_sqrt_deg: &[f64], x: &[f64], y: &mut [f64]) {
    for i in 0..g.n() {
        let mut acc = 0.0;
        for &j in g.neighbors(i) {
            acc += x[j] * inv_sqrt_deg[j];
        }
        y[i] = x[i] - inv_sqrt_deg[i] * acc;
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    norm
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Matrix-free extreme eigenvalues by shifted power iteration with deflation
/// of the known null vector `D^{1/2}·1`. Intended for graphs too large for
/// the dense path; exposed so it can be validated against the dense solver.
pub fn iterative_extremes(
    g: &Graph,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralExtremes, SpectralError> {
    let deg = degrees_checked(g)?;
    let n = g.n();
    if n < 2 {
        return Err(SpectralError::TooFewNodes { n, need: 2 });
    }
    let inv_sqrt_deg: Vec<f64> = deg.iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    // Known eigenvector for λ₁ = 0.
    let mut v1: Vec<f64> = deg.iter().map(|&d| (d as f64).sqrt()).collect();
    normalize(&mut v1);

    // Deterministic pseudo-random start vector.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    normalize(&mut x);
    let mut y = vec![0.0; n];

    // λ_N: plain power iteration on L (largest eigenvalue in magnitude,
    // since the spectrum lies in [0, 2]).
    let mut lambda_n = 0.0;
    let mut converged = false;
    for _ in 0..max_iter {
        laplacian_matvec(g, &inv_sqrt_deg, &x, &mut y);
        let rho = dot(&x, &y);
        if normalize(&mut y) == 0.0 {
            // L x = 0 exactly; restart from a fresh vector.
            for v in y.iter_mut() {
                *v = rng.random::<f64>() - 0.5;
            }
            normalize(&mut y);
        }
        std::mem::swap(&mut x, &mut y);
        if (rho - lambda_n).abs() <= tol * rho.abs().max(1.0) {
            lambda_n = rho;
            converged = true;
            break;
        }
        lambda_n = rho;
    }
    if !converged {
        return Err(SpectralError::NonConvergence {
            iters: max_iter,
            residual: f64::NAN,
        });
    }

    // λ₂: power iteration on c·I − L (spectrum c − λ_i ≥ 0) with the null
    // direction deflated, converging to c − λ₂.
    let c = lambda_n + 0.1;
    let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let proj = dot(&x, &v1);
    for (xi, vi) in x.iter_mut().zip(&v1) {
        *xi -= proj * vi;
    }
    normalize(&mut x);
    let mut mu = 0.0;
    let mut converged = false;
    for _ in 0..max_iter {
        laplacian_matvec(g, &inv_sqrt_deg, &x, &mut y);
        for i in 0..n {
            y[i] = c * x[i] - y[i];
        }
        let proj = dot(&y, &v1);
        for (yi, vi) in y.iter_mut().zip(&v1) {
            *yi -= proj * vi;
        }
        let rho = dot(&x, &y);
        normalize(&mut y);
        std::mem::swap(&mut x, &mut y);
        if (rho - mu).abs() <= tol * rho.abs().max(1.0) {
            mu = rho;
            converged = true;
            break;
        }
        mu = rho;
    }
    if !converged {
        return Err(SpectralError::NonConvergence {
            iters: max_iter,
            residual: f64::NAN,
        });
    }
    Ok(SpectralExtremes {
        lambda2: c - mu,
        lambda_n,
    })
}

/// Decay rate of the walk: `λ₂` if `1 − λ₂ ≥ λ_N − 1`, otherwise `2 − λ_N`
/// (equivalently `min(λ₂, 2 − λ_N)` — whichever end of the spectrum leaves
/// the larger eigenvalue magnitude in the walk operator).
pub fn lambda_prime(lambda2: f64, lambda_n: f64) -> f64 {
    if 1.0 - lambda2 >= lambda_n - 1.0 {
        lambda2
    } else {
        2.0 - lambda_n
    }
}

/// Result of the exhaustive Cheeger scan.
#[derive(Clone, Debug, Serialize)]
pub struct CheegerResult {
    /// `min_S |∂S| / min(vol S, vol S̄)` over all nonempty proper subsets.
    pub h: f64,
    /// A minimizing subset, sorted ascending (always contains node 0).
    pub witness: Vec<usize>,
    pub method: String,
}

/// Scans Gray-code indices `[start, end)` over subsets of nodes `1..n`
/// (node 0 is always inside S), maintaining volume and boundary
/// incrementally: consecutive Gray codes differ in one node, so each step
/// is O(deg). Returns the best `(h, gray)` in the range.
fn cheeger_scan_range(g: &Graph, vol_total: u64, start: u64, end: u64) -> (f64, u64) {
    let full: u64 = (1u64 << (g.n() - 1)) - 1;
    let in_s = |gray: u64, u: usize| u == 0 || (gray >> (u - 1)) & 1 == 1;

    let mut gray = start ^ (start >> 1);
    // Build the state for the first subset from scratch.
    let mut vol_s: u64 = g.degree(0) as u64;
    for b in 0..g.n() - 1 {
        if (gray >> b) & 1 == 1 {
            vol_s += g.degree(b + 1) as u64;
        }
    }
    let mut boundary: u64 = g
        .edges()
        .iter()
        .filter(|&&(u, v)| in_s(gray, u) != in_s(gray, v))
        .count() as u64;

    let mut best = (f64::INFINITY, u64::MAX);
    for idx in start..end {
        if idx > start {
            let t = idx.trailing_zeros() as usize;
            let v = t + 1;
            gray ^= 1u64 << t;
            let joining = (gray >> t) & 1 == 1;
            // Neighbors of v currently in S (v's own membership is irrelevant
            // since the graph is simple).
            let k = g
                .neighbors(v)
                .iter()
                .filter(|&&u| in_s(gray ^ (1u64 << t), u))
                .count() as u64;
            let d = g.degree(v) as u64;
            if joining {
                vol_s += d;
                boundary = boundary + d - 2 * k;
            } else {
                vol_s -= d;
                boundary = boundary + 2 * k - d;
            }
        }
        if gray == full {
            continue; // S = V is not a proper subset
        }
        let min_vol = vol_s.min(vol_total - vol_s);
        // boundary > 0 forces min_vol > 0; boundary == 0 means a perfect cut
        // (disconnected graph), where h(S) = 0 by convention.
        let h = if boundary == 0 {
            0.0
        } else {
            boundary as f64 / min_vol as f64
        };
        if h < best.0 || (h == best.0 && gray < best.1) {
            best = (h, gray);
        }
    }
    best
}

fn cheeger_check(g: &Graph) -> Result<(), SpectralError> {
    if g.n() < 2 {
        return Err(SpectralError::TooFewNodes { n: g.n(), need: 2 });
    }
    if g.n() > CHEEGER_MAX_NODES {
        return Err(SpectralError::CheegerTooLarge { n: g.n() });
    }
    Ok(())
}

fn cheeger_finish(g: &Graph, best: (f64, u64)) -> CheegerResult {
    let mut witness = vec![0usize];
    for b in 0..g.n() - 1 {
        if (best.1 >> b) & 1 == 1 {
            witness.push(b + 1);
        }
    }
    CheegerResult {
        h: best.0,
        witness,
        method: "exhaustive".to_string(),
    }
}

/// Exact Cheeger constant by exhaustive subset enumeration, sequential scan.
pub fn cheeger_constant_exact_seq(g: &Graph) -> Result<CheegerResult, SpectralError> {
    cheeger_check(g)?;
    let total = 1u64 << (g.n() - 1);
    let best = cheeger_scan_range(g, g.volume() as u64, 0, total);
    Ok(cheeger_finish(g, best))
}

/// Exact Cheeger constant `h = min_S |∂S| / min(vol S, vol S̄)` by exhaustive
/// enumeration of the 2^{n−1} subsets containing node 0. Refuses graphs with
/// more than [`CHEEGER_MAX_NODES`] nodes. `h = 0` iff the graph is
/// disconnected. With the `parallel` feature the index range is scanned in
/// chunks; the reduction is a total-order min, so the result (including the
/// witness) is independent of chunking.
#[cfg(feature = "parallel")]
pub fn cheeger_constant_exact(g: &Graph) -> Result<CheegerResult, SpectralError> {
    use rayon::prelude::*;
    cheeger_check(g)?;
    let total = 1u64 << (g.n() - 1);
    let chunks = (rayon::current_num_threads() as u64 * 8).min(total).max(1);
    let chunk = total.div_ceil(chunks);
    let vol_total = g.volume() as u64;
    let best = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let start = i * chunk;
            let end = ((i + 1) * chunk).min(total);
            cheeger_scan_range(g, vol_total, start, end)
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| {
                if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(cheeger_finish(g, best))
}

#[cfg(not(feature = "parallel"))]
pub fn cheeger_constant_exact(g: &Graph) -> Result<CheegerResult, SpectralError> {
    cheeger_constant_exact_seq(g)
}

/// Two-sided Cheeger bounds on `h` from the spectral gap:
/// `λ₂/2 ≤ h ≤ √(2 λ₂)`.
pub fn cheeger_bounds(lambda2: f64) -> Result<(f64, f64), SpectralError> {
    if lambda2 < 0.0 || lambda2.is_nan() {
        return Err(SpectralError::Lambda2NonPositive(lambda2));
    }
    Ok((lambda2 / 2.0, (2.0 * lambda2).sqrt()))
}

/// Degree-proportional stationary distribution `π_i = d_i / vol(G)`.
pub fn stationary_distribution(g: &Graph) -> Result<Vec<f64>, SpectralError> {
    let deg = degrees_checked(g)?;
    let vol = g.volume() as f64;
    Ok(deg.iter().map(|&d| d as f64 / vol).collect())
}

/// One step of the simple random walk from the left: returns `fᵀP` where
/// `P = D^{−1}A`, i.e. `out_j = Σ_{u∼j} f_u / d_u`.
pub fn walk_step(g: &Graph, f: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; g.n()];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for &u in g.neighbors(j) {
            acc += f[u] / g.degree(u) as f64;
        }
        *slot = acc;
    }
    out
}

/// One lazy step: `fᵀP_lazy` with `P_lazy = (I + D^{−1}A)/2`.
pub fn lazy_walk_step(g: &Graph, f: &[f64]) -> Vec<f64> {
    let step = walk_step(g, f);
    f.iter().zip(step).map(|(a, b)| 0.5 * a + 0.5 * b).collect()
}

/// Distance of a walked distribution from stationarity, with its spectral
/// bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WalkConvergence {
    pub steps: usize,
    pub lazy: bool,
    /// ℓ₂ distance `‖fᵀPˢ − π‖`.
    pub distance: f64,
    /// `e^{−sλ′}·√(dmax/dmin)`.
    pub bound: f64,
    pub lambda_prime: f64,
    /// Set when `lazy = false` on a bipartite graph: there `λ_N = 2`, so
    /// `λ′ = 0` and the bound never decays (the plain walk is periodic).
    pub bipartite_caveat: bool,
}

fn check_distribution(g: &Graph, f: &[f64]) -> Result<(), SpectralError> {
    if f.len() != g.n() {
        return Err(SpectralError::BadDistribution(format!(
            "length {} does not match {} nodes",
            f.len(),
            g.n()
        )));
    }
    if f.iter().any(|&x| x < 0.0 || x.is_nan()) {
        return Err(SpectralError::BadDistribution(
            "negative or NaN mass".to_string(),
        ));
    }
    let sum: f64 = f.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(SpectralError::BadDistribution(format!(
            "mass sums to {sum}, expected 1"
        )));
    }
    Ok(())
}

/// Walks `f` for `steps` steps (plain or lazy) and reports the ℓ₂ distance
/// to the stationary distribution together with the spectral bound
/// `e^{−sλ′}·√(dmax/dmin)`. For the lazy walk the spectrum is halved, so
/// `λ′` is computed from `λ₂/2` and `λ_N/2` (and the bound always decays on
/// connected graphs).
pub fn walk_convergence(
    g: &Graph,
    f0: &[f64],
    steps: usize,
    lazy: bool,
) -> Result<WalkConvergence, SpectralError> {
    check_distribution(g, f0)?;
    let pi = stationary_distribution(g)?;
    let ext = spectral_extremes(g)?;
    let lp = if lazy {
        lambda_prime(ext.lambda2 / 2.0, ext.lambda_n / 2.0)
    } else {
        lambda_prime(ext.lambda2, ext.lambda_n)
    };
    let mut f = f0.to_vec();
    for _ in 0..steps {
        f = if lazy {
            lazy_walk_step(g, &f)
        } else {
            walk_step(g, &f)
        };
    }
    let distance = f
        .iter()
        .zip(&pi)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let (dmin, dmax) = g.degree_extremes().ok_or(SpectralError::EmptyGraph)?;
    let bound = (-(steps as f64) * lp).exp() * ((dmax as f64) / (dmin as f64)).sqrt();
    Ok(WalkConvergence {
        steps,
        lazy,
        distance,
        bound,
        lambda_prime: lp,
        bipartite_caveat: !lazy && g.is_bipartite(),
    })
}

/// Mixing-steps estimate `f(λ₂, ε) = (1/λ₂)·ln(√dmax / (ε·√dmin))`: the
/// number of walk steps after which the spectral convergence bound drops
/// below ε, used as a proxy for how many propagation layers a graph supports
/// before embeddings wash out.
pub fn mixing_steps(
    lambda2: f64,
    epsilon: f64,
    dmax: usize,
    dmin: usize,
) -> Result<f64, SpectralError> {
    if !(lambda2 > 0.0) {
        return Err(SpectralError::Lambda2NonPositive(lambda2));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(SpectralError::EpsilonOutOfRange(epsilon));
    }
    if dmin == 0 || dmax < dmin {
        return Err(SpectralError::BadDegrees { dmin, dmax });
    }
    let ratio = (dmax as f64 / dmin as f64).sqrt();
    Ok((ratio / epsilon).ln() / lambda2)
}

/// Degree-diameter upper bound on the spectral gap, valid for diameter
/// `Di ≥ 4`: `λ₂ ≤ 1 − 2·(√(dmax−1)/dmax)·(1 − 2/Di) + 2/Di`.
pub fn lambda2_diameter_bound(g: &Graph) -> Result<f64, SpectralError> {
    let di = g.diameter()?;
    if di < 4 {
        return Err(SpectralError::DiameterTooSmall(di));
    }
    let (_, dmax) = g.degree_extremes().ok_or(SpectralError::EmptyGraph)?;
    let d = dmax as f64;
    let di = di as f64;
    Ok(1.0 - 2.0 * ((d - 1.0).sqrt() / d) * (1.0 - 2.0 / di) + 2.0 / di)
}

/// Consistency check tying the Cheeger constant to the mixing-steps
/// estimate: with `s = f(λ₂, ε)`, the rate `(1/s)·ln(√dmax/(ε√dmin))`
/// recovers `λ₂`, which the Cheeger inequality caps at `2h`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MixingRateCheck {
    /// Mixing-steps estimate `s = f(λ₂, ε)`.
    pub steps: f64,
    /// `(1/s)·ln(√dmax/(ε√dmin))`, numerically `λ₂`.
    pub rate: f64,
    /// `2·h` from the exhaustive Cheeger scan.
    pub twice_cheeger: f64,
    /// `twice_cheeger ≥ rate − 1e−9`.
    pub holds: bool,
}

/// Runs the Cheeger/mixing-rate consistency check (exact `h`, so the graph
/// must be within the exhaustive-scan limit and connected).
pub fn mixing_rate_cheeger_check(
    g: &Graph,
    epsilon: f64,
) -> Result<MixingRateCheck, SpectralError> {
    let ext = spectral_extremes(g)?;
    let (dmin, dmax) = g.degree_extremes().ok_or(SpectralError::EmptyGraph)?;
    let steps = mixing_steps(ext.lambda2, epsilon, dmax, dmin)?;
    let rate = ((dmax as f64 / dmin as f64).sqrt() / epsilon).ln() / steps;
    let h = cheeger_constant_exact(g)?.h;
    let twice_cheeger = 2.0 * h;
    Ok(MixingRateCheck {
        steps,
        rate,
        twice_cheeger,
        holds: twice_cheeger >= rate - 1e-9,
    })
}

/// Conductance-based upper bound on the ε-mixing time of an ergodic
/// reversible chain: `τ(ε) ≤ (2/h²)·(ln(1/ε) + ln(1/π_*))` where `π_*` is
/// the smallest stationary mass.
pub fn mixing_time_upper_bound(
    h: f64,
    pi_min: f64,
    epsilon: f64,
) -> Result<f64, SpectralError> {
    if !(h > 0.0) {
        return Err(SpectralError::CheegerNonPositive(h));
    }
    if !(pi_min > 0.0 && pi_min <= 1.0) {
        return Err(SpectralError::BadStationaryMin(pi_min));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(SpectralError::EpsilonOutOfRange(epsilon));
    }
    Ok(2.0 / (h * h) * ((1.0 / epsilon).ln() + (1.0 / pi_min).ln()))
}

/// Probability that a plain random walk started at the root of a complete
/// binary tree of the given depth sits at the leftmost depth-(r+1) node
/// after exactly r+1 steps. Along the unique shortest path the root forks
/// into 2 children and every deeper internal node into 3 neighbors, so the
/// value is exactly `2^{−1}·3^{−r}`.
pub fn binary_tree_decay(depth: u32, r: u32) -> Result<f64, SpectralError> {
    if r + 1 > depth {
        return Err(SpectralError::WalkTargetTooDeep {
            target: r + 1,
            depth,
        });
    }
    let tree = crate::data::gen_binary_tree(depth);
    let mut f = vec![0.0; tree.n()];
    f[0] = 1.0;
    for _ in 0..=r {
        f = walk_step(&tree, &f);
    }
    let target = (1usize << (r + 1)) - 1; // leftmost node at depth r+1
    Ok(f[target])
}

/// Flat spectral summary of one graph.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpectralReport {
    /// Spectral gap of the (plain) normalized Laplacian.
    pub lambda2: f64,
    /// Largest eigenvalue of the (plain) normalized Laplacian.
    #[serde(rename = "lambdaN")]
    pub lambda_n: f64,
    /// Walk decay rate; computed from the halved spectrum when `lazy`.
    pub lambda_prime: f64,
    /// Cheeger lower bound `λ₂/2` (plain spectrum).
    pub cheeger_lower: f64,
    /// Cheeger upper bound `√(2λ₂)` (plain spectrum).
    pub cheeger_upper: f64,
    /// `f(λ₂, ε)`; uses `λ₂/2` when `lazy`.
    pub mixing_steps: f64,
    pub epsilon: f64,
    pub dmax: usize,
    pub dmin: usize,
    /// Whether the walk quantities (`lambda_prime`, `mixing_steps`) refer to
    /// the lazy walk.
    pub lazy: bool,
}

/// Assembles the spectral report for a connected graph.
pub fn spectral_report(
    g: &Graph,
    epsilon: f64,
    lazy: bool,
) -> Result<SpectralReport, SpectralError> {
    let ext = spectral_extremes(g)?;
    let (dmin, dmax) = g.degree_extremes().ok_or(SpectralError::EmptyGraph)?;
    let (l2w, lnw) = if lazy {
        (ext.lambda2 / 2.0, ext.lambda_n / 2.0)
    } else {
        (ext.lambda2, ext.lambda_n)
    };
    let (cheeger_lower, cheeger_upper) = cheeger_bounds(ext.lambda2)?;
    Ok(SpectralReport {
        lambda2: ext.lambda2,
        lambda_n: ext.lambda_n,
        lambda_prime: lambda_prime(l2w, lnw),
        cheeger_lower,
        cheeger_upper,
        mixing_steps: mixing_steps(l2w, epsilon, dmax, dmin)?,
        epsilon,
        dmax,
        dmin,
        lazy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{
        gen_binary_tree, gen_bridged_triangles, gen_complete, gen_cycle, gen_erdos_renyi,
        gen_path, gen_star,
    };
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_connected(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let g = gen_erdos_renyi(n, p, &mut rng).unwrap();
            if g.is_connected() && g.n() >= 2 {
                return g;
            }
        }
    }

    #[test]
    fn laplacian_entries_and_errors() {
        let p3 = gen_path(3);
        let m = normalized_laplacian(&p3).unwrap();
        assert_abs_diff_eq!(m[(0, 0)], 1.0);
        assert_abs_diff_eq!(m[(0, 1)], -1.0 / 2.0_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 2)], 0.0);

        let lonely = Graph::from_edge_list(3, &[(0, 1)]).unwrap();
        assert!(matches!(
            normalized_laplacian(&lonely),
            Err(SpectralError::IsolatedNode(2))
        ));
    }

    #[test]
    fn closed_form_spectra() {
        // K_n: eigenvalues {0, n/(n−1) with multiplicity n−1}.
        let vals = full_spectrum(&gen_complete(4)).unwrap();
        assert_abs_diff_eq!(vals[0], 0.0, epsilon = 1e-10);
        for &v in &vals[1..] {
            assert_abs_diff_eq!(v, 4.0 / 3.0, epsilon = 1e-10);
        }
        // C4: {0, 1, 1, 2}.
        let vals = full_spectrum(&gen_cycle(4)).unwrap();
        let expect = [0.0, 1.0, 1.0, 2.0];
        for (v, e) in vals.iter().zip(expect) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-10);
        }
        // P5: 1 − cos(kπ/4), k = 0..4.
        let vals = full_spectrum(&gen_path(5)).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let e = 1.0 - (k as f64 * std::f64::consts::PI / 4.0).cos();
            assert_abs_diff_eq!(*v, e, epsilon = 1e-10);
        }
        // Star: {0, 1 ×(k−1), 2}.
        let vals = full_spectrum(&gen_star(5)).unwrap();
        assert_abs_diff_eq!(vals[0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(vals[5], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn spectrum_respects_global_bounds() {
        for seed in 0..10 {
            let g = random_connected(12, 0.3, seed);
            let vals = full_spectrum(&g).unwrap();
            let ext = spectral_extremes(&g).unwrap();
            assert_abs_diff_eq!(ext.lambda2, vals[1], epsilon = 1e-12);
            assert_abs_diff_eq!(ext.lambda_n, vals[11], epsilon = 1e-12);
            assert!(ext.lambda2 > 0.0);
            assert!(ext.lambda2 <= ext.lambda_n);
            assert!(ext.lambda_n <= 2.0 + 1e-10);
        }
        // Disconnected graph: λ₂ ≈ 0.
        let two = Graph::from_edge_list(4, &[(0, 1), (2, 3)]).unwrap();
        let ext = spectral_extremes(&two).unwrap();
        assert_abs_diff_eq!(ext.lambda2, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn lazy_spectrum_is_exactly_halved() {
        for seed in 0..5 {
            let g = random_connected(10, 0.35, seed);
            let plain = normalized_laplacian(&g).unwrap();
            let lazy = lazy_normalized_laplacian(&g).unwrap();
            let mut pv: Vec<f64> = plain.symmetric_eigen().eigenvalues.iter().copied().collect();
            let mut lv: Vec<f64> = lazy.symmetric_eigen().eigenvalues.iter().copied().collect();
            pv.sort_unstable_by(|a, b| a.total_cmp(b));
            lv.sort_unstable_by(|a, b| a.total_cmp(b));
            for (p, l) in pv.iter().zip(&lv) {
                assert_abs_diff_eq!(p / 2.0, *l, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn iterative_extremes_match_dense() {
        let g = random_connected(120, 0.08, 42);
        let dense = spectral_extremes(&g).unwrap();
        let iter = iterative_extremes(&g, 1e-12, 200_000).unwrap();
        assert_abs_diff_eq!(dense.lambda2, iter.lambda2, epsilon = 1e-7);
        assert_abs_diff_eq!(dense.lambda_n, iter.lambda_n, epsilon = 1e-7);
    }

    /// Independent oracle: per-subset recomputation from scratch.
    fn naive_cheeger(g: &Graph) -> f64 {
        let n = g.n();
        let vol_total: u64 = g.volume() as u64;
        let mut best = f64::INFINITY;
        for mask in 0..(1u64 << (n - 1)) - 1 {
            let in_s = |u: usize| u == 0 || (mask >> (u - 1)) & 1 == 1;
            let vol_s: u64 = (0..n).filter(|&u| in_s(u)).map(|u| g.degree(u) as u64).sum();
            let boundary = g
                .edges()
                .iter()
                .filter(|&&(u, v)| in_s(u) != in_s(v))
                .count() as u64;
            let h = if boundary == 0 {
                0.0
            } else {
                boundary as f64 / vol_s.min(vol_total - vol_s) as f64
            };
            best = best.min(h);
        }
        best
    }

    #[test]
    fn cheeger_known_values() {
        let k4 = cheeger_constant_exact(&gen_complete(4)).unwrap();
        assert_abs_diff_eq!(k4.h, 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(k4.witness.len(), 2);
        assert_eq!(k4.method, "exhaustive");

        let c4 = cheeger_constant_exact(&gen_cycle(4)).unwrap();
        assert_abs_diff_eq!(c4.h, 0.5, epsilon = 1e-15);

        // Bridged triangles: the bottleneck cut is one triangle, |∂S| = 1,
        // vol(S) = 7.
        let bt = cheeger_constant_exact(&gen_bridged_triangles()).unwrap();
        assert_abs_diff_eq!(bt.h, 1.0 / 7.0, epsilon = 1e-15);
        assert_eq!(bt.witness, vec![0, 1, 2]);

        let p4 = cheeger_constant_exact(&gen_path(4)).unwrap();
        assert_abs_diff_eq!(p4.h, 1.0 / 3.0, epsilon = 1e-15);

        let k2 = cheeger_constant_exact(&gen_complete(2)).unwrap();
        assert_abs_diff_eq!(k2.h, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cheeger_matches_naive_oracle_and_seq() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = gen_erdos_renyi(8, 0.35, &mut rng).unwrap();
            if g.num_edges() == 0 {
                continue;
            }
            let fast = cheeger_constant_exact(&g).unwrap();
            let seq = cheeger_constant_exact_seq(&g).unwrap();
            let naive = naive_cheeger(&g);
            assert_abs_diff_eq!(fast.h, naive, epsilon = 1e-12);
            assert_eq!(fast.h.to_bits(), seq.h.to_bits());
            assert_eq!(fast.witness, seq.witness);
            // The witness must reproduce the reported quotient.
            let in_s = |u: usize| fast.witness.contains(&u);
            let vol_s: u64 = fast.witness.iter().map(|&u| g.degree(u) as u64).sum();
            let boundary = g
                .edges()
                .iter()
                .filter(|&&(u, v)| in_s(u) != in_s(v))
                .count() as u64;
            let h = if boundary == 0 {
                0.0
            } else {
                boundary as f64 / vol_s.min(g.volume() as u64 - vol_s) as f64
            };
            assert_abs_diff_eq!(fast.h, h, epsilon = 1e-12);
        }
    }

    #[test]
    fn cheeger_zero_iff_disconnected() {
        let two = Graph::from_edge_list(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        let res = cheeger_constant_exact(&two).unwrap();
        assert_eq!(res.h, 0.0);
        for seed in 0..10 {
            let g = random_connected(9, 0.3, 100 + seed);
            assert!(cheeger_constant_exact(&g).unwrap().h > 0.0);
        }
    }

    #[test]
    fn cheeger_refusals() {
        let big = gen_path(21);
        assert!(matches!(
            cheeger_constant_exact(&big),
            Err(SpectralError::CheegerTooLarge { n: 21 })
        ));
        let tiny = Graph::from_edge_list(1, &[]).unwrap();
        assert!(matches!(
            cheeger_constant_exact(&tiny),
            Err(SpectralError::TooFewNodes { n: 1, need: 2 })
        ));
    }

    #[test]
    fn cheeger_inequality_on_random_graphs() {
        for seed in 0..30 {
            let g = random_connected(9, 0.35, 200 + seed);
            let h = cheeger_constant_exact(&g).unwrap().h;
            let l2 = spectral_extremes(&g).unwrap().lambda2;
            let (lo, hi) = cheeger_bounds(l2).unwrap();
            assert!(
                lo <= h + 1e-9 && h <= hi + 1e-9,
                "h={h} outside [{lo}, {hi}] (seed {seed})"
            );
        }
    }

    #[test]
    fn walk_step_matches_matrix_power_oracle() {
        let g = random_connected(11, 0.35, 7);
        let n = g.n();
        let mut p = DMatrix::<f64>::zeros(n, n);
        for u in 0..n {
            for &v in g.neighbors(u) {
                p[(u, v)] = 1.0 / g.degree(u) as f64;
            }
        }
        let mut f_row = DMatrix::<f64>::zeros(1, n);
        f_row[(0, 3)] = 1.0;
        let mut f = vec![0.0; n];
        f[3] = 1.0;
        for _ in 0..6 {
            f_row *= &p;
            f = walk_step(&g, &f);
        }
        for j in 0..n {
            assert_abs_diff_eq!(f[j], f_row[(0, j)], epsilon = 1e-14);
        }
        // Mass is conserved.
        assert_abs_diff_eq!(f.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn stationary_distribution_is_walk_fixed_point() {
        let g = random_connected(10, 0.4, 21);
        let pi = stationary_distribution(&g).unwrap();
        assert_abs_diff_eq!(pi.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        let stepped = walk_step(&g, &pi);
        for (a, b) in pi.iter().zip(&stepped) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        let lazy = lazy_walk_step(&g, &pi);
        for (a, b) in pi.iter().zip(&lazy) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn walk_convergence_k4_worked_example() {
        // Point mass on node 0 of K4, one step: distance √(1/12); the rate is
        // λ′ = 2 − λ_N = 2/3 (1 − λ₂ = −1/3 < λ_N − 1 = 1/3), bound e^{−2/3}.
        let k4 = gen_complete(4);
        let mut f0 = vec![0.0; 4];
        f0[0] = 1.0;
        let wc = walk_convergence(&k4, &f0, 1, false).unwrap();
        assert_abs_diff_eq!(wc.distance, (1.0f64 / 12.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(wc.lambda_prime, 2.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(wc.bound, (-2.0f64 / 3.0).exp(), epsilon = 1e-10);
        assert!(wc.distance <= wc.bound);
        assert!(!wc.bipartite_caveat);
    }

    #[test]
    fn walk_convergence_flags_bipartite_and_validates_input() {
        let c4 = gen_cycle(4);
        let f0 = vec![1.0, 0.0, 0.0, 0.0];
        let wc = walk_convergence(&c4, &f0, 3, false).unwrap();
        assert!(wc.bipartite_caveat);
        assert_abs_diff_eq!(wc.lambda_prime, 0.0, epsilon = 1e-10);
        // Lazy walk on the same graph becomes aperiodic: λ′ = λ₂/2 > 0.
        let wc = walk_convergence(&c4, &f0, 3, true).unwrap();
        assert!(!wc.bipartite_caveat);
        assert_abs_diff_eq!(wc.lambda_prime, 0.5, epsilon = 1e-10);

        assert!(matches!(
            walk_convergence(&c4, &[0.5, 0.5], 1, false),
            Err(SpectralError::BadDistribution(_))
        ));
        assert!(matches!(
            walk_convergence(&c4, &[0.9, 0.0, 0.0, 0.0], 1, false),
            Err(SpectralError::BadDistribution(_))
        ));
        assert!(matches!(
            walk_convergence(&c4, &[-0.5, 1.5, 0.0, 0.0], 1, false),
            Err(SpectralError::BadDistribution(_))
        ));
    }

    #[test]
    fn mixing_steps_k4_worked_example() {
        let l2 = spectral_extremes(&gen_complete(4)).unwrap().lambda2;
        let f = mixing_steps(l2, 5e-4, 3, 3).unwrap();
        // (1/λ₂)·ln(1/ε) with λ₂ = 4/3 and equal degrees: 0.75·ln(2000).
        assert_abs_diff_eq!(f, 0.75 * 2000.0f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn mixing_steps_errors() {
        assert!(matches!(
            mixing_steps(0.0, 1e-3, 3, 3),
            Err(SpectralError::Lambda2NonPositive(_))
        ));
        assert!(matches!(
            mixing_steps(1.0, 1.0, 3, 3),
            Err(SpectralError::EpsilonOutOfRange(_))
        ));
        assert!(matches!(
            mixing_steps(1.0, 0.0, 3, 3),
            Err(SpectralError::EpsilonOutOfRange(_))
        ));
        assert!(matches!(
            mixing_steps(1.0, 1e-3, 2, 3),
            Err(SpectralError::BadDegrees { dmin: 3, dmax: 2 })
        ));
    }

    #[test]
    fn diameter_bound_closed_forms() {
        // P5: dmax = 2, Di = 4 → 1 − 2·(1/2)·(1/2) + 1/2 = 1.
        assert_abs_diff_eq!(lambda2_diameter_bound(&gen_path(5)).unwrap(), 1.0, epsilon = 1e-12);
        // P9: Di = 8 → 1 − 2·(1/2)·(3/4) + 1/4 = 0.5.
        assert_abs_diff_eq!(lambda2_diameter_bound(&gen_path(9)).unwrap(), 0.5, epsilon = 1e-12);
        // The bound really caps λ₂.
        let l2 = spectral_extremes(&gen_path(5)).unwrap().lambda2;
        assert!(l2 <= 1.0);
        assert_abs_diff_eq!(l2, 1.0 - std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-10);

        assert!(matches!(
            lambda2_diameter_bound(&gen_complete(4)),
            Err(SpectralError::DiameterTooSmall(1))
        ));
    }

    #[test]
    fn mixing_rate_check_equality_witnesses() {
        // K4: 2h = 4/3 = λ₂ exactly.
        let check = mixing_rate_cheeger_check(&gen_complete(4), 5e-4).unwrap();
        assert!(check.holds);
        assert_abs_diff_eq!(check.twice_cheeger, check.rate, epsilon = 1e-10);
        assert_abs_diff_eq!(check.twice_cheeger, 4.0 / 3.0, epsilon = 1e-12);
        // C4: 2h = 1 = λ₂ exactly.
        let check = mixing_rate_cheeger_check(&gen_cycle(4), 5e-4).unwrap();
        assert!(check.holds);
        assert_abs_diff_eq!(check.twice_cheeger, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(check.rate, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn mixing_time_bound_k4_worked_example() {
        // h = 2/3, π_* = 1/4, ε = 5e−4 → 4.5·(ln 2000 + ln 4) ≈ 40.44.
        let h = cheeger_constant_exact(&gen_complete(4)).unwrap().h;
        let bound = mixing_time_upper_bound(h, 0.25, 5e-4).unwrap();
        assert_abs_diff_eq!(
            bound,
            4.5 * (2000.0f64.ln() + 4.0f64.ln()),
            epsilon = 1e-9
        );
        assert!(matches!(
            mixing_time_upper_bound(0.0, 0.25, 5e-4),
            Err(SpectralError::CheegerNonPositive(_))
        ));
        assert!(matches!(
            mixing_time_upper_bound(0.5, 0.0, 5e-4),
            Err(SpectralError::BadStationaryMin(_))
        ));
    }

    #[test]
    fn binary_tree_decay_closed_form() {
        for r in 0..=6u32 {
            let p = binary_tree_decay(7, r).unwrap();
            let expect = 0.5 * 3.0f64.powi(-(r as i32));
            assert_abs_diff_eq!(p, expect, epsilon = 1e-12);
        }
        assert!(matches!(
            binary_tree_decay(3, 3),
            Err(SpectralError::WalkTargetTooDeep { target: 4, depth: 3 })
        ));
    }

    #[test]
    fn binary_tree_decay_matches_matrix_power_oracle() {
        let depth = 4u32;
        let r = 2u32;
        let tree = gen_binary_tree(depth);
        let n = tree.n();
        let mut p = DMatrix::<f64>::zeros(n, n);
        for u in 0..n {
            for &v in tree.neighbors(u) {
                p[(u, v)] = 1.0 / tree.degree(u) as f64;
            }
        }
        let mut power = DMatrix::<f64>::identity(n, n);
        for _ in 0..=r {
            power *= &p;
        }
        let target = (1usize << (r + 1)) - 1;
        let direct = binary_tree_decay(depth, r).unwrap();
        assert_abs_diff_eq!(direct, power[(0, target)], epsilon = 1e-14);
    }

    #[test]
    fn spectral_report_fields_and_json() {
        let g = gen_complete(4);
        let rep = spectral_report(&g, 5e-4, false).unwrap();
        assert!(rep.lambda2 > 0.0 && rep.lambda2 <= rep.lambda_n && rep.lambda_n <= 2.0 + 1e-10);
        assert!(rep.mixing_steps > 0.0);
        assert_abs_diff_eq!(rep.cheeger_lower, rep.lambda2 / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.cheeger_upper, (2.0 * rep.lambda2).sqrt(), epsilon = 1e-12);

        let json = serde_json::to_value(&rep).unwrap();
        for key in [
            "lambda2",
            "lambdaN",
            "lambda_prime",
            "cheeger_lower",
            "cheeger_upper",
            "mixing_steps",
            "epsilon",
            "dmax",
            "dmin",
            "lazy",
        ] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }

        // Lazy report halves the walk quantities.
        let lazy = spectral_report(&g, 5e-4, true).unwrap();
        assert_abs_diff_eq!(lazy.lambda2, rep.lambda2, epsilon = 1e-15);
        assert_abs_diff_eq!(lazy.mixing_steps, 2.0 * rep.mixing_steps, epsilon = 1e-9);
        assert_abs_diff_eq!(lazy.lambda_prime, rep.lambda2 / 2.0, epsilon = 1e-10);
    }
}
