//! Curvature-guided graph rewiring toolkit.
//!
//! The crate provides the building blocks for studying and manipulating the
//! message-passing structure of a graph:
//!
//! - [`graph`]: immutable simple undirected graphs with canonical edge
//!   indexing, plus cheap drop/add edit views.
//! - [`spectral`]: normalized-Laplacian diagnostics — spectral gap, exact
//!   Cheeger constant for small graphs, random-walk convergence and
//!   mixing-step estimates.
//! - [`curvature`]: Jost–Liu curvature (JLC), Balanced Forman curvature
//!   (BFC), and an exact Ollivier–Ricci reference implementation backed by
//!   min-cost-flow optimal transport.
//! - [`rewiring`]: the stochastic curvature-guided rewiring pipeline — a
//!   precomputed bank of candidate edges that close triangles around the most
//!   negatively curved edges, improvement scores, and Gumbel top-k sampling
//!   of per-epoch drop/add edits.
//! - [`sgc`]: a minimal simple-graph-convolution classifier (K propagation
//!   steps + one linear softmax layer) trained with full-batch Adam, whose
//!   training loop can consume rewired views while evaluation always runs on
//!   the untouched graph.
//! - [`data`]: seeded generators (SBM, Erdős–Rényi, trees, …), dataset
//!   loading, homophily, and train/val/test splits.
//!
//! All randomized entry points take an explicit RNG so that every result is
//! reproducible from a seed. With the default `parallel` feature the
//! per-edge/per-subset hot loops run on rayon; outputs are identical to the
//! sequential fallback.

pub mod curvature;
pub mod data;
pub mod graph;
pub mod rewiring;
pub mod sgc;
pub mod spectral;

/// Formats a float with 17 significant digits (scientific notation), enough
/// to round-trip any `f64` exactly. Used for every float that lands in a CSV
/// or JSON artifact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
