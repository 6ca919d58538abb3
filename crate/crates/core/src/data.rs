//! Seeded graph/dataset generators, dataset loading, splits, and homophily.
//!
//! Every generator takes an explicit RNG and draws in a fixed node-pair order,
//! so a seed pins the output exactly. Deterministic structural generators
//! (paths, cycles, cliques, stars, complete binary trees, the bridged-triangle
//! fixture) double as test anchors with known spectra and curvatures.

use std::path::Path;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum DataError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("could not read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("probability {name}={value} outside [0, 1]")]
    BadProbability { name: &'static str, value: f64 },
    #[error("labels are not contiguous: class {missing} is empty but larger labels exist")]
    LabelGap { missing: usize },
    #[error("{what} has {got} rows but the dataset has {expected} nodes")]
    RowCountMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("class {class} has {count} nodes, fewer than the {need} required per class")]
    ClassTooSmall {
        class: usize,
        count: usize,
        need: usize,
    },
    #[error("split fractions train={train} + val={val} exceed 1")]
    BadFractions { train: f64, val: f64 },
    #[error("feature dimension {dim} is smaller than the number of classes {classes}")]
    FeatureDimTooSmall { dim: usize, classes: usize },
    #[error("empty block sizes")]
    EmptyBlocks,
    #[error("graph has no edges at any node; homophily is undefined")]
    AllIsolated,
    #[error("labels length {got} does not match node count {expected}")]
    LabelLengthMismatch { got: usize, expected: usize },
}

/// A node-classification dataset: graph, dense features, integer labels.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub graph: Graph,
    /// `n × d` feature matrix.
    pub features: Array2<f64>,
    /// One label per node, contiguous in `0..num_classes`.
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn num_classes(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m + 1)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let n = self.graph.n();
        if self.labels.len() != n {
            return Err(DataError::LabelLengthMismatch {
                got: self.labels.len(),
                expected: n,
            });
        }
        if self.features.nrows() != n {
            return Err(DataError::RowCountMismatch {
                what: "feature matrix",
                got: self.features.nrows(),
                expected: n,
            });
        }
        check_contiguous(&self.labels)?;
        Ok(())
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<(), DataError> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(DataError::BadProbability { name, value });
    }
    Ok(())
}

fn check_contiguous(labels: &[usize]) -> Result<(), DataError> {
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut seen = vec![false; classes];
    for &y in labels {
        seen[y] = true;
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(DataError::LabelGap { missing });
    }
    Ok(())
}

/// Stochastic block model graph: nodes grouped into blocks of the given
/// sizes; each intra-block pair is an edge with probability `p_in`, each
/// inter-block pair with probability `p_out`. Returns the graph and the
/// block label of every node. Pairs are drawn in lexicographic order.
pub fn gen_sbm_graph(
    sizes: &[usize],
    p_in: f64,
    p_out: f64,
    rng: &mut impl Rng,
) -> Result<(Graph, Vec<usize>), DataError> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(DataError::EmptyBlocks);
    }
    check_probability("p_in", p_in)?;
    check_probability("p_out", p_out)?;
    let n: usize = sizes.iter().sum();
    let mut labels = Vec::with_capacity(n);
    for (block, &size) in sizes.iter().enumerate() {
        labels.extend(std::iter::repeat(block).take(size));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok((Graph::from_canonical(n, edges), labels))
}

/// Per-class Gaussian feature model: class `c` has mean `e_c / √2` (so any
/// two class means are exactly unit distance apart) and isotropic noise of
/// standard deviation `noise_sigma` in every coordinate.
#[derive(Clone, Copy, Debug)]
pub struct FeatureConfig {
    pub dim: usize,
    pub noise_sigma: f64,
}

/// SBM dataset: block-model graph, block labels, and class-Gaussian features.
pub fn gen_sbm_dataset(
    sizes: &[usize],
    p_in: f64,
    p_out: f64,
    feat: FeatureConfig,
    rng: &mut impl Rng,
) -> Result<Dataset, DataError> {
    let (graph, labels) = gen_sbm_graph(sizes, p_in, p_out, rng)?;
    if feat.dim < sizes.len() {
        return Err(DataError::FeatureDimTooSmall {
            dim: feat.dim,
            classes: sizes.len(),
        });
    }
    let n = graph.n();
    let noise = Normal::new(0.0, feat.noise_sigma).expect("sigma must be finite and >= 0");
    let mut features = Array2::zeros((n, feat.dim));
    for u in 0..n {
        for j in 0..feat.dim {
            let mean = if j == labels[u] {
                std::f64::consts::FRAC_1_SQRT_2
            } else {
                0.0
            };
            features[(u, j)] = mean + noise.sample(rng);
        }
    }
    Ok(Dataset {
        name: format!("sbm-{:?}-pin{p_in}-pout{p_out}", sizes),
        graph,
        features,
        labels,
    })
}

/// Erdős–Rényi graph G(n, p): every pair independently an edge with
/// probability `p`, drawn in lexicographic pair order.
pub fn gen_erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> Result<Graph, DataError> {
    check_probability("p", p)?;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_canonical(n, edges))
}

/// Complete binary tree with `depth` edge levels and BFS numbering: the root
/// is node 0 and node `v` has children `2v+1`, `2v+2`. `2^(depth+1) − 1`
/// nodes in total; `depth = 0` gives the single-node tree.
pub fn gen_binary_tree(depth: u32) -> Graph {
    let n = (1usize << (depth + 1)) - 1;
    let internal = (1usize << depth) - 1;
    let mut edges = Vec::with_capacity(n - 1);
    for v in 0..internal {
        edges.push((v, 2 * v + 1));
        edges.push((v, 2 * v + 2));
    }
    edges.sort_unstable();
    Graph::from_canonical(n, edges)
}

/// Path on `n` nodes (0 — 1 — … — n−1).
pub fn gen_path(n: usize) -> Graph {
    let edges = (0..n.saturating_sub(1)).map(|u| (u, u + 1)).collect();
    Graph::from_canonical(n, edges)
}

/// Cycle on `n ≥ 3` nodes.
pub fn gen_cycle(n: usize) -> Graph {
    assert!(n >= 3, "a cycle needs at least 3 nodes");
    let mut edges: Vec<_> = (0..n - 1).map(|u| (u, u + 1)).collect();
    edges.push((0, n - 1));
    edges.sort_unstable();
    Graph::from_canonical(n, edges)
}

/// Complete graph on `n` nodes.
pub fn gen_complete(n: usize) -> Graph {
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    Graph::from_canonical(n, edges)
}

/// Star: node 0 joined to `leaves` leaf nodes.
pub fn gen_star(leaves: usize) -> Graph {
    let edges = (1..=leaves).map(|v| (0, v)).collect();
    Graph::from_canonical(leaves + 1, edges)
}

/// Two triangles {0,1,2} and {3,4,5} joined by the bridge edge (2,3).
/// A minimal graph with positively curved, mildly curved, and negatively
/// curved edges all at once; used as a hand-traceable anchor throughout the
/// test suite.
pub fn gen_bridged_triangles() -> Graph {
    Graph::from_edge_list(
        6,
        &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)],
    )
    .unwrap()
}

/// Mean, over all non-isolated nodes, of the fraction of a node's neighbors
/// sharing its label. Isolated nodes are excluded from the mean; errors if
/// every node is isolated.
pub fn homophily(g: &Graph, labels: &[usize]) -> Result<f64, DataError> {
    if labels.len() != g.n() {
        return Err(DataError::LabelLengthMismatch {
            got: labels.len(),
            expected: g.n(),
        });
    }
    let mut sum = 0.0;
    let mut counted = 0usize;
    for u in 0..g.n() {
        let deg = g.degree(u);
        if deg == 0 {
            continue;
        }
        let same = g
            .neighbors(u)
            .iter()
            .filter(|&&v| labels[v] == labels[u])
            .count();
        sum += same as f64 / deg as f64;
        counted += 1;
    }
    if counted == 0 {
        return Err(DataError::AllIsolated);
    }
    Ok(sum / counted as f64)
}

/// How train/val/test node sets are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SplitScheme {
    /// Shuffle all nodes and cut by fractions (remainder is the test set).
    Fractional { train_frac: f64, val_frac: f64 },
    /// Fixed node count per class for training; validation drawn from the
    /// remainder until train+val reaches `dev_total` (capped by availability);
    /// everything else is test.
    PerClass {
        train_per_class: usize,
        dev_total: usize,
    },
}

impl SplitScheme {
    /// The conventional 60/20/20 fractional split.
    pub fn fractional_default() -> Self {
        SplitScheme::Fractional {
            train_frac: 0.6,
            val_frac: 0.2,
        }
    }

    /// The conventional citation-benchmark split: 20 train nodes per class,
    /// a 1500-node development pool (train + val), the rest test.
    pub fn per_class_default() -> Self {
        SplitScheme::PerClass {
            train_per_class: 20,
            dev_total: 1500,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            SplitScheme::Fractional { .. } => "fractional",
            SplitScheme::PerClass { .. } => "per-class",
        }
    }
}

/// Disjoint train/val/test node-index sets (each sorted ascending).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub scheme: String,
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Draws a split of nodes `0..labels.len()` under the given scheme.
/// Counts from fractions use round-half-to-even.
pub fn make_splits(
    labels: &[usize],
    scheme: SplitScheme,
    rng: &mut impl Rng,
) -> Result<Splits, DataError> {
    check_contiguous(labels)?;
    let n = labels.len();
    let (mut train, mut val, mut test);
    match scheme {
        SplitScheme::Fractional {
            train_frac,
            val_frac,
        } => {
            check_probability("train_frac", train_frac)?;
            check_probability("val_frac", val_frac)?;
            if train_frac + val_frac > 1.0 {
                return Err(DataError::BadFractions {
                    train: train_frac,
                    val: val_frac,
                });
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let n_train = (train_frac * n as f64).round_ties_even() as usize;
            let n_val = ((val_frac * n as f64).round_ties_even() as usize).min(n - n_train);
            train = order[..n_train].to_vec();
            val = order[n_train..n_train + n_val].to_vec();
            test = order[n_train + n_val..].to_vec();
        }
        SplitScheme::PerClass {
            train_per_class,
            dev_total,
        } => {
            let classes = labels.iter().max().map_or(0, |&m| m + 1);
            train = Vec::new();
            let mut leftover = Vec::new();
            for class in 0..classes {
                let mut members: Vec<usize> =
                    (0..n).filter(|&u| labels[u] == class).collect();
                if members.len() < train_per_class {
                    return Err(DataError::ClassTooSmall {
                        class,
                        count: members.len(),
                        need: train_per_class,
                    });
                }
                members.shuffle(rng);
                train.extend_from_slice(&members[..train_per_class]);
                leftover.extend_from_slice(&members[train_per_class..]);
            }
            leftover.sort_unstable();
            leftover.shuffle(rng);
            let n_val = dev_total.saturating_sub(train.len()).min(leftover.len());
            val = leftover[..n_val].to_vec();
            test = leftover[n_val..].to_vec();
        }
    }
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();
    Ok(Splits {
        scheme: scheme.name().to_string(),
        train,
        val,
        test,
    })
}

fn read_file(dir: &Path, name: &str) -> Result<String, DataError> {
    let path = dir.join(name);
    std::fs::read_to_string(&path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a dataset directory containing `edges.txt` (edge-list format),
/// `features.csv` (one row of comma-separated floats per node), and
/// `labels.csv` (one integer per line). The node count is fixed by the label
/// file. If the graph is disconnected, everything is reduced to the largest
/// connected component (features/labels filtered accordingly).
pub fn load_dataset(dir: &Path) -> Result<Dataset, DataError> {
    let labels_text = read_file(dir, "labels.csv")?;
    let mut labels = Vec::new();
    for (idx, line) in labels_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let y = line.parse::<usize>().map_err(|e| DataError::Parse {
            file: "labels.csv".into(),
            line: idx + 1,
            msg: format!("invalid label {line:?}: {e}"),
        })?;
        labels.push(y);
    }
    let n = labels.len();
    check_contiguous(&labels)?;

    let features_text = read_file(dir, "features.csv")?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in features_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for tok in line.split(',') {
            let x = tok.trim().parse::<f64>().map_err(|e| DataError::Parse {
                file: "features.csv".into(),
                line: idx + 1,
                msg: format!("invalid feature value {tok:?}: {e}"),
            })?;
            row.push(x);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(DataError::Parse {
                    file: "features.csv".into(),
                    line: idx + 1,
                    msg: format!(
                        "row has {} columns, expected {}",
                        row.len(),
                        first.len()
                    ),
                });
            }
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(DataError::RowCountMismatch {
            what: "feature matrix",
            got: rows.len(),
            expected: n,
        });
    }
    let dim = rows.first().map_or(0, |r| r.len());
    let mut features = Array2::zeros((n, dim));
    for (i, row) in rows.iter().enumerate() {
        features
            .row_mut(i)
            .assign(&Array1::from_vec(row.clone()));
    }

    let edges_text = read_file(dir, "edges.txt")?;
    let (pairs, header_n) = crate::graph::parse_edge_pairs(&edges_text)?;
    if let Some(h) = header_n {
        if h != n {
            return Err(DataError::RowCountMismatch {
                what: "edge-list header node count",
                got: h,
                expected: n,
            });
        }
    }
    let graph = Graph::from_edge_list(n, &pairs)?;

    let name = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());

    if graph.is_connected() {
        let ds = Dataset {
            name,
            graph,
            features,
            labels,
        };
        ds.validate()?;
        return Ok(ds);
    }

    // Reduce to the largest connected component.
    let (lcc, map) = graph.largest_connected_component()?;
    let kept: Vec<usize> = (0..n).filter(|&u| map[u].is_some()).collect();
    let mut f2 = Array2::zeros((kept.len(), dim));
    let mut l2 = Vec::with_capacity(kept.len());
    for (new, &old) in kept.iter().enumerate() {
        f2.row_mut(new).assign(&features.row(old));
        l2.push(labels[old]);
    }
    Ok(Dataset {
        name,
        graph: lcc,
        features: f2,
        labels: l2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn sbm_is_seed_deterministic_and_respects_blocks() {
        let (g1, y1) = gen_sbm_graph(&[30, 20], 0.4, 0.05, &mut rng(7)).unwrap();
        let (g2, y2) = gen_sbm_graph(&[30, 20], 0.4, 0.05, &mut rng(7)).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(y1, y2);
        assert_eq!(g1.n(), 50);
        assert_eq!(y1[..30], vec![0; 30][..]);
        assert_eq!(y1[30..], vec![1; 20][..]);

        let (g3, _) = gen_sbm_graph(&[30, 20], 0.4, 0.05, &mut rng(8)).unwrap();
        assert_ne!(g1, g3);

        // Intra/inter edge counts should sit near their expectations.
        let (mut intra, mut inter) = (0usize, 0usize);
        for &(u, v) in g1.edges() {
            if y1[u] == y1[v] {
                intra += 1;
            } else {
                inter += 1;
            }
        }
        // E[intra] = 0.4·(C(30,2)+C(20,2)) = 250, E[inter] = 0.05·600 = 30.
        assert!((150..350).contains(&intra), "intra={intra}");
        assert!((10..60).contains(&inter), "inter={inter}");
    }

    #[test]
    fn sbm_extreme_probabilities() {
        let (g, _) = gen_sbm_graph(&[4, 4], 1.0, 0.0, &mut rng(0)).unwrap();
        assert_eq!(g.num_edges(), 2 * 6); // two K4 blocks
        assert!(!g.is_connected());
        assert!(matches!(
            gen_sbm_graph(&[4], 1.5, 0.0, &mut rng(0)),
            Err(DataError::BadProbability { name: "p_in", .. })
        ));
        assert!(matches!(
            gen_sbm_graph(&[], 0.5, 0.5, &mut rng(0)),
            Err(DataError::EmptyBlocks)
        ));
    }

    #[test]
    fn sbm_dataset_features_have_class_means() {
        let feat = FeatureConfig {
            dim: 4,
            noise_sigma: 0.01,
        };
        let ds = gen_sbm_dataset(&[40, 40], 0.3, 0.05, feat, &mut rng(11)).unwrap();
        ds.validate().unwrap();
        assert_eq!(ds.features.nrows(), 80);
        assert_eq!(ds.features.ncols(), 4);
        assert_eq!(ds.num_classes(), 2);
        // Column means: coordinate c over class-c nodes ≈ 1/√2, others ≈ 0.
        let class0_mean = ds.features.column(0).iter().take(40).sum::<f64>() / 40.0;
        assert!((class0_mean - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.02);
        let off_mean = ds.features.column(1).iter().take(40).sum::<f64>() / 40.0;
        assert!(off_mean.abs() < 0.02);

        assert!(matches!(
            gen_sbm_dataset(
                &[4, 4, 4],
                0.5,
                0.1,
                FeatureConfig { dim: 2, noise_sigma: 1.0 },
                &mut rng(0)
            ),
            Err(DataError::FeatureDimTooSmall { dim: 2, classes: 3 })
        ));
    }

    #[test]
    fn erdos_renyi_endpoints() {
        let empty = gen_erdos_renyi(10, 0.0, &mut rng(1)).unwrap();
        assert_eq!(empty.num_edges(), 0);
        let full = gen_erdos_renyi(10, 1.0, &mut rng(1)).unwrap();
        assert_eq!(full.num_edges(), 45);
        let g1 = gen_erdos_renyi(40, 0.2, &mut rng(5)).unwrap();
        let g2 = gen_erdos_renyi(40, 0.2, &mut rng(5)).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn binary_tree_shape() {
        let t = gen_binary_tree(3);
        assert_eq!(t.n(), 15);
        assert_eq!(t.num_edges(), 14);
        assert_eq!(t.degree(0), 2); // root
        assert_eq!(t.degree(1), 3); // internal
        assert_eq!(t.degree(14), 1); // leaf
        assert_eq!(t.diameter().unwrap(), 6);
        assert_eq!(t.neighbors(1), &[0, 3, 4]); // BFS numbering: children 2v+1, 2v+2
        assert!(t.is_bipartite());

        let single = gen_binary_tree(0);
        assert_eq!(single.n(), 1);
        assert_eq!(single.num_edges(), 0);
    }

    #[test]
    fn structural_generators() {
        assert_eq!(gen_path(5).diameter().unwrap(), 4);
        assert_eq!(gen_cycle(6).num_edges(), 6);
        assert_eq!(gen_cycle(6).degree(0), 2);
        assert_eq!(gen_complete(5).num_edges(), 10);
        let s = gen_star(4);
        assert_eq!(s.degree(0), 4);
        assert_eq!(s.degree(1), 1);
        let b = gen_bridged_triangles();
        assert_eq!(b.n(), 6);
        assert_eq!(b.num_edges(), 7);
        assert_eq!(b.degree(2), 3);
    }

    #[test]
    fn homophily_anchors() {
        let g = gen_path(4);
        assert_eq!(homophily(&g, &[0, 0, 0, 0]).unwrap(), 1.0);
        assert_eq!(homophily(&g, &[0, 1, 0, 1]).unwrap(), 0.0);
        // Bridged triangles with one label per triangle:
        // nodes 0,1,4,5 have all-same neighbors (frac 1), nodes 2,3 have 2/3.
        let b = gen_bridged_triangles();
        let h = homophily(&b, &[0, 0, 0, 1, 1, 1]).unwrap();
        assert!((h - (4.0 + 2.0 * (2.0 / 3.0)) / 6.0).abs() < 1e-12);
        // Isolated nodes are excluded from the mean.
        let g = Graph::from_edge_list(3, &[(0, 1)]).unwrap();
        assert_eq!(homophily(&g, &[0, 0, 1]).unwrap(), 1.0);
        let lonely = Graph::from_edge_list(2, &[]).unwrap();
        assert!(matches!(
            homophily(&lonely, &[0, 0]),
            Err(DataError::AllIsolated)
        ));
        assert!(matches!(
            homophily(&gen_path(3), &[0, 0]),
            Err(DataError::LabelLengthMismatch { got: 2, expected: 3 })
        ));
    }

    #[test]
    fn fractional_splits_partition() {
        let labels = vec![0; 100];
        let s = make_splits(&labels, SplitScheme::fractional_default(), &mut rng(3)).unwrap();
        assert_eq!(s.scheme, "fractional");
        assert_eq!(s.train.len(), 60);
        assert_eq!(s.val.len(), 20);
        assert_eq!(s.test.len(), 20);
        let mut all: Vec<usize> = s
            .train
            .iter()
            .chain(&s.val)
            .chain(&s.test)
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        // Deterministic under the same seed, different under another.
        let s2 = make_splits(&labels, SplitScheme::fractional_default(), &mut rng(3)).unwrap();
        assert_eq!(s, s2);
        let s3 = make_splits(&labels, SplitScheme::fractional_default(), &mut rng(4)).unwrap();
        assert_ne!(s, s3);
    }

    #[test]
    fn per_class_splits() {
        // 3 classes of 100 → train must be exactly 60.
        let mut labels = Vec::new();
        for c in 0..3 {
            labels.extend(std::iter::repeat(c).take(100));
        }
        let scheme = SplitScheme::PerClass {
            train_per_class: 20,
            dev_total: 150,
        };
        let s = make_splits(&labels, scheme, &mut rng(9)).unwrap();
        assert_eq!(s.scheme, "per-class");
        assert_eq!(s.train.len(), 60);
        assert_eq!(s.val.len(), 90); // 150 − 60
        assert_eq!(s.test.len(), 150);
        for &u in &s.train {
            assert!(u < 300);
        }
        // 20 per class exactly.
        for c in 0..3 {
            let count = s.train.iter().filter(|&&u| labels[u] == c).count();
            assert_eq!(count, 20);
        }

        let err = make_splits(
            &[0, 0, 1],
            SplitScheme::PerClass {
                train_per_class: 20,
                dev_total: 100,
            },
            &mut rng(0),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            DataError::ClassTooSmall {
                class: 0,
                count: 2,
                need: 20
            }
        ));
    }

    #[test]
    fn splits_reject_gapped_labels() {
        assert!(matches!(
            make_splits(&[0, 2, 2], SplitScheme::fractional_default(), &mut rng(0)),
            Err(DataError::LabelGap { missing: 1 })
        ));
    }

    #[test]
    fn splits_json_round_trip() {
        let labels = vec![0, 0, 1, 1, 0, 1, 0, 0, 1, 1];
        let s = make_splits(
            &labels,
            SplitScheme::Fractional {
                train_frac: 0.5,
                val_frac: 0.3,
            },
            &mut rng(2),
        )
        .unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: Splits = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn load_dataset_round_trip_and_lcc() {
        let dir = std::env::temp_dir().join(format!("cvrw-data-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        // 5 nodes; node 4 is disconnected and must be dropped by LCC reduction.
        std::fs::write(dir.join("edges.txt"), "# toy\n0 1\n1 2\n2 3\n").unwrap();
        std::fs::write(
            dir.join("features.csv"),
            "1.0,0.0\n0.5,0.5\n0.0,1.0\n0.25,0.75\n9.0,9.0\n",
        )
        .unwrap();
        std::fs::write(dir.join("labels.csv"), "0\n0\n1\n1\n1\n").unwrap();

        let ds = load_dataset(&dir).unwrap();
        assert_eq!(ds.graph.n(), 4);
        assert_eq!(ds.labels, vec![0, 0, 1, 1]);
        assert_eq!(ds.features.nrows(), 4);
        assert_eq!(ds.features[(3, 1)], 0.75);

        // Parse errors carry file and line.
        std::fs::write(dir.join("labels.csv"), "0\nbad\n").unwrap();
        match load_dataset(&dir).unwrap_err() {
            DataError::Parse { file, line, .. } => {
                assert_eq!(file, "labels.csv");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }

        // Gapped labels are rejected.
        std::fs::write(dir.join("labels.csv"), "0\n2\n2\n0\n0\n").unwrap();
        assert!(matches!(
            load_dataset(&dir),
            Err(DataError::LabelGap { missing: 1 })
        ));

        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn load_dataset_missing_file_is_io_error() {
        let dir = std::env::temp_dir().join(format!("cvrw-missing-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        assert!(matches!(load_dataset(&dir), Err(DataError::Io { .. })));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
