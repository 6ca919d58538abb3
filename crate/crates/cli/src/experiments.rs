//! Command bodies: graph/dataset sources, add/remove trade-off trajectories,
//! curvature runtime benchmarks, single training runs, and hyper-parameter
//! sweeps. The binary and the integration tests both drive these functions.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, ensure, Context};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use curverewire_core::curvature::jlc_all;
use curverewire_core::data::{
    gen_binary_tree, gen_bridged_triangles, gen_complete, gen_cycle, gen_erdos_renyi, gen_path,
    gen_sbm_dataset, gen_sbm_graph, gen_star, load_dataset, make_splits, Dataset, FeatureConfig,
    SplitScheme, Splits,
};
use curverewire_core::fmt_f64;
use curverewire_core::graph::{EdgeId, Graph, RewiredView};
use curverewire_core::rewiring::{bank_candidates_with_target, RewiringConfig};
use curverewire_core::sgc::{
    evaluate, train, History, Kernel, Model, ModelConfig, TrainConfig,
};
use curverewire_core::spectral::{mixing_steps, spectral_extremes};

use crate::stats::{bootstrap_mean_ci, BootstrapCi};
use crate::InputUnreadable;

/// Decorrelates the training RNG stream from the dataset-generation stream
/// derived from the same user-facing seed.
pub const TRAIN_STREAM_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Default class-feature noise for generated SBM datasets. Calibrated so the
/// default two-block benchmark (2×100 nodes, p_in = 0.10, p_out = 0.05,
/// 60/20/20 splits, K = 2 sym_selfloop, no rewiring) lands in the 70–90%
/// test-accuracy band, leaving headroom to measure rewiring effects.
pub const DEFAULT_NOISE_SIGMA: f64 = 0.8;

// ---------------------------------------------------------------------------
// Graph sources
// ---------------------------------------------------------------------------

/// Where a command's graph comes from: a file or a seeded generator.
#[derive(Clone, Debug)]
pub enum GraphSpec {
    File(PathBuf),
    Er { n: usize, p: f64 },
    Sbm { sizes: Vec<usize>, p_in: f64, p_out: f64 },
    Path { n: usize },
    Cycle { n: usize },
    Complete { n: usize },
    Star { leaves: usize },
    Tree { depth: u32 },
    BridgedTriangles,
}

impl GraphSpec {
    /// Builds the graph. Generators draw from a ChaCha8 stream seeded with
    /// `seed`; file loading ignores the seed.
    pub fn realize(&self, seed: u64) -> anyhow::Result<Graph> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(match self {
            GraphSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    anyhow::Error::new(InputUnreadable(format!("{}: {e}", path.display())))
                })?;
                Graph::parse_edge_list(&text).map_err(|e| {
                    anyhow::Error::new(InputUnreadable(format!("{}: {e}", path.display())))
                })?
            }
            GraphSpec::Er { n, p } => gen_erdos_renyi(*n, *p, &mut rng)?,
            GraphSpec::Sbm { sizes, p_in, p_out } => {
                gen_sbm_graph(sizes, *p_in, *p_out, &mut rng)?.0
            }
            GraphSpec::Path { n } => gen_path(*n),
            GraphSpec::Cycle { n } => gen_cycle(*n),
            GraphSpec::Complete { n } => gen_complete(*n),
            GraphSpec::Star { leaves } => gen_star(*leaves),
            GraphSpec::Tree { depth } => gen_binary_tree(*depth),
            GraphSpec::BridgedTriangles => gen_bridged_triangles(),
        })
    }

    /// Short description for record params.
    pub fn describe(&self) -> String {
        match self {
            GraphSpec::File(p) => format!("file:{}", p.display()),
            GraphSpec::Er { n, p } => format!("er(n={n},p={p})"),
            GraphSpec::Sbm { sizes, p_in, p_out } => {
                format!("sbm(sizes={sizes:?},p_in={p_in},p_out={p_out})")
            }
            GraphSpec::Path { n } => format!("path(n={n})"),
            GraphSpec::Cycle { n } => format!("cycle(n={n})"),
            GraphSpec::Complete { n } => format!("complete(n={n})"),
            GraphSpec::Star { leaves } => format!("star(leaves={leaves})"),
            GraphSpec::Tree { depth } => format!("tree(depth={depth})"),
            GraphSpec::BridgedTriangles => "bridged-triangles".to_string(),
        }
    }
}

/// Reduce to the largest connected component if needed; returns the working
/// graph and whether a reduction happened.
pub fn to_connected(g: Graph) -> anyhow::Result<(Graph, bool)> {
    if g.is_connected() {
        Ok((g, false))
    } else {
        let (lcc, _) = g.largest_connected_component()?;
        Ok((lcc, true))
    }
}

// ---------------------------------------------------------------------------
// Add/remove trade-off trajectories
// ---------------------------------------------------------------------------

/// One row of the trade-off trajectory CSV.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRow {
    pub step: usize,
    /// `baseline`, `add`, or `remove`.
    pub action: &'static str,
    pub lambda2: f64,
    pub mixing_steps: f64,
}

fn trajectory_row(
    step: usize,
    action: &'static str,
    g: &Graph,
    epsilon: f64,
) -> anyhow::Result<TrajectoryRow> {
    let ext = spectral_extremes(g)?;
    let (dmin, dmax) = g.degree_extremes().context("graph has no nodes")?;
    let steps = mixing_steps(ext.lambda2, epsilon, dmax, dmin)?;
    Ok(TrajectoryRow {
        step,
        action,
        lambda2: ext.lambda2,
        mixing_steps: steps,
    })
}

/// Triangle-closing candidate bank for greedy additions, in discovery order
/// (seeded by the most negatively curved edges first).
fn candidate_bank(g: &Graph, target: usize) -> Vec<(usize, usize)> {
    let jlc = jlc_all(g);
    bank_candidates_with_target(g, &jlc, target as f64)
}

/// Index of the bank candidate whose insertion yields the largest spectral
/// gap, ties broken toward the earliest candidate (discovery order). The
/// candidates are evaluated in parallel; the argmax itself is sequential, so
/// the result does not depend on thread scheduling.
fn best_gap_candidate(cur: &Graph, bank: &[(usize, usize)]) -> anyhow::Result<usize> {
    let gaps: Vec<f64> = bank
        .par_iter()
        .map(|&(r, s)| {
            let cand = RewiredView::new(cur, Vec::new(), vec![(r, s)])?.materialize();
            Ok(spectral_extremes(&cand)?.lambda2)
        })
        .collect::<anyhow::Result<_>>()?;
    Ok(gaps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .expect("bank is non-empty"))
}

/// Greedy curvature-guided trade-off curves: starting from a connected graph,
/// (a) repeatedly insert the bank candidate whose insertion most increases
/// the spectral gap (candidates stay restricted to the triangle-closing bank;
/// the bank is rebuilt on the current graph when exhausted) and (b)
/// independently, starting again from the base graph, repeatedly delete the
/// lowest-JLC edge whose removal keeps the graph connected. After every edit
/// the spectral gap and the walk-convergence step count are recorded. Rows:
/// one `baseline` (step 0), then `add` steps 1..=k, then `remove` steps
/// 1..=k. Either trajectory stops early when it runs out of legal moves; no
/// row is ever computed on a disconnected graph.
pub fn tradeoff_trajectories(
    g: &Graph,
    steps: usize,
    epsilon: f64,
) -> anyhow::Result<Vec<TrajectoryRow>> {
    ensure!(
        g.is_connected() && g.n() >= 2,
        "trade-off trajectories need a connected graph with at least 2 nodes"
    );
    let mut rows = vec![trajectory_row(0, "baseline", g, epsilon)?];

    // Additions.
    let mut cur = g.clone();
    let mut bank = candidate_bank(&cur, 2 * steps);
    for step in 1..=steps {
        if bank.is_empty() {
            bank = candidate_bank(&cur, 2 * (steps - step + 1));
            if bank.is_empty() {
                break; // no candidates left anywhere (e.g. complete graph)
            }
        }
        let best = best_gap_candidate(&cur, &bank)?;
        let (r, s) = bank.remove(best);
        let next = RewiredView::new(&cur, Vec::new(), vec![(r, s)])?.materialize();
        cur = next;
        rows.push(trajectory_row(step, "add", &cur, epsilon)?);
    }

    // Removals, independently from the same base graph.
    let mut cur = g.clone();
    for step in 1..=steps {
        if cur.num_edges() == 0 {
            break;
        }
        let jlc = jlc_all(&cur);
        let mut order: Vec<usize> = (0..jlc.len()).collect();
        order.sort_by(|&a, &b| jlc[a].total_cmp(&jlc[b]).then(a.cmp(&b)));
        let mut applied = false;
        for eid in order {
            let candidate = RewiredView::new(&cur, vec![EdgeId(eid)], Vec::new())?.materialize();
            if candidate.is_connected() {
                cur = candidate;
                applied = true;
                break;
            }
        }
        if !applied {
            break; // every remaining deletion would disconnect the graph
        }
        rows.push(trajectory_row(step, "remove", &cur, epsilon)?);
    }
    Ok(rows)
}

/// CSV with header `step,action,lambda2,mixing_steps`, floats at full
/// precision.
pub fn trajectories_to_csv(rows: &[TrajectoryRow]) -> String {
    let mut out = String::from("step,action,lambda2,mixing_steps\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.step,
            r.action,
            fmt_f64(r.lambda2),
            fmt_f64(r.mixing_steps)
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Curvature runtime benchmark
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchModel {
    Er,
    Sbm,
}

impl std::str::FromStr for BenchModel {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "er" => Ok(BenchModel::Er),
            "sbm" => Ok(BenchModel::Sbm),
            other => bail!("unknown bench model {other:?} (expected er or sbm)"),
        }
    }
}

/// One benchmark measurement: mean seconds for a full-graph curvature pass.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub edges: usize,
    pub metric: &'static str,
    pub mean_seconds: f64,
}

/// Times full-graph JLC and BFC passes on one generated graph per size.
/// When `p` is `None`, the edge probability is `expected_degree / (n-1)`
/// (two-block SBM splits that into 1.5x within / 0.5x across blocks).
pub fn bench_curvature(
    sizes: &[usize],
    model: BenchModel,
    p: Option<f64>,
    expected_degree: f64,
    reps: usize,
    seed: u64,
) -> anyhow::Result<Vec<BenchRow>> {
    ensure!(reps > 0, "bench needs at least one repetition");
    ensure!(!sizes.is_empty(), "bench needs at least one size");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(sizes.len() * 2);
    for &n in sizes {
        ensure!(n >= 2, "bench sizes must be at least 2 (got {n})");
        let p_eff = p.unwrap_or(expected_degree / (n - 1) as f64).min(1.0);
        let g = match model {
            BenchModel::Er => gen_erdos_renyi(n, p_eff, &mut rng)?,
            BenchModel::Sbm => {
                let half = n / 2;
                let blocks = [half.max(1), (n - half).max(1)];
                gen_sbm_graph(&blocks, (1.5 * p_eff).min(1.0), 0.5 * p_eff, &mut rng)?.0
            }
        };
        // One untimed pass per metric warms caches, the allocator, and the
        // frequency governor; the timed repetitions then alternate between
        // the metrics so slow drift (thermal state, background scheduling)
        // biases neither side of the comparison.
        let time_once = |f: &dyn Fn(&Graph) -> Vec<f64>| -> f64 {
            let start = Instant::now();
            std::hint::black_box(f(std::hint::black_box(&g)));
            start.elapsed().as_secs_f64()
        };
        let jlc: &dyn Fn(&Graph) -> Vec<f64> = &curverewire_core::curvature::jlc_all;
        let bfc: &dyn Fn(&Graph) -> Vec<f64> = &curverewire_core::curvature::bfc_all;
        std::hint::black_box(jlc(std::hint::black_box(&g)));
        std::hint::black_box(bfc(std::hint::black_box(&g)));
        let (mut jlc_total, mut bfc_total) = (0.0, 0.0);
        for _ in 0..reps {
            jlc_total += time_once(jlc);
            bfc_total += time_once(bfc);
        }
        rows.push(BenchRow {
            n,
            edges: g.num_edges(),
            metric: "jlc",
            mean_seconds: jlc_total / reps as f64,
        });
        rows.push(BenchRow {
            n,
            edges: g.num_edges(),
            metric: "bfc",
            mean_seconds: bfc_total / reps as f64,
        });
    }
    Ok(rows)
}

/// CSV with header `n,edges,metric,mean_seconds`.
pub fn bench_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,edges,metric,mean_seconds\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n,
            r.edges,
            r.metric,
            fmt_f64(r.mean_seconds)
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Datasets for training
// ---------------------------------------------------------------------------

/// Where a training dataset comes from.
#[derive(Clone, Debug)]
pub enum DatasetSource {
    /// Directory with `edges.txt`, `features.csv`, `labels.csv`.
    Dir(PathBuf),
    /// Seeded two-or-more-block SBM with class-Gaussian features.
    Sbm {
        sizes: Vec<usize>,
        p_in: f64,
        p_out: f64,
        /// `None` means "one dimension per class".
        feat_dim: Option<usize>,
        noise_sigma: f64,
    },
}

/// Dataset source plus split fractions.
#[derive(Clone, Debug)]
pub struct DatasetSpec {
    pub source: DatasetSource,
    pub train_frac: f64,
    pub val_frac: f64,
}

impl DatasetSpec {
    /// Materializes the dataset and draws splits, all from one ChaCha8 stream
    /// seeded with `seed`. Loading from a directory consumes the stream only
    /// for the splits.
    pub fn realize(&self, seed: u64) -> anyhow::Result<(Dataset, Splits)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dataset = match &self.source {
            DatasetSource::Dir(dir) => load_dataset(dir).map_err(|e| {
                anyhow::Error::new(InputUnreadable(format!("{}: {e}", dir.display())))
            })?,
            DatasetSource::Sbm {
                sizes,
                p_in,
                p_out,
                feat_dim,
                noise_sigma,
            } => {
                let feat = FeatureConfig {
                    dim: feat_dim.unwrap_or(sizes.len()),
                    noise_sigma: *noise_sigma,
                };
                gen_sbm_dataset(sizes, *p_in, *p_out, feat, &mut rng)?
            }
        };
        let splits = make_splits(
            &dataset.labels,
            SplitScheme::Fractional {
                train_frac: self.train_frac,
                val_frac: self.val_frac,
            },
            &mut rng,
        )?;
        Ok((dataset, splits))
    }

    pub fn describe(&self) -> String {
        match &self.source {
            DatasetSource::Dir(d) => format!("dir:{}", d.display()),
            DatasetSource::Sbm {
                sizes,
                p_in,
                p_out,
                feat_dim,
                noise_sigma,
            } => format!(
                "sbm(sizes={sizes:?},p_in={p_in},p_out={p_out},feat_dim={},sigma={noise_sigma})",
                feat_dim.map_or_else(|| "classes".to_string(), |d| d.to_string())
            ),
        }
    }
}

// ---------------------------------------------------------------------------
// Single training run
// ---------------------------------------------------------------------------

/// One point of the hyper-parameter space (the sweep's unit of work; a plain
/// `train` run is a single cell).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepCell {
    #[serde(rename = "pA")]
    pub p_add: f64,
    #[serde(rename = "pD")]
    pub p_drop: f64,
    pub alpha: f64,
    pub lr: f64,
    pub wd: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub dropout: f64,
}

impl SweepCell {
    /// Everything off / conventional defaults: no rewiring, K=2, lr 0.01,
    /// weight decay 5e-4, no dropout.
    pub fn baseline() -> Self {
        SweepCell {
            p_add: 0.0,
            p_drop: 0.0,
            alpha: 0.5,
            lr: 0.01,
            wd: 5e-4,
            k: 2,
            dropout: 0.0,
        }
    }
}

/// Result of one seeded training run.
pub struct TrainOutcome {
    pub model: Model,
    pub history: History,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_acc: f64,
    pub test_acc: f64,
    /// Whether the evaluation graph's fingerprint matches the fingerprint the
    /// model was trained against (always checked, recorded explicitly).
    pub fingerprint_match: bool,
}

/// Trains one model and evaluates it on the test split of the *original*
/// graph. The training RNG stream is decorrelated from the dataset stream
/// derived from the same seed.
pub fn run_single_training(
    dataset: &Dataset,
    splits: &Splits,
    kernel: Kernel,
    cell: &SweepCell,
    epochs: usize,
    seed: u64,
) -> anyhow::Result<TrainOutcome> {
    let model_cfg = ModelConfig {
        kernel,
        steps: cell.k,
    };
    let train_cfg = TrainConfig {
        epochs,
        lr: cell.lr,
        weight_decay: cell.wd,
        dropout: cell.dropout,
        rewiring: RewiringConfig {
            p_add: cell.p_add,
            p_drop: cell.p_drop,
            alpha: cell.alpha,
        },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ TRAIN_STREAM_SALT);
    let (model, history) = train(
        &dataset.graph,
        &dataset.features,
        &dataset.labels,
        splits,
        &model_cfg,
        &train_cfg,
        &mut rng,
    )?;
    let fingerprint_match = model.graph_fingerprint == dataset.graph.fingerprint();
    let test_acc = evaluate(
        &model,
        &dataset.graph,
        &dataset.features,
        &dataset.labels,
        &splits.test,
    )?;
    let last = history.epochs.last();
    Ok(TrainOutcome {
        train_loss: last.map_or(0.0, |e| e.train_loss),
        train_acc: last.map_or(0.0, |e| e.train_acc),
        val_acc: last.map_or(0.0, |e| e.val_acc),
        test_acc,
        fingerprint_match,
        model,
        history,
    })
}

// ---------------------------------------------------------------------------
// Hyper-parameter sweep
// ---------------------------------------------------------------------------

/// Grid keys accepted by `parse_grid`, in the (lexicographic) order cells are
/// enumerated.
pub const GRID_KEYS: [&str; 7] = ["pA", "pD", "alpha", "lr", "wd", "K", "dropout"];

/// Expands a JSON object like `{"pA":[0,0.1],"alpha":[0.5,1.0]}` into the
/// Cartesian product of cells. Keys absent from the object keep the `base`
/// value; each value list is sorted ascending and deduplicated, so the cell
/// order is lexicographic in `GRID_KEYS` order.
pub fn parse_grid(grid: &serde_json::Value, base: &SweepCell) -> anyhow::Result<Vec<SweepCell>> {
    let obj = grid
        .as_object()
        .context("grid must be a JSON object mapping keys to value arrays")?;
    for key in obj.keys() {
        ensure!(
            GRID_KEYS.contains(&key.as_str()),
            "unknown grid key {key:?}; allowed keys: {GRID_KEYS:?}"
        );
    }
    ensure!(
        !obj.is_empty(),
        "empty grid: set at least one of {GRID_KEYS:?}"
    );

    fn floats(
        obj: &serde_json::Map<String, serde_json::Value>,
        key: &str,
        default: f64,
    ) -> anyhow::Result<Vec<f64>> {
        let Some(v) = obj.get(key) else {
            return Ok(vec![default]);
        };
        let arr = v
            .as_array()
            .with_context(|| format!("grid key {key:?} must map to an array"))?;
        ensure!(!arr.is_empty(), "grid key {key:?} has an empty value list");
        let mut out = Vec::with_capacity(arr.len());
        for x in arr {
            let f = x
                .as_f64()
                .with_context(|| format!("grid key {key:?}: {x} is not a number"))?;
            ensure!(f.is_finite(), "grid key {key:?}: non-finite value");
            out.push(f);
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        Ok(out)
    }

    let p_adds = floats(obj, "pA", base.p_add)?;
    let p_drops = floats(obj, "pD", base.p_drop)?;
    let alphas = floats(obj, "alpha", base.alpha)?;
    let lrs = floats(obj, "lr", base.lr)?;
    let wds = floats(obj, "wd", base.wd)?;
    let dropouts = floats(obj, "dropout", base.dropout)?;
    let ks: Vec<usize> = match obj.get("K") {
        None => vec![base.k],
        Some(v) => {
            let arr = v.as_array().context("grid key \"K\" must map to an array")?;
            ensure!(!arr.is_empty(), "grid key \"K\" has an empty value list");
            let mut out = Vec::with_capacity(arr.len());
            for x in arr {
                out.push(
                    x.as_u64()
                        .with_context(|| format!("grid key \"K\": {x} is not a non-negative integer"))?
                        as usize,
                );
            }
            out.sort_unstable();
            out.dedup();
            out
        }
    };

    let mut cells = Vec::new();
    for &p_add in &p_adds {
        for &p_drop in &p_drops {
            for &alpha in &alphas {
                for &lr in &lrs {
                    for &wd in &wds {
                        for &k in &ks {
                            for &dropout in &dropouts {
                                cells.push(SweepCell {
                                    p_add,
                                    p_drop,
                                    alpha,
                                    lr,
                                    wd,
                                    k,
                                    dropout,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(cells)
}

/// Aggregated results for one sweep cell over all seeds.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    #[serde(flatten)]
    pub cell: SweepCell,
    pub mean_val_acc: f64,
    pub mean_test_acc: f64,
    pub test_ci: BootstrapCi,
    /// Per-seed accuracies in seed order.
    pub val_accs: Vec<f64>,
    pub test_accs: Vec<f64>,
}

/// Full sweep output: one row per cell (cell order preserved) plus the index
/// of the best cell by mean validation accuracy (ties go to the earliest =
/// lexicographically smallest cell).
pub struct SweepResults {
    pub rows: Vec<SweepRow>,
    pub best: usize,
}

/// Number of bootstrap resamples for sweep confidence intervals.
pub const SWEEP_BOOTSTRAP_RESAMPLES: usize = 1000;
/// Confidence level for sweep intervals.
pub const SWEEP_CI_LEVEL: f64 = 0.95;

/// Runs every (cell, seed) job in parallel. Each seed's dataset and splits
/// are generated once and shared across all cells, so cells are compared on
/// identical data. Results are keyed by index, independent of completion
/// order, and therefore deterministic for fixed seeds.
pub fn run_sweep<F>(
    make_dataset: F,
    cells: &[SweepCell],
    kernel: Kernel,
    epochs: usize,
    seeds: &[u64],
    bootstrap_seed: u64,
) -> anyhow::Result<SweepResults>
where
    F: Fn(u64) -> anyhow::Result<(Dataset, Splits)> + Sync,
{
    ensure!(!cells.is_empty(), "sweep needs at least one cell");
    ensure!(!seeds.is_empty(), "sweep needs at least one seed");
    let datasets: Vec<(Dataset, Splits)> = seeds
        .iter()
        .map(|&s| make_dataset(s))
        .collect::<anyhow::Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|ci| (0..seeds.len()).map(move |si| (ci, si)))
        .collect();
    let outcomes: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(ci, si)| {
            let (dataset, splits) = &datasets[si];
            let out = run_single_training(dataset, splits, kernel, &cells[ci], epochs, seeds[si])
                .with_context(|| {
                    format!("cell {:?} seed {}", cells[ci], seeds[si])
                })?;
            ensure!(
                out.fingerprint_match,
                "evaluation graph fingerprint diverged from the training graph"
            );
            Ok((out.val_acc, out.test_acc))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut rows = Vec::with_capacity(cells.len());
    for (ci, cell) in cells.iter().enumerate() {
        let val_accs: Vec<f64> = (0..seeds.len())
            .map(|si| outcomes[ci * seeds.len() + si].0)
            .collect();
        let test_accs: Vec<f64> = (0..seeds.len())
            .map(|si| outcomes[ci * seeds.len() + si].1)
            .collect();
        let mean_val_acc = val_accs.iter().sum::<f64>() / val_accs.len() as f64;
        let test_ci = bootstrap_mean_ci(
            &test_accs,
            SWEEP_BOOTSTRAP_RESAMPLES,
            SWEEP_CI_LEVEL,
            bootstrap_seed.wrapping_add(ci as u64),
        );
        rows.push(SweepRow {
            cell: *cell,
            mean_val_acc,
            mean_test_acc: test_ci.mean,
            test_ci,
            val_accs,
            test_accs,
        });
    }
    let best = rows
        .iter()
        .enumerate()
        .max_by(|a, b| {
            a.1.mean_val_acc
                .total_cmp(&b.1.mean_val_acc)
                .then(b.0.cmp(&a.0))
        })
        .map(|(i, _)| i)
        .expect("at least one cell");
    Ok(SweepResults { rows, best })
}

/// CSV with one row per cell:
/// `pA,pD,alpha,lr,wd,K,dropout,mean_val_acc,mean_test_acc,test_ci_lo,test_ci_hi`.
pub fn sweep_to_csv(results: &SweepResults) -> String {
    let mut out =
        String::from("pA,pD,alpha,lr,wd,K,dropout,mean_val_acc,mean_test_acc,test_ci_lo,test_ci_hi\n");
    for r in &results.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt_f64(r.cell.p_add),
            fmt_f64(r.cell.p_drop),
            fmt_f64(r.cell.alpha),
            fmt_f64(r.cell.lr),
            fmt_f64(r.cell.wd),
            r.cell.k,
            fmt_f64(r.cell.dropout),
            fmt_f64(r.mean_val_acc),
            fmt_f64(r.mean_test_acc),
            fmt_f64(r.test_ci.lo),
            fmt_f64(r.test_ci.hi)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn tradeoff_on_bridged_triangles_moves_lambda2_both_ways() {
        let g = gen_bridged_triangles();
        let rows = tradeoff_trajectories(&g, 2, 5e-4).unwrap();
        assert_eq!(rows.len(), 5, "baseline + 2 adds + 2 removes");
        let base = &rows[0];
        assert_eq!(base.action, "baseline");
        let adds: Vec<&TrajectoryRow> = rows.iter().filter(|r| r.action == "add").collect();
        let removes: Vec<&TrajectoryRow> = rows.iter().filter(|r| r.action == "remove").collect();
        assert_eq!((adds.len(), removes.len()), (2, 2));
        // Adding bridge-closing edges widens the bottleneck; deleting
        // triangle edges (the bridge itself would disconnect) narrows it.
        assert!(adds[1].lambda2 > base.lambda2);
        assert!(removes[1].lambda2 < base.lambda2 + 1e-12);
        // mixing_steps moves opposite to lambda2.
        assert!(adds[1].mixing_steps < base.mixing_steps);
        assert!(removes[1].mixing_steps > base.mixing_steps - 1e-9);
    }

    #[test]
    fn tradeoff_zero_steps_is_single_baseline_row() {
        let g = gen_complete(4);
        let rows = tradeoff_trajectories(&g, 0, 5e-4).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].action, "baseline");
        assert_eq!(rows[0].step, 0);
    }

    #[test]
    fn tradeoff_on_a_tree_skips_disconnecting_removals() {
        // Every deletion disconnects a path graph, so no remove rows at all;
        // adds still work (path has plenty of candidates).
        let g = gen_path(6);
        let rows = tradeoff_trajectories(&g, 3, 5e-4).unwrap();
        assert!(rows.iter().all(|r| r.action != "remove"));
        assert_eq!(rows.iter().filter(|r| r.action == "add").count(), 3);
    }

    #[test]
    fn tradeoff_on_complete_graph_has_no_adds() {
        let g = gen_complete(5);
        let rows = tradeoff_trajectories(&g, 3, 5e-4).unwrap();
        assert!(rows.iter().all(|r| r.action != "add"));
        // K5 removals keep connectivity for a while.
        assert_eq!(rows.iter().filter(|r| r.action == "remove").count(), 3);
    }

    #[test]
    fn trajectory_csv_round_trips_floats() {
        let g = gen_bridged_triangles();
        let rows = tradeoff_trajectories(&g, 1, 5e-4).unwrap();
        let csv = trajectories_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("step,action,lambda2,mixing_steps"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "0");
        assert_eq!(first[1], "baseline");
        let l2: f64 = first[2].parse().unwrap();
        assert_eq!(l2, rows[0].lambda2);
    }

    #[test]
    fn bench_produces_two_rows_per_size() {
        let rows = bench_curvature(&[24, 32], BenchModel::Er, None, 6.0, 1, 3).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.mean_seconds >= 0.0));
        assert_eq!(rows[0].metric, "jlc");
        assert_eq!(rows[1].metric, "bfc");
        assert_eq!(rows[0].n, 24);
        assert_eq!(rows[3].n, 32);
        let csv = bench_to_csv(&rows);
        assert!(csv.starts_with("n,edges,metric,mean_seconds\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn grid_expansion_is_lexicographic_and_validates_keys() {
        let base = SweepCell::baseline();
        let cells = parse_grid(&json!({"pA": [0.3, 0.0], "alpha": [1.0, 0.5]}), &base).unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!((cells[0].p_add, cells[0].alpha), (0.0, 0.5));
        assert_eq!((cells[1].p_add, cells[1].alpha), (0.0, 1.0));
        assert_eq!((cells[2].p_add, cells[2].alpha), (0.3, 0.5));
        assert_eq!((cells[3].p_add, cells[3].alpha), (0.3, 1.0));
        // Untouched keys keep base values.
        assert!(cells.iter().all(|c| c.lr == base.lr && c.k == base.k));

        assert!(parse_grid(&json!({}), &base).is_err(), "empty grid");
        assert!(parse_grid(&json!({"nope": [1]}), &base).is_err(), "bad key");
        assert!(parse_grid(&json!({"pA": []}), &base).is_err(), "empty list");
        assert!(parse_grid(&json!([1, 2]), &base).is_err(), "not an object");
        let ks = parse_grid(&json!({"K": [3, 1, 3]}), &base).unwrap();
        assert_eq!(ks.iter().map(|c| c.k).collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn single_training_is_seed_deterministic() {
        let spec = DatasetSpec {
            source: DatasetSource::Sbm {
                sizes: vec![12, 12],
                p_in: 0.5,
                p_out: 0.1,
                feat_dim: None,
                noise_sigma: 0.6,
            },
            train_frac: 0.6,
            val_frac: 0.2,
        };
        let (ds, splits) = spec.realize(9).unwrap();
        let cell = SweepCell {
            p_add: 0.2,
            p_drop: 0.2,
            alpha: 0.5,
            ..SweepCell::baseline()
        };
        let a = run_single_training(&ds, &splits, Kernel::SymSelfloop, &cell, 20, 9).unwrap();
        let b = run_single_training(&ds, &splits, Kernel::SymSelfloop, &cell, 20, 9).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.test_acc, b.test_acc);
        assert!(a.fingerprint_match);
        assert!(a.model.w == b.model.w);
    }

    #[test]
    fn sweep_shares_datasets_and_orders_rows_by_cell() {
        let spec = DatasetSpec {
            source: DatasetSource::Sbm {
                sizes: vec![10, 10],
                p_in: 0.6,
                p_out: 0.1,
                feat_dim: None,
                noise_sigma: 0.5,
            },
            train_frac: 0.6,
            val_frac: 0.2,
        };
        let cells = parse_grid(&json!({"pA": [0.0, 0.2], "pD": [0.2]}), &SweepCell::baseline())
            .unwrap();
        assert_eq!(cells.len(), 2);
        let run = || {
            run_sweep(
                |s| spec.realize(s),
                &cells,
                Kernel::SymSelfloop,
                15,
                &[1, 2, 3],
                99,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.rows.len(), 2);
        assert_eq!(a.best, b.best);
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.val_accs, rb.val_accs);
            assert_eq!(ra.test_accs, rb.test_accs);
            assert_eq!(ra.test_ci, rb.test_ci);
            assert!(ra.test_ci.lo <= ra.mean_test_acc && ra.mean_test_acc <= ra.test_ci.hi);
        }
        // Cell (pA=0, pD=0.2) differs from (pA=0.2, pD=0.2): the rewired runs
        // must have consumed different randomness.
        assert_eq!(a.rows[0].cell.p_add, 0.0);
        assert_eq!(a.rows[1].cell.p_add, 0.2);
        let csv = sweep_to_csv(&a);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("pA,pD,"));
    }

    #[test]
    fn graph_specs_realize_deterministically() {
        let spec = GraphSpec::Er { n: 40, p: 0.2 };
        let a = spec.realize(5).unwrap();
        let b = spec.realize(5).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = spec.realize(6).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());

        let (g, reduced) = to_connected(GraphSpec::BridgedTriangles.realize(0).unwrap()).unwrap();
        assert!(!reduced);
        assert_eq!(g.n(), 6);
    }

    #[test]
    fn file_graph_spec_maps_errors_to_unreadable_input() {
        let err = GraphSpec::File(PathBuf::from("/definitely/not/here.txt"))
            .realize(0)
            .unwrap_err();
        assert_eq!(crate::exit_code_for(&err), crate::EXIT_UNREADABLE_INPUT);
    }
}
