//! `curverewire` — edge curvature, spectral diagnostics, and
//! curvature-guided rewiring experiments on undirected graphs.
//!
//! Exit codes: 0 success, 1 computation/argument failure, 2 unreadable input
//! file, 3 graph-fingerprint mismatch. All outputs except timing files are
//! bit-reproducible for a fixed `--seed`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, ensure, Context};
use clap::{Args, Parser, Subcommand};

use curverewire::experiments::{
    bench_curvature, bench_to_csv, parse_grid, run_single_training, run_sweep, sweep_to_csv,
    to_connected, tradeoff_trajectories, trajectories_to_csv, BenchModel, DatasetSource,
    DatasetSpec, GraphSpec, SweepCell, DEFAULT_NOISE_SIGMA,
};
use curverewire::record::{self, ExperimentRecord};
use curverewire::{exit_code_for, json_object, InputUnreadable};
use curverewire_core::curvature::{curvature_profile, write_curvature_csv, CurvatureMetric, CurvatureVector};
use curverewire_core::rewiring::EdgeBank;
use curverewire_core::sgc::{save_checkpoint, Kernel};
use curverewire_core::spectral::{
    cheeger_constant_exact, mixing_rate_cheeger_check, spectral_report, CHEEGER_MAX_NODES,
};

#[derive(Parser)]
#[command(
    name = "curverewire",
    version,
    about = "Edge curvature, spectral diagnostics, and curvature-guided graph rewiring"
)]
struct Cli {
    /// RNG seed; every output except timings is bit-reproducible for a fixed
    /// seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for output files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads (the CURVEREWIRE_THREADS environment variable takes
    /// precedence; default: one per logical CPU).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-edge curvature CSV plus a distribution profile
    Curvature(CurvatureArgs),
    /// Spectral gap, Cheeger bounds, and walk-mixing report
    Spectral(SpectralArgs),
    /// Greedy add/remove trajectories of the spectral gap
    Tradeoff(TradeoffArgs),
    /// Runtime comparison of JLC vs BFC full-graph passes
    Bench(BenchArgs),
    /// Train the linear graph classifier, optionally with stochastic rewiring
    Train(TrainArgs),
    /// Hyper-parameter grid sweep with bootstrap confidence intervals
    Sweep(SweepArgs),
    /// Build and dump the rewiring candidate bank
    Rewire(RewireArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Curvature(_) => "curvature",
            Command::Spectral(_) => "spectral",
            Command::Tradeoff(_) => "tradeoff",
            Command::Bench(_) => "bench",
            Command::Train(_) => "train",
            Command::Sweep(_) => "sweep",
            Command::Rewire(_) => "rewire",
        }
    }
}

/// Graph input: a file or a seeded generator.
#[derive(Args, Clone)]
struct GraphSourceArgs {
    /// Edge-list file: one `u v` pair per line (0-based), optional `n=<count>`
    /// header, `#` comments
    #[arg(long, conflicts_with = "model")]
    graph: Option<PathBuf>,
    /// Generator: er | sbm | path | cycle | complete | star | tree | bridged
    #[arg(long)]
    model: Option<String>,
    /// Node count (er/path/cycle/complete/star)
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability (er)
    #[arg(long)]
    p: Option<f64>,
    /// Block sizes, comma-separated (sbm)
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Within-block edge probability (sbm)
    #[arg(long)]
    p_in: Option<f64>,
    /// Cross-block edge probability (sbm)
    #[arg(long)]
    p_out: Option<f64>,
    /// Edge levels of the complete binary tree (tree)
    #[arg(long)]
    depth: Option<u32>,
}

impl GraphSourceArgs {
    fn spec(&self) -> anyhow::Result<GraphSpec> {
        if let Some(path) = &self.graph {
            return Ok(GraphSpec::File(path.clone()));
        }
        let Some(model) = &self.model else {
            bail!("no graph source: pass --graph FILE or --model NAME");
        };
        let need_n = || self.n.context("--n is required for this model");
        Ok(match model.as_str() {
            "er" => GraphSpec::Er {
                n: need_n()?,
                p: self.p.context("--p is required for er")?,
            },
            "sbm" => {
                ensure!(!self.sizes.is_empty(), "--sizes is required for sbm");
                GraphSpec::Sbm {
                    sizes: self.sizes.clone(),
                    p_in: self.p_in.context("--p-in is required for sbm")?,
                    p_out: self.p_out.context("--p-out is required for sbm")?,
                }
            }
            "path" => GraphSpec::Path { n: need_n()? },
            "cycle" => GraphSpec::Cycle { n: need_n()? },
            "complete" => GraphSpec::Complete { n: need_n()? },
            "star" => {
                let n = need_n()?;
                ensure!(n >= 2, "a star needs at least 2 nodes");
                GraphSpec::Star { leaves: n - 1 }
            }
            "tree" => GraphSpec::Tree {
                depth: self.depth.context("--depth is required for tree")?,
            },
            "bridged" => GraphSpec::BridgedTriangles,
            other => bail!(
                "unknown model {other:?} (expected er, sbm, path, cycle, complete, star, tree, or bridged)"
            ),
        })
    }
}

/// Training data: a dataset directory or a seeded SBM generator.
#[derive(Args, Clone)]
struct DatasetArgs {
    /// Dataset directory containing edges.txt, features.csv, labels.csv
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Generated SBM block sizes, comma-separated
    #[arg(long, value_delimiter = ',', default_value = "100,100")]
    sbm_sizes: Vec<usize>,
    /// Within-block edge probability of the generated SBM
    #[arg(long, default_value_t = 0.10)]
    p_in: f64,
    /// Cross-block edge probability of the generated SBM
    #[arg(long, default_value_t = 0.05)]
    p_out: f64,
    /// Feature dimension (default: one per class)
    #[arg(long)]
    feat_dim: Option<usize>,
    /// Standard deviation of the class-Gaussian feature noise
    #[arg(long, default_value_t = DEFAULT_NOISE_SIGMA)]
    noise_sigma: f64,
    /// Training fraction of the node split
    #[arg(long, default_value_t = 0.6)]
    train_frac: f64,
    /// Validation fraction of the node split
    #[arg(long, default_value_t = 0.2)]
    val_frac: f64,
}

impl DatasetArgs {
    fn spec(&self) -> anyhow::Result<DatasetSpec> {
        let source = if let Some(dir) = &self.data_dir {
            DatasetSource::Dir(dir.clone())
        } else {
            ensure!(!self.sbm_sizes.is_empty(), "--sbm-sizes must be non-empty");
            DatasetSource::Sbm {
                sizes: self.sbm_sizes.clone(),
                p_in: self.p_in,
                p_out: self.p_out,
                feat_dim: self.feat_dim,
                noise_sigma: self.noise_sigma,
            }
        };
        Ok(DatasetSpec {
            source,
            train_frac: self.train_frac,
            val_frac: self.val_frac,
        })
    }
}

/// Hyper-parameters shared by `train` and (as grid defaults) `sweep`.
#[derive(Args, Clone)]
struct HyperArgs {
    /// Propagation steps K
    #[arg(long = "K", default_value_t = 2)]
    k: usize,
    /// Propagation kernel: rw | rw_lazy | sym | sym_selfloop
    #[arg(long, default_value = "sym_selfloop")]
    kernel: String,
    /// Per-epoch edge-addition fraction p_A
    #[arg(long = "pA", default_value_t = 0.0)]
    p_add: f64,
    /// Per-epoch edge-drop fraction p_D
    #[arg(long = "pD", default_value_t = 0.0)]
    p_drop: f64,
    /// Curvature-vs-embedding mixing weight for rewiring logits
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Adam learning rate
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    /// L2 weight decay
    #[arg(long, default_value_t = 5e-4)]
    wd: f64,
    /// Inverted input-dropout probability
    #[arg(long, default_value_t = 0.0)]
    dropout: f64,
    /// Training epochs
    #[arg(long, default_value_t = 300)]
    epochs: usize,
}

impl HyperArgs {
    fn cell(&self) -> SweepCell {
        SweepCell {
            p_add: self.p_add,
            p_drop: self.p_drop,
            alpha: self.alpha,
            lr: self.lr,
            wd: self.wd,
            k: self.k,
            dropout: self.dropout,
        }
    }

    fn kernel(&self) -> anyhow::Result<Kernel> {
        Kernel::from_str(&self.kernel).map_err(anyhow::Error::msg)
    }
}

#[derive(Args)]
struct CurvatureArgs {
    #[command(flatten)]
    source: GraphSourceArgs,
    /// Curvature metric: jlc | bfc
    #[arg(long, default_value = "jlc")]
    metric: String,
    /// CSV output path (default <out-dir>/curvature.csv)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectralArgs {
    #[command(flatten)]
    source: GraphSourceArgs,
    /// Target accuracy for the mixing-steps estimate
    #[arg(long, default_value_t = 5e-4)]
    epsilon: f64,
    /// Report the lazy walk (half-identity) instead of the plain walk
    #[arg(long)]
    lazy: bool,
}

#[derive(Args)]
struct TradeoffArgs {
    #[command(flatten)]
    source: GraphSourceArgs,
    /// Number of greedy steps in each direction
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Target accuracy for the mixing-steps estimate
    #[arg(long, default_value_t = 5e-4)]
    epsilon: f64,
}

#[derive(Args)]
struct BenchArgs {
    /// Graph sizes to benchmark, comma-separated
    #[arg(long, value_delimiter = ',', default_value = "200,500,1000,2000")]
    sizes: Vec<usize>,
    /// Random graph family: er | sbm
    #[arg(long, default_value = "er")]
    model: String,
    /// Explicit edge probability (default: expected-degree / (n-1))
    #[arg(long)]
    p: Option<f64>,
    /// Expected degree when --p is not given
    #[arg(long, default_value_t = 10.0)]
    expected_degree: f64,
    /// Timed repetitions per size and metric
    #[arg(long, default_value_t = 10)]
    reps: usize,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Write the trained model checkpoint to this path
    #[arg(long)]
    save_model: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[command(flatten)]
    hyper: HyperArgs,
    /// JSON object mapping grid keys (pA pD alpha lr wd K dropout) to value
    /// arrays, or @path to a JSON file
    #[arg(long)]
    grid: String,
    /// Number of seeds (seed, seed+1, ...)
    #[arg(long = "seeds", default_value_t = 5)]
    num_seeds: usize,
}

#[derive(Args)]
struct RewireArgs {
    #[command(flatten)]
    source: GraphSourceArgs,
    /// Addition fraction p_A sizing the candidate bank
    #[arg(long = "pA", default_value_t = 0.3)]
    p_add: f64,
}

struct Ctx {
    seed: u64,
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    // clap would exit(2) on bad flags, but exit 2 is reserved for unreadable
    // inputs; argument problems are exit 1 (help/version stay 0).
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn init_threads(cli_threads: Option<usize>) -> anyhow::Result<()> {
    let from_env = match std::env::var("CURVEREWIRE_THREADS") {
        Ok(s) => Some(s.trim().parse::<usize>().with_context(|| {
            format!("CURVEREWIRE_THREADS={s:?} is not a valid thread count")
        })?),
        Err(_) => None,
    };
    if let Some(t) = from_env.or(cli_threads) {
        ensure!(t > 0, "thread count must be positive");
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the worker thread pool")?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads(cli.threads)?;
    record::ensure_dir(&cli.out_dir)?;
    let ctx = Ctx {
        seed: cli.seed,
        out_dir: cli.out_dir,
    };
    let started = Instant::now();
    match &cli.command {
        Command::Curvature(args) => cmd_curvature(&ctx, args)?,
        Command::Spectral(args) => cmd_spectral(&ctx, args)?,
        Command::Tradeoff(args) => cmd_tradeoff(&ctx, args)?,
        Command::Bench(args) => cmd_bench(&ctx, args)?,
        Command::Train(args) => cmd_train(&ctx, args)?,
        Command::Sweep(args) => cmd_sweep(&ctx, args)?,
        Command::Rewire(args) => cmd_rewire(&ctx, args)?,
    }
    let mut seconds = BTreeMap::new();
    seconds.insert("total".to_string(), started.elapsed().as_secs_f64());
    record::write_timings(&ctx.out_dir, cli.command.name(), &seconds)?;
    Ok(())
}

fn cmd_curvature(ctx: &Ctx, args: &CurvatureArgs) -> anyhow::Result<()> {
    let metric: CurvatureMetric = args.metric.parse()?;
    let spec = args.source.spec()?;
    let g = spec.realize(ctx.seed)?;
    let cv = CurvatureVector::compute(&g, metric);
    let csv = write_curvature_csv(&g, &cv)?;
    let csv_path = args
        .out
        .clone()
        .unwrap_or_else(|| ctx.out_dir.join("curvature.csv"));
    record::write_text(&csv_path, &csv)?;

    let mut rec = ExperimentRecord::new("curvature", ctx.seed);
    rec.params = json_object! {
        "graph": spec.describe(),
        "metric": metric.to_string(),
    };
    if g.num_edges() == 0 {
        eprintln!("note: graph has no edges; wrote an empty curvature table and no profile");
        rec.metrics = json_object! { "nodes": g.n(), "edges": 0 };
    } else {
        let profile = curvature_profile(&g, &cv)?;
        record::write_json(&ctx.out_dir.join("curvature-profile.json"), &profile)?;
        rec.metrics = json_object! {
            "nodes": g.n(),
            "edges": g.num_edges(),
            "min": profile.min,
            "max": profile.max,
            "mean": profile.mean,
            "most_negative_edge": profile.most_negative_edge,
            "most_negative_value": profile.most_negative_value,
        };
    }
    record::write_metrics(&ctx.out_dir, &rec)?;
    println!(
        "wrote {} ({} edges, metric {metric})",
        csv_path.display(),
        g.num_edges()
    );
    Ok(())
}

fn cmd_spectral(ctx: &Ctx, args: &SpectralArgs) -> anyhow::Result<()> {
    let spec = args.source.spec()?;
    let g0 = spec.realize(ctx.seed)?;
    let n0 = g0.n();
    let (g, reduced) = to_connected(g0)?;
    if reduced {
        eprintln!(
            "warning: graph is disconnected; analyzing the largest connected component ({} of {n0} nodes)",
            g.n()
        );
    }
    ensure!(
        g.n() >= 2,
        "spectral analysis needs a component with at least 2 nodes"
    );
    let report = spectral_report(&g, args.epsilon, args.lazy)?;
    let (method, cheeger, check) = if g.n() <= CHEEGER_MAX_NODES {
        (
            "exact",
            Some(cheeger_constant_exact(&g)?),
            Some(mixing_rate_cheeger_check(&g, args.epsilon)?),
        )
    } else {
        ("bounded-only", None, None)
    };
    let payload = serde_json::json!({
        "method": method,
        "report": report,
        "cheeger": cheeger,
        "mixing_rate_check": check,
    });
    record::write_json(&ctx.out_dir.join("spectral.json"), &payload)?;

    let mut rec = ExperimentRecord::new("spectral", ctx.seed);
    rec.params = json_object! {
        "graph": spec.describe(),
        "epsilon": args.epsilon,
        "lazy": args.lazy,
        "reduced_to_lcc": reduced,
    };
    rec.metrics = json_object! {
        "nodes": g.n(),
        "edges": g.num_edges(),
        "method": method,
        "lambda2": report.lambda2,
        "lambdaN": report.lambda_n,
        "lambda_prime": report.lambda_prime,
        "cheeger_lower": report.cheeger_lower,
        "cheeger_upper": report.cheeger_upper,
        "mixing_steps": report.mixing_steps,
        "cheeger_exact": cheeger.as_ref().map(|c| c.h),
        "mixing_rate_holds": check.as_ref().map(|c| c.holds),
    };
    record::write_metrics(&ctx.out_dir, &rec)?;
    println!(
        "lambda2={} mixing_steps={} method={method}",
        report.lambda2, report.mixing_steps
    );
    Ok(())
}

fn cmd_tradeoff(ctx: &Ctx, args: &TradeoffArgs) -> anyhow::Result<()> {
    let spec = args.source.spec()?;
    let g0 = spec.realize(ctx.seed)?;
    let n0 = g0.n();
    let (g, reduced) = to_connected(g0)?;
    if reduced {
        eprintln!(
            "warning: graph is disconnected; using the largest connected component ({} of {n0} nodes)",
            g.n()
        );
    }
    let rows = tradeoff_trajectories(&g, args.steps, args.epsilon)?;
    record::write_text(&ctx.out_dir.join("tradeoff.csv"), &trajectories_to_csv(&rows))?;

    let last_of = |action: &str| {
        rows.iter()
            .rev()
            .find(|r| r.action == action)
            .map(|r| r.lambda2)
    };
    let mut rec = ExperimentRecord::new("tradeoff", ctx.seed);
    rec.params = json_object! {
        "graph": spec.describe(),
        "steps": args.steps,
        "epsilon": args.epsilon,
        "reduced_to_lcc": reduced,
    };
    rec.metrics = json_object! {
        "rows": rows.len(),
        "baseline_lambda2": rows[0].lambda2,
        "baseline_mixing_steps": rows[0].mixing_steps,
        "final_add_lambda2": last_of("add"),
        "final_remove_lambda2": last_of("remove"),
    };
    record::write_metrics(&ctx.out_dir, &rec)?;
    println!(
        "wrote {} trajectory rows (baseline lambda2 = {})",
        rows.len(),
        rows[0].lambda2
    );
    Ok(())
}

fn cmd_bench(ctx: &Ctx, args: &BenchArgs) -> anyhow::Result<()> {
    let model: BenchModel = args.model.parse()?;
    let rows = bench_curvature(
        &args.sizes,
        model,
        args.p,
        args.expected_degree,
        args.reps,
        ctx.seed,
    )?;
    record::write_text(&ctx.out_dir.join("bench.csv"), &bench_to_csv(&rows))?;

    let mut edges = serde_json::Map::new();
    for row in rows.iter().filter(|r| r.metric == "jlc") {
        edges.insert(row.n.to_string(), serde_json::json!(row.edges));
    }
    let mut rec = ExperimentRecord::new("bench", ctx.seed);
    rec.params = json_object! {
        "sizes": args.sizes,
        "model": args.model,
        "p": args.p,
        "expected_degree": args.expected_degree,
        "reps": args.reps,
    };
    rec.metrics = json_object! { "edges_per_size": edges };
    record::write_metrics(&ctx.out_dir, &rec)?;

    for r in &rows {
        println!(
            "n={:<6} {}: {:.6} s/pass ({} edges)",
            r.n, r.metric, r.mean_seconds, r.edges
        );
    }
    Ok(())
}

fn cmd_train(ctx: &Ctx, args: &TrainArgs) -> anyhow::Result<()> {
    ensure!(args.hyper.epochs >= 1, "--epochs must be at least 1");
    let kernel = args.hyper.kernel()?;
    let cell = args.hyper.cell();
    let spec = args.data.spec()?;
    let (dataset, splits) = spec.realize(ctx.seed)?;
    let outcome = run_single_training(&dataset, &splits, kernel, &cell, args.hyper.epochs, ctx.seed)?;
    ensure!(
        outcome.fingerprint_match,
        "evaluation graph fingerprint diverged from the training graph"
    );
    record::write_text(&ctx.out_dir.join("history.csv"), &outcome.history.to_csv())?;

    if let Some(path) = &args.save_model {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                record::ensure_dir(parent)?;
            }
        }
        let file = File::create(path)
            .with_context(|| format!("creating checkpoint file {}", path.display()))?;
        save_checkpoint(&outcome.model, BufWriter::new(file))?;
    }

    let mut rec = ExperimentRecord::new("train", ctx.seed);
    rec.params = json_object! {
        "dataset": spec.describe(),
        "kernel": kernel.to_string(),
        "K": cell.k,
        "pA": cell.p_add,
        "pD": cell.p_drop,
        "alpha": cell.alpha,
        "lr": cell.lr,
        "wd": cell.wd,
        "dropout": cell.dropout,
        "epochs": args.hyper.epochs,
        "train_frac": spec.train_frac,
        "val_frac": spec.val_frac,
    };
    rec.metrics = json_object! {
        "nodes": dataset.graph.n(),
        "edges": dataset.graph.num_edges(),
        "classes": dataset.num_classes(),
        "split_sizes": [splits.train.len(), splits.val.len(), splits.test.len()],
        "trained_epochs": outcome.model.trained_epochs,
        "train_loss": outcome.train_loss,
        "train_acc": outcome.train_acc,
        "val_acc": outcome.val_acc,
        "test_acc": outcome.test_acc,
        "fingerprint_match": outcome.fingerprint_match,
    };
    record::write_metrics(&ctx.out_dir, &rec)?;
    println!(
        "test_acc={} val_acc={} fingerprint_match={}",
        outcome.test_acc, outcome.val_acc, outcome.fingerprint_match
    );
    Ok(())
}

fn cmd_sweep(ctx: &Ctx, args: &SweepArgs) -> anyhow::Result<()> {
    ensure!(args.hyper.epochs >= 1, "--epochs must be at least 1");
    ensure!(args.num_seeds >= 1, "--seeds must be at least 1");
    let kernel = args.hyper.kernel()?;
    let base = args.hyper.cell();

    let grid_text = if let Some(path) = args.grid.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| anyhow::Error::new(InputUnreadable(format!("{path}: {e}"))))?
    } else {
        args.grid.clone()
    };
    let grid_value: serde_json::Value =
        serde_json::from_str(&grid_text).context("parsing the --grid JSON")?;
    let cells = parse_grid(&grid_value, &base)?;
    let seeds: Vec<u64> = (0..args.num_seeds as u64)
        .map(|i| ctx.seed.wrapping_add(i))
        .collect();

    let spec = args.data.spec()?;
    let results = run_sweep(
        |s| spec.realize(s),
        &cells,
        kernel,
        args.hyper.epochs,
        &seeds,
        ctx.seed,
    )?;
    record::write_text(&ctx.out_dir.join("sweep.csv"), &sweep_to_csv(&results))?;

    let best = &results.rows[results.best];
    let mut rec = ExperimentRecord::new("sweep", ctx.seed);
    rec.params = json_object! {
        "dataset": spec.describe(),
        "kernel": kernel.to_string(),
        "epochs": args.hyper.epochs,
        "grid": grid_value,
        "seeds": seeds,
    };
    rec.metrics = json_object! {
        "cells": results.rows.len(),
        "best": serde_json::json!({
            "pA": best.cell.p_add,
            "pD": best.cell.p_drop,
            "alpha": best.cell.alpha,
            "lr": best.cell.lr,
            "wd": best.cell.wd,
            "K": best.cell.k,
            "dropout": best.cell.dropout,
            "mean_val_acc": best.mean_val_acc,
            "mean_test_acc": best.mean_test_acc,
            "test_ci_lo": best.test_ci.lo,
            "test_ci_hi": best.test_ci.hi,
        }),
    };
    record::write_metrics(&ctx.out_dir, &rec)?;
    println!(
        "best cell: pA={} pD={} alpha={} lr={} wd={} K={} dropout={} (val {}, test {})",
        best.cell.p_add,
        best.cell.p_drop,
        best.cell.alpha,
        best.cell.lr,
        best.cell.wd,
        best.cell.k,
        best.cell.dropout,
        best.mean_val_acc,
        best.mean_test_acc
    );
    Ok(())
}

fn cmd_rewire(ctx: &Ctx, args: &RewireArgs) -> anyhow::Result<()> {
    let spec = args.source.spec()?;
    let g = spec.realize(ctx.seed)?;
    let bank = EdgeBank::build(&g, args.p_add)?;
    record::write_json(&ctx.out_dir.join("bank.json"), &bank)?;

    let mut rec = ExperimentRecord::new("rewire", ctx.seed);
    rec.params = json_object! {
        "graph": spec.describe(),
        "pA": args.p_add,
    };
    rec.metrics = json_object! {
        "nodes": g.n(),
        "edges": g.num_edges(),
        "candidates": bank.candidates.len(),
    };
    record::write_metrics(&ctx.out_dir, &rec)?;
    println!(
        "bank: {} candidates from {} edges",
        bank.candidates.len(),
        g.num_edges()
    );
    Ok(())
}
