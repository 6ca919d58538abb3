//! Minimal SGC-style node classifier.
//!
//! SGC collapses a K-layer graph convolution into `softmax((Pᴷ X) W + b)`:
//! K sparse propagation steps applied to the raw features, followed by one
//! linear layer trained with full-batch Adam on cross-entropy. The graph
//! enters only through the propagation operator `P`, which makes the model
//! a clean probe for rewiring: during training each propagation step runs
//! on a freshly sampled [`RewiredView`](crate::graph::RewiredView) of the
//! original graph (drop/add sampling from the precomputed
//! [`EdgeBank`](crate::rewiring::EdgeBank)), while validation, testing, and
//! inference always use the untouched original graph.

use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Splits;
use crate::graph::{Graph, GraphError};
use crate::rewiring::{epoch_view, EdgeBank, RewiringConfig, RewiringError};

#[derive(Debug, Error)]
pub enum SgcError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Rewiring(#[from] RewiringError),
    #[error("node {0} is isolated; kernel {1} is undefined there (use a lenient propagator or the sym_selfloop kernel)")]
    IsolatedNode(usize, Kernel),
    #[error("{what}: got {got}, expected {expected}")]
    Shape {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("training split is empty")]
    EmptyTrainSplit,
    #[error("{name} = {value} is invalid: {why}")]
    BadHyper {
        name: &'static str,
        value: f64,
        why: &'static str,
    },
    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    Diverged { epoch: usize, loss: f64 },
    #[error("model was trained on graph fingerprint {found:#018x}, got {expected:#018x}")]
    FingerprintMismatch { expected: u64, found: u64 },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

/// Feature propagation kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// Random-walk `D⁻¹A`.
    Rw,
    /// Lazy random-walk `(I + D⁻¹A)/2`.
    RwLazy,
    /// Symmetric `D^{−1/2} A D^{−1/2}`.
    Sym,
    /// Self-loop-augmented symmetric `D̃^{−1/2} Ã D̃^{−1/2}` with
    /// `Ã = A + I` (defined even on isolated nodes).
    SymSelfloop,
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Kernel::Rw => "rw",
            Kernel::RwLazy => "rw_lazy",
            Kernel::Sym => "sym",
            Kernel::SymSelfloop => "sym_selfloop",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Kernel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rw" => Ok(Kernel::Rw),
            "rw_lazy" => Ok(Kernel::RwLazy),
            "sym" => Ok(Kernel::Sym),
            "sym_selfloop" => Ok(Kernel::SymSelfloop),
            other => Err(format!(
                "unknown kernel {other:?} (expected rw, rw_lazy, sym, or sym_selfloop)"
            )),
        }
    }
}

/// Sparse row-major propagation operator: `rows[i]` lists `(j, w)` with
/// `out_i = Σ w · x_j`.
#[derive(Clone, Debug)]
pub struct Propagator {
    rows: Vec<Vec<(usize, f64)>>,
    kernel: Kernel,
}

impl Propagator {
    /// Builds the operator for `g`. Errors on isolated nodes for the kernels
    /// that are undefined there (`rw`, `rw_lazy`, `sym`); `sym_selfloop` is
    /// always defined.
    pub fn new(g: &Graph, kernel: Kernel) -> Result<Self, SgcError> {
        if kernel != Kernel::SymSelfloop {
            for u in 0..g.n() {
                if g.degree(u) == 0 {
                    return Err(SgcError::IsolatedNode(u, kernel));
                }
            }
        }
        Ok(Self::build(g, kernel))
    }

    /// Builds the operator, treating any term with an undefined `1/d` as
    /// zero: an isolated node keeps a zero row (`rw`, `sym`) or only its
    /// lazy self-mass (`rw_lazy`). Intended for rewired training views,
    /// where edge drops may transiently isolate a node.
    pub fn new_lenient(g: &Graph, kernel: Kernel) -> Self {
        Self::build(g, kernel)
    }

    fn build(g: &Graph, kernel: Kernel) -> Self {
        let n = g.n();
        let deg: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(deg[i] + 1);
            match kernel {
                Kernel::Rw => {
                    if deg[i] > 0 {
                        let w = 1.0 / deg[i] as f64;
                        row.extend(g.neighbors(i).iter().map(|&j| (j, w)));
                    }
                }
                Kernel::RwLazy => {
                    row.push((i, 0.5));
                    if deg[i] > 0 {
                        let w = 0.5 / deg[i] as f64;
                        row.extend(g.neighbors(i).iter().map(|&j| (j, w)));
                    }
                }
                Kernel::Sym => {
                    if deg[i] > 0 {
                        row.extend(g.neighbors(i).iter().map(|&j| {
                            (j, 1.0 / ((deg[i] as f64) * (deg[j] as f64)).sqrt())
                        }));
                    }
                }
                Kernel::SymSelfloop => {
                    let di = (deg[i] + 1) as f64;
                    row.push((i, 1.0 / di));
                    row.extend(
                        g.neighbors(i)
                            .iter()
                            .map(|&j| (j, 1.0 / (di * (deg[j] + 1) as f64).sqrt())),
                    );
                    row.sort_unstable_by_key(|&(j, _)| j);
                }
            }
            rows.push(row);
        }
        Propagator { rows, kernel }
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Row `i` as `(column, weight)` pairs.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// One propagation step `P·X`. Deterministic regardless of the
    /// `parallel` feature (each output row is computed independently).
    #[cfg(feature = "parallel")]
    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        use rayon::prelude::*;
        let n = self.rows.len();
        let f = x.ncols();
        let mut out = Array2::<f64>::zeros((n, f));
        out.as_slice_mut()
            .expect("freshly allocated arrays are standard layout")
            .par_chunks_mut(f.max(1))
            .enumerate()
            .for_each(|(i, orow)| {
                for &(j, w) in &self.rows[i] {
                    let xr = x.row(j);
                    for (c, slot) in orow.iter_mut().enumerate() {
                        *slot += w * xr[c];
                    }
                }
            });
        out
    }

    #[cfg(not(feature = "parallel"))]
    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        let n = self.rows.len();
        let f = x.ncols();
        let mut out = Array2::<f64>::zeros((n, f));
        for i in 0..n {
            let mut orow = out.row_mut(i);
            for &(j, w) in &self.rows[i] {
                let xr = x.row(j);
                for c in 0..f {
                    orow[c] += w * xr[c];
                }
            }
        }
        out
    }

    /// `Pᵏ·X`.
    pub fn apply_steps(&self, x: &Array2<f64>, steps: usize) -> Array2<f64> {
        let mut h = x.clone();
        for _ in 0..steps {
            h = self.apply(&h);
        }
        h
    }
}

/// Architecture of the classifier.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModelConfig {
    pub kernel: Kernel,
    /// Number of propagation steps K.
    pub steps: usize,
}

/// Optimization hyperparameters.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    /// L2 penalty on the weight matrix (not the bias).
    pub weight_decay: f64,
    /// Inverted input dropout probability, in `[0, 1)`.
    pub dropout: f64,
    /// Per-epoch stochastic rewiring; `p_add = p_drop = 0` disables it.
    pub rewiring: RewiringConfig,
}

/// Trained classifier: one linear map on propagated features.
#[derive(Clone, Debug)]
pub struct Model {
    pub config: ModelConfig,
    /// `features × classes` weight matrix.
    pub w: Array2<f64>,
    /// Per-class bias.
    pub b: Array1<f64>,
    /// Fingerprint of the training graph; evaluation requires the same
    /// graph.
    pub graph_fingerprint: u64,
    pub trained_epochs: usize,
}

/// Per-epoch training statistics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean cross-entropy over the training split (before that epoch's
    /// update; excludes the weight-decay term).
    pub train_loss: f64,
    pub train_acc: f64,
    /// Accuracy on the validation split, computed on the original graph
    /// without dropout; 0 when the validation split is empty.
    pub val_acc: f64,
}

/// Training history.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub epochs: Vec<EpochStats>,
}

impl History {
    /// CSV with header `epoch,train_loss,train_acc,val_acc`, floats at full
    /// precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,train_acc,val_acc\n");
        for e in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.epoch,
                crate::fmt_f64(e.train_loss),
                crate::fmt_f64(e.train_acc),
                crate::fmt_f64(e.val_acc)
            ));
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<History, SgcError> {
        let mut epochs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (idx == 0 && line == "epoch,train_loss,train_acc,val_acc") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(SgcError::Checkpoint(format!(
                    "history line {}: expected 4 fields, got {}",
                    idx + 1,
                    fields.len()
                )));
            }
            let parse_f = |s: &str| {
                s.parse::<f64>().map_err(|e| {
                    SgcError::Checkpoint(format!("history line {}: {e}", idx + 1))
                })
            };
            epochs.push(EpochStats {
                epoch: fields[0].parse().map_err(|e| {
                    SgcError::Checkpoint(format!("history line {}: {e}", idx + 1))
                })?,
                train_loss: parse_f(fields[1])?,
                train_acc: parse_f(fields[2])?,
                val_acc: parse_f(fields[3])?,
            });
        }
        Ok(History { epochs })
    }
}

/// Loss and gradients of the linear head at `(w, b)` on propagated features
/// `z`: `data` is the mean cross-entropy over `idx`, `total` adds the
/// `weight_decay/2·‖w‖²` penalty; gradients match `total`.
pub struct LossGrad {
    pub data: f64,
    pub total: f64,
    pub grad_w: Array2<f64>,
    pub grad_b: Array1<f64>,
}

/// Computes cross-entropy loss and exact gradients for the linear head.
pub fn loss_and_grad(
    z: &Array2<f64>,
    w: &Array2<f64>,
    b: &Array1<f64>,
    labels: &[usize],
    idx: &[usize],
    weight_decay: f64,
) -> LossGrad {
    let classes = w.ncols();
    let inv = 1.0 / idx.len() as f64;
    let mut ce = 0.0;
    // grad_logits is nonzero only on the rows in idx.
    let mut grad_logits = Array2::<f64>::zeros((z.nrows(), classes));
    for &i in idx {
        let zi = z.row(i);
        let mut logits: Vec<f64> = (0..classes)
            .map(|c| zi.dot(&w.column(c)) + b[c])
            .collect();
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max
            + logits
                .iter()
                .map(|&l| (l - max).exp())
                .sum::<f64>()
                .ln();
        ce += (lse - logits[labels[i]]) * inv;
        for (c, l) in logits.iter_mut().enumerate() {
            let p = (*l - lse).exp();
            let target = if labels[i] == c { 1.0 } else { 0.0 };
            grad_logits[(i, c)] = (p - target) * inv;
        }
    }
    let mut grad_w = z.t().dot(&grad_logits);
    grad_w.scaled_add(weight_decay, w);
    let grad_b = grad_logits.sum_axis(ndarray::Axis(0));
    let penalty = 0.5 * weight_decay * w.iter().map(|x| x * x).sum::<f64>();
    LossGrad {
        data: ce,
        total: ce + penalty,
        grad_w,
        grad_b,
    }
}

fn logits_of(z: &Array2<f64>, w: &Array2<f64>, b: &Array1<f64>) -> Array2<f64> {
    let mut out = z.dot(w);
    for mut row in out.rows_mut() {
        row += b;
    }
    out
}

fn accuracy(logits: &Array2<f64>, labels: &[usize], idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 0.0;
    }
    let mut hits = 0usize;
    for &i in idx {
        let row = logits.row(i);
        let mut best = 0usize;
        for c in 1..row.len() {
            if row[c] > row[best] {
                best = c;
            }
        }
        if best == labels[i] {
            hits += 1;
        }
    }
    hits as f64 / idx.len() as f64
}

struct Adam {
    m_w: Array2<f64>,
    v_w: Array2<f64>,
    m_b: Array1<f64>,
    v_b: Array1<f64>,
    t: i32,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(features: usize, classes: usize) -> Self {
        Adam {
            m_w: Array2::zeros((features, classes)),
            v_w: Array2::zeros((features, classes)),
            m_b: Array1::zeros(classes),
            v_b: Array1::zeros(classes),
            t: 0,
        }
    }

    fn step(
        &mut self,
        w: &mut Array2<f64>,
        b: &mut Array1<f64>,
        gw: &Array2<f64>,
        gb: &Array1<f64>,
        lr: f64,
    ) {
        self.t += 1;
        let bc1 = 1.0 - Self::BETA1.powi(self.t);
        let bc2 = 1.0 - Self::BETA2.powi(self.t);
        ndarray::Zip::from(&mut self.m_w).and(gw).for_each(|m, &g| {
            *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
        });
        ndarray::Zip::from(&mut self.v_w).and(gw).for_each(|v, &g| {
            *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
        });
        ndarray::Zip::from(w)
            .and(&self.m_w)
            .and(&self.v_w)
            .for_each(|w, &m, &v| {
                *w -= lr * (m / bc1) / ((v / bc2).sqrt() + Self::EPS);
            });
        ndarray::Zip::from(&mut self.m_b).and(gb).for_each(|m, &g| {
            *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
        });
        ndarray::Zip::from(&mut self.v_b).and(gb).for_each(|v, &g| {
            *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
        });
        ndarray::Zip::from(b)
            .and(&self.m_b)
            .and(&self.v_b)
            .for_each(|b, &m, &v| {
                *b -= lr * (m / bc1) / ((v / bc2).sqrt() + Self::EPS);
            });
    }
}

fn validate_inputs(
    g: &Graph,
    features: &Array2<f64>,
    labels: &[usize],
    splits: &Splits,
    cfg: &TrainConfig,
) -> Result<usize, SgcError> {
    if features.nrows() != g.n() {
        return Err(SgcError::Shape {
            what: "feature rows",
            got: features.nrows(),
            expected: g.n(),
        });
    }
    if labels.len() != g.n() {
        return Err(SgcError::Shape {
            what: "label count",
            got: labels.len(),
            expected: g.n(),
        });
    }
    let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    if classes < 2 {
        return Err(SgcError::LabelOutOfRange { label: 0, classes });
    }
    for idx in [&splits.train, &splits.val, &splits.test] {
        for &i in idx {
            if i >= g.n() {
                return Err(SgcError::Shape {
                    what: "split index",
                    got: i,
                    expected: g.n(),
                });
            }
        }
    }
    if splits.train.is_empty() {
        return Err(SgcError::EmptyTrainSplit);
    }
    if !(cfg.lr > 0.0) {
        return Err(SgcError::BadHyper {
            name: "lr",
            value: cfg.lr,
            why: "must be positive",
        });
    }
    if !(0.0..1.0).contains(&cfg.dropout) {
        return Err(SgcError::BadHyper {
            name: "dropout",
            value: cfg.dropout,
            why: "must be in [0, 1)",
        });
    }
    if cfg.weight_decay < 0.0 {
        return Err(SgcError::BadHyper {
            name: "weight_decay",
            value: cfg.weight_decay,
            why: "must be nonnegative",
        });
    }
    cfg.rewiring.validate()?;
    Ok(classes)
}

/// Trains the classifier. Each epoch:
///
/// 1. inverted dropout on the input features;
/// 2. K propagation steps, each on a freshly sampled rewired view of `g`
///    (drops and adds from the bank, mixed with embedding distances of the
///    current layer input); the bank is built once up front;
/// 3. full-batch Adam on cross-entropy (+ L2 on the weights).
///
/// Validation accuracy is always computed on the **original** graph (its
/// propagated features are precomputed once). With
/// `p_add = p_drop = dropout = 0` training is fully deterministic and never
/// touches `rng`. A non-finite loss aborts with [`SgcError::Diverged`].
pub fn train<R: Rng + ?Sized>(
    g: &Graph,
    features: &Array2<f64>,
    labels: &[usize],
    splits: &Splits,
    model_cfg: &ModelConfig,
    train_cfg: &TrainConfig,
    rng: &mut R,
) -> Result<(Model, History), SgcError> {
    let classes = validate_inputs(g, features, labels, splits, train_cfg)?;
    let feat_dim = features.ncols();
    let rewiring_on = train_cfg.rewiring.p_add > 0.0 || train_cfg.rewiring.p_drop > 0.0;
    let bank = if rewiring_on && model_cfg.steps > 0 {
        Some(EdgeBank::build(g, train_cfg.rewiring.p_add)?)
    } else {
        None
    };
    // Clean propagated features for validation (original graph, no dropout).
    let z_eval = if model_cfg.steps > 0 {
        Propagator::new(g, model_cfg.kernel)?.apply_steps(features, model_cfg.steps)
    } else {
        features.clone()
    };
    let base_prop = if model_cfg.steps > 0 && !rewiring_on {
        Some(Propagator::new(g, model_cfg.kernel)?)
    } else {
        None
    };

    let mut w = Array2::<f64>::zeros((feat_dim, classes));
    let mut b = Array1::<f64>::zeros(classes);
    let mut adam = Adam::new(feat_dim, classes);
    let mut history = History::default();
    let keep = 1.0 - train_cfg.dropout;

    for epoch in 0..train_cfg.epochs {
        // Inverted input dropout.
        let mut h = features.clone();
        if train_cfg.dropout > 0.0 {
            for x in h.iter_mut() {
                if rng.random::<f64>() < train_cfg.dropout {
                    *x = 0.0;
                } else {
                    *x /= keep;
                }
            }
        }
        // Propagation, rewired per layer when enabled.
        if let Some(bank) = &bank {
            for _ in 0..model_cfg.steps {
                let view = epoch_view(g, bank, &h, &train_cfg.rewiring, rng)?;
                let rewired = view.materialize();
                h = Propagator::new_lenient(&rewired, model_cfg.kernel).apply(&h);
            }
        } else if let Some(prop) = &base_prop {
            h = prop.apply_steps(&h, model_cfg.steps);
        }

        let lg = loss_and_grad(&h, &w, &b, labels, &splits.train, train_cfg.weight_decay);
        if !lg.data.is_finite() {
            return Err(SgcError::Diverged {
                epoch,
                loss: lg.data,
            });
        }
        let train_logits = logits_of(&h, &w, &b);
        let val_logits = logits_of(&z_eval, &w, &b);
        history.epochs.push(EpochStats {
            epoch,
            train_loss: lg.data,
            train_acc: accuracy(&train_logits, labels, &splits.train),
            val_acc: accuracy(&val_logits, labels, &splits.val),
        });
        adam.step(&mut w, &mut b, &lg.grad_w, &lg.grad_b, train_cfg.lr);
    }

    Ok((
        Model {
            config: *model_cfg,
            w,
            b,
            graph_fingerprint: g.fingerprint(),
            trained_epochs: train_cfg.epochs,
        },
        history,
    ))
}

fn propagated_for(model: &Model, g: &Graph, features: &Array2<f64>) -> Result<Array2<f64>, SgcError> {
    if g.fingerprint() != model.graph_fingerprint {
        return Err(SgcError::FingerprintMismatch {
            expected: model.graph_fingerprint,
            found: g.fingerprint(),
        });
    }
    if features.nrows() != g.n() {
        return Err(SgcError::Shape {
            what: "feature rows",
            got: features.nrows(),
            expected: g.n(),
        });
    }
    if features.ncols() != model.w.nrows() {
        return Err(SgcError::Shape {
            what: "feature columns",
            got: features.ncols(),
            expected: model.w.nrows(),
        });
    }
    Ok(if model.config.steps > 0 {
        Propagator::new(g, model.config.kernel)?.apply_steps(features, model.config.steps)
    } else {
        features.clone()
    })
}

/// Predicted class per node, on the original (training) graph.
pub fn predict(model: &Model, g: &Graph, features: &Array2<f64>) -> Result<Vec<usize>, SgcError> {
    let z = propagated_for(model, g, features)?;
    let logits = logits_of(&z, &model.w, &model.b);
    Ok((0..g.n())
        .map(|i| {
            let row = logits.row(i);
            (0..row.len())
                .max_by(|&a, &b| row[a].total_cmp(&row[b]))
                .unwrap_or(0)
        })
        .collect())
}

/// Accuracy of `model` over `idx`. The graph must be the one the model was
/// trained on (checked by fingerprint).
pub fn evaluate(
    model: &Model,
    g: &Graph,
    features: &Array2<f64>,
    labels: &[usize],
    idx: &[usize],
) -> Result<f64, SgcError> {
    let z = propagated_for(model, g, features)?;
    let logits = logits_of(&z, &model.w, &model.b);
    Ok(accuracy(&logits, labels, idx))
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    kernel: Kernel,
    steps: usize,
    features: usize,
    classes: usize,
    fingerprint: String,
    trained_epochs: usize,
}

/// Writes the model as a one-line JSON header (shape and architecture)
/// followed by the raw little-endian f64 bytes of `w` (row-major) then `b`.
/// The round-trip through [`load_checkpoint`] is bit-exact.
pub fn save_checkpoint<W: std::io::Write>(model: &Model, mut out: W) -> Result<(), SgcError> {
    let header = CheckpointHeader {
        kernel: model.config.kernel,
        steps: model.config.steps,
        features: model.w.nrows(),
        classes: model.w.ncols(),
        fingerprint: format!("{:#018x}", model.graph_fingerprint),
        trained_epochs: model.trained_epochs,
    };
    let mut line = serde_json::to_string(&header)
        .map_err(|e| SgcError::Checkpoint(format!("header encode: {e}")))?;
    line.push('\n');
    let io = |e: std::io::Error| SgcError::Checkpoint(format!("write: {e}"));
    out.write_all(line.as_bytes()).map_err(io)?;
    for &x in model.w.iter() {
        out.write_all(&x.to_le_bytes()).map_err(io)?;
    }
    for &x in model.b.iter() {
        out.write_all(&x.to_le_bytes()).map_err(io)?;
    }
    Ok(())
}

/// Inverse of [`save_checkpoint`].
pub fn load_checkpoint<R: std::io::Read>(mut input: R) -> Result<Model, SgcError> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| SgcError::Checkpoint(format!("read: {e}")))?;
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| SgcError::Checkpoint("missing header line".to_string()))?;
    let header: CheckpointHeader = serde_json::from_slice(&bytes[..nl])
        .map_err(|e| SgcError::Checkpoint(format!("header decode: {e}")))?;
    let fp_digits = header
        .fingerprint
        .strip_prefix("0x")
        .unwrap_or(&header.fingerprint);
    let fingerprint = u64::from_str_radix(fp_digits, 16)
        .map_err(|e| SgcError::Checkpoint(format!("bad fingerprint: {e}")))?;
    let body = &bytes[nl + 1..];
    let expect = (header.features * header.classes + header.classes) * 8;
    if body.len() != expect {
        return Err(SgcError::Checkpoint(format!(
            "payload has {} bytes, expected {expect}",
            body.len()
        )));
    }
    let mut vals = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunks_exact yields 8 bytes")));
    let w = Array2::from_shape_vec(
        (header.features, header.classes),
        (&mut vals).take(header.features * header.classes).collect(),
    )
    .map_err(|e| SgcError::Checkpoint(format!("weight shape: {e}")))?;
    let b = Array1::from_vec(vals.collect());
    Ok(Model {
        config: ModelConfig {
            kernel: header.kernel,
            steps: header.steps,
        },
        w,
        b,
        graph_fingerprint: fingerprint,
        trained_epochs: header.trained_epochs,
    })
}
