//! Experiment records and output-file helpers.
//!
//! Every command writes a `metrics.json` describing what ran and what came
//! out. Timing measurements are deliberately kept in a *separate*
//! `timings.json`: metrics files are byte-identical across repeated runs with
//! the same seed, timings never are.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::jsonfmt;

/// What a command ran and what it produced. Serialized through the
/// full-precision formatter; `params` and `metrics` are JSON objects whose
/// keys are stored sorted, so the bytes are reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub command: String,
    pub seed: u64,
    pub params: serde_json::Value,
    pub metrics: serde_json::Value,
}

impl ExperimentRecord {
    pub fn new(command: &str, seed: u64) -> Self {
        ExperimentRecord {
            command: command.to_string(),
            seed,
            params: serde_json::Value::Object(Default::default()),
            metrics: serde_json::Value::Object(Default::default()),
        }
    }
}

/// Create `dir` (and parents) if needed.
pub fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

/// Write `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Serialize `value` as pretty full-precision JSON into `path`.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    write_text(path, &jsonfmt::to_string_pretty(value)?)
}

/// Write the record to `out_dir/metrics.json` and return the path.
pub fn write_metrics(out_dir: &Path, record: &ExperimentRecord) -> anyhow::Result<PathBuf> {
    let path = out_dir.join("metrics.json");
    write_json(&path, record)?;
    Ok(path)
}

/// Write wall-clock timings to `out_dir/timings.json` and return the path.
pub fn write_timings(
    out_dir: &Path,
    command: &str,
    seconds: &BTreeMap<String, f64>,
) -> anyhow::Result<PathBuf> {
    #[derive(Serialize)]
    struct Timings<'a> {
        command: &'a str,
        seconds: &'a BTreeMap<String, f64>,
    }
    let path = out_dir.join("timings.json");
    write_json(
        &path,
        &Timings {
            command,
            seconds,
        },
    )?;
    Ok(path)
}

/// Build a `serde_json::Value` object from key/value pairs, failing on
/// non-finite floats (those would serialize as `null` and break round-trips).
#[macro_export]
macro_rules! json_object {
    ($($key:literal : $val:expr),* $(,)?) => {{
        let mut map = serde_json::Map::new();
        $(
            map.insert($key.to_string(), serde_json::json!($val));
        )*
        serde_json::Value::Object(map)
    }};
}
