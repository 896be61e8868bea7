//! Deterministic report emission: one structured JSON report per scenario
//! plus a flat CSV for convergence curves. Files are written atomically
//! (temp file + rename). Check values are deterministic for a fixed
//! (config, seed); the timing block is informational only.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde_json::{Map, Value, json};

/// How a measured value is judged.
#[derive(Debug, Clone, Copy)]
pub enum Bound {
    /// value ≤ tolerance
    AtMost(f64),
    /// value ≥ threshold (sensitivity probes)
    AtLeast(f64),
    /// lo ≤ value ≤ hi (convergence ratios)
    Within(f64, f64),
}

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
}

impl CheckRow {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> CheckRow {
        CheckRow {
            name: name.into(),
            value,
            bound: Bound::AtMost(tolerance),
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> CheckRow {
        CheckRow {
            name: name.into(),
            value,
            bound: Bound::AtLeast(threshold),
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> CheckRow {
        CheckRow {
            name: name.into(),
            value,
            bound: Bound::Within(lo, hi),
        }
    }

    pub fn pass(&self) -> bool {
        match self.bound {
            Bound::AtMost(tol) => self.value <= tol,
            Bound::AtLeast(thr) => self.value >= thr,
            Bound::Within(lo, hi) => self.value >= lo && self.value <= hi,
        }
    }

    fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("name".into(), json!(self.name));
        obj.insert("value".into(), json!(self.value));
        match self.bound {
            Bound::AtMost(tol) => {
                obj.insert("tolerance".into(), json!(tol));
            }
            Bound::AtLeast(thr) => {
                obj.insert("threshold".into(), json!(thr));
            }
            Bound::Within(lo, hi) => {
                obj.insert("lo".into(), json!(lo));
                obj.insert("hi".into(), json!(hi));
            }
        }
        obj.insert("pass".into(), json!(self.pass()));
        Value::Object(obj)
    }
}

/// Wall-clock phases, milliseconds. Excluded from determinism guarantees.
#[derive(Debug, Default)]
pub struct Timing {
    pub load_ms: f64,
    pub run_ms: f64,
}

pub struct PhaseClock(Instant);

impl PhaseClock {
    pub fn start() -> PhaseClock {
        PhaseClock(Instant::now())
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}

pub struct RunReport {
    pub command: String,
    pub scenario: String,
    pub model_label: String,
    pub seed: u64,
    pub config_echo: toml::Value,
    pub checks: Vec<CheckRow>,
    pub extra: Map<String, Value>,
    pub timing: Timing,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass())
    }

    fn to_json(&self) -> Value {
        json!({
            "artifact": "hpflow",
            "artifact_version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "scenario": self.scenario,
            "model": self.model_label,
            "seed": self.seed,
            "config": toml_to_json(&self.config_echo),
            "checks": self.checks.iter().map(CheckRow::to_json).collect::<Vec<_>>(),
            "extra": Value::Object(self.extra.clone()),
            "passed": self.passed(),
            "timing_ms": {
                "load": self.timing.load_ms,
                "run": self.timing.run_ms,
            },
        })
    }

    /// Writes `report.<scenario>.json` into `out_dir`, atomically.
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = out_dir.join(format!("report.{}.json", self.scenario));
        let body = serde_json::to_string_pretty(&self.to_json())? + "\n";
        atomic_write(&path, body.as_bytes())?;
        Ok(path)
    }

    /// One human-oriented line per check on stdout.
    pub fn print_summary(&self) {
        for check in &self.checks {
            let bound = match check.bound {
                Bound::AtMost(tol) => format!("<= {:.3e}", tol),
                Bound::AtLeast(thr) => format!(">= {:.3e}", thr),
                Bound::Within(lo, hi) => format!("in [{}, {}]", lo, hi),
            };
            println!(
                "check {:<32} {:>12.5e} {} ... {}",
                check.name,
                check.value,
                bound,
                if check.pass() { "pass" } else { "FAIL" }
            );
        }
        println!(
            "scenario {}: {}",
            self.scenario,
            if self.passed() { "PASS" } else { "FAIL" }
        );
    }
}

fn toml_to_json(value: &toml::Value) -> Value {
    match value {
        toml::Value::String(s) => json!(s),
        toml::Value::Integer(i) => json!(i),
        toml::Value::Float(f) => json!(f),
        toml::Value::Boolean(b) => json!(b),
        toml::Value::Datetime(d) => json!(d.to_string()),
        toml::Value::Array(items) => Value::Array(items.iter().map(toml_to_json).collect()),
        toml::Value::Table(table) => {
            let mut obj = Map::new();
            for (k, v) in table {
                obj.insert(k.clone(), toml_to_json(v));
            }
            Value::Object(obj)
        }
    }
}

/// Writes `curve.<scenario>.csv` with header `dt,error`, atomically.
pub fn write_curve(out_dir: &Path, scenario: &str, rows: &[(f64, f64)]) -> Result<PathBuf> {
    let path = out_dir.join(format!("curve.{}.csv", scenario));
    let mut body = String::from("dt,error\n");
    for (dt, error) in rows {
        body.push_str(&format!("{},{}\n", dt, error));
    }
    atomic_write(&path, body.as_bytes())?;
    Ok(path)
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)
        .with_context(|| format!("cannot write temporary file {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("cannot move report into place at {}", path.display()))?;
    Ok(())
}
