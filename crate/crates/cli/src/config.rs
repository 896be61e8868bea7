//! Scenario configuration: a single TOML file selecting a model (preset,
//! inline, or external file) plus run parameters and tolerances.

use std::path::Path;

use anyhow::{Context, Result, anyhow, bail};
use serde::Deserialize;

use hpflow_core::model::{ModelSpec, Preset};
use hpflow_core::operator::{C64, Operator};

pub const SUPPORTED_SCHEMA: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub schema_version: u32,
    pub scenario: String,
    pub model: RawModel,
    #[serde(default)]
    pub run: RunParams,
    #[serde(default)]
    pub tolerances: TolerancesConfig,
}

/// Exactly one of `preset`, `path`, or the inline fields must be present.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub preset: Option<String>,
    pub path: Option<String>,
    pub dim_h: Option<usize>,
    pub h: Option<Vec<Vec<[f64; 2]>>>,
    pub l: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

/// Standalone model file schema.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    pub dim_h: usize,
    pub h: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub l: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunParams {
    pub seed: u64,
    pub n_slots: usize,
    pub dt: f64,
    pub dt_list: Vec<f64>,
    pub rate_dt: f64,
    pub probe_dt_coarse: f64,
    pub probe_dt_fine: f64,
    pub samples: usize,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            seed: 42,
            n_slots: 8,
            dt: 0.125,
            dt_list: vec![1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0],
            rate_dt: 1e-3,
            probe_dt_coarse: 1e-2,
            probe_dt_fine: 1e-4,
            samples: 100,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TolerancesConfig {
    pub step_unitarity: f64,
    pub flow_unitarity: f64,
    pub factorization: f64,
    pub translation: f64,
    pub lindblad_trace: f64,
    pub z_trace: f64,
    pub positivity: f64,
    pub kernel: f64,
    pub gram: f64,
    pub sign_rule: f64,
    pub tol_rank: f64,
    pub procrustes: f64,
    pub h_match: f64,
    pub semigroup: f64,
    pub correlation: f64,
    pub sensitivity_floor: f64,
    pub convergence_lo: f64,
    pub convergence_hi: f64,
    pub gaussian_sqrt_rate: f64,
    pub gaussian_factor: f64,
}

impl Default for TolerancesConfig {
    fn default() -> Self {
        TolerancesConfig {
            step_unitarity: 1e-12,
            flow_unitarity: 1e-10,
            factorization: 1e-12,
            translation: 1e-12,
            lindblad_trace: 1e-12,
            z_trace: 1e-12,
            positivity: 1e-10,
            kernel: 1e-10,
            gram: 1e-10,
            sign_rule: 1e-12,
            tol_rank: 1e-9,
            procrustes: 1e-8,
            h_match: 1e-10,
            semigroup: 1e-8,
            correlation: 1e-8,
            sensitivity_floor: 1e-3,
            convergence_lo: 0.4,
            convergence_hi: 0.6,
            gaussian_sqrt_rate: 1e-1,
            gaussian_factor: 1e-2,
        }
    }
}

impl TolerancesConfig {
    fn validate(&self) -> Result<()> {
        let named = [
            ("step_unitarity", self.step_unitarity),
            ("flow_unitarity", self.flow_unitarity),
            ("factorization", self.factorization),
            ("translation", self.translation),
            ("lindblad_trace", self.lindblad_trace),
            ("z_trace", self.z_trace),
            ("positivity", self.positivity),
            ("kernel", self.kernel),
            ("gram", self.gram),
            ("sign_rule", self.sign_rule),
            ("tol_rank", self.tol_rank),
            ("procrustes", self.procrustes),
            ("h_match", self.h_match),
            ("semigroup", self.semigroup),
            ("correlation", self.correlation),
            ("sensitivity_floor", self.sensitivity_floor),
            ("convergence_lo", self.convergence_lo),
            ("convergence_hi", self.convergence_hi),
            ("gaussian_sqrt_rate", self.gaussian_sqrt_rate),
            ("gaussian_factor", self.gaussian_factor),
        ];
        for (name, value) in named {
            if !(value > 0.0 && value.is_finite()) {
                bail!("tolerances.{} must be positive, got {}", name, value);
            }
        }
        if self.convergence_lo >= self.convergence_hi {
            bail!("tolerances.convergence_lo must be below convergence_hi");
        }
        Ok(())
    }
}

/// Fully validated scenario.
#[derive(Debug)]
pub struct Scenario {
    pub name: String,
    pub model: ModelSpec,
    pub model_label: String,
    pub run: RunParams,
    pub tolerances: TolerancesConfig,
    /// Raw TOML echoed into the report.
    pub echo: toml::Value,
}

pub fn load_scenario(path: &Path, seed_override: Option<u64>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let echo: toml::Value = toml::from_str(&text)
        .map_err(|e| anyhow!("malformed config {}: {}", path.display(), e))?;
    let raw: RawConfig = toml::from_str(&text)
        .map_err(|e| anyhow!("malformed config {}: {}", path.display(), e))?;
    if raw.schema_version != SUPPORTED_SCHEMA {
        bail!(
            "config field schema_version: unsupported value {} (supported: {})",
            raw.schema_version,
            SUPPORTED_SCHEMA
        );
    }
    if raw.scenario.is_empty() || !raw.scenario.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        bail!("config field scenario: must be a nonempty [A-Za-z0-9_-]+ name");
    }
    raw.tolerances.validate()?;
    let mut run = raw.run.clone();
    if let Some(seed) = seed_override {
        run.seed = seed;
    }
    if !(run.dt > 0.0) || run.n_slots == 0 {
        bail!("config fields run.dt and run.n_slots must be positive");
    }
    let (model, model_label) = build_model(&raw.model, path, run.seed)?;
    Ok(Scenario {
        name: raw.scenario,
        model,
        model_label,
        run,
        tolerances: raw.tolerances,
        echo,
    })
}

fn build_model(raw: &RawModel, config_path: &Path, seed: u64) -> Result<(ModelSpec, String)> {
    let inline = raw.dim_h.is_some() || raw.h.is_some() || raw.l.is_some();
    match (&raw.preset, &raw.path, inline) {
        (Some(name), None, false) => {
            let preset = Preset::from_name(name).map_err(|e| anyhow!("model.preset: {}", e))?;
            Ok((preset.build(seed), format!("preset:{}", preset.name())))
        }
        (None, Some(rel), false) => {
            let model_path = config_path
                .parent()
                .unwrap_or_else(|| Path::new("."))
                .join(rel);
            let text = std::fs::read_to_string(&model_path)
                .with_context(|| format!("cannot read model file {}", model_path.display()))?;
            let file: ModelFile = toml::from_str(&text)
                .map_err(|e| anyhow!("malformed model file {}: {}", model_path.display(), e))?;
            if file.schema_version != SUPPORTED_SCHEMA {
                bail!(
                    "model file field schema_version: unsupported value {}",
                    file.schema_version
                );
            }
            let model = assemble_model(file.dim_h, &file.h, &file.l)?;
            Ok((model, format!("file:{}", rel)))
        }
        (None, None, true) => {
            let dim_h = raw
                .dim_h
                .ok_or_else(|| anyhow!("inline model: field dim_h is required"))?;
            let h = raw
                .h
                .as_ref()
                .ok_or_else(|| anyhow!("inline model: field h is required"))?;
            let l = raw.l.clone().unwrap_or_default();
            let model = assemble_model(dim_h, h, &l)?;
            Ok((model, "inline".to_string()))
        }
        _ => bail!("model: exactly one of preset, path, or inline fields must be given"),
    }
}

fn parse_matrix(rows: &[Vec<[f64; 2]>], context: &str) -> Result<Operator> {
    let n_rows = rows.len();
    if n_rows == 0 {
        bail!("{}: matrix has no rows", context);
    }
    let n_cols = rows[0].len();
    let mut entries = Vec::with_capacity(n_rows * n_cols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n_cols {
            bail!(
                "{}: row {} has {} entries, expected {}",
                context,
                i,
                row.len(),
                n_cols
            );
        }
        entries.extend(row.iter().map(|&[re, im]| C64::new(re, im)));
    }
    if n_rows != n_cols {
        bail!("{}: matrix is {}x{}, must be square", context, n_rows, n_cols);
    }
    Operator::from_entries(n_rows, n_cols, entries).map_err(|e| anyhow!("{}: {}", context, e))
}

fn assemble_model(dim_h: usize, h: &[Vec<[f64; 2]>], l: &[Vec<Vec<[f64; 2]>>]) -> Result<ModelSpec> {
    let hamiltonian = parse_matrix(h, "model field h")?;
    if hamiltonian.rows() != dim_h {
        bail!(
            "model field h: size {} does not match dim_h = {}",
            hamiltonian.rows(),
            dim_h
        );
    }
    let mut couplings = Vec::with_capacity(l.len());
    for (j, rows) in l.iter().enumerate() {
        let op = parse_matrix(rows, &format!("model field l[{}]", j))?;
        couplings.push(op);
    }
    ModelSpec::new(hamiltonian, couplings).map_err(|e| anyhow!("model validation: {}", e))
}
