//! Closes the loop: reconstructs a model from its observable semigroup data
//! alone, aligns the recovered couplings with the originals through the
//! unitary gauge on the noise index, and certifies numerically that both
//! models generate the same semigroups and the same multi-interval vacuum
//! correlations.

use crate::error::{Error, Result};
use crate::fock::{FlowState, ToyFockConfig};
use crate::gns::{GnsResult, gns_construct};
use crate::linalg::polar_unitary;
use crate::model::ModelSpec;
use crate::operator::{C64, HVector, Operator};
use crate::random;
use crate::semigroup::{SemigroupData, semigroup_t, semigroup_z};

/// Reconstruction from the observable data (G, 𝓛) only; the stored coupling
/// list never enters.
pub fn reconstruct(model: &ModelSpec, tol_rank: f64) -> Result<GnsResult> {
    gns_construct(&SemigroupData::from_model(model), tol_rank)
}

/// Builds a model from a reconstruction result.
pub fn reconstructed_model(gns: &GnsResult) -> Result<ModelSpec> {
    ModelSpec::with_tolerance(gns.h_rec.clone(), gns.l_rec.clone(), 1e-10)
}

/// Solves the unitary alignment problem
/// W = argmin над unitaries of Σ_j ‖L_rec_j − Σ_k W_{jk} L_orig_k‖²_F
/// from the polar factor of the coupling overlap matrix. Returns W together
/// with the attained minimum.
pub fn match_unitary(l_orig: &[Operator], l_rec: &[Operator]) -> Result<(Operator, f64)> {
    if l_orig.len() != l_rec.len() {
        return Err(Error::NoiseDimMismatch {
            orig: l_orig.len(),
            rec: l_rec.len(),
        });
    }
    let d = l_orig.len();
    if d == 0 {
        return Err(Error::InvalidConfig(
            "match_unitary needs at least one coupling".into(),
        ));
    }
    let mut overlap = Operator::zeros(d, d);
    for (j, lr) in l_rec.iter().enumerate() {
        for (k, lo) in l_orig.iter().enumerate() {
            overlap.set(j, k, lr.vectorize().inner(&lo.vectorize()));
        }
    }
    let w = polar_unitary(&overlap.adjoint())?.transpose();
    let mut residual = 0.0;
    for (j, lr) in l_rec.iter().enumerate() {
        let mut mixed = Operator::zeros(lr.rows(), lr.cols());
        for (k, lo) in l_orig.iter().enumerate() {
            mixed = mixed.add(&lo.scale(w.get(j, k)));
        }
        residual += lr.sub(&mixed).frobenius_norm().powi(2);
    }
    Ok((w, residual))
}

/// Fixed multi-interval battery (up to three disjoint intervals, word length
/// ≤ 3) with vectors drawn from the given seed, evaluated on both models'
/// flows; returns the maximum absolute discrepancy.
pub fn correlation_battery_max_error(
    model_a: &ModelSpec,
    model_b: &ModelSpec,
    n_slots: usize,
    dt: f64,
    seed: u64,
) -> Result<f64> {
    if model_a.dim_h() != model_b.dim_h() {
        return Err(Error::DimensionMismatch {
            context: "correlation_battery",
            expected: format!("dim_h {}", model_a.dim_h()),
            actual: format!("dim_h {}", model_b.dim_h()),
        });
    }
    let mut worst = 0.0f64;
    for (corr_a, corr_b, _) in battery_values(model_a, model_b, n_slots, dt, seed)? {
        worst = worst.max((corr_a - corr_b).norm());
    }
    Ok(worst)
}

/// Interval patterns of the battery for a given horizon.
fn battery_patterns(n_slots: usize) -> Vec<Vec<(usize, usize)>> {
    let mut patterns = vec![vec![(0, n_slots.min(3))]];
    if n_slots >= 5 {
        patterns.push(vec![(0, 2), (3, 5)]);
    }
    if n_slots >= 8 {
        patterns.push(vec![(0, 2), (3, 4), (6, 8)]);
        patterns.push(vec![(1, 3), (4, 6), (7, 8)]);
    }
    patterns
}

type BatteryRow = (C64, C64, Vec<(usize, usize, HVector, HVector)>);

fn battery_values(
    model_a: &ModelSpec,
    model_b: &ModelSpec,
    n_slots: usize,
    dt: f64,
    seed: u64,
) -> Result<Vec<BatteryRow>> {
    let config_a = ToyFockConfig::new(n_slots, dt, model_a.noise_dim())?;
    let config_b = ToyFockConfig::new(n_slots, dt, model_b.noise_dim())?;
    let flow_a = FlowState::evolve(model_a, &config_a)?;
    let flow_b = FlowState::evolve(model_b, &config_b)?;
    let dim = model_a.dim_h();
    let mut rng = random::seeded_rng(seed);
    let mut rows = Vec::new();
    for pattern in battery_patterns(n_slots) {
        for _ in 0..3 {
            let specs: Vec<(usize, usize, HVector, HVector)> = pattern
                .iter()
                .map(|&(a, b)| {
                    (
                        a,
                        b,
                        random::random_unit_vector(&mut rng, dim),
                        random::random_unit_vector(&mut rng, dim),
                    )
                })
                .collect();
            let corr_a = flow_a.correlation(&specs)?;
            let corr_b = flow_b.correlation(&specs)?;
            rows.push((corr_a, corr_b, specs));
        }
    }
    Ok(rows)
}

/// Tolerances of the equivalence certificate.
#[derive(Debug, Clone)]
pub struct Tolerances {
    pub tol_rank: f64,
    pub procrustes: f64,
    pub h_match: f64,
    pub semigroup: f64,
    pub correlation: f64,
    pub factorization: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_rank: crate::gns::DEFAULT_TOL_RANK,
            procrustes: 1e-8,
            h_match: 1e-10,
            semigroup: 1e-8,
            correlation: 1e-8,
            factorization: 1e-12,
        }
    }
}

/// One named check with its measured value.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, value: f64, tolerance: f64) -> Check {
        Check {
            name,
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

/// Numerical certificate of the equivalence theorem for one model.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub d_orig: usize,
    pub d_rec: usize,
    pub gauge_w: Option<Operator>,
    pub procrustes_residual: Option<f64>,
    pub h_match_error: f64,
    pub t_max_error: f64,
    pub z_max_error: f64,
    pub correlation_max_error: f64,
    pub factorization_error: f64,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

pub const T_GRID: [f64; 4] = [0.1, 0.25, 0.5, 1.0];
pub const Z_GRID: [f64; 3] = [0.1, 0.5, 1.0];

/// Runs the whole certificate: reconstruct, align, compare semigroups on a
/// grid and vacuum correlations on the battery. Both flows share the same
/// observable data by construction, so the reported discrepancies measure
/// only numerical error; a genuinely different model fails loudly.
pub fn equivalence_report(
    model: &ModelSpec,
    config: &ToyFockConfig,
    tolerances: &Tolerances,
    seed: u64,
) -> Result<EquivalenceReport> {
    let gns = reconstruct(model, tolerances.tol_rank)?;
    let d_orig = model.noise_dim();
    let d_rec = gns.d_rec;
    let mut checks = Vec::new();
    checks.push(Check::new(
        "noise-dimension-match",
        (d_rec as f64 - d_orig as f64).abs(),
        0.0,
    ));

    let (gauge_w, procrustes_residual) = if d_orig == d_rec && d_rec > 0 {
        let (w, residual) = match_unitary(model.couplings(), &gns.l_rec)?;
        checks.push(Check::new("procrustes-residual", residual, tolerances.procrustes));
        (Some(w), Some(residual))
    } else if d_orig == d_rec {
        checks.push(Check::new("procrustes-residual", 0.0, tolerances.procrustes));
        (None, Some(0.0))
    } else {
        // Reported, never padded: a dependent coupling list shows up here.
        (None, None)
    };

    let h_match_error = gns.h_rec.sub(model.hamiltonian()).frobenius_norm();
    checks.push(Check::new("h-match", h_match_error, tolerances.h_match));

    let rec_model = reconstructed_model(&gns)?;

    let mut t_max_error = 0.0f64;
    for &t in &T_GRID {
        let a = semigroup_t(model, t)?;
        let b = semigroup_t(&rec_model, t)?;
        t_max_error = t_max_error.max(a.sub(&b).frobenius_norm());
    }
    checks.push(Check::new("t-grid", t_max_error, tolerances.semigroup));

    let mut z_max_error = 0.0f64;
    let mut rng = random::seeded_rng(seed ^ 0x5a5a_5a5a);
    for _ in 0..4 {
        let rho = random::random_density(&mut rng, model.dim_h());
        for &t in &Z_GRID {
            let a = semigroup_z(model, t, &rho)?;
            let b = semigroup_z(&rec_model, t, &rho)?;
            z_max_error = z_max_error.max(a.sub(&b).frobenius_norm());
        }
    }
    checks.push(Check::new("z-random", z_max_error, tolerances.semigroup));

    let mut correlation_max_error = 0.0f64;
    let mut factorization_error = 0.0f64;
    let rows = battery_values(model, &rec_model, config.n_slots, config.dt, seed)?;
    let flow = FlowState::evolve(model, config)?;
    for (corr_a, corr_b, specs) in rows {
        correlation_max_error = correlation_max_error.max((corr_a - corr_b).norm());
        // Disjoint intervals must factorize into vacuum compressions.
        let mut product = C64::new(1.0, 0.0);
        for (a, b, u, v) in &specs {
            let mut w = v.clone();
            for _ in *a..*b {
                w = flow.s_block().apply(&w);
            }
            product *= u.inner(&w);
        }
        factorization_error = factorization_error.max((corr_a - product).norm());
    }
    checks.push(Check::new(
        "correlation-battery",
        correlation_max_error,
        tolerances.correlation,
    ));
    checks.push(Check::new(
        "correlation-factorization",
        factorization_error,
        tolerances.factorization,
    ));

    let passed = checks.iter().all(|c| c.pass) && d_orig == d_rec;
    Ok(EquivalenceReport {
        d_orig,
        d_rec,
        gauge_w,
        procrustes_residual,
        h_match_error,
        t_max_error,
        z_max_error,
        correlation_max_error,
        factorization_error,
        checks,
        warnings: gns.warnings.clone(),
        passed,
    })
}
