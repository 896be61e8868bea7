//! Expectation semigroups derived from a model.
//!
//! From (H, {L_j}) we form the contraction generator G = iH − ½Σ L_j†L_j,
//! the expectation semigroup T_t = e^{tG}, the trace-preserving semigroup
//! Z_t generated by 𝓛ρ = Gρ + ρG† + Σ L_j ρ L_j†, the adjoint-flow
//! semigroup F_t, and the two-fold product generator used as the closed-form
//! partner of the simulator's two-point finite difference.

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::fock::{FlowState, ToyFockConfig};
use crate::model::ModelSpec;
use crate::operator::{C64, I, Operator, tensor};

/// G = iH − ½ Σ_j L_j†L_j. Satisfies G + G† = −Σ_j L_j†L_j.
pub fn build_g(model: &ModelSpec) -> Operator {
    let mut g = model.hamiltonian().scale(I);
    for l in model.couplings() {
        g = g.sub(&l.adjoint().mul(l).scale(C64::new(0.5, 0.0)));
    }
    g
}

/// T_t = e^{tG}, a contraction semigroup on the initial space.
pub fn semigroup_t(model: &ModelSpec, t: f64) -> Result<Operator> {
    if t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    expm(&build_g(model).scale(C64::new(t, 0.0)))
}

/// 𝓛ρ = Gρ + ρG† + Σ_j L_j ρ L_j†, applied directly (not vectorized).
pub fn lindblad_apply(model: &ModelSpec, rho: &Operator) -> Result<Operator> {
    check_density_shape(model, rho, "lindblad_apply")?;
    let g = build_g(model);
    let mut out = g.mul(rho).add(&rho.mul(&g.adjoint()));
    for l in model.couplings() {
        out = out.add(&l.mul(rho).mul(&l.adjoint()));
    }
    Ok(out)
}

fn check_density_shape(model: &ModelSpec, rho: &Operator, context: &'static str) -> Result<()> {
    if rho.rows() != model.dim_h() || rho.cols() != model.dim_h() {
        return Err(Error::DimensionMismatch {
            context,
            expected: format!("{0}x{0}", model.dim_h()),
            actual: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    Ok(())
}

/// Vectorized superoperator acting on row-major matrix vectorizations,
/// under which A ρ B has matrix A ⊗ Bᵀ.
#[derive(Debug, Clone)]
pub struct SuperOperator {
    dim: usize,
    matrix: Operator,
}

impl SuperOperator {
    /// The Lindblad generator as a dense dim²×dim² matrix.
    pub fn lindblad(model: &ModelSpec) -> SuperOperator {
        let g = build_g(model);
        Self::lindblad_from_parts(&g, model.couplings())
    }

    /// Assembles G ⊗ I + I ⊗ conj(G) + Σ_j L_j ⊗ conj(L_j).
    pub fn lindblad_from_parts(g: &Operator, couplings: &[Operator]) -> SuperOperator {
        let dim = g.rows();
        let id = Operator::identity(dim);
        let mut m = tensor(g, &id).add(&tensor(&id, &g.conj()));
        for l in couplings {
            m = m.add(&tensor(l, &l.conj()));
        }
        SuperOperator { dim, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn apply(&self, rho: &Operator) -> Operator {
        let v = self.matrix.apply(&rho.vectorize());
        Operator::from_entries(self.dim, self.dim, v.entries().to_vec())
            .expect("superoperator output shape")
    }

    /// e^{tM} applied to the vectorized argument.
    pub fn exp_apply(&self, t: f64, rho: &Operator) -> Result<Operator> {
        if t < 0.0 {
            return Err(Error::NegativeTime { t });
        }
        let propagator = expm(&self.matrix.scale(C64::new(t, 0.0)))?;
        let v = propagator.apply(&rho.vectorize());
        Operator::from_entries(self.dim, self.dim, v.entries().to_vec())
    }
}

/// Z_t ρ = e^{t𝓛} ρ through the vectorized superoperator: trace preserving,
/// positive on positive inputs.
pub fn semigroup_z(model: &ModelSpec, t: f64, rho: &Operator) -> Result<Operator> {
    check_density_shape(model, rho, "semigroup_z")?;
    SuperOperator::lindblad(model).exp_apply(t, rho)
}

/// F_t ρ, the adjoint-flow compression Tr_Γ[V_t† (ρ ⊗ |Ω⟩⟨Ω|) V_t],
/// evaluated on the discretized flow with `n_steps` slots of width t/n_steps.
///
/// There is no closed-form generator for F here; grid evaluation through the
/// simulator is the contract.
pub fn semigroup_f(model: &ModelSpec, t: f64, rho: &Operator, n_steps: usize) -> Result<Operator> {
    if t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    check_density_shape(model, rho, "semigroup_f")?;
    if t == 0.0 || n_steps == 0 {
        return Ok(rho.clone());
    }
    let config = ToyFockConfig::new(n_steps, t / n_steps as f64, model.noise_dim())?;
    let flow = FlowState::evolve(model, &config)?;
    flow.compress_adjoint(rho)
}

/// The observable face of a model: the expectation generator G and the
/// vectorized Lindblad generator. Kernel evaluation and reconstruction
/// consume only this, never the stored coupling list, so recovering the
/// couplings from it is a genuine inverse problem.
#[derive(Debug, Clone)]
pub struct SemigroupData {
    dim_h: usize,
    g: Operator,
    lindblad: SuperOperator,
}

impl SemigroupData {
    pub fn from_model(model: &ModelSpec) -> SemigroupData {
        SemigroupData {
            dim_h: model.dim_h(),
            g: build_g(model),
            lindblad: SuperOperator::lindblad(model),
        }
    }

    pub fn new(g: Operator, lindblad: SuperOperator) -> SemigroupData {
        SemigroupData {
            dim_h: g.rows(),
            g,
            lindblad,
        }
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn g(&self) -> &Operator {
        &self.g
    }

    pub fn lindblad_apply(&self, rho: &Operator) -> Operator {
        self.lindblad.apply(rho)
    }
}

/// Closed-form generator of the two-fold product semigroup on h ⊗ h:
/// G ⊗ 1 + 1 ⊗ G − Σ_j L_j† ⊗ L_j.
///
/// Not stated in closed form anywhere upstream; its correctness is gated by
/// the finite-difference oracle `fock::two_point_rate`.
pub fn product_generator2(model: &ModelSpec) -> Operator {
    let g = build_g(model);
    let id = Operator::identity(model.dim_h());
    let mut m = tensor(&g, &id).add(&tensor(&id, &g));
    for l in model.couplings() {
        m = m.sub(&tensor(&l.adjoint(), l));
    }
    m
}
