//! Model definition: an initial-space Hamiltonian together with an ordered
//! list of noise coupling operators.

use crate::error::{Error, Result};
use crate::operator::{C64, HVector, Operator};
use crate::random;

pub const HERMITICITY_TOL: f64 = 1e-12;

/// Finite-dimensional model (dim_h, H, [L_1..L_d]); the single source of
/// truth for every derived semigroup, kernel and flow.
///
/// `d = 0` is legal and means purely Hamiltonian drift.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    dim_h: usize,
    hamiltonian: Operator,
    couplings: Vec<Operator>,
}

impl ModelSpec {
    pub fn new(hamiltonian: Operator, couplings: Vec<Operator>) -> Result<Self> {
        Self::with_tolerance(hamiltonian, couplings, HERMITICITY_TOL)
    }

    pub fn with_tolerance(
        hamiltonian: Operator,
        couplings: Vec<Operator>,
        hermiticity_tol: f64,
    ) -> Result<Self> {
        if !hamiltonian.is_square() {
            return Err(Error::NotSquare {
                rows: hamiltonian.rows(),
                cols: hamiltonian.cols(),
            });
        }
        let dim_h = hamiltonian.rows();
        let defect = hamiltonian.hermitian_defect();
        if defect >= hermiticity_tol {
            return Err(Error::NonHermitian {
                defect,
                tol: hermiticity_tol,
            });
        }
        for l in &couplings {
            if l.rows() != dim_h || l.cols() != dim_h {
                return Err(Error::DimensionMismatch {
                    context: "ModelSpec coupling operator",
                    expected: format!("{}x{}", dim_h, dim_h),
                    actual: format!("{}x{}", l.rows(), l.cols()),
                });
            }
        }
        Ok(ModelSpec {
            dim_h,
            hamiltonian,
            couplings,
        })
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn couplings(&self) -> &[Operator] {
        &self.couplings
    }

    /// Noise dimension, the length of the coupling list.
    pub fn noise_dim(&self) -> usize {
        self.couplings.len()
    }

    pub fn basis(&self, index: usize) -> HVector {
        HVector::basis(self.dim_h, index)
    }

    /// Replaces the couplings by W·L for a unitary gauge W on the noise
    /// index; all observable semigroups are invariant under this.
    pub fn gauged(&self, w: &Operator) -> Result<ModelSpec> {
        let d = self.noise_dim();
        if w.rows() != d || w.cols() != d {
            return Err(Error::DimensionMismatch {
                context: "gauge unitary",
                expected: format!("{}x{}", d, d),
                actual: format!("{}x{}", w.rows(), w.cols()),
            });
        }
        let mut new_couplings = Vec::with_capacity(d);
        for j in 0..d {
            let mut acc = Operator::zeros(self.dim_h, self.dim_h);
            for k in 0..d {
                acc = acc.add(&self.couplings[k].scale(w.get(j, k)));
            }
            new_couplings.push(acc);
        }
        ModelSpec::new(self.hamiltonian.clone(), new_couplings)
    }
}

/// Lowering operator |e0⟩⟨e1| on C².
pub fn sigma_minus() -> Operator {
    let mut m = Operator::zeros(2, 2);
    m.set(0, 1, C64::new(1.0, 0.0));
    m
}

pub fn sigma_z() -> Operator {
    Operator::diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)])
}

pub fn sigma_x() -> Operator {
    let mut m = Operator::zeros(2, 2);
    m.set(0, 1, C64::new(1.0, 0.0));
    m.set(1, 0, C64::new(1.0, 0.0));
    m
}

/// Built-in benchmark models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Two-level amplitude damping: H = 0, L = σ₋.
    AmplitudeDamping,
    /// Two-level dephasing: H = 0, L = σ_z/√2.
    Dephasing,
    /// Three-level model with two seeded random couplings.
    QutritRandom,
    /// Purely Hamiltonian two-level drift, no noise.
    PureHamiltonian,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::AmplitudeDamping,
        Preset::Dephasing,
        Preset::QutritRandom,
        Preset::PureHamiltonian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::AmplitudeDamping => "amplitude-damping",
            Preset::Dephasing => "dephasing",
            Preset::QutritRandom => "qutrit-random",
            Preset::PureHamiltonian => "pure-hamiltonian",
        }
    }

    pub fn from_name(name: &str) -> Result<Preset> {
        match name {
            "amplitude-damping" => Ok(Preset::AmplitudeDamping),
            "dephasing" => Ok(Preset::Dephasing),
            "qutrit-random" | "random" => Ok(Preset::QutritRandom),
            "pure-hamiltonian" => Ok(Preset::PureHamiltonian),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    /// Instantiates the model. The seed only matters for `QutritRandom`.
    pub fn build(&self, seed: u64) -> ModelSpec {
        match self {
            Preset::AmplitudeDamping => {
                ModelSpec::new(Operator::zeros(2, 2), vec![sigma_minus()]).unwrap()
            }
            Preset::Dephasing => {
                let l = sigma_z().scale(C64::new(1.0 / 2f64.sqrt(), 0.0));
                ModelSpec::new(Operator::zeros(2, 2), vec![l]).unwrap()
            }
            Preset::QutritRandom => {
                let mut rng = random::seeded_rng(seed);
                random::random_model(&mut rng, 3, 2)
            }
            Preset::PureHamiltonian => {
                let h = sigma_x().scale(C64::new(0.5, 0.0));
                ModelSpec::new(h, vec![]).unwrap()
            }
        }
    }
}
