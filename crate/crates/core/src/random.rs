//! Seeded generators for vectors, operators and models. Every randomized
//! check in the test batteries and the CLI goes through an explicit seed so
//! runs are reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::ModelSpec;
use crate::operator::{C64, HVector, Operator};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_vector<R: Rng>(rng: &mut R, dim: usize) -> HVector {
    HVector::from_entries((0..dim).map(|_| random_c64(rng)).collect())
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, dim: usize) -> HVector {
    loop {
        let v = random_vector(rng, dim);
        if v.norm() > 1e-3 {
            return v.normalized();
        }
    }
}

pub fn random_operator<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> Operator {
    let entries = (0..rows * cols)
        .map(|_| random_c64(rng) * C64::new(scale, 0.0))
        .collect();
    Operator::from_entries(rows, cols, entries).unwrap()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> Operator {
    let a = random_operator(rng, dim, dim, scale);
    a.add(&a.adjoint()).scale(C64::new(0.5, 0.0))
}

/// Positive semidefinite matrix with unit trace.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize) -> Operator {
    let a = random_operator(rng, dim, dim, 1.0);
    let psd = a.mul(&a.adjoint());
    let tr = psd.trace();
    psd.scale(C64::new(1.0 / tr.re, 0.0))
}

/// Haar-ish unitary: exponential of a random skew-Hermitian generator.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> Operator {
    let h = random_hermitian(rng, dim, 1.0);
    crate::expm::expm(&h.scale(crate::operator::I)).expect("unitary generation")
}

/// Model with a random Hamiltonian and `d` independent couplings, scaled so
/// all derived semigroups stay tame on unit time horizons.
pub fn random_model<R: Rng>(rng: &mut R, dim_h: usize, d: usize) -> ModelSpec {
    let h = random_hermitian(rng, dim_h, 0.5);
    let couplings = (0..d)
        .map(|_| random_operator(rng, dim_h, dim_h, 0.5))
        .collect();
    ModelSpec::new(h, couplings).expect("random model is valid by construction")
}
