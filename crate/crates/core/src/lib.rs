//! Numerical verification engine for unitary quantum stochastic flows.
//!
//! From a finite-dimensional model (H, {L_j}) the crate builds the
//! expectation semigroups, evaluates the positive-definite kernel on letter
//! words, reconstructs the noise space and coupling operators by a
//! Kolmogorov/GNS construction, simulates the flow on a discretized Fock
//! space with exactly-unitary steps, and certifies the structural identities
//! tying all of these together.

pub mod equivalence;
pub mod error;
pub mod expm;
pub mod fock;
pub mod gns;
pub mod linalg;
pub mod model;
pub mod operator;
pub mod random;
pub mod semigroup;

pub use error::{Error, Result};
pub use model::{ModelSpec, Preset};
pub use operator::{C64, HVector, Operator};
