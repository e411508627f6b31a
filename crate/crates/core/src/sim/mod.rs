//! Exact operator dynamics on small systems: Pauli and Majorana string
//! algebra, Liouvillian evolution, and the exact correlators `C_ij`, `Ĉ_ij`.

use thiserror::Error;

pub mod evolve;
pub mod majorana;
pub mod models;
pub mod observables;
pub mod operator;
pub mod pauli;

pub use evolve::{evolve_operator, evolve_times, DenseEvolver, Evolved, Method};
pub use majorana::{gamma_commute, gamma_mul, MajoranaString};
pub use models::{build_syk_hamiltonian, random_pauli_model, syk_from_couplings, syk_variance, tightness_chain};
pub use observables::{c_ij_exact, c_ij_squared, hatc_ij_exact, hatc_ij_value, majorana_projector_keeps};
pub use operator::{liouvillian_apply, pauli_commutator, BasisKind, Hamiltonian, HamiltonianTerm, Key, OperatorVector};
pub use pauli::PauliString;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("system too large: {0}")]
    TooLarge(String),
    #[error("Krylov iteration did not converge at t = {t} (error estimate {estimate:e})")]
    KrylovNotConverged { t: f64, estimate: f64 },
    #[error("bad initial operator: {0}")]
    BadInitialOperator(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("SYK needs even q, got {0}")]
    OddQ(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
