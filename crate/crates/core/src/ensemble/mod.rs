//! Random Hamiltonian ensembles: sampling, Monte-Carlo `E[C_ij(t)^2]`, the
//! genus series and SYK bounds, and scrambling-time extraction.

use thiserror::Error;

use crate::sim::SimError;

pub mod montecarlo;
pub mod scrambling;
pub mod series;
pub mod spec;

pub use montecarlo::{mc_expect_c2, pairwise_sum, MCResult};
pub use scrambling::{scrambling_time_bound, scrambling_time_exact, ScrambleMode};
pub use series::{
    lambda_star, sqrtlogn_bound, syk_bound_rate, syk_genus0_bound, syk_largeq_exact_bound, syk_largeq_exact_rate,
    syk_rate_over_exact, syk_rate_ratio, theorem_fs_series, GenusSeries,
};
pub use spec::{default_initial, sample_hamiltonian, CouplingLaw, EnsembleSpec, EnsembleTerm, TermOp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsembleError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("genus {g_max} out of range for N = {n} (need g_max <= N - 1)")]
    GenusOutOfRange { g_max: usize, n: usize },
    #[error("q = {0} not allowed here (need even q > 2)")]
    BadQ(usize),
    #[error("threshold never reached on [{from}, {to}]")]
    NeverReached { from: f64, to: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
