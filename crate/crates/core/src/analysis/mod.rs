//! Error norms and convergence rates.

mod norms;
mod rates;

pub use norms::{dg_norm_error, l2_error, ExactSolution, GradField};
pub use rates::{observed_rates, predicted_rate, ConvergenceReport, ErrorRecord};
