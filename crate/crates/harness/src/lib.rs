//! Convergence experiments for the L1 solvers: self-convergence runs,
//! comparisons with the exact semidiscrete solution, rate fits and
//! CSV/JSON output.

pub mod config;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod oracle_rates;
pub mod rates;

pub use config::{ExperimentConfig, TargetProfile};
pub use error::{HarnessError, Result};
pub use rates::{fit_rate, RateFit, RateSummary, RateTable};
