//! Error metrics, convergence fits, the exact master-equation oracle and
//! cost benchmarks.

mod convergence;
mod cost;
mod master;
mod metrics;

pub use convergence::{convergence_study, meanfield_params, ConvergenceSetup, ErrorReport, InitialDensities};
pub use cost::{benchmark_cost, BenchCase, CostEntry, CostReport};
pub use master::{master_equation_exact, total_variation, MasterOptions, MasterSolution};
pub use metrics::{error_vs_direct, error_vs_meanfield, fit_loglog, sup_error, ErrorMode, LogLogFit};
