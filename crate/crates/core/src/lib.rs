//! Lower bounds for the quadratic assignment problem from a facially reduced
//! semidefinite relaxation, solved by standard ADMM or by centering ADMM
//! (a log-barrier warm phase followed by standard ADMM).

pub mod admm;
pub mod bounds;
pub mod centering;
pub mod error;
pub mod harness;
pub mod lifting;
pub mod qaplib;
pub mod selftest;
pub mod symmat;
pub mod trace;

pub use admm::{run_standard, IterateState, Residuals, SolveOutcome, SolverConfig};
pub use bounds::{certified_lower_bound, kkt_residuals, primal_objective, BoundReport, KktResiduals};
pub use centering::{run_centering, CenteringConfig};
pub use error::{Error, Result};
pub use harness::{compare_methods, run_experiment, summary_table, ComparisonSeries, Method};
pub use lifting::Lifting;
pub use qaplib::{load_instance, parse_instance, PermutationMatrix, QapInstance};
pub use symmat::{DenseMatrix, SymMatrix};
pub use trace::{Phase, TraceRecord};
