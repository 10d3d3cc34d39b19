//! Direct solvers and discrete stability estimates.

pub mod direct;
pub mod infsup;

pub use direct::{
    solve_symmetric_indefinite, solve_with_options, SolveMethod, SolveOptions, SolveReport,
};
pub use infsup::{estimate_infsup, InfSupEstimate, INFSUP_DENSE_LIMIT};
