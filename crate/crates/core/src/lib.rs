//! Mixed finite element discretizations of clamped Reissner-Mindlin and
//! Kirchhoff plates on polygons with holes.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: structured triangulations of squares with square holes,
//!   red refinement and boundary-component bookkeeping.
//! - [`spaces`]: the finite element spaces (P1 variants, rotated
//!   Bernardi-Raugel, rotated Raviart-Thomas, piecewise constants), their
//!   DOF maps and the interpolation operators.
//! - [`forms`]: material law, quadrature, local element matrices and global
//!   assembly into [`sparse::CsrMatrix`].
//! - [`schemes`]: the six block systems, shear recovery and the
//!   cross-check against the alternative multiplier formulation.
//! - [`solver`]: direct symmetric-indefinite solves and inf-sup estimates.
//! - [`harness`]: manufactured solutions, error norms, convergence and
//!   thickness sweeps, invariant verification.

pub mod error;
pub mod forms;
pub mod harness;
pub mod mesh;
pub mod poly;
pub mod schemes;
pub mod solver;
pub mod spaces;
pub mod sparse;

pub use error::{Error, Result};
