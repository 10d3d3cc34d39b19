//! Finite element spaces, DOF maps and interpolation operators.

pub mod basis;
pub mod dofmap;
pub mod exact;
pub mod field;
pub mod interpolate;

pub use dofmap::{DofMap, LocalDof, SpaceKind, SpaceSet};
pub use exact::{check_exact_sequence, gradient_matrix, ExactSequenceReport};
pub use field::{FieldDump, FieldFunction};
pub use interpolate::{
    interpolate_clement, interpolate_fortin, interpolate_rt, rt_interpolation_matrix,
};
