//! Material law, quadrature, element matrices and global assembly.

pub mod assemble;
pub mod local;
pub mod material;
pub mod quadrature;

pub use assemble::{
    assemble, assemble_elasticity, assemble_load_scalar, assemble_load_vector, assemble_local,
};
pub use local::{local_coupling, local_elasticity, FormTag, LocalMatrix, DEFAULT_DEGREE};
pub use material::{apply_c, PlateMaterial, Tensor2};
pub use quadrature::{composite, quadrature, QuadratureRule};
