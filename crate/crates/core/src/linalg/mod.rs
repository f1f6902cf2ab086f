//! Exact linear algebra over a prime field: rank, kernels, subspace
//! arithmetic in canonical echelon form, and totally independent matrices.

mod field;
mod matrix;
mod subspace;

pub use field::{PrimeField, DEFAULT_PRIME};
pub use matrix::Matrix;
pub use subspace::{
    enumerate_subspaces, is_totally_independent, vandermonde_totally_independent, Subspace,
};
