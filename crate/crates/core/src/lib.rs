//! Exact-arithmetic sheaves of finite-dimensional vector spaces on finite
//! directed graphs: homology, twisted Betti numbers, maximum excess,
//! Galois graph theory, rho-kernels, and a mechanical verifier for the
//! graph-theoretic Strengthened Hanna Neumann inequality at desk scale.
//!
//! The modules mirror the mathematical layers:
//!
//! * [`digraph`] - finite directed multigraphs, bigraphs, morphisms,
//!   fibre products, girth and Abelian girth;
//! * [`linalg`] - exact GF(p) linear algebra and subspace arithmetic;
//! * [`galois`] - finite groups, Galois coordinates and covers, Cayley
//!   bigraphs, monodromy, normal extensions;
//! * [`sheaf`] - sheaves, restriction maps, homology, and the functors
//!   pullback / pushforward / extension by zero / tensor;
//! * [`twisted`] - twists, twisted Betti numbers by randomized generic
//!   specialization, and the Abelian Fourier decomposition check;
//! * [`excess`] - head/tail neighbourhoods, excess, and certified
//!   maximum-excess computation;
//! * [`rho`] - rho-kernels on Cayley bigraphs, vertex families, SHNC
//!   verification, and Stallings core ingestion;
//! * [`io`] - the text file formats shared with the CLI.

// index loops here usually walk several parallel arrays at once; the
// iterator rewrites clippy suggests are noisier than the indices
#![allow(clippy::needless_range_loop)]

pub mod digraph;
pub mod error;
pub mod excess;
pub mod galois;
pub mod io;
pub mod linalg;
pub mod rho;
pub mod rng;
pub mod sheaf;
pub mod twisted;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
