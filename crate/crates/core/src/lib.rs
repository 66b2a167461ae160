//! Bloch-Floquet fibering of lattice operators.
//!
//! A commutative symmetry algebra generated by `N` commuting unitaries with a
//! finite wandering system `{ψ_0, …, ψ_{q-1}}` splits the Hilbert space into a
//! direct integral of copies of `C^q` over the torus `T^N`. Every observable
//! that commutes with the symmetry is then a continuous field of `q × q`
//! matrices `t ↦ π_t(O)`. This crate builds the truncated lattice realization,
//! verifies the wandering property, extracts the hopping table of covariant
//! operators, fibers them over a uniform torus grid, and computes band data
//! and Chern numbers of the resulting Bloch bundles.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod finite_bf;
pub mod hilbert;
pub mod linalg;
pub mod models;
pub mod topology;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Tolerance for identities that hold exactly in the model (phase
/// commutation, Gram matrices, projector algebra).
pub const EXACT_TOL: f64 = 1e-12;

/// Tolerance for anything that passes through quadrature or an eigensolver.
pub const NUMERIC_TOL: f64 = 1e-8;
