//! SU(1,1) covariant integral quantization of the unit disk.
//!
//! The discrete-series representation U^η acts on the Fock–Bargmann space with
//! orthonormal basis e_n ∝ z^n. An isotropic weight w(|z|²) on the disk defines a
//! diagonal quantizer M, whose displacements M(p(z)) = U(p(z)) M U(p(z))† resolve the
//! identity and map classical fields f(z) to operators A_f.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geometry;
pub mod portrait;
pub mod quantizer;
pub mod repn;
pub mod report;
pub mod specfun;

pub use error::{AdqError, Result};
