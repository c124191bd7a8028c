//! Numerics for Jackson integrals of symmetric Selberg type with two
//! points `x1`, `x2`.
//!
//! The crate builds the closed-form R-matrix of the associated q-KZ system
//! and its Gauss decompositions, the α̃-shift coefficient matrix, the q → 0
//! limits of the coefficient and connection matrices together with the
//! reconstructions they imply, evaluates the Jackson integrals by truncated
//! lattice summation, and checks the q-binomial identities the constructions
//! rest on.

// Range guards are written `!(x < bound)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compensated;
pub mod error;
pub mod gauss;
pub mod identities;
pub mod jackson;
pub mod limits;
pub mod matrix;
pub mod params;
pub mod qseries;
pub mod report;
pub mod weights;

pub use error::{QsError, Result};
pub use matrix::{CMatrix, Shape};
pub use num_complex::Complex64 as C64;
pub use params::{LimitParams, ParamSet};
