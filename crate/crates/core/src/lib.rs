//! Numerical laboratory for Bohnenblust–Hille type inequalities restricted to
//! m-homogeneous polynomials whose monomials involve at most `M` distinct
//! variables.
//!
//! The crate is organized bottom-up:
//!
//! * [`poly`] exact combinatorics and polynomial algebra (multi-indices,
//!   enumeration of the supports, multinomials, symmetric multilinear forms);
//! * [`norms`] coefficient norms and bracketed estimates of the supremum norm
//!   on the polytorus;
//! * [`constants`] every explicit constant of the uniform bound, assembled in
//!   log-space;
//! * [`verify`] instance checks of each inequality step, certification and
//!   extremal search;
//! * [`cli`] the `bhlab` command line front-end.

// NaN must fail the `!(x >= bound)` style validity checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod cli;
pub mod constants;
pub mod error;
pub mod norms;
pub mod poly;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
