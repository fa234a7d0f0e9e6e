//! Exact curvature of homogeneous Riemannian supermanifolds and invariant
//! Einstein metrics on flag supermanifolds of SU(m|n) and SOSp(2|2n).
//!
//! All arithmetic is exact: rationals, or the field Q(ζ) with ζ⁴ = −1 while a
//! complex matrix model is being reduced to a real form.

// index loops mirror the tensor notation they implement
#![allow(clippy::needless_range_loop)]

pub mod curvature;
pub mod einstein;
pub mod error;
pub mod flag;
pub mod linalg;
pub mod roots;
pub mod scalars;
pub mod superalgebra;
pub mod verify;

pub use error::{Error, Result};
