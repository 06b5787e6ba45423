//! Numerical machinery for ρ-subspherical functions on the unit sphere,
//! subharmonic test functions built from convex gauges, weighted radial
//! counting functions of charges and zero divisors in the unit ball, and
//! executable forms of the integral growth inequalities and uniqueness
//! criteria for zero sets of holomorphic functions of bounded growth.

pub mod cli;
pub mod error;
pub mod gauge;
pub mod measures;
pub mod normalization;
pub mod quadrature;
pub mod sphere;
pub mod subspherical;
pub mod testfn;
pub mod theorems;

pub use error::{Error, Result};
