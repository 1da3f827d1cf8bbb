//! Time-harmonic elastic scattering toolkit.
//!
//! The crate covers the isotropic Lamé system `mu Delta u + (lambda + mu) grad div u + omega^2 u = f`:
//! Green tensors and far-field kernels, volume-potential solvers for source
//! and density-contrast scattering, complex geometric optics (CGO) probes with
//! their paraboloid integrals, and structural evaluators for radiation criteria.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod cgo;
pub mod elastic;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod greens;
pub mod jet;
pub mod linalg;
pub mod medium;
pub mod montecarlo;
pub mod potential;
pub mod programs;
pub mod quadrature;
pub mod source;
pub mod special;

pub use error::{Error, Result};
