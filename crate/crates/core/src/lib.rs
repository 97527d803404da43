//! Forward and inverse spectral maps for finite-range perturbations of
//! finite gap Jacobi and CMV operators.
//!
//! The pipeline runs from a [`config::SingularityConfig`] (eigenvalues and
//! resonances over a [`finitegap::FiniteGapSet`]) to a
//! [`measure::SpectralMeasure`], to an algebraic m-function or
//! Carathéodory function ([`mfunc`]), and to recurrence coefficients by
//! coefficient stripping ([`stripping`]). [`oracle`] holds independent
//! brute-force cross-checks.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod finitegap;
pub mod json;
pub mod measure;
pub mod mfunc;
pub mod oracle;
pub mod poly;
pub mod quad;
pub mod stripping;

pub use error::{Error, Result};
pub use num_complex::Complex64;
