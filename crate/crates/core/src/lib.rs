//! Correlation functions, spectral densities and master-equation coefficients
//! for a weakly nonlinear Josephson-junction-array bath coupled to an LC
//! oscillator.
//!
//! Units throughout: ħ = k_B = e = 1. Energies are in an arbitrary common unit
//! (typically the charging energy E_C or the reference E_C0), times are in the
//! inverse of that unit, and the coupling prefactor (ε_I/2e)² reduces to
//! (ε_I/2)².

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod duality;
pub mod error;
pub mod gksl;
pub mod junction;
pub mod numerics;
pub mod perturbation;
pub mod profile;
pub mod scenarios;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64;
