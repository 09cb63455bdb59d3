//! Aggregate cognitive-radio interference at a primary receiver under path
//! loss and lognormal shadowing.
//!
//! The crate has four parts:
//!
//! - [`scenario`]: configuration types, unit conventions, and seeded
//!   sampling of CR populations, placements, and shadowing.
//! - [`analytic`]: closed-form single-interferer statistics (CDF, moments,
//!   skewness, lognormal fitting) and transmit-power calibration.
//! - [`mc`]: the replicated Monte Carlo engine with empirical CDFs,
//!   Kolmogorov-Smirnov distances, and reliability estimation.
//! - [`admission`]: REM centralized/decentralized selection, the primary
//!   exclusion zone, and the exclusion-radius solver.

// Negated float comparisons like `!(x > 0.0)` are used on purpose: they
// reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admission;
pub mod analytic;
pub mod config;
pub mod error;
pub mod mc;
pub mod scenario;

pub use error::{Error, Result};
