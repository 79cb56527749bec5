//! Entropy generating functions for residual lifetimes and a Rayleigh
//! goodness-of-fit test built on them.
//!
//! The crate provides:
//!
//! - a catalogue of lifetime distributions ([`distributions`]);
//! - closed-form, quadrature, and empirical evaluation of the weighted
//!   cumulative residual entropy generating function, its dynamic version,
//!   and the weighted mean residual life ([`egf`]);
//! - reconstruction of hazard and survival curves from a dynamic generating
//!   function, and the constancy diagnostics that single out the Rayleigh
//!   law ([`characterization`]);
//! - the departure measure, its U-statistic estimator with an O(n log n)
//!   order-statistic fast path, and its asymptotic variance ([`ustat`]);
//! - the full testing procedure: Monte Carlo critical values, asymptotic
//!   normal test, parametric bootstrap p-values, classical EDF comparators,
//!   and size/power studies ([`goftest`]).

pub mod characterization;
pub mod distributions;
pub mod egf;
pub mod error;
pub mod goftest;
pub mod quad;
pub mod rng;
pub mod special;
pub mod ustat;

#[cfg(test)]
mod testdata;

pub use distributions::{fit_rayleigh_moment, DistributionModel, Sample};
pub use error::{Error, Result};
