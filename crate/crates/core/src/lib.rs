//! Benford behavior of products of dependent random variables.
//!
//! The product of n positive random variables is Benford base B exactly
//! when the sum of their base-B logs reduced mod 1 is uniform on [0,1).
//! This crate computes that wrapped-sum density for dependence structures
//! given by Archimedean copulas, with certified truncation bounds, and
//! quantifies the distance from Benford behavior with L1 metrics and
//! chi-square diagnostics. A counter-based Monte Carlo sampler provides an
//! independent oracle for every quadrature result.

pub mod config;
pub mod copulas;
pub mod error;
pub mod jet;
pub mod marginals;
pub mod metrics;
pub mod qmc;
pub mod quad;
pub mod rng;
pub mod sampler;
pub mod special;
pub mod wrapped;

pub mod cli;

pub use copulas::CopulaSpec;
pub use error::{Error, Result};
pub use marginals::LogMarginal;
pub use metrics::BenfordReport;
pub use wrapped::{TruncationWindow, WrappedPdfEstimate};
