//! Numerical toolkit for linear fractional stable motion (LFSM) and its
//! limiting processes — fractional Brownian motion, ordinary Lévy motion
//! and Brownian motion.
//!
//! The crate simulates sample paths by Fourier-domain fractional
//! integration of stable noise, evaluates the exact process density from
//! its characteristic function, certifies the kinetic equation the density
//! satisfies by spectral residual checks, measures scaling exponents from
//! paths, and reproduces the power-law statistics of threshold-exceedance
//! bursts.
//!
//! With the default `parallel` feature, ensembles and grid evaluations fan
//! out over rayon; results are collected in index order, so output bytes
//! do not depend on the worker count.

pub mod bursts;
pub mod error;
pub mod estimators;
pub mod exponents;
pub mod generator;
pub mod kinetic;
pub mod parallel;
pub mod pdf;
pub mod quad;
pub mod runner;
pub mod special;
pub mod stable;

pub use error::{Error, Result};
pub use exponents::{derive_exponents, ExponentSet, ProcessParams};
pub use generator::{generate_ensemble, generate_fbm, generate_lfsm, generate_olm, TimeSeries};
pub use pdf::{charfn, collapse_residual, pdf_on_grid, GridDensity};
pub use runner::{run, RunConfig};
