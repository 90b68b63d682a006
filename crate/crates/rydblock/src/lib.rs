//! Hard-sphere model of one-dimensional dissipative Rydberg-EIT media.
//!
//! A bright probe entering a Rydberg-EIT medium forms polaritons that
//! blockade one another within a radius `r_b`; superfluous photons scatter at
//! the entrance, and polaritons that are too short for the finite EIT
//! bandwidth decay in transit. This crate provides
//!
//! * [`params`]: medium parameters and the derived blockade/filtering
//!   timescales shared by everything else,
//! * [`analytic`]: closed forms for the transmitted rate, the first- and
//!   higher-order correlation functions of the output light, and the
//!   single-photon-train design bounds,
//! * [`filter`]: Gaussian EIT filtering of pulses and correlation grids,
//!   including the two-photon square-pulse transmission,
//! * [`mcsim`]: a seeded, deterministic Monte-Carlo event simulator used as
//!   the brute-force oracle for rates and correlation functions,
//! * [`fit`]: ingestion of experimental transmission data and least-squares
//!   extraction of the EIT linewidth.
//!
//! All model formulas depend on dimensionless combinations (`R_in tau_b`,
//! `tau_EIT R_in`, `l/r_b`), so every function accepts times and rates in any
//! consistent unit system; working in blockade-time units (`tau_b = 1`) is
//! the intended internal convention.

pub mod analytic;
pub mod error;
pub mod filter;
pub mod fit;
pub mod grid;
pub mod mcsim;
pub mod params;
pub mod quad;

mod special;

pub use error::{AnalyticError, FilterError, FitError, McError, ParamsError};
pub use params::{derive_timescales, MediumParams, ReducedUnits, Timescales};
