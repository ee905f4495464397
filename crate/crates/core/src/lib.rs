//! Exact laws, path simulation, and risk evaluation for the Bell-Touchard
//! counting process: a compound Poisson process whose batch sizes are
//! zero-truncated Poisson, so that N(t) follows a Bell-Touchard distribution
//! with probabilities built from single-variable Bell polynomials.
//!
//! Modules:
//! - [`bellpoly`]: B_n(x) in log scale, three independent evaluation routes.
//! - [`distributions`]: Bell-Touchard, zero-truncated Poisson, Neyman Type A,
//!   multiple-Poisson and gamma-mixed laws.
//! - [`processes`]: path simulation and the process algebra (superposition,
//!   thinning, convolution, composition), homogeneous and not.
//! - [`risk`]: compound losses, premium loading, finite-horizon ruin.
//! - [`stats`]: empirical laws, total variation, chi-square goodness of fit.
//! - [`rng`]: per-path random streams that make batch output independent of
//!   worker count.

pub mod bellpoly;
pub mod distributions;
pub mod error;
pub mod math;
pub mod processes;
pub mod risk;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
