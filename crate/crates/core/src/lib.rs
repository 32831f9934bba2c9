//! Spectral risk measures built from exponential and power risk-aversion spectra.
//!
//! A spectral risk measure is the weighted quantile average
//! `M = ∫₀¹ φ(p) q(p) dp`, where `φ` is an admissible risk spectrum
//! (nonnegative, normalized, increasing) and `q` is the loss quantile function.
//!
//! The crate is organised bottom-up:
//!
//! - [`distributions`]: analytic and empirical loss quantile functions.
//! - [`spectra`]: risk spectra, their cumulative weights, admissibility checks,
//!   and the underlying utility functions.
//! - [`quadrature`]: the two integration regimes (the truncated table-reproduction
//!   grid and exact per-slice weights).
//! - [`engine`]: SRM / VaR / ES, parameter sweeps, limits, sensitivities,
//!   coherence checks, and the table and figure generators.
//! - [`cli`]: the `srm` command-line front end.

pub mod cli;
pub mod distributions;
pub mod engine;
pub mod error;
pub mod quadrature;
pub mod spectra;

pub use distributions::{Family, LossDistribution, QuantileFunction};
pub use engine::{Diagnostics, RiskMeasureResult, SweepCurve};
pub use error::{Result, SrmError};
pub use quadrature::{IntegralDiagnostics, Mode, QuadratureScheme, Rule};
pub use spectra::{RiskSpectrum, SpectrumFamily, SpectrumKind};
