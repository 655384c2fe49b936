//! Non-asymptotic tail bounds for the information spectrum of IID sources.
//!
//! Everything revolves around the distribution of the normalized per-block
//! information value (the information spectrum): Chernoff-style rate
//! functions computed by exponential tilting, two-sided Berry-Esseen
//! prefactor sandwiches around `e^{-n r(delta)}`, CLT-window bounds near the
//! mean, and a computable bracket on the minimum fixed-rate source-coding
//! rate. Exact enumeration oracles validate every bound at small scale.
//!
//! Module map:
//! - [`spectrum`]: value spectra, cumulant generating functions, tilting,
//!   rate functions and their domain limits.
//! - [`sources`]: constructors for entropy / conditional entropy / mutual
//!   information / divergence spectra, BSC closed forms, binary-input
//!   Gaussian channel quadrature.
//! - [`bounds`]: weak and strong tail bounds, CLT windows, recursive
//!   tightening.
//! - [`coding`]: the fixed-rate coding bracket, asymptotic regimes, and the
//!   exact optimal-code oracle.
//! - [`oracle`]: exact information-spectrum distributions, exact tails, and
//!   seeded Monte Carlo estimates.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod coding;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod quadrature;
pub mod rng;
pub mod sources;
pub mod spectrum;

pub use error::{Error, Result};
pub use spectrum::{CompositeSpectrum, DomainLimits, RatePoint, Side, TiltedStats, ValueSpectrum};
