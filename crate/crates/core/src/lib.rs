//! Joint prediction regions for multi-step time-series forecasts.
//!
//! The crate builds bootstrap k-FWE joint prediction regions alongside
//! joint marginals (Bonferroni, BH, Šidák), the modified Scheffé region and
//! the NP-heuristic envelope, and evaluates their empirical coverage and
//! geometric-average width on rolling windows.

pub mod bootstrap;
pub mod decompose;
pub mod error;
pub mod regions;
pub mod forecasters;
pub mod harness;
pub mod series;

pub use error::{Error, Result};
pub use series::{RandomSource, TimeSeries};
