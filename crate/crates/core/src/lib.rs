//! Rates–spreads co-movement analytics for credit portfolios.
//!
//! * [`curve_factors`] splits key-rate yield changes into Treasury shift and
//!   twist loadings.
//! * [`covariance`] estimates equal-weight and exponentially weighted
//!   correlations between those factors and sector spreads.
//! * [`sector_model`] defines the 27 industry/rating sectors and a seeded
//!   synthetic market used to validate the estimators.
//! * [`duration`] and [`scenario`] turn correlations into effective
//!   durations, scenario P&L and factor-model volatility.
//! * [`data_io`] holds the file formats, bundled reference tables and report
//!   rendering; [`workflow`] chains loading and estimation.

pub mod covariance;
pub mod curve_factors;
pub mod data_io;
pub mod duration;
mod error;
pub mod scenario;
pub mod sector_model;
pub mod workflow;

pub use error::{Error, Result};
