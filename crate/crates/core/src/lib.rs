//! Day-ahead forecasting of seasonal series by similarity of wavelet
//! decompositions, with simultaneous prediction bands from a weight-driven
//! bootstrap.
//!
//! The pipeline for one day:
//!
//! 1. [`data`] cuts the series into daily segments labelled by day type.
//! 2. [`wavelet`] decomposes every day (Symmlet 6, periodic boundaries).
//! 3. [`similarity`] scores past days against the last observed one and
//!    turns the scores into kernel weights, optionally restricted to the
//!    same day type.
//! 4. [`forecast`] averages the successors of the weighted days and draws
//!    bootstrap paths from the same weights.
//! 5. [`intervals`] turns the paths into bands (S-KWF, NS-KWF, NP, k-FWE).
//! 6. [`eval`] replays the whole thing over a test period and scores it.
//!
//! ```
//! use kwf::data::{generate_synthetic, SyntheticConfig};
//! use kwf::forecast::{forecast_next, AnalyzedSeries, ForecastSettings};
//! use kwf::intervals::pi_kfwe;
//! use kwf::wavelet::WaveletBasis;
//!
//! let series = generate_synthetic(&SyntheticConfig::load_like(120, 48, 1)).unwrap();
//! let analyzed = AnalyzedSeries::new(series, WaveletBasis::sym6()).unwrap();
//! let bundle = forecast_next(&analyzed, 119, &ForecastSettings::default(), 500.0).unwrap();
//! let band = pi_kfwe(&bundle, 0.05, 2).unwrap();
//! assert_eq!(band.lower.len(), 48);
//! ```

pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod forecast;
pub mod intervals;
pub mod quantile;
pub mod similarity;
pub mod wavelet;

pub use error::{KwfError, Result};
