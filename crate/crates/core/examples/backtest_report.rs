//! Two years of synthetic half-hourly load, a rolling backtest over the last
//! 230 days and the amplitude / coverage tables for all four band methods.
//!
//! ```text
//! cargo run --release --example backtest_report
//! ```

use kwf::data::{generate_synthetic, SyntheticConfig};
use kwf::eval::{backtest, evaluate, render_text, BacktestConfig};
use kwf::forecast::{AnalyzedSeries, Correction, ForecastSettings};
use kwf::wavelet::WaveletBasis;

fn main() -> kwf::Result<()> {
    let series = generate_synthetic(&SyntheticConfig::load_like(730, 48, 2024))?;
    let test_start = series.segments()[500].date;
    let analyzed = AnalyzedSeries::new(series, WaveletBasis::sym6())?;

    let cfg = BacktestConfig {
        forecast: ForecastSettings {
            correction: Correction::Increment,
            seed: 7,
            ..ForecastSettings::default()
        },
        ..BacktestConfig::default()
    };
    let started = std::time::Instant::now();
    let result = backtest(&analyzed, test_start, &cfg)?;
    let report = evaluate(&result, 0.05, &[0, 1, 2, 3])?;
    print!("{}", render_text(&report));
    println!("elapsed {:.1?}", started.elapsed());
    Ok(())
}
