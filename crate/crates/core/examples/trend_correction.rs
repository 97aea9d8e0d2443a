//! Stationary versus increment-corrected forecasts on a trending series.

use kwf::data::{generate_synthetic, SyntheticConfig};
use kwf::forecast::{forecast_corrected, forecast_stationary, select_weights, AnalyzedSeries};
use kwf::similarity::KernelSpec;
use kwf::wavelet::WaveletBasis;

fn main() -> kwf::Result<()> {
    let cfg = SyntheticConfig {
        trend_slope: 15.0,
        annual_amplitude: 0.0,
        noise_sd: 100.0,
        ..SyntheticConfig::load_like(365, 48, 6)
    };
    let a = AnalyzedSeries::new(generate_synthetic(&cfg)?, WaveletBasis::sym6())?;
    let spec = KernelSpec::gaussian(2000.0)?;
    let (mut st, mut co) = (0.0, 0.0);
    let days = 60;
    for n in a.len() - days..a.len() {
        let (w, _) = select_weights(&a, n, &spec, 0, true)?;
        let actual = &a.series().segments()[n].values;
        let bias = |p: &[f64]| p.iter().zip(actual).map(|(x, y)| x - y).sum::<f64>() / 48.0;
        st += bias(&forecast_stationary(&a, n, &w)?.point);
        co += bias(&forecast_corrected(&a, n, &w)?.point);
    }
    println!(
        "mean daily bias over the last {days} days, trend {} per day",
        cfg.trend_slope
    );
    println!("  stationary {:>9.1}", st / days as f64);
    println!("  corrected  {:>9.1}", co / days as f64);
    Ok(())
}
