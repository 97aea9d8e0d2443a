//! Point forecast of the day after a synthetic history, its bootstrap paths
//! and the per-instant spread.

use kwf::data::{generate_synthetic, SyntheticConfig};
use kwf::forecast::{forecast_next, AnalyzedSeries, Correction, ForecastSettings};
use kwf::wavelet::WaveletBasis;

fn main() -> kwf::Result<()> {
    let a = AnalyzedSeries::new(
        generate_synthetic(&SyntheticConfig::load_like(200, 48, 9))?,
        WaveletBasis::sym6(),
    )?;
    let settings = ForecastSettings {
        correction: Correction::Increment,
        bootstrap_size: 200,
        seed: 1,
        ..ForecastSettings::default()
    };
    let n = a.len() - 1;
    let bundle = forecast_next(&a, n, &settings, 2000.0)?;
    let actual = &a.series().segments()[n].values;

    println!(
        "forecast for {} from data through {}",
        bundle.target_date, bundle.last_used_date
    );
    println!(
        "{} paths, weight source {:?}",
        bundle.b(),
        bundle.weight_source
    );
    let mut used = bundle.boot_sources.clone();
    used.sort_unstable();
    used.dedup();
    println!("{} distinct past days drawn", used.len());
    println!("instant    actual     point     sigma");
    for i in (0..48).step_by(4) {
        println!(
            "{i:>7} {:>9.0} {:>9.0} {:>9.1}",
            actual[i], bundle.point[i], bundle.sigma[i]
        );
    }
    Ok(())
}
