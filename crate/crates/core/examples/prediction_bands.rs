//! The four band constructions on one forecast, with width and how many
//! instants of the realised day each one misses.

use kwf::data::{generate_synthetic, SyntheticConfig};
use kwf::forecast::{forecast_next, AnalyzedSeries, Correction, ForecastSettings};
use kwf::intervals::{build_band, IntervalSettings, Method, NsKwfMode};
use kwf::wavelet::WaveletBasis;

fn main() -> kwf::Result<()> {
    let a = AnalyzedSeries::new(
        generate_synthetic(&SyntheticConfig::load_like(300, 48, 4))?,
        WaveletBasis::sym6(),
    )?;
    let settings = ForecastSettings {
        correction: Correction::Increment,
        seed: 11,
        ..ForecastSettings::default()
    };
    let n = a.len() - 1;
    let bundle = forecast_next(&a, n, &settings, 2000.0)?;
    let actual = &a.series().segments()[n].values;

    for mode in [NsKwfMode::Disconnected, NsKwfMode::Connected] {
        let intervals = IntervalSettings {
            nskwf_mode: mode,
            kfwe_k: 2,
        };
        println!("NS-KWF mode {mode:?}");
        for method in Method::ALL {
            for alpha in [0.2, 0.05] {
                let band = build_band(&bundle, method, alpha, &intervals)?;
                let width = band.width().iter().sum::<f64>() / 48.0;
                let misses = (0..48).filter(|i| !band.covers(*i, actual[*i])).count();
                println!(
                    "  {:<7} {:>3.0}%  mean width {width:>7.0}  misses {misses:>2}",
                    method.label(),
                    100.0 * (1.0 - alpha)
                );
            }
        }
    }
    Ok(())
}
