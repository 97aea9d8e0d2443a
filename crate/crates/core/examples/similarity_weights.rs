//! Kernel weights of past days against the latest one, with and without the
//! day-of-week filter, and a bandwidth calibration over the default grid.

use kwf::data::{generate_synthetic, SyntheticConfig};
use kwf::forecast::{select_weights, AnalyzedSeries, Correction};
use kwf::similarity::{
    calibrate_bandwidth, default_grid, KernelFamily, KernelSpec, ReplaySettings,
};
use kwf::wavelet::WaveletBasis;

fn main() -> kwf::Result<()> {
    let a = AnalyzedSeries::new(
        generate_synthetic(&SyntheticConfig::load_like(120, 48, 3))?,
        WaveletBasis::sym6(),
    )?;
    let n = a.len();
    let grid = default_grid(&a, n, 0)?;
    let settings = ReplaySettings {
        family: KernelFamily::Gaussian,
        j0: 0,
        correction: Correction::Increment,
        group_filter: true,
    };
    let cal = calibrate_bandwidth(&a, n, &grid, 28, &settings)?;
    for (h, mse) in cal.grid.iter().zip(&cal.mse) {
        println!("h = {h:>9.1}  replay rmse {:>8.1}", mse.sqrt());
    }
    println!("selected {:.1}", cal.selected);

    let spec = KernelSpec::gaussian(cal.selected)?;
    let segs = a.series().segments();
    println!("last day {} ({})", segs[n - 1].date, segs[n - 1].group);
    for filter in [false, true] {
        let (w, source) = select_weights(&a, n, &spec, 0, filter)?;
        let mut top: Vec<(usize, f64)> = w.weights.iter().copied().enumerate().collect();
        top.sort_by(|x, y| y.1.total_cmp(&x.1));
        println!("filter {filter} ({source:?}):");
        for (m, wm) in top.into_iter().take(5) {
            println!(
                "  {} {} -> successor {}  weight {wm:.3}",
                segs[m].date,
                segs[m].group,
                segs[m + 1].date
            );
        }
    }
    Ok(())
}
