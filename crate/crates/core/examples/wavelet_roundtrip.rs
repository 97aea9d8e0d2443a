//! One synthetic day through the Symmlet-6 transform: coefficient energy
//! per scale, the smooth/detail split and the reconstruction error.

use kwf::data::{generate_synthetic, SyntheticConfig};
use kwf::wavelet::{SegmentTransform, WaveletBasis};

fn main() -> kwf::Result<()> {
    let series = generate_synthetic(&SyntheticConfig::load_like(14, 48, 1))?;
    let day = &series.segments()[2].values;
    let t = SegmentTransform::new(WaveletBasis::sym6(), 48)?;
    let d = t.analyze(day)?;

    println!("approximation: {:?}", d.approx);
    for (j, level) in d.details.iter().enumerate() {
        let e: f64 = level.iter().map(|c| c * c).sum();
        println!(
            "scale {j} ({:>2} coefficients) energy {e:>14.1}",
            level.len()
        );
    }
    let (smooth, detail) = t.split(&d)?;
    let back = t.synthesize(&d)?;
    let err = day
        .iter()
        .zip(&back)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("reconstruction error {err:.2e}");
    println!("instant   value     smooth     detail");
    for i in (0..48).step_by(6) {
        println!(
            "{i:>7} {:>8.0} {:>10.0} {:>10.0}",
            day[i], smooth[i], detail[i]
        );
    }
    Ok(())
}
