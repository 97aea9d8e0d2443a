//! Writes two years of synthetic half-hourly load to `synthetic.csv` and
//! prints a few daily means.

use kwf::data::{generate_synthetic, write_csv, SyntheticConfig};

fn main() -> kwf::Result<()> {
    let cfg = SyntheticConfig::load_like(730, 48, 2024);
    let series = generate_synthetic(&cfg)?;
    let path = std::env::temp_dir().join("synthetic.csv");
    write_csv(&series, &path)?;
    println!(
        "{} days x {} samples -> {}",
        series.len(),
        series.h(),
        path.display()
    );
    for seg in series.segments().iter().take(9) {
        let mean = seg.values.iter().sum::<f64>() / seg.values.len() as f64;
        println!("{} {:>4} {mean:>10.1}", seg.date, seg.group);
    }
    Ok(())
}
