//! Sweeps one axis and prints the CSV the `fires sweep` command writes.
//!
//! `cargo run --release --example parameter_sweep -- quantization 2,4,8,16`

use fires::harness::{run_sweep, ExperimentConfig, Sweep, SweepAxis};

fn main() -> fires::Result<()> {
    let mut args = std::env::args().skip(1);
    let axis = SweepAxis::from_name("axis", &args.next().unwrap_or_else(|| "snr_db".into()))?;
    let values: Vec<f64> = args
        .next()
        .unwrap_or_else(|| "124,134,144,154".into())
        .split(',')
        .map(|v| v.trim().parse().expect("numeric axis value"))
        .collect();

    let cfg = ExperimentConfig {
        sweep: Some(Sweep { axis, values }),
        seeds: (1..=3).collect(),
        ..ExperimentConfig::default()
    };
    let out = run_sweep(&cfg)?;
    print!("{}", out.csv);
    Ok(())
}
