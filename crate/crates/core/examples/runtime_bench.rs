//! Swarm runtime against swarm size and element count.

use fires::harness::{run_bench, ExperimentConfig};

fn main() -> fires::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.pso.iterations = 30;
    let report = run_bench(&cfg, &[16, 36])?;
    println!("{report}");
    Ok(())
}
