//! FIRES against a fixed-position STAR-RIS of the same size, per seed.

use fires::harness::{run_baseline_star_ris, run_optimize, ExperimentConfig};

fn main() -> fires::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.seeds = (1..=5).collect();
    let fires = run_optimize(&cfg)?;
    let star = run_baseline_star_ris(&cfg)?;
    println!("mode  seed  FIRES(m)  STAR(m)  gain");
    for (f, s) in fires.iter().zip(&star) {
        println!(
            "{:<5} {:>4}  {:>8.1}  {:>7.1}  {:>+5.1}%",
            f.mode,
            f.seed,
            f.evaluation.d_tot,
            s.evaluation.d_tot,
            100.0 * (f.evaluation.d_tot / s.evaluation.d_tot - 1.0)
        );
    }
    Ok(())
}
