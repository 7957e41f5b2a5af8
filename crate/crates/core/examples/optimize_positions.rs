//! Runs the swarm over element positions for both access schemes.
//!
//! `cargo run --release --example optimize_positions -- [seed]`

use fires::geometry::Placement;
use fires::pso::{optimize, PsoConfig};
use fires::scenario::{Evaluator, Mode, Scenario};

fn main() -> fires::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let ev = Evaluator::new(Scenario::reference(), seed)?;
    let centres = Placement::centers(ev.aperture());

    for mode in [Mode::Oma, Mode::Noma] {
        let fixed = ev.evaluate(&centres, mode)?;
        let run = optimize(&ev, mode, &PsoConfig { seed, ..PsoConfig::default() })?;
        let best = &run.best;
        println!(
            "{:<4}  centres {:>7.1} m -> optimized {:>7.1} m  ({} iterations, It_99 {}, {:.2}s)",
            mode.label(),
            fixed.d_tot,
            best.evaluation.d_tot,
            run.iterations(),
            run.it_99,
            run.total_secs
        );
        let moved = best
            .placement
            .active()
            .iter()
            .zip(centres.active())
            .filter(|(a, b)| a != b)
            .count();
        println!("      {moved} of {} elements left their centre preset", centres.len());
    }
    Ok(())
}
