//! Closed-form far-field radii for the reference surface.
//!
//! Prints the single-user, OMA and NOMA radii and how they move with the
//! element count and phase quantization.

use fires::access::{maximize_noma_coverage, maximize_oma_coverage};
use fires::channel::{phase_attenuation, PhaseErrorModel};
use fires::coverage::{radius_es, QosTargets};
use fires::scenario::Scenario;

fn main() -> fires::Result<()> {
    let scenario = Scenario::reference();
    let budget = scenario.budget()?;
    let targets = QosTargets::symmetric(1.0)?;

    println!("Rayleigh distance: {:.2} m", scenario.aperture.rayleigh_distance());
    let single = radius_es(&budget, 1.0, 1.0, 1.0)?;
    println!("single user at 1 bit/s/Hz: {:.1} m", single.meters);

    let oma = maximize_oma_coverage(&budget, 1.0, 1.0, &targets)?;
    println!("OMA  tau* = {:.4}  D_tot = {:.1} m", oma.tau_star, oma.d_tot);
    let noma = maximize_noma_coverage(&budget, 1.0, 1.0, &targets, None)?;
    println!(
        "NOMA beta_r* = {:.4} p_r* = {:.4}  D_tot = {:.1} m",
        noma.beta_r, noma.p_r, noma.d_tot
    );

    println!("\n  M    D_single(m)");
    for m in [16, 36, 64, 100] {
        let b = Scenario::reference().with_elements(m)?.budget()?;
        println!("{m:>4}  {:>10.1}", radius_es(&b, 1.0, 1.0, 1.0)?.meters);
    }

    println!("\n  Q    chi     D_single(m)");
    for q in [1, 2, 4, 8, 16] {
        let chi = phase_attenuation(PhaseErrorModel::Quantized { levels: q })?;
        println!("{q:>4}  {chi:.4}  {:>10.1}", radius_es(&budget, 1.0, chi, 1.0)?.meters);
    }
    Ok(())
}
