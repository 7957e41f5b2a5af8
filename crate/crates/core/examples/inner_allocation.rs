//! Inner resource allocation at fixed effective gains: the OMA time split
//! and the NOMA power/energy split, with their rate margins.

use fires::access::{check_oma, maximize_oma_from_snr, EffectiveGains, NomaSolver};
use fires::coverage::QosTargets;

fn main() -> fires::Result<()> {
    let alpha = 2.1;
    let targets = QosTargets::new(1.0, 0.5)?;
    // Unit-distance SNRs; user r sees the stronger cascade.
    let gains = EffectiveGains { s_r: 4.0e5, s_t: 1.5e5, g_r: 4.0e5, g_t: 1.5e5 };

    let oma = maximize_oma_from_snr(gains.s_r, gains.s_t, alpha, &targets, (1.0, 1.0));
    println!(
        "OMA: tau* = {:.4}, D_r = {:.1} m, D_t = {:.1} m, D_tot = {:.1} m",
        oma.tau_star, oma.d_r, oma.d_t, oma.d_tot
    );

    // At a fixed distance the split that meets r's target exactly.
    let at_100m = |s: f64| s * 100f64.powf(-alpha);
    let check = check_oma(at_100m(gains.s_r), at_100m(gains.s_t), &targets);
    println!("OMA at 100 m: tau* = {:.4}, feasible = {}", check.tau_star, check.feasible);

    let solver = NomaSolver::new(alpha, targets)?;
    let noma = solver.solve(&gains);
    println!(
        "NOMA (strong {:?}): beta_r = {:.4}, p_r = {:.4}, D_r = {:.1} m, D_t = {:.1} m, D_tot = {:.1} m",
        noma.strong, noma.beta_r, noma.p_r, noma.d_r, noma.d_t, noma.d_tot
    );
    let m = solver.margins(&gains, &noma);
    println!(
        "NOMA margins at 1 m (bit/s/Hz): weak {:.3}, strong {:.3}, SIC {:.3}",
        m.weak_qos, m.strong_qos, m.sic
    );
    Ok(())
}
