//! Draws spatially correlated Rician hops on a small surface and compares
//! the empirical covariance with the Jakes model.

use fires::channel::correlation::{active_covariance_direct, NlosFactor};
use fires::channel::{cascaded_gain, draw_hop, Hop, HopParams};
use fires::geometry::{ApertureConfig, Placement};
use rand::SeedableRng;

fn main() -> fires::Result<()> {
    let lambda = 0.0857;
    // Quarter-wavelength pitch, so neighbouring presets are correlated.
    let cfg = ApertureConfig::new(1.75 * lambda, 1.75 * lambda, (2, 2), (4, 4), lambda, lambda / 8.0)?;
    let placement = Placement::centers(&cfg);
    let model = active_covariance_direct(&cfg, &placement);
    let factor = NlosFactor::active(&cfg, &placement)?;

    let feed = HopParams::toward(Hop::Feed, 1e-6, 5.0, [0.5, 0.0, 0.866])?;
    let user = HopParams::toward(Hop::Reflect, 4.7e-5, 0.0, [-0.3, 0.2, 0.93])?;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let n = 20_000;
    let m = placement.len();
    let mut cov = vec![0.0; m * m];
    let mut gain = 0.0;
    for _ in 0..n {
        let hu = draw_hop(&user, &cfg, &placement, &factor, &mut rng)?;
        let hf = draw_hop(&feed, &cfg, &placement, &factor, &mut rng)?;
        gain += cascaded_gain(&hf, &hu)?;
        for i in 0..m {
            for j in 0..m {
                cov[i * m + j] += (hu.coefficients[i] * hu.coefficients[j].conj()).re / user.gain;
            }
        }
    }
    println!("model vs empirical covariance of the Rayleigh user hop:");
    for i in 0..m {
        let row: Vec<String> = (0..m)
            .map(|j| format!("{:+.3}/{:+.3}", model[(i, j)], cov[i * m + j] / n as f64))
            .collect();
        println!("  {}", row.join("  "));
    }
    println!("mean cascaded gain H: {:.3e}", gain / n as f64);
    Ok(())
}
