//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the closed-form radius code; the oracles work
//! from the link equations directly.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fires::coverage::LinkBudget;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SNR at distance `d` with energy share `beta` and phase loss `chi`,
/// written out term by term.
pub fn snr(b: &LinkBudget, beta: f64, chi: f64, d: f64) -> f64 {
    let m = b.elements as f64;
    (b.tx_power / b.noise_power) * beta * chi.powi(2) * m.powi(2) * b.rho0.powi(2)
        / b.bs_distance.powf(b.alpha)
        / d.powf(b.alpha)
}

/// Root of a decreasing function on `[lo, hi]`, bisected in `ln d`.
pub fn bisect_decreasing(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    assert!(f(lo) > 0.0 && f(hi) < 0.0, "root not bracketed");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m.exp()) > 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    (0.5 * (a + b)).exp()
}

/// A link budget whose single-user radius lands inside `[1e-2, 1e5]` m.
pub fn random_budget(r: &mut impl Rng) -> LinkBudget {
    loop {
        let b = LinkBudget {
            tx_power: 10f64.powf(r.random_range(-3.0..1.5)),
            noise_power: 10f64.powf(r.random_range(-15.0..-11.0)),
            rho0: 10f64.powf(r.random_range(-6.0..-3.0)),
            alpha: r.random_range(2.0..4.0),
            bs_distance: r.random_range(5.0..200.0),
            elements: r.random_range(1..=100),
            chi_r: r.random_range(0.3..=1.0),
            chi_t: r.random_range(0.3..=1.0),
        };
        let d = (snr(&b, 1.0, 1.0, 1.0)).powf(1.0 / b.alpha);
        if (1.0..1e4).contains(&d) {
            return b;
        }
    }
}
