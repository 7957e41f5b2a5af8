mod common;

use common::{random_budget, snr};
use fires::access::{
    check_noma, check_oma, maximize_noma_coverage, maximize_oma_coverage, maximize_oma_from_snr,
    noma_sinrs, oma_rates, EffectiveGains, NomaSolver, TAU_HI, TAU_LO,
};
use fires::coverage::{QosTargets, User};
use fires::scenario::Scenario;
use proptest::prelude::*;
use rand::SeedableRng;

fn log2p(x: f64) -> f64 {
    (1.0 + x).log2()
}

#[test]
fn oma_check_boundary_cases() {
    let t = QosTargets::symmetric(1.0).unwrap();
    // log2(1 + 3) = 2 = 2R.
    let c = check_oma(3.0, 3.0, &t);
    assert!((c.tau_star - 0.5).abs() < 1e-15);
    assert!(c.feasible);
    let c = check_oma(1.0, 1e6, &t);
    assert_eq!(c.tau_star, 1.0);
    assert!(!c.feasible);
    assert!(!check_oma(0.0, 10.0, &t).feasible);
}

#[test]
fn reference_oma_optimum_is_the_half_split() {
    let b = Scenario::reference().budget().unwrap();
    let t = QosTargets::symmetric(1.0).unwrap();
    let sol = maximize_oma_coverage(&b, 1.0, 1.0, &t).unwrap();
    assert!((sol.tau_star - 0.5).abs() < 1e-6);
    let single = snr(&b, 1.0, 1.0, 1.0).powf(1.0 / 2.1);
    assert!((sol.d_tot - 2.0 * single * 3f64.powf(-1.0 / 2.1)).abs() < 1e-6);
}

#[test]
fn reference_oma_sum_peaks_at_the_centre() {
    let b = Scenario::reference().budget().unwrap();
    let s = snr(&b, 1.0, 1.0, 1.0);
    let e = 1.0 / b.alpha;
    let f = |tau: f64| {
        (s / ((1.0 / tau).exp2() - 1.0)).powf(e) + (s / ((1.0 / (1.0 - tau)).exp2() - 1.0)).powf(e)
    };
    let n = 10_001;
    let taus: Vec<f64> = (0..n)
        .map(|k| TAU_LO + (TAU_HI - TAU_LO) * k as f64 / (n - 1) as f64)
        .collect();
    let vals: Vec<f64> = taus.iter().map(|&t| f(t)).collect();
    let (k, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |a, (k, &v)| if v > a.1 { (k, v) } else { a });
    assert!((taus[k] - 0.5).abs() < 1e-3);
    // The sum is not unimodal: it dips near each edge and climbs back
    // towards the single-user radius as one slot vanishes.
    let minima = vals
        .windows(3)
        .filter(|w| w[1] < w[0] && w[1] < w[2])
        .count();
    assert_eq!(minima, 2);
}

#[test]
fn high_rate_oma_moves_to_an_edge_split() {
    // At 2 bit/s/Hz and alpha 2.1 the centre is a local minimum of the sum.
    let b = Scenario::reference().budget().unwrap();
    let t = QosTargets::symmetric(2.0).unwrap();
    let sol = maximize_oma_coverage(&b, 1.0, 1.0, &t).unwrap();
    assert!(sol.feasible);
    assert!((sol.tau_star - 0.5).abs() > 0.4);
    let s = snr(&b, 1.0, 1.0, 1.0);
    let half = 2.0 * (s / 15.0).powf(1.0 / b.alpha);
    assert!(sol.d_tot > half);
    // Scale-free: the same split comes out at unit SNR.
    let unit = maximize_oma_from_snr(1.0, 1.0, b.alpha, &t, (1.0, 1.0));
    assert!((unit.tau_star - sol.tau_star).abs() < 1e-6);
}

#[test]
fn noma_sinrs_match_direct_formulas() {
    let (g_r, g_t) = (40.0, 12.0);
    let (b_r, p_r) = (0.3, 0.2);
    let (b_t, p_t) = (0.7, 0.8);
    let s = noma_sinrs(g_r, g_t, b_r, b_t, p_r, p_t);
    assert!((s.gamma_r - b_r * p_r * g_r).abs() < 1e-12);
    let signal_t = b_t * p_t * g_t;
    let interference_t = b_t * p_r * g_t;
    assert!((s.gamma_t - signal_t / (interference_t + 1.0)).abs() < 1e-12);
    let sic = b_t * p_t * g_r / (b_t * p_r * g_r + 1.0);
    assert!((s.gamma_r_to_t - sic).abs() < 1e-12);
}

#[test]
fn tight_noma_point_has_zero_margins() {
    // Choose gains so that every constraint is met with equality at R = 1.
    let t = QosTargets::symmetric(1.0).unwrap();
    let (beta_r, p_r) = (0.5, 0.25);
    let p_t = 1.0 - p_r;
    let g_r = 1.0 / (beta_r * p_r);
    // Weak user: b p_t g / (b p_r g + 1) = 1  ->  g = 1 / (b (p_t - p_r)).
    let g_t = 1.0 / ((1.0 - beta_r) * (p_t - p_r));
    let m = check_noma(g_r, g_t, beta_r, p_r, &t);
    assert!(m.strong_qos.abs() < 1e-12);
    assert!(m.weak_qos.abs() < 1e-12);
    assert!(m.sic >= 0.0);
    assert!(m.shortfall() < 1e-12);
}

#[test]
fn noma_order_follows_the_stronger_gain() {
    let mut b = Scenario::reference().budget().unwrap();
    let t = QosTargets::symmetric(1.0).unwrap();
    b.chi_t = 0.6;
    let sol = maximize_noma_coverage(&b, b.chi_r, b.chi_t, &t, None).unwrap();
    assert_eq!(sol.strong, User::R);
    let swapped = maximize_noma_coverage(&b, 0.6, 1.0, &t, None).unwrap();
    assert_eq!(swapped.strong, User::T);
    assert!((sol.d_tot - swapped.d_tot).abs() / sol.d_tot < 1e-9);
    assert!((sol.d_r - swapped.d_t).abs() / sol.d_tot < 1e-9);
}

#[test]
fn impossible_weak_target_is_infeasible() {
    let b = Scenario::reference().budget().unwrap();
    let t = QosTargets::new(1.0, 50.0).unwrap();
    let sol = maximize_noma_coverage(&b, 1.0, 1.0, &t, None).unwrap();
    assert!(!sol.feasible);
    assert_eq!(sol.d_tot, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oma_tau_star_meets_both_targets(s_r in 1.0f64..1e4, s_t in 1.0f64..1e4, rr in 0.05f64..2.0, rt in 0.05f64..2.0) {
        let t = QosTargets::new(rr, rt).unwrap();
        let c = check_oma(s_r, s_t, &t);
        prop_assume!(c.feasible);
        let (ar, at) = oma_rates(s_r, s_t, c.tau_star);
        prop_assert!((ar - rr).abs() < 1e-12);
        prop_assert!(at >= rt - 1e-12);
        prop_assert!(((1.0 - c.tau_star) * log2p(s_t) - at).abs() < 1e-12);
    }

    #[test]
    fn noma_solution_meets_its_constraints_at_the_radii(seed in any::<u64>(), rr in 0.2f64..2.0, rt in 0.2f64..2.0) {
        let b = random_budget(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let t = QosTargets::new(rr, rt).unwrap();
        let sol = maximize_noma_coverage(&b, b.chi_r, b.chi_t, &t, None).unwrap();
        prop_assume!(sol.feasible);
        // SNRs at the returned radii put each user exactly on its target.
        let (strong, weak) = match sol.strong {
            User::R => ((sol.d_r, b.chi_r, sol.beta_r, sol.p_r, rr), (sol.d_t, b.chi_t, 1.0 - sol.p_r, rt)),
            User::T => ((sol.d_t, b.chi_t, 1.0 - sol.beta_r, 1.0 - sol.p_r, rt), (sol.d_r, b.chi_r, sol.p_r, rr)),
        };
        let (d, chi, beta, p, rate) = strong;
        prop_assert!((log2p(beta * p * snr(&b, 1.0, chi, d)) - rate).abs() < 1e-9);
        let (dw, chiw, pw, ratew) = weak;
        let s = (1.0 - beta) * snr(&b, 1.0, chiw, dw);
        prop_assert!((log2p(pw * s / (p * s + 1.0)) - ratew).abs() < 1e-9);
        prop_assert!(pw > p * (ratew.exp2() - 1.0));
    }

    #[test]
    fn solver_margins_are_feasible_in_the_far_field(seed in any::<u64>(), rate in 0.2f64..1.5) {
        let b = random_budget(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let t = QosTargets::symmetric(rate).unwrap();
        let gains = EffectiveGains::far_field(&b);
        let solver = NomaSolver::new(b.alpha, t).unwrap();
        let sol = solver.solve(&gains);
        prop_assume!(sol.feasible);
        // Unit-distance gains exceed the radius-distance gains whenever the
        // radii are beyond one metre.
        prop_assume!(sol.d_r > 1.0 && sol.d_t > 1.0);
        let m = solver.margins(&gains, &sol);
        prop_assert!(m.strong_qos >= -1e-12 && m.weak_qos >= -1e-12);
    }
}
