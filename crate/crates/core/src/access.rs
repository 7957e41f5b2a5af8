//! Inner resource allocation at a fixed surface configuration.
//!
//! OMA splits time between the users; NOMA splits BS power and surface
//! energy, with the stronger user decoding and cancelling the weaker user's
//! layer. Both solvers maximize `D_r + D_t` built from the closed-form radii
//! in [`coverage`](crate::coverage).

use crate::coverage::{
    noma_radii_from_unit_snr, noma_threshold, oma_threshold, radius_from_unit_snr, LinkBudget,
    QosTargets, Radius, User,
};
use crate::error::{Error, Result};
use crate::optim::golden_max;

/// Uniform probes used to bracket the OMA optimum before golden section.
pub const TAU_SCAN: usize = 64;

/// Lower end of the OMA time-fraction search.
pub const TAU_LO: f64 = 1e-4;
/// Upper end of the OMA time-fraction search.
pub const TAU_HI: f64 = 1.0 - 1e-4;
/// Bracket width at which the OMA search stops.
pub const TAU_TOL: f64 = 1e-8;

/// Coarse NOMA grid resolution per axis.
pub const NOMA_GRID: usize = 200;
/// Coordinate-wise golden refinement sweeps after the grid.
pub const NOMA_SWEEPS: usize = 3;

/// Per-user gains at a fixed placement.
///
/// `s_*` is the SNR at one metre with full power and surface energy,
/// `(P/σ²) χ² H²`. `g_*` is the same quantity per watt, `(χ H)² / σ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveGains {
    pub s_r: f64,
    pub s_t: f64,
    pub g_r: f64,
    pub g_t: f64,
}

impl EffectiveGains {
    /// Gains from realized cascaded gains `H_r`, `H_t`.
    pub fn from_cascaded(
        tx_power: f64,
        noise_power: f64,
        chi: (f64, f64),
        h: (f64, f64),
    ) -> Self {
        let g_r = (chi.0 * h.0).powi(2) / noise_power;
        let g_t = (chi.1 * h.1).powi(2) / noise_power;
        Self {
            s_r: tx_power * g_r,
            s_t: tx_power * g_t,
            g_r,
            g_t,
        }
    }

    /// Far-field LoS gains, `H = M ρ₀ d_f^{-α/2}`.
    pub fn far_field(budget: &LinkBudget) -> Self {
        let h = budget.elements as f64
            * budget.rho0
            * budget.bs_distance.powf(-0.5 * budget.alpha);
        Self::from_cascaded(
            budget.tx_power,
            budget.noise_power,
            (budget.chi_r, budget.chi_t),
            (h, h),
        )
    }

    pub fn snr(&self, user: User) -> f64 {
        match user {
            User::R => self.s_r,
            User::T => self.s_t,
        }
    }

    /// The user decoding first: larger gain, `r` on ties.
    pub fn strong_user(&self) -> User {
        if self.g_t > self.g_r {
            User::T
        } else {
            User::R
        }
    }
}

// ---------------------------------------------------------------- OMA

/// Outcome of the fixed-distance OMA feasibility check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmaCheck {
    /// Smallest time fraction meeting `r`'s target, `R_r / log₂(1+S_r)`.
    pub tau_star: f64,
    pub feasible: bool,
}

/// OMA rates `(τ log₂(1+S_r), (1−τ) log₂(1+S_t))`.
pub fn oma_rates(s_r: f64, s_t: f64, tau: f64) -> (f64, f64) {
    (tau * s_r.ln_1p() / std::f64::consts::LN_2, (1.0 - tau) * s_t.ln_1p() / std::f64::consts::LN_2)
}

/// Fixed-distance OMA check: `τ*` meets `r`'s target with equality and the
/// remaining slot must carry `t`'s target.
pub fn check_oma(s_r: f64, s_t: f64, targets: &QosTargets) -> OmaCheck {
    let cap_r = s_r.ln_1p() / std::f64::consts::LN_2;
    let cap_t = s_t.ln_1p() / std::f64::consts::LN_2;
    let tau_star = if cap_r > 0.0 {
        targets.rate_r / cap_r
    } else {
        f64::INFINITY
    };
    let feasible = tau_star > 0.0
        && tau_star < 1.0
        && cap_t > 0.0
        && (1.0 - tau_star) * cap_t >= targets.rate_t;
    OmaCheck { tau_star, feasible }
}

/// Coverage-maximizing OMA time split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolutionOma {
    pub tau_star: f64,
    pub feasible: bool,
    pub d_r: f64,
    pub d_t: f64,
    pub d_tot: f64,
}

/// OMA radii at time fraction `τ` from unit SNRs, with per-slot energy
/// shares `beta`.
pub fn oma_radii(
    s_r: f64,
    s_t: f64,
    alpha: f64,
    targets: &QosTargets,
    beta: (f64, f64),
    tau: f64,
) -> (Radius, Radius) {
    let g_r = (targets.rate_r / tau).exp2() - 1.0;
    let g_t = (targets.rate_t / (1.0 - tau)).exp2() - 1.0;
    (
        radius_from_unit_snr(s_r, beta.0, g_r, alpha),
        radius_from_unit_snr(s_t, beta.1, g_t, alpha),
    )
}

/// Maximizes `D_r(τ) + D_t(1−τ)` over `[TAU_LO, TAU_HI]`, counting only
/// splits where both radii are positive.
///
/// The objective is unimodal at moderate rates but turns convex around the
/// centre when `2^{R/τ}` grows fast relative to `α`, so a coarse scan picks
/// the bracket that golden section then refines.
pub fn maximize_oma_from_snr(
    s_r: f64,
    s_t: f64,
    alpha: f64,
    targets: &QosTargets,
    beta: (f64, f64),
) -> InnerSolutionOma {
    let total = |tau: f64| {
        let (r, t) = oma_radii(s_r, s_t, alpha, targets, beta, tau);
        if r.feasible && t.feasible {
            r.meters + t.meters
        } else {
            0.0
        }
    };
    let step = (TAU_HI - TAU_LO) / (TAU_SCAN - 1) as f64;
    let at = |k: usize| TAU_LO + k as f64 * step;
    let mut k_best = 0;
    let mut f_best = f64::NEG_INFINITY;
    for k in 0..TAU_SCAN {
        let v = total(at(k));
        if v > f_best {
            f_best = v;
            k_best = k;
        }
    }
    let lo = at(k_best.saturating_sub(1));
    let hi = at((k_best + 1).min(TAU_SCAN - 1));
    let (tau, _) = golden_max(total, lo, hi, TAU_TOL);
    let (r, t) = oma_radii(s_r, s_t, alpha, targets, beta, tau);
    let feasible = r.feasible && t.feasible;
    if !feasible {
        return InnerSolutionOma {
            tau_star: tau,
            feasible,
            d_r: 0.0,
            d_t: 0.0,
            d_tot: 0.0,
        };
    }
    InnerSolutionOma {
        tau_star: tau,
        feasible,
        d_r: r.meters,
        d_t: t.meters,
        d_tot: r.meters + t.meters,
    }
}

/// Far-field OMA optimum with full surface energy in each slot.
pub fn maximize_oma_coverage(
    budget: &LinkBudget,
    chi_r: f64,
    chi_t: f64,
    targets: &QosTargets,
) -> Result<InnerSolutionOma> {
    budget.validate()?;
    Ok(maximize_oma_from_snr(
        budget.unit_snr(chi_r),
        budget.unit_snr(chi_t),
        budget.alpha,
        targets,
        (1.0, 1.0),
    ))
}

// ---------------------------------------------------------------- NOMA

/// `(γ_t, γ_{r→t}, γ_r)` with `r` decoding first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaSinrs {
    /// Weak user decoding its own layer.
    pub gamma_t: f64,
    /// Strong user decoding the weak layer before cancellation.
    pub gamma_r_to_t: f64,
    /// Strong user after cancellation.
    pub gamma_r: f64,
}

/// NOMA SINRs. The gains here carry the transmit power, i.e. they are the
/// `s_*` fields of [`EffectiveGains`], and `p_*` are power fractions.
pub fn noma_sinrs(g_r: f64, g_t: f64, beta_r: f64, beta_t: f64, p_r: f64, p_t: f64) -> NomaSinrs {
    NomaSinrs {
        gamma_t: beta_t * p_t * g_t / (beta_t * p_r * g_t + 1.0),
        gamma_r_to_t: beta_t * p_t * g_r / (beta_t * p_r * g_r + 1.0),
        gamma_r: beta_r * p_r * g_r,
    }
}

/// Rate margins `log₂(1+γ) − R_target` of the three NOMA constraints.
/// Non-negative margins mean the constraint holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaMargins {
    pub weak_qos: f64,
    pub strong_qos: f64,
    pub sic: f64,
}

impl NomaMargins {
    pub fn feasible(&self) -> bool {
        self.weak_qos >= 0.0 && self.strong_qos >= 0.0 && self.sic >= 0.0
    }

    /// `Σ_u max(0, R_u^tar − R_u)` over the two users' own rates.
    pub fn shortfall(&self) -> f64 {
        (-self.weak_qos).max(0.0) + (-self.strong_qos).max(0.0)
    }
}

/// Constraint margins with `r` decoding first and `p_t = 1 − p_r`.
pub fn check_noma(g_r: f64, g_t: f64, beta_r: f64, p_r: f64, targets: &QosTargets) -> NomaMargins {
    let s = noma_sinrs(g_r, g_t, beta_r, 1.0 - beta_r, p_r, 1.0 - p_r);
    NomaMargins {
        weak_qos: s.gamma_t.log2_1p() - targets.rate_t,
        strong_qos: s.gamma_r.log2_1p() - targets.rate_r,
        sic: s.gamma_r_to_t.log2_1p() - targets.rate_t,
    }
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    fn log2_1p(self) -> f64 {
        self.ln_1p() / std::f64::consts::LN_2
    }
}

/// Coverage-maximizing NOMA allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolutionNoma {
    pub beta_r: f64,
    pub p_r: f64,
    /// The user decoding first.
    pub strong: User,
    pub feasible: bool,
    pub d_r: f64,
    pub d_t: f64,
    pub d_tot: f64,
}

impl InnerSolutionNoma {
    pub fn beta_t(&self) -> f64 {
        1.0 - self.beta_r
    }

    pub fn p_t(&self) -> f64 {
        1.0 - self.p_r
    }
}

/// Grid-plus-refinement NOMA solver for fixed `α` and targets.
///
/// With the strong user `s` and weak user `w`, the objective is
/// `a (β p)^{1/α} + b ((1−β)(1 − p(1+γ_w)))^{1/α}` with
/// `a = (S_s/γ_s)^{1/α}` and `b = (S_w/γ_w)^{1/α}`. Each factor depends on
/// one coordinate, so the per-axis powers are tabulated once.
#[derive(Debug, Clone)]
pub struct NomaSolver {
    alpha: f64,
    targets: QosTargets,
    grid: Vec<f64>,
    beta_pow: Vec<f64>,
    beta_c_pow: Vec<f64>,
    p_pow: Vec<f64>,
    /// Weak-user power factor per grid point, indexed by the weak user.
    weak_pow: [Vec<f64>; 2],
}

fn user_slot(u: User) -> usize {
    match u {
        User::R => 0,
        User::T => 1,
    }
}

impl NomaSolver {
    pub fn new(alpha: f64, targets: QosTargets) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        let e = 1.0 / alpha;
        let grid: Vec<f64> = (0..NOMA_GRID)
            .map(|i| (i as f64 + 0.5) / NOMA_GRID as f64)
            .collect();
        let weak = |u: User| {
            let gw = targets.noma_threshold(u);
            grid.iter()
                .map(|&p| (1.0 - p * (1.0 + gw)).max(0.0).powf(e))
                .collect::<Vec<_>>()
        };
        Ok(Self {
            alpha,
            targets,
            beta_pow: grid.iter().map(|b| b.powf(e)).collect(),
            beta_c_pow: grid.iter().map(|b| (1.0 - b).powf(e)).collect(),
            p_pow: grid.iter().map(|p| p.powf(e)).collect(),
            weak_pow: [weak(User::R), weak(User::T)],
            grid,
        })
    }

    pub fn targets(&self) -> &QosTargets {
        &self.targets
    }

    /// Radii of `(strong, weak)` at strong-user shares `(β_s, p_s)`.
    fn radii(&self, gains: &EffectiveGains, strong: User, beta_s: f64, p_s: f64) -> (Radius, Radius) {
        let weak = strong.other();
        let r = noma_radii_from_unit_snr(
            gains.snr(strong),
            gains.snr(weak),
            beta_s,
            p_s,
            1.0 - p_s,
            self.targets.noma_threshold(strong),
            self.targets.noma_threshold(weak),
            self.alpha,
        );
        (r.strong, r.weak)
    }

    fn objective(&self, gains: &EffectiveGains, strong: User, beta_s: f64, p_s: f64) -> f64 {
        let (s, w) = self.radii(gains, strong, beta_s, p_s);
        if s.feasible && w.feasible {
            s.meters + w.meters
        } else {
            0.0
        }
    }

    /// Solves with the decoding order taken from the gains.
    pub fn solve(&self, gains: &EffectiveGains) -> InnerSolutionNoma {
        self.solve_with_order(gains, gains.strong_user())
    }

    /// Solves with a fixed decoding order.
    pub fn solve_with_order(&self, gains: &EffectiveGains, strong: User) -> InnerSolutionNoma {
        let weak = strong.other();
        let e = 1.0 / self.alpha;
        let a = (gains.snr(strong) / self.targets.noma_threshold(strong)).powf(e);
        let b = (gains.snr(weak) / self.targets.noma_threshold(weak)).powf(e);
        let wp = &self.weak_pow[user_slot(weak)];

        // Along a grid row (fixed β) the objective is concave in p, so the
        // sampled row is unimodal and a climb from the previous row's peak
        // lands on the row maximum without scanning the whole row.
        let feasible_cols = wp.iter().take_while(|&&w| w > 0.0).count();
        let mut best = (0.0, usize::MAX, usize::MAX);
        if feasible_cols > 0 && a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
            let mut j = 0;
            for i in 0..NOMA_GRID {
                let sa = a * self.beta_pow[i];
                let sb = b * self.beta_c_pow[i];
                let v = |j: usize| sa * self.p_pow[j] + sb * wp[j];
                while j + 1 < feasible_cols && v(j + 1) > v(j) {
                    j += 1;
                }
                while j > 0 && v(j - 1) >= v(j) {
                    j -= 1;
                }
                if v(j) > best.0 {
                    best = (v(j), i, j);
                }
            }
        }
        if best.1 == usize::MAX {
            return self.infeasible(strong);
        }

        let h = 1.0 / NOMA_GRID as f64;
        let mut beta = self.grid[best.1];
        let mut p = self.grid[best.2];
        let mut value = self.objective(gains, strong, beta, p);
        let p_cap = 1.0 / (1.0 + self.targets.noma_threshold(weak));
        for _ in 0..NOMA_SWEEPS {
            let (lo, hi) = ((beta - h).max(0.0), (beta + h).min(1.0));
            let (nb, vb) = golden_max(|x| self.objective(gains, strong, x, p), lo, hi, 1e-10);
            if vb > value {
                beta = nb;
                value = vb;
            }
            let (lo, hi) = ((p - h).max(0.0), (p + h).min(p_cap));
            let (np, vp) = golden_max(|x| self.objective(gains, strong, beta, x), lo, hi, 1e-10);
            if vp > value {
                p = np;
                value = vp;
            }
        }

        let (s, w) = self.radii(gains, strong, beta, p);
        let (beta_r, p_r, rr, rt) = match strong {
            User::R => (beta, p, s, w),
            User::T => (1.0 - beta, 1.0 - p, w, s),
        };
        InnerSolutionNoma {
            beta_r,
            p_r,
            strong,
            feasible: true,
            d_r: rr.meters,
            d_t: rt.meters,
            d_tot: rr.meters + rt.meters,
        }
    }

    fn infeasible(&self, strong: User) -> InnerSolutionNoma {
        InnerSolutionNoma {
            beta_r: 0.5,
            p_r: 0.5,
            strong,
            feasible: false,
            d_r: 0.0,
            d_t: 0.0,
            d_tot: 0.0,
        }
    }

    /// Rate margins of a solution at unit distance, in its decoding order.
    pub fn margins(&self, gains: &EffectiveGains, sol: &InnerSolutionNoma) -> NomaMargins {
        match sol.strong {
            User::R => check_noma(gains.s_r, gains.s_t, sol.beta_r, sol.p_r, &self.targets),
            User::T => {
                let swapped = QosTargets {
                    rate_r: self.targets.rate_t,
                    rate_t: self.targets.rate_r,
                };
                check_noma(gains.s_t, gains.s_r, sol.beta_t(), sol.p_t(), &swapped)
            }
        }
    }
}

/// Far-field NOMA optimum; `order` fixes the strong user, `None` picks it
/// from the gains.
pub fn maximize_noma_coverage(
    budget: &LinkBudget,
    chi_r: f64,
    chi_t: f64,
    targets: &QosTargets,
    order: Option<User>,
) -> Result<InnerSolutionNoma> {
    budget.validate()?;
    let mut b = *budget;
    b.chi_r = chi_r;
    b.chi_t = chi_t;
    let gains = EffectiveGains::far_field(&b);
    let solver = NomaSolver::new(budget.alpha, *targets)?;
    Ok(solver.solve_with_order(&gains, order.unwrap_or_else(|| gains.strong_user())))
}

/// OMA thresholds at a time split, for reporting.
pub fn oma_thresholds(targets: &QosTargets, tau: f64) -> Result<(f64, f64)> {
    Ok((
        oma_threshold(targets.rate_r, tau)?,
        oma_threshold(targets.rate_t, 1.0 - tau)?,
    ))
}

/// NOMA thresholds `(γ_r, γ_t)`.
pub fn noma_thresholds(targets: &QosTargets) -> (f64, f64) {
    (noma_threshold(targets.rate_r), noma_threshold(targets.rate_t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> LinkBudget {
        LinkBudget {
            tx_power: 1.0,
            noise_power: 1e-14,
            rho0: 4.677e-5,
            alpha: 2.1,
            bs_distance: 50.0,
            elements: 36,
            chi_r: 1.0,
            chi_t: 1.0,
        }
    }

    #[test]
    fn far_field_gains_match_unit_snr() {
        let b = budget();
        let g = EffectiveGains::far_field(&b);
        assert!((g.s_r / b.unit_snr(1.0) - 1.0).abs() < 1e-12);
        assert_eq!(g.strong_user(), User::R);
    }

    #[test]
    fn oma_boundary_case() {
        let t = QosTargets::symmetric(1.0).unwrap();
        let c = check_oma(1.0, 1.0, &t);
        assert_eq!(c.tau_star, 1.0);
        assert!(!c.feasible);
        assert!(!check_oma(0.0, 5.0, &t).feasible);
    }

    #[test]
    fn oma_symmetric_split_is_half() {
        let t = QosTargets::symmetric(1.0).unwrap();
        let sol = maximize_oma_coverage(&budget(), 1.0, 1.0, &t).unwrap();
        assert!(sol.feasible);
        assert!((sol.tau_star - 0.5).abs() < 1e-6, "{}", sol.tau_star);
        assert!((sol.d_r - sol.d_t).abs() < 1e-6 * sol.d_r);
    }

    #[test]
    fn sinr_special_cases() {
        let s = noma_sinrs(3.0, 5.0, 0.4, 0.6, 0.0, 1.0);
        assert_eq!(s.gamma_r, 0.0);
        assert!((s.gamma_t - 0.6 * 5.0).abs() < 1e-15);
        let s = noma_sinrs(4.0, 4.0, 0.5, 0.5, 0.3, 0.7);
        assert_eq!(s.gamma_t, s.gamma_r_to_t);
    }

    #[test]
    fn zero_gains_violate_everything() {
        let t = QosTargets::symmetric(1.0).unwrap();
        let m = check_noma(0.0, 0.0, 0.5, 0.5, &t);
        assert!(m.weak_qos < 0.0 && m.strong_qos < 0.0 && m.sic < 0.0);
        assert!(!m.feasible());
    }

    #[test]
    fn unreachable_weak_target_is_infeasible() {
        let t = QosTargets::new(1.0, 50.0).unwrap();
        let sol = maximize_noma_coverage(&budget(), 1.0, 1.0, &t, None).unwrap();
        assert!(!sol.feasible);
        assert_eq!(sol.d_tot, 0.0);
    }

    #[test]
    fn swapped_order_mirrors() {
        let t = QosTargets::new(1.0, 1.5).unwrap();
        let solver = NomaSolver::new(2.1, t).unwrap();
        let g = EffectiveGains {
            s_r: 1e6,
            s_t: 4e6,
            g_r: 1e6,
            g_t: 4e6,
        };
        assert_eq!(g.strong_user(), User::T);
        let sol = solver.solve(&g);
        assert!(sol.feasible);
        assert_eq!(sol.strong, User::T);
        let mirror = NomaSolver::new(2.1, QosTargets::new(1.5, 1.0).unwrap()).unwrap();
        let m = mirror.solve(&EffectiveGains {
            s_r: 4e6,
            s_t: 1e6,
            g_r: 4e6,
            g_t: 1e6,
        });
        assert!((sol.d_tot - m.d_tot).abs() < 1e-9 * m.d_tot);
        assert!((sol.d_r - m.d_t).abs() < 1e-9 * m.d_t);
    }
}
