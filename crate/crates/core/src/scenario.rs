//! Position-aware evaluation of a placement.
//!
//! A [`Scenario`] holds the physical setup. An [`Evaluator`] fixes the fading
//! innovations for a seed, so that every placement is scored against the same
//! `N_MC` channel draws: the correlated scattering still changes with the
//! placement (through the active covariance and steering phases), but the
//! comparison between placements carries no Monte-Carlo noise.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::access::{maximize_oma_from_snr, oma_rates, EffectiveGains, NomaSolver};
use crate::channel::{
    cascaded_gain, compose_hop, phase_attenuation, steering_vector, Hop, HopParams, NlosFactor,
    PhaseErrorModel,
};
use crate::coverage::{noma_threshold, radius_from_unit_snr, LinkBudget, QosTargets};
use crate::error::{Error, Result};
use crate::geometry::{ApertureConfig, Placement, SPEED_OF_LIGHT};
use crate::rng::{circular_normal, domain, stream};

/// Multiple-access scheme scored by the inner solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Oma,
    Noma,
    /// Plain energy splitting at a fixed `β_r`, full power to both users.
    Es { beta_r: f64 },
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Oma => "oma",
            Mode::Noma => "noma",
            Mode::Es { .. } => "es",
        }
    }
}

/// Movable (FIRES) or fixed-position (STAR-RIS) elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surface {
    Fires,
    #[serde(alias = "star")]
    StarRis,
}

impl Surface {
    pub fn label(&self) -> &'static str {
        match self {
            Surface::Fires => "fires",
            Surface::StarRis => "star",
        }
    }
}

/// Physical setup in linear units.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub aperture: ApertureConfig,
    /// Transmit power `P` (W).
    pub tx_power: f64,
    /// Noise power `σ²` (W).
    pub noise_power: f64,
    /// Power gain at one metre.
    pub rho0: f64,
    pub alpha: f64,
    /// BS-to-surface distance (m).
    pub bs_distance: f64,
    /// Rician factor per hop, indexed by [`Hop::index`].
    pub k_factor: [f64; 3],
    /// LoS direction per hop as seen from the surface centre.
    pub directions: [[f64; 3]; 3],
    pub phase_r: PhaseErrorModel,
    pub phase_t: PhaseErrorModel,
    pub targets: QosTargets,
    /// Fading draws averaged per evaluation.
    pub n_mc: usize,
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl Scenario {
    /// The reference setup: 3.5 GHz, 1 m² aperture, 6x6 elements with
    /// 100x100 presets each, half-wavelength spacing, K = 5 on every hop,
    /// 30 dBm transmit power, −114 dBm noise, α = 2.1, BS at 50 m and
    /// unit target rates.
    pub fn reference() -> Self {
        let aperture = ApertureConfig::square(1.0, 6, 100, 3.5e9).expect("valid reference aperture");
        Self {
            aperture,
            tx_power: dbm_to_watts(30.0),
            noise_power: dbm_to_watts(-114.0),
            rho0: dbm_to_watts(-13.3),
            alpha: 2.1,
            bs_distance: 50.0,
            k_factor: [5.0; 3],
            directions: [[0.5, 0.0, 0.866], [-0.3, 0.2, 0.93], [-0.3, 0.2, -0.93]],
            phase_r: PhaseErrorModel::Ideal,
            phase_t: PhaseErrorModel::Ideal,
            targets: QosTargets::symmetric(1.0).expect("positive rate"),
            n_mc: 5,
        }
    }

    /// Replaces the aperture with a square one of `m` elements, keeping
    /// side, presets per subarea and carrier.
    pub fn with_elements(mut self, m: usize) -> Result<Self> {
        let side = (m as f64).sqrt().round() as usize;
        if side * side != m {
            return Err(Error::Domain(format!("{m} elements do not form a square layout")));
        }
        let a = &self.aperture;
        let carrier = SPEED_OF_LIGHT / a.wavelength;
        let spacing_in_lambda = a.min_spacing / a.wavelength;
        let mut cfg = ApertureConfig::square(a.width, side, a.presets_h, carrier)?;
        cfg.height = a.height;
        cfg.presets_v = a.presets_v;
        cfg.min_spacing = spacing_in_lambda * cfg.wavelength;
        cfg.validate()?;
        self.aperture = cfg;
        Ok(self)
    }

    pub fn chi(&self) -> Result<(f64, f64)> {
        Ok((phase_attenuation(self.phase_r)?, phase_attenuation(self.phase_t)?))
    }

    pub fn budget(&self) -> Result<LinkBudget> {
        let (chi_r, chi_t) = self.chi()?;
        let b = LinkBudget {
            tx_power: self.tx_power,
            noise_power: self.noise_power,
            rho0: self.rho0,
            alpha: self.alpha,
            bs_distance: self.bs_distance,
            elements: self.aperture.num_elements(),
            chi_r,
            chi_t,
        };
        b.validate()?;
        Ok(b)
    }

    /// Hop parameters: the feed hop carries `ρ₀ d_f^{-α}`, the user hops
    /// are taken at the one-metre reference `ρ₀`.
    pub fn hop_params(&self) -> Result<[HopParams; 3]> {
        let feed_gain = self.rho0 * self.bs_distance.powf(-self.alpha);
        let gains = [feed_gain, self.rho0, self.rho0];
        let mut out = Vec::with_capacity(3);
        for hop in Hop::ALL {
            let i = hop.index();
            out.push(HopParams::toward(hop, gains[i], self.k_factor[i], self.directions[i])?);
        }
        Ok([out[0], out[1], out[2]])
    }

    pub fn validate(&self) -> Result<()> {
        self.aperture.validate()?;
        self.budget()?;
        self.hop_params()?;
        if self.n_mc == 0 {
            return Err(Error::Domain("at least one fading draw is required".into()));
        }
        Ok(())
    }
}

/// Inner-solution summary averaged over the feasible draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InnerSummary {
    Oma { tau: f64 },
    Noma { beta_r: f64, p_r: f64, r_strong_share: f64 },
    Es { beta_r: f64 },
}

/// Score of one placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub d_r: f64,
    pub d_t: f64,
    pub d_tot: f64,
    /// Fraction of draws on which the inner problem was feasible.
    pub feasible_rate: f64,
    /// QoS penalty averaged over draws: 0 when feasible, else one plus the
    /// total rate shortfall at one metre.
    pub b_q: f64,
    pub inner: InnerSummary,
}

/// Per-draw outcome, kept for tracing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawOutcome {
    pub h_r: f64,
    pub h_t: f64,
    pub gains: EffectiveGains,
    pub d_r: f64,
    pub d_t: f64,
    pub feasible: bool,
    pub b_q: f64,
}

/// Scores placements against a fixed set of fading draws.
#[derive(Debug, Clone)]
pub struct Evaluator {
    scenario: Scenario,
    hops: [HopParams; 3],
    chi: (f64, f64),
    innovations: Vec<[Vec<Complex64>; 3]>,
    noma: NomaSolver,
}

impl Evaluator {
    pub fn new(scenario: Scenario, seed: u64) -> Result<Self> {
        scenario.validate()?;
        let m = scenario.aperture.num_elements();
        let innovations = (0..scenario.n_mc)
            .map(|n| {
                Hop::ALL.map(|hop| {
                    let mut rng = stream(seed, domain::FADING, hop.index() as u64, n as u64);
                    (0..m).map(|_| circular_normal(&mut rng)).collect()
                })
            })
            .collect();
        Ok(Self {
            hops: scenario.hop_params()?,
            chi: scenario.chi()?,
            noma: NomaSolver::new(scenario.alpha, scenario.targets)?,
            innovations,
            scenario,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn aperture(&self) -> &ApertureConfig {
        &self.scenario.aperture
    }

    pub fn hops(&self) -> &[HopParams; 3] {
        &self.hops
    }

    /// Cascaded gains `(H_r, H_t)` on every draw.
    pub fn cascaded_gains(&self, placement: &Placement) -> Result<Vec<(f64, f64)>> {
        let cfg = &self.scenario.aperture;
        if placement.len() != cfg.num_elements() {
            return Err(Error::Contract(format!(
                "placement has {} elements, aperture {}",
                placement.len(),
                cfg.num_elements()
            )));
        }
        let factor = NlosFactor::active(cfg, placement)?;
        let los = self
            .hops
            .map(|h| steering_vector(cfg, placement, h.azimuth, h.elevation));
        let mut out = Vec::with_capacity(self.innovations.len());
        for draw in &self.innovations {
            let ch: Vec<_> = (0..3)
                .map(|q| compose_hop(&self.hops[q], &los[q], &factor.apply(&draw[q])))
                .collect();
            let h_r = cascaded_gain(&ch[0], &ch[1])?;
            let h_t = cascaded_gain(&ch[0], &ch[2])?;
            if !(h_r.is_finite() && h_t.is_finite()) {
                return Err(Error::Numerical("non-finite cascaded gain".into()));
            }
            out.push((h_r, h_t));
        }
        Ok(out)
    }

    /// Scores every draw separately.
    pub fn draws(&self, placement: &Placement, mode: Mode) -> Result<Vec<DrawOutcome>> {
        let s = &self.scenario;
        self.cascaded_gains(placement)?
            .into_iter()
            .map(|(h_r, h_t)| {
                let gains = EffectiveGains::from_cascaded(s.tx_power, s.noise_power, self.chi, (h_r, h_t));
                let (d_r, d_t, feasible, shortfall, _) = self.inner(&gains, mode)?;
                Ok(DrawOutcome {
                    h_r,
                    h_t,
                    gains,
                    d_r,
                    d_t,
                    feasible,
                    b_q: if feasible { 0.0 } else { 1.0 + shortfall },
                })
            })
            .collect()
    }

    /// `(D_r, D_t, feasible, shortfall, summary)` for one draw.
    fn inner(&self, gains: &EffectiveGains, mode: Mode) -> Result<(f64, f64, bool, f64, InnerSummary)> {
        let s = &self.scenario;
        let targets = &s.targets;
        let short = |rate: f64, target: f64| (target - rate).max(0.0);
        Ok(match mode {
            Mode::Oma => {
                let sol = maximize_oma_from_snr(gains.s_r, gains.s_t, s.alpha, targets, (1.0, 1.0));
                let (rr, rt) = oma_rates(gains.s_r, gains.s_t, sol.tau_star);
                (
                    sol.d_r,
                    sol.d_t,
                    sol.feasible,
                    short(rr, targets.rate_r) + short(rt, targets.rate_t),
                    InnerSummary::Oma { tau: sol.tau_star },
                )
            }
            Mode::Noma => {
                let sol = self.noma.solve(gains);
                let m = self.noma.margins(gains, &sol);
                (
                    sol.d_r,
                    sol.d_t,
                    sol.feasible,
                    m.shortfall(),
                    InnerSummary::Noma {
                        beta_r: sol.beta_r,
                        p_r: sol.p_r,
                        r_strong_share: if sol.strong == crate::coverage::User::R { 1.0 } else { 0.0 },
                    },
                )
            }
            Mode::Es { beta_r } => {
                if !(0.0..=1.0).contains(&beta_r) {
                    return Err(Error::Domain(format!("beta_r {beta_r} outside [0, 1]")));
                }
                let (gr, gt) = (noma_threshold(targets.rate_r), noma_threshold(targets.rate_t));
                let r = radius_from_unit_snr(gains.s_r, beta_r, gr, s.alpha);
                let t = radius_from_unit_snr(gains.s_t, 1.0 - beta_r, gt, s.alpha);
                let rate = |x: f64| x.ln_1p() / std::f64::consts::LN_2;
                (
                    r.meters,
                    t.meters,
                    r.feasible && t.feasible,
                    short(rate(beta_r * gains.s_r), targets.rate_r)
                        + short(rate((1.0 - beta_r) * gains.s_t), targets.rate_t),
                    InnerSummary::Es { beta_r },
                )
            }
        })
    }

    /// Averages the draws of [`draws`](Self::draws).
    pub fn evaluate(&self, placement: &Placement, mode: Mode) -> Result<Evaluation> {
        let s = &self.scenario;
        let n = self.innovations.len() as f64;
        let mut acc = Evaluation {
            d_r: 0.0,
            d_t: 0.0,
            d_tot: 0.0,
            feasible_rate: 0.0,
            b_q: 0.0,
            inner: InnerSummary::Es { beta_r: 0.0 },
        };
        let mut feasible = 0usize;
        let mut sums = [0.0f64; 3];
        for (h_r, h_t) in self.cascaded_gains(placement)? {
            let gains = EffectiveGains::from_cascaded(s.tx_power, s.noise_power, self.chi, (h_r, h_t));
            let (d_r, d_t, ok, shortfall, inner) = self.inner(&gains, mode)?;
            acc.d_r += d_r;
            acc.d_t += d_t;
            if ok {
                feasible += 1;
                match inner {
                    InnerSummary::Oma { tau } => sums[0] += tau,
                    InnerSummary::Noma { beta_r, p_r, r_strong_share } => {
                        sums[0] += beta_r;
                        sums[1] += p_r;
                        sums[2] += r_strong_share;
                    }
                    InnerSummary::Es { .. } => {}
                }
            } else {
                acc.b_q += 1.0 + shortfall;
            }
        }
        let k = feasible.max(1) as f64;
        acc.inner = match mode {
            Mode::Oma => InnerSummary::Oma { tau: sums[0] / k },
            Mode::Noma => InnerSummary::Noma {
                beta_r: sums[0] / k,
                p_r: sums[1] / k,
                r_strong_share: sums[2] / k,
            },
            Mode::Es { beta_r } => InnerSummary::Es { beta_r },
        };
        acc.d_r /= n;
        acc.d_t /= n;
        acc.d_tot = acc.d_r + acc.d_t;
        acc.feasible_rate = feasible as f64 / n;
        acc.b_q /= n;
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::radius_es;

    fn los_only() -> Scenario {
        let mut s = Scenario::reference();
        s.aperture = ApertureConfig::square(1.0, 4, 5, 3.5e9).unwrap();
        s.k_factor = [f64::INFINITY; 3];
        s.n_mc = 2;
        s
    }

    #[test]
    fn pure_los_recovers_far_field_radius() {
        let s = los_only();
        let ev = Evaluator::new(s.clone(), 7).unwrap();
        let p = Placement::centers(&s.aperture);
        let e = ev.evaluate(&p, Mode::Es { beta_r: 0.5 }).unwrap();
        let b = s.budget().unwrap();
        let d = radius_es(&b, 0.5, 1.0, 1.0).unwrap().meters;
        assert!((e.d_r / d - 1.0).abs() < 1e-12, "{} vs {d}", e.d_r);
        assert!((e.d_t / d - 1.0).abs() < 1e-12);
        assert_eq!(e.feasible_rate, 1.0);
        assert_eq!(e.b_q, 0.0);
    }

    #[test]
    fn reference_far_field_radius_is_a_few_hundred_metres() {
        let b = Scenario::reference().budget().unwrap();
        let d = radius_es(&b, 1.0, 1.0, 1.0).unwrap().meters;
        assert!(d > 300.0 && d < 360.0, "{d}");
    }

    #[test]
    fn element_count_must_be_square() {
        assert!(Scenario::reference().with_elements(20).is_err());
        let s = Scenario::reference().with_elements(16).unwrap();
        assert_eq!(s.aperture.num_elements(), 16);
        assert!((s.aperture.min_spacing - s.aperture.wavelength / 2.0).abs() < 1e-15);
    }

    #[test]
    fn evaluation_is_deterministic_per_seed() {
        let mut s = Scenario::reference();
        s.aperture = ApertureConfig::square(1.0, 3, 10, 3.5e9).unwrap();
        let p = Placement::centers(&s.aperture);
        let a = Evaluator::new(s.clone(), 3).unwrap().evaluate(&p, Mode::Noma).unwrap();
        let b = Evaluator::new(s.clone(), 3).unwrap().evaluate(&p, Mode::Noma).unwrap();
        let c = Evaluator::new(s, 4).unwrap().evaluate(&p, Mode::Noma).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.d_tot, c.d_tot);
    }
}
