//! Particle swarm over element positions.
//!
//! Each particle carries a surrogate `y ∈ [0,1]^{2M}`, one `(y_h, y_v)` pair
//! per subarea. A surrogate is snapped to presets, spacing conflicts are
//! repaired where possible, and the result is scored as
//! `J = D_tot − μ_space B_space − μ_q B_q`, where `B_space` counts residual
//! spacing violations and `B_q` is the QoS penalty of the inner solver.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{repair_spacing, surrogate_of, ApertureConfig, Placement, PresetIndex};
use crate::rng::{domain, stream};
use crate::scenario::{Evaluation, Evaluator, Mode};

/// Swarm parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    /// Swarm size `N_p`.
    pub particles: usize,
    /// Maximum iterations `T`.
    pub iterations: usize,
    pub w_max: f64,
    pub w_min: f64,
    pub c1: f64,
    pub c2: f64,
    /// Per-dimension velocity clamp.
    pub v_max: f64,
    pub mu_space: f64,
    pub mu_q: f64,
    /// Ceiling for the adaptive penalty weights.
    pub mu_cap: f64,
    /// Iterations between penalty doublings while violations persist.
    pub mu_period: usize,
    /// Stop after this many iterations without improvement; `None` runs all
    /// `T` iterations.
    pub stall: Option<usize>,
    /// Smallest incumbent gain that counts as an improvement.
    pub improvement_tol: f64,
    /// Share of particles started at the LoS-surrogate presets.
    pub seeded_fraction: f64,
    pub seed: u64,
    /// Score particles on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            particles: 30,
            iterations: 60,
            w_max: 0.9,
            w_min: 0.3,
            c1: 0.5,
            c2: 0.5,
            v_max: 0.2,
            mu_space: 1e6,
            mu_q: 1e6,
            mu_cap: 1e12,
            mu_period: 10,
            stall: Some(20),
            improvement_tol: 1e-12,
            seeded_fraction: 0.5,
            seed: 1,
            parallel: false,
        }
    }
}

impl PsoConfig {
    /// Defaults with a constant inertia of 0.4.
    pub fn constant_inertia() -> Self {
        Self {
            w_max: 0.4,
            w_min: 0.4,
            ..Self::default()
        }
    }

    /// `w(t) = w_min + (w_max − w_min)(T − t)/T`.
    pub fn inertia(&self, t: usize) -> f64 {
        // Same line as the formula above, anchored at w_max so w(0) is exact.
        self.w_max - (self.w_max - self.w_min) * t as f64 / self.iterations as f64
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Domain(m));
        if self.particles == 0 || self.iterations == 0 {
            return fail("swarm size and iteration count must be at least 1".into());
        }
        if !(self.w_min > 0.0 && self.w_min <= self.w_max) {
            return fail(format!("inertia needs 0 < w_min <= w_max, got {} and {}", self.w_min, self.w_max));
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return fail("acceleration coefficients must be non-negative".into());
        }
        if !(self.v_max > 0.0) {
            return fail(format!("v_max must be positive, got {}", self.v_max));
        }
        if !(self.mu_space > 0.0 && self.mu_q > 0.0 && self.mu_cap >= self.mu_space.max(self.mu_q)) {
            return fail("penalty weights must be positive and below the cap".into());
        }
        if self.mu_period == 0 {
            return fail("penalty period must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.seeded_fraction) {
            return fail(format!("seeded fraction {} outside [0, 1]", self.seeded_fraction));
        }
        Ok(())
    }

    /// `⌈seeded_fraction · N_p⌉`.
    pub fn seeded_count(&self) -> usize {
        ((self.seeded_fraction * self.particles as f64).ceil() as usize).min(self.particles)
    }
}

/// Score of one surrogate.
#[derive(Debug, Clone, PartialEq)]
pub struct Score {
    pub j: f64,
    pub placement: Placement,
    /// Spacing violations left after repair.
    pub violations: usize,
    pub evaluation: Evaluation,
}

impl Score {
    /// No spacing violations and a feasible inner problem on every draw.
    pub fn is_clean(&self) -> bool {
        self.violations == 0 && self.evaluation.b_q == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub y: Vec<f64>,
    pub v: Vec<f64>,
    pub pbest_y: Vec<f64>,
    pub pbest_j: f64,
    /// Placement from the last scoring, after repair.
    pub placement: Option<Placement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub gbest_y: Vec<f64>,
    pub gbest_j: f64,
}

/// Per-subarea surrogate of the preset maximizing the LoS cascade
/// `Σ_u |a_u(p)| |a_f(p)|`. Near-ties (within 1e-12 relative) go to the
/// preset nearest the subarea centre, then to the lower index.
pub fn seed_surrogate(evaluator: &Evaluator) -> Vec<f64> {
    let cfg = evaluator.aperture();
    let hops = evaluator.hops();
    let k = 2.0 * std::f64::consts::PI / cfg.wavelength;
    // LoS amplitude of a hop at position x; the phase drops out of |·|.
    let los_amp = |q: usize, x: [f64; 2]| {
        let h = &hops[q];
        let (wl, _) = h.rician_weights();
        let phase = k * (x[0] * h.azimuth.sin() * h.elevation.cos() + x[1] * h.elevation.sin());
        (h.gain.sqrt() * wl * num_complex::Complex64::from_polar(1.0, phase)).norm()
    };
    let mut y = Vec::with_capacity(2 * cfg.num_elements());
    for m in 0..cfg.num_elements() {
        let centre = cfg.grid_position(cfg.grid_coord(cfg.center_preset(m)).expect("valid"));
        let mut best: Option<(f64, f64, PresetIndex)> = None;
        for local in 0..cfg.presets_per_subarea() {
            let idx = PresetIndex { subarea: m, local };
            let x = cfg.grid_position(cfg.grid_coord(idx).expect("valid"));
            let f = los_amp(0, x);
            let value = f * (los_amp(1, x) + los_amp(2, x));
            let d = (x[0] - centre[0]).hypot(x[1] - centre[1]);
            let better = match best {
                None => true,
                Some((bv, bd, _)) => {
                    let tol = 1e-12 * bv.abs().max(value.abs());
                    value > bv + tol || ((value - bv).abs() <= tol && d < bd)
                }
            };
            if better {
                best = Some((value, d, idx));
            }
        }
        let (_, _, idx) = best.expect("subarea has presets");
        y.extend_from_slice(&surrogate_of(cfg, idx));
    }
    y
}

/// Initial swarm: the first `⌈seeded_fraction N_p⌉` particles sit at
/// `seeded`, the rest are uniform; velocities are uniform in `±v_max`.
pub fn init_swarm(cfg: &ApertureConfig, pso: &PsoConfig, seeded: &[f64]) -> Result<Swarm> {
    pso.validate()?;
    let dim = 2 * cfg.num_elements();
    if seeded.len() != dim {
        return Err(Error::Contract(format!("seeded surrogate has length {}, need {dim}", seeded.len())));
    }
    let n_seeded = pso.seeded_count();
    let particles = (0..pso.particles)
        .map(|p| {
            let mut rng = stream(pso.seed, domain::SWARM_INIT, p as u64, 0);
            let y: Vec<f64> = if p < n_seeded {
                seeded.to_vec()
            } else {
                (0..dim).map(|_| rng.random::<f64>()).collect()
            };
            let v = (0..dim)
                .map(|_| rng.random_range(-pso.v_max..=pso.v_max))
                .collect();
            Particle {
                pbest_y: y.clone(),
                y,
                v,
                pbest_j: f64::NEG_INFINITY,
                placement: None,
            }
        })
        .collect();
    Ok(Swarm {
        particles,
        gbest_y: vec![0.5; dim],
        gbest_j: f64::NEG_INFINITY,
    })
}

/// Snaps, repairs and scores a surrogate.
pub fn score(evaluator: &Evaluator, y: &[f64], mode: Mode, mu: (f64, f64)) -> Result<Score> {
    let cfg = evaluator.aperture();
    let raw = Placement::from_surrogate(cfg, y)?;
    let (placement, violations) = repair_spacing(cfg, &raw);
    let evaluation = evaluator.evaluate(&placement, mode)?;
    let j = evaluation.d_tot - mu.0 * violations as f64 - mu.1 * evaluation.b_q;
    Ok(Score {
        j,
        placement,
        violations,
        evaluation,
    })
}

/// Velocity and position update for iteration `t`.
pub fn step(swarm: &mut Swarm, t: usize, pso: &PsoConfig) {
    let w = pso.inertia(t);
    let gbest = &swarm.gbest_y;
    for (p, particle) in swarm.particles.iter_mut().enumerate() {
        let mut rng = stream(pso.seed, domain::SWARM_STEP, t as u64, p as u64);
        for d in 0..particle.y.len() {
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            let v = w * particle.v[d]
                + pso.c1 * r1 * (particle.pbest_y[d] - particle.y[d])
                + pso.c2 * r2 * (gbest[d] - particle.y[d]);
            particle.v[d] = v.clamp(-pso.v_max, pso.v_max);
            particle.y[d] = (particle.y[d] + particle.v[d]).clamp(0.0, 1.0);
        }
    }
}

/// Outcome of a swarm run.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoResult {
    pub best: Score,
    /// Incumbent `J` after each iteration.
    pub trace: Vec<f64>,
    /// Wall-clock seconds per iteration.
    pub iter_secs: Vec<f64>,
    pub total_secs: f64,
    /// First iteration (1-based) at which the incumbent is within 1% of
    /// its final value.
    pub it_99: usize,
    pub evaluations: usize,
    /// Penalty weights at the end of the run.
    pub mu: (f64, f64),
}

impl PsoResult {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn secs_per_iter(&self) -> f64 {
        self.total_secs / self.trace.len().max(1) as f64
    }
}

/// First 1-based index at which `trace` comes within 1% of its last value.
pub fn iterations_to_99(trace: &[f64]) -> usize {
    let Some(&last) = trace.last() else {
        return 0;
    };
    let target = last - 0.01 * last.abs();
    trace.iter().position(|&v| v >= target).map_or(trace.len(), |i| i + 1)
}

/// Runs the swarm for `mode` against the evaluator's draws.
pub fn optimize(evaluator: &Evaluator, mode: Mode, pso: &PsoConfig) -> Result<PsoResult> {
    let started = Instant::now();
    let cfg = evaluator.aperture();
    let seeded = seed_surrogate(evaluator);
    let mut swarm = init_swarm(cfg, pso, &seeded)?;

    let mut mu = (pso.mu_space, pso.mu_q);
    let mut gbest: Option<Score> = None;
    let mut clean_best: Option<Score> = None;
    let mut trace = Vec::with_capacity(pso.iterations);
    let mut iter_secs = Vec::with_capacity(pso.iterations);
    let mut last_improvement = 0usize;
    let mut space_violated = false;
    let mut qos_violated = false;
    let mut evaluations = 0usize;

    for t in 0..pso.iterations {
        let tick = Instant::now();
        let scores: Vec<Score> = if pso.parallel {
            swarm
                .particles
                .par_iter()
                .map(|p| score(evaluator, &p.y, mode, mu))
                .collect::<Result<_>>()?
        } else {
            swarm
                .particles
                .iter()
                .map(|p| score(evaluator, &p.y, mode, mu))
                .collect::<Result<_>>()?
        };
        evaluations += scores.len();

        let previous = swarm.gbest_j;
        for (particle, s) in swarm.particles.iter_mut().zip(scores) {
            space_violated |= s.violations > 0;
            qos_violated |= s.evaluation.b_q > 0.0;
            if s.j > particle.pbest_j {
                particle.pbest_j = s.j;
                particle.pbest_y.clone_from(&particle.y);
            }
            // Strict comparison keeps the lowest particle index on ties.
            if s.j > swarm.gbest_j {
                swarm.gbest_j = s.j;
                swarm.gbest_y.clone_from(&particle.y);
                gbest = Some(s.clone());
            }
            if s.is_clean() && clean_best.as_ref().is_none_or(|c| s.evaluation.d_tot > c.evaluation.d_tot) {
                clean_best = Some(s.clone());
            }
            particle.placement = Some(s.placement);
        }
        if t == 0 || swarm.gbest_j > previous + pso.improvement_tol {
            last_improvement = t;
        }
        trace.push(swarm.gbest_j);
        iter_secs.push(tick.elapsed().as_secs_f64());

        if pso.stall.is_some_and(|s| t - last_improvement >= s) {
            break;
        }
        if (t + 1) % pso.mu_period == 0 {
            if space_violated {
                mu.0 = (mu.0 * 2.0).min(pso.mu_cap);
            }
            if qos_violated {
                mu.1 = (mu.1 * 2.0).min(pso.mu_cap);
            }
            space_violated = false;
            qos_violated = false;
        }
        if t + 1 < pso.iterations {
            step(&mut swarm, t, pso);
        }
    }

    let gbest = gbest.expect("at least one particle is scored");
    let best = match clean_best {
        Some(c) if !gbest.is_clean() => c,
        _ => gbest,
    };
    Ok(PsoResult {
        it_99: iterations_to_99(&trace),
        best,
        trace,
        iter_secs,
        total_secs: started.elapsed().as_secs_f64(),
        evaluations,
        mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    fn small_scenario() -> Scenario {
        let mut s = Scenario::reference();
        s.aperture = ApertureConfig::square(1.0, 3, 10, 3.5e9).unwrap();
        s.n_mc = 2;
        s
    }

    #[test]
    fn inertia_endpoints() {
        let c = PsoConfig::default();
        assert_eq!(c.inertia(0), c.w_max);
        assert!((c.inertia(c.iterations) - c.w_min).abs() < 1e-15);
        let k = PsoConfig::constant_inertia();
        assert_eq!(k.inertia(0), 0.4);
        assert_eq!(k.inertia(37), 0.4);
    }

    #[test]
    fn unseeded_swarm_is_uniform_and_clamped() {
        let cfg = ApertureConfig::square(1.0, 3, 10, 3.5e9).unwrap();
        let pso = PsoConfig {
            seeded_fraction: 0.0,
            ..PsoConfig::default()
        };
        let seeded = vec![0.5; 18];
        let s = init_swarm(&cfg, &pso, &seeded).unwrap();
        assert!(s.particles.iter().all(|p| p.y != seeded));
        for p in &s.particles {
            assert!(p.y.iter().all(|v| (0.0..=1.0).contains(v)));
            assert!(p.v.iter().all(|v| v.abs() <= pso.v_max));
        }
        assert_eq!(s, init_swarm(&cfg, &pso, &seeded).unwrap());
    }

    #[test]
    fn degenerate_surrogate_seeds_centres() {
        let ev = Evaluator::new(small_scenario(), 1).unwrap();
        let y = seed_surrogate(&ev);
        let p = Placement::from_surrogate(ev.aperture(), &y).unwrap();
        assert_eq!(p, Placement::centers(ev.aperture()));
    }

    #[test]
    fn single_particle_single_iteration() {
        let ev = Evaluator::new(small_scenario(), 1).unwrap();
        let pso = PsoConfig {
            particles: 1,
            iterations: 1,
            ..PsoConfig::default()
        };
        let r = optimize(&ev, Mode::Oma, &pso).unwrap();
        assert_eq!(r.evaluations, 1);
        let direct = score(&ev, &seed_surrogate(&ev), Mode::Oma, (1e6, 1e6)).unwrap();
        assert_eq!(r.best, direct);
        assert_eq!(r.it_99, 1);
    }

    #[test]
    fn it99_definition() {
        assert_eq!(iterations_to_99(&[1.0, 5.0, 9.95, 10.0]), 3);
        assert_eq!(iterations_to_99(&[10.0, 10.0]), 1);
    }
}
