//! Experiment drivers: fixed-allocation bounds, single optimizations, the
//! fixed-position baseline, parameter sweeps and runtime benchmarks.
//!
//! Every driver takes an [`ExperimentConfig`] and returns plain data; the
//! `fires` binary only formats it.

pub mod config;
pub mod units;

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    parse_seeds, BoundSettings, ExperimentConfig, ModeChoice, Sweep, SweepAxis, SurfaceChoice,
};

use crate::access::{maximize_noma_coverage, maximize_oma_coverage, InnerSolutionNoma, InnerSolutionOma};
use crate::coverage::{
    noma_threshold, radius_es, radius_noma, radius_oma, CoverageResult, NomaAllocation,
};
use crate::error::{Error, Result};
use crate::geometry::Placement;
use crate::pso::{optimize, PsoConfig};
use crate::scenario::{Evaluation, Evaluator, InnerSummary, Mode, Surface};

// ------------------------------------------------------------------ bound

/// Closed-form far-field radii at the configured parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub rayleigh_distance: f64,
    /// Single user with the whole surface and power, `γ = 2^R − 1`.
    pub single_user: CoverageResult,
    /// OMA at the configured time split.
    pub oma_fixed: CoverageResult,
    pub oma_best: InnerSolutionOma,
    /// NOMA at the configured `(β_r, p_r)`, `r` decoding first.
    pub noma_fixed: CoverageResult,
    pub noma_best: InnerSolutionNoma,
    pub settings: BoundSettings,
}

impl BoundReport {
    pub fn all_infeasible(&self) -> bool {
        let none = |c: &CoverageResult| !c.feasible_r && !c.feasible_t;
        none(&self.single_user)
            && none(&self.oma_fixed)
            && none(&self.noma_fixed)
            && !self.oma_best.feasible
            && !self.noma_best.feasible
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |f: &mut fmt::Formatter<'_>, label: &str, c: &CoverageResult| {
            writeln!(
                f,
                "{label:<28} D_r = {:>10.3} m  D_t = {:>10.3} m  D_tot = {:>10.3} m{}{}",
                c.d_r,
                c.d_t,
                c.d_tot,
                if c.feasible_r && c.feasible_t { "" } else { "  [infeasible]" },
                if c.rayleigh_warning { "  [inside Rayleigh distance]" } else { "" },
            )
        };
        writeln!(f, "Rayleigh distance {:.3} m", self.rayleigh_distance)?;
        row(f, "single user (per side)", &self.single_user)?;
        row(f, &format!("OMA tau = {}", self.settings.tau), &self.oma_fixed)?;
        writeln!(
            f,
            "{:<28} D_r = {:>10.3} m  D_t = {:>10.3} m  D_tot = {:>10.3} m  tau* = {:.6}",
            "OMA optimal split",
            self.oma_best.d_r,
            self.oma_best.d_t,
            self.oma_best.d_tot,
            self.oma_best.tau_star
        )?;
        row(
            f,
            &format!("NOMA beta_r = {}, p_r = {}", self.settings.beta_r, self.settings.p_r),
            &self.noma_fixed,
        )?;
        writeln!(
            f,
            "{:<28} D_r = {:>10.3} m  D_t = {:>10.3} m  D_tot = {:>10.3} m  beta_r* = {:.6}  p_r* = {:.6}",
            "NOMA optimal split",
            self.noma_best.d_r,
            self.noma_best.d_t,
            self.noma_best.d_tot,
            self.noma_best.beta_r,
            self.noma_best.p_r
        )
    }
}

/// Evaluates the closed-form radii without any optimization over positions.
pub fn run_bound(cfg: &ExperimentConfig) -> Result<BoundReport> {
    let s = &cfg.scenario;
    let budget = s.budget()?;
    let rayleigh = s.aperture.rayleigh_distance();
    let (chi_r, chi_t) = (budget.chi_r, budget.chi_t);
    let t = &s.targets;
    let b = cfg.bound;

    let single_user = CoverageResult::new(
        radius_es(&budget, 1.0, chi_r, noma_threshold(t.rate_r))?,
        radius_es(&budget, 1.0, chi_t, noma_threshold(t.rate_t))?,
        rayleigh,
    );
    let oma_fixed = CoverageResult::new(
        radius_oma(&budget, chi_r, b.tau, t.rate_r)?,
        radius_oma(&budget, chi_t, 1.0 - b.tau, t.rate_t)?,
        rayleigh,
    );
    let (nr, nt) = radius_noma(
        &budget,
        NomaAllocation::full_power(b.beta_r, b.p_r),
        (chi_r, chi_t),
        (noma_threshold(t.rate_r), noma_threshold(t.rate_t)),
    )?;
    Ok(BoundReport {
        rayleigh_distance: rayleigh,
        single_user,
        oma_fixed,
        oma_best: maximize_oma_coverage(&budget, chi_r, chi_t, t)?,
        noma_fixed: CoverageResult::new(nr, nt, rayleigh),
        noma_best: maximize_noma_coverage(&budget, chi_r, chi_t, t, None)?,
        settings: b,
    })
}

// -------------------------------------------------------- single runs

/// Result of one `(mode, surface, seed)` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub seed: u64,
    pub mode: &'static str,
    pub surface: &'static str,
    pub evaluation: Evaluation,
    /// Spacing violations of the reported placement.
    pub violations: usize,
    pub iterations: usize,
    pub it_99: usize,
    pub secs: f64,
}

impl RunOutcome {
    pub fn feasible(&self) -> bool {
        self.violations == 0 && self.evaluation.feasible_rate > 0.0
    }
}

fn run_one(cfg: &ExperimentConfig, mode: Mode, surface: Surface, seed: u64) -> Result<RunOutcome> {
    let started = Instant::now();
    let ev = Evaluator::new(cfg.scenario.clone(), seed)?;
    let (evaluation, violations, iterations, it_99) = match surface {
        Surface::Fires => {
            let pso = PsoConfig {
                seed,
                ..cfg.pso.clone()
            };
            let r = optimize(&ev, mode, &pso)?;
            (r.best.evaluation, r.best.violations, r.iterations(), r.it_99)
        }
        Surface::StarRis => {
            let centres = Placement::centers(ev.aperture());
            let violations = crate::geometry::spacing_violations(ev.aperture(), &centres);
            (ev.evaluate(&centres, mode)?, violations, 0, 0)
        }
    };
    Ok(RunOutcome {
        seed,
        mode: mode.label(),
        surface: surface.label(),
        evaluation,
        violations,
        iterations,
        it_99,
        secs: started.elapsed().as_secs_f64(),
    })
}

fn run_grid(cfg: &ExperimentConfig, jobs: Vec<(Mode, Surface, u64)>) -> Result<Vec<RunOutcome>> {
    if cfg.parallel {
        jobs.into_par_iter()
            .map(|(m, s, seed)| run_one(cfg, m, s, seed))
            .collect()
    } else {
        jobs.into_iter()
            .map(|(m, s, seed)| run_one(cfg, m, s, seed))
            .collect()
    }
}

/// Position optimization for every configured mode and seed.
pub fn run_optimize(cfg: &ExperimentConfig) -> Result<Vec<RunOutcome>> {
    let jobs = cfg
        .mode
        .modes()
        .into_iter()
        .flat_map(|m| cfg.seeds.iter().map(move |&s| (m, Surface::Fires, s)))
        .collect();
    run_grid(cfg, jobs)
}

/// Fixed centre positions, same inner solvers, no outer loop.
pub fn run_baseline_star_ris(cfg: &ExperimentConfig) -> Result<Vec<RunOutcome>> {
    let jobs = cfg
        .mode
        .modes()
        .into_iter()
        .flat_map(|m| cfg.seeds.iter().map(move |&s| (m, Surface::StarRis, s)))
        .collect();
    run_grid(cfg, jobs)
}

// ------------------------------------------------------------------ sweep

/// One CSV row: statistics over seeds at one `(axis value, mode, surface)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub axis: f64,
    pub mode: &'static str,
    pub surface: &'static str,
    #[serde(rename = "D_r_mean")]
    pub d_r_mean: f64,
    #[serde(rename = "D_r_std")]
    pub d_r_std: f64,
    #[serde(rename = "D_t_mean")]
    pub d_t_mean: f64,
    #[serde(rename = "D_t_std")]
    pub d_t_std: f64,
    #[serde(rename = "D_tot_mean")]
    pub d_tot_mean: f64,
    #[serde(rename = "D_tot_std")]
    pub d_tot_std: f64,
    pub feas_rate: f64,
    pub secs: f64,
    /// Inner solution of the first seed.
    #[serde(skip)]
    pub inner: Option<InnerSummary>,
}

/// Column names of the sweep CSV.
pub const CSV_HEADER: &str =
    "axis,mode,surface,D_r_mean,D_r_std,D_t_mean,D_t_std,D_tot_mean,D_tot_std,feas_rate,secs";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub axis: SweepAxis,
    pub records: Vec<SweepRecord>,
    pub csv: String,
}

impl SweepOutput {
    pub fn all_infeasible(&self) -> bool {
        self.records.iter().all(|r| r.feas_rate == 0.0)
    }

    /// Records of one mode and surface, in axis order.
    pub fn series(&self, mode: &str, surface: &str) -> Vec<&SweepRecord> {
        self.records
            .iter()
            .filter(|r| r.mode == mode && r.surface == surface)
            .collect()
    }
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn summarize(axis: f64, runs: &[RunOutcome], timing: bool) -> SweepRecord {
    let col = |f: fn(&RunOutcome) -> f64| runs.iter().map(f).collect::<Vec<_>>();
    let (d_r_mean, d_r_std) = mean_std(&col(|r| r.evaluation.d_r));
    let (d_t_mean, d_t_std) = mean_std(&col(|r| r.evaluation.d_t));
    let (d_tot_mean, d_tot_std) = mean_std(&col(|r| r.evaluation.d_tot));
    let feas_rate = mean_std(&col(|r| r.evaluation.feasible_rate)).0;
    SweepRecord {
        axis,
        mode: runs[0].mode,
        surface: runs[0].surface,
        d_r_mean,
        d_r_std,
        d_t_mean,
        d_t_std,
        d_tot_mean,
        d_tot_std,
        feas_rate,
        secs: if timing { mean_std(&col(|r| r.secs)).0 } else { 0.0 },
        inner: Some(runs[0].evaluation.inner),
    }
}

/// Renders records as CSV text.
pub fn to_csv(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Numerical(e.to_string()))
}

/// Runs the configured sweep and writes the CSV to `cfg.out` when set.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("sweep", "no sweep axis configured"))?;
    let mut records = Vec::new();
    for &value in &sweep.values {
        let mut at = cfg.clone();
        sweep.axis.apply(&mut at, value)?;
        let mut jobs = Vec::new();
        for mode in sweep.axis.modes(cfg.mode, value) {
            for surface in cfg.surface.surfaces() {
                for &seed in &cfg.seeds {
                    jobs.push((mode, surface, seed));
                }
            }
        }
        let runs = run_grid(&at, jobs)?;
        for chunk in runs.chunks(cfg.seeds.len()) {
            records.push(summarize(value, chunk, cfg.timing));
        }
    }
    let csv = to_csv(&records)?;
    if let Some(path) = &cfg.out {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, &csv)?;
    }
    Ok(SweepOutput {
        axis: sweep.axis,
        records,
        csv,
    })
}

// ------------------------------------------------------------------ bench

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub mode: &'static str,
    pub elements: usize,
    pub particles: usize,
    pub iterations: usize,
    pub tot_secs: f64,
    pub secs_per_iter: f64,
    pub it_99: usize,
    pub d_tot_best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Runtime at `2 N_p` over runtime at `N_p`, smallest `M`.
    pub particle_ratio: f64,
    /// Time per iteration at the largest `M` over the smallest.
    pub element_ratio: f64,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode  M   N_p  T    TotTime(s)  Time/iter(s)  It_99  D_tot_best(m)")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<5} {:<3} {:<4} {:<4} {:>10.3}  {:>12.5}  {:>5}  {:>13.3}",
                r.mode, r.elements, r.particles, r.iterations, r.tot_secs, r.secs_per_iter, r.it_99, r.d_tot_best
            )?;
        }
        writeln!(f, "runtime ratio for doubled swarm: {:.3}", self.particle_ratio)?;
        write!(f, "time/iter ratio across element counts: {:.3}", self.element_ratio)
    }
}

/// Swarm runtimes per `(mode, M, N_p)` with the stall stop disabled.
///
/// Runs `M ∈ elements` and `N_p ∈ {N, 2N}` with `N` the configured swarm
/// size, on the first configured seed.
pub fn run_bench(cfg: &ExperimentConfig, elements: &[usize]) -> Result<BenchReport> {
    if elements.is_empty() {
        return Err(Error::config("elements", "need at least one element count"));
    }
    let seed = cfg.seeds[0];
    let base = cfg.pso.particles;
    let mut rows = Vec::new();
    for mode in cfg.mode.modes() {
        for &m in elements {
            let scenario = cfg.scenario.clone().with_elements(m)?;
            let ev = Evaluator::new(scenario, seed)?;
            for particles in [base, 2 * base] {
                let pso = PsoConfig {
                    particles,
                    stall: None,
                    seed,
                    ..cfg.pso.clone()
                };
                let r = optimize(&ev, mode, &pso)?;
                rows.push(BenchRow {
                    mode: mode.label(),
                    elements: m,
                    particles,
                    iterations: r.iterations(),
                    tot_secs: r.total_secs,
                    secs_per_iter: r.secs_per_iter(),
                    it_99: r.it_99,
                    d_tot_best: r.best.evaluation.d_tot,
                });
            }
        }
    }
    let m_lo = *elements.iter().min().expect("non-empty");
    let m_hi = *elements.iter().max().expect("non-empty");
    let total = |pred: &dyn Fn(&BenchRow) -> bool, f: fn(&BenchRow) -> f64| {
        rows.iter().filter(|r| pred(r)).map(f).sum::<f64>()
    };
    let particle_ratio = total(&|r| r.elements == m_lo && r.particles == 2 * base, |r| r.tot_secs)
        / total(&|r| r.elements == m_lo && r.particles == base, |r| r.tot_secs);
    let element_ratio = total(&|r| r.elements == m_hi && r.particles == base, |r| r.secs_per_iter)
        / total(&|r| r.elements == m_lo && r.particles == base, |r| r.secs_per_iter);
    Ok(BenchReport {
        rows,
        particle_ratio,
        element_ratio,
    })
}
