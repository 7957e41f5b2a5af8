//! Far-field coverage radii.
//!
//! Every radius here has the shape `D = (S · share / γ_th)^{1/α}` where `S` is
//! the SNR a user would see at one metre with the whole surface and the whole
//! transmit power, `share` is the fraction of surface energy and BS power it
//! receives, and `γ_th` is its SNR/SINR threshold. In the far-field LoS limit
//! `S = (P/σ²) χ² M² ρ₀² d_f^{-α}`; the position-aware objective substitutes
//! the realized cascaded gain for the `M ρ₀ d_f^{-α/2}` factor.
//!
//! All quantities are linear (watts, linear gains, metres).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The two served users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum User {
    /// Reflection side.
    R,
    /// Transmission side.
    T,
}

impl User {
    pub fn other(self) -> User {
        match self {
            User::R => User::T,
            User::T => User::R,
        }
    }
}

/// Transmit/receive constants of the far-field model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// BS transmit power `P` (W).
    pub tx_power: f64,
    /// Noise power `σ²` (W).
    pub noise_power: f64,
    /// Unit-distance power gain `ρ₀` (linear).
    pub rho0: f64,
    /// Path-loss exponent `α`.
    pub alpha: f64,
    /// BS-to-surface distance `d_f` (m).
    pub bs_distance: f64,
    /// Number of active elements `M`.
    pub elements: usize,
    pub chi_r: f64,
    pub chi_t: f64,
}

impl LinkBudget {
    /// Checks the invariants. Zero transmit power is accepted; it yields
    /// zero radii flagged infeasible.
    pub fn validate(&self) -> Result<()> {
        if !(self.tx_power.is_finite() && self.tx_power >= 0.0) {
            return Err(Error::Domain(format!("tx power must be >= 0, got {}", self.tx_power)));
        }
        let positive = [
            ("noise power", self.noise_power),
            ("rho0", self.rho0),
            ("alpha", self.alpha),
            ("BS distance", self.bs_distance),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.elements == 0 {
            return Err(Error::Domain("at least one element is required".into()));
        }
        for (name, chi) in [("chi_r", self.chi_r), ("chi_t", self.chi_t)] {
            if !(chi > 0.0 && chi <= 1.0) {
                return Err(Error::Domain(format!("{name} must lie in (0, 1], got {chi}")));
            }
        }
        Ok(())
    }

    pub fn chi(&self, user: User) -> f64 {
        match user {
            User::R => self.chi_r,
            User::T => self.chi_t,
        }
    }

    /// `(P/σ²) χ² M² ρ₀² d_f^{-α}`: SNR at one metre with full share.
    pub fn unit_snr(&self, chi: f64) -> f64 {
        let m = self.elements as f64;
        self.tx_power / self.noise_power
            * chi
            * chi
            * m
            * m
            * self.rho0
            * self.rho0
            * self.bs_distance.powf(-self.alpha)
    }
}

/// Per-user target rates (bit/s/Hz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosTargets {
    pub rate_r: f64,
    pub rate_t: f64,
}

impl QosTargets {
    pub fn new(rate_r: f64, rate_t: f64) -> Result<Self> {
        for (name, r) in [("rate_r", rate_r), ("rate_t", rate_t)] {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {r}")));
            }
        }
        Ok(Self { rate_r, rate_t })
    }

    pub fn symmetric(rate: f64) -> Result<Self> {
        Self::new(rate, rate)
    }

    pub fn rate(&self, user: User) -> f64 {
        match user {
            User::R => self.rate_r,
            User::T => self.rate_t,
        }
    }

    pub fn noma_threshold(&self, user: User) -> f64 {
        noma_threshold(self.rate(user))
    }
}

/// OMA threshold `2^{R/τ} − 1`.
pub fn oma_threshold(rate: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::Domain(format!("time fraction must lie in (0, 1], got {tau}")));
    }
    Ok((rate / tau).exp2() - 1.0)
}

/// NOMA threshold `2^R − 1`.
pub fn noma_threshold(rate: f64) -> f64 {
    rate.exp2() - 1.0
}

/// A coverage radius and whether it is attainable at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radius {
    pub meters: f64,
    pub feasible: bool,
}

impl Radius {
    pub const INFEASIBLE: Radius = Radius {
        meters: 0.0,
        feasible: false,
    };
}

/// `(unit_snr · share / γ_th)^{1/α}`, or an infeasible zero radius when the
/// argument is not positive.
pub fn radius_from_unit_snr(unit_snr: f64, share: f64, gamma_th: f64, alpha: f64) -> Radius {
    let arg = unit_snr * share / gamma_th;
    if arg > 0.0 && arg.is_finite() {
        Radius {
            meters: arg.powf(1.0 / alpha),
            feasible: true,
        }
    } else {
        Radius::INFEASIBLE
    }
}

/// Far-field SNR `(P/σ²) β χ² M² ρ₀² d_f^{-α} D^{-α}`.
pub fn snr_at_distance(budget: &LinkBudget, beta: f64, chi: f64, distance: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::Domain(format!("distance must be positive, got {distance}")));
    }
    Ok(budget.unit_snr(chi) * beta * distance.powf(-budget.alpha))
}

fn check_threshold(gamma_th: f64) -> Result<()> {
    if gamma_th > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("threshold must be positive, got {gamma_th}")))
    }
}

/// Energy-splitting radius: largest `D` with `snr_at_distance(D) ≥ γ_th`.
pub fn radius_es(budget: &LinkBudget, beta: f64, chi: f64, gamma_th: f64) -> Result<Radius> {
    check_threshold(gamma_th)?;
    Ok(radius_from_unit_snr(
        budget.unit_snr(chi),
        beta,
        gamma_th,
        budget.alpha,
    ))
}

/// OMA radius with time fraction `τ`, full power and full surface energy
/// during the user's slot.
pub fn radius_oma(budget: &LinkBudget, chi: f64, tau: f64, rate: f64) -> Result<Radius> {
    radius_oma_split(budget, 1.0, chi, tau, rate)
}

/// OMA radius with an explicit energy-splitting factor `β`.
pub fn radius_oma_split(
    budget: &LinkBudget,
    beta: f64,
    chi: f64,
    tau: f64,
    rate: f64,
) -> Result<Radius> {
    let gamma = oma_threshold(rate, tau)?;
    radius_es(budget, beta, chi, gamma)
}

/// NOMA energy split and BS power split, user `r` decoding first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaAllocation {
    pub beta_r: f64,
    pub p_r: f64,
    pub p_t: f64,
}

impl NomaAllocation {
    /// Full-power allocation `p_t = 1 − p_r`.
    pub fn full_power(beta_r: f64, p_r: f64) -> Self {
        Self {
            beta_r,
            p_r,
            p_t: 1.0 - p_r,
        }
    }

    pub fn beta_t(&self) -> f64 {
        1.0 - self.beta_r
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta_r) {
            return Err(Error::Contract(format!("beta_r {} outside [0, 1]", self.beta_r)));
        }
        if !(self.p_r >= 0.0 && self.p_t >= 0.0 && self.p_r + self.p_t <= 1.0 + 1e-12) {
            return Err(Error::Contract(format!(
                "power split ({}, {}) violates p >= 0, p_r + p_t <= 1",
                self.p_r, self.p_t
            )));
        }
        Ok(())
    }
}

/// Radii of a two-user NOMA pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaRadii {
    pub strong: Radius,
    pub weak: Radius,
}

/// NOMA radii from unit SNRs. The strong user decodes and cancels the weak
/// user's layer; the weak user treats the strong layer as noise, which needs
/// `p_weak > p_strong γ_weak`.
#[allow(clippy::too_many_arguments)]
pub fn noma_radii_from_unit_snr(
    snr_strong: f64,
    snr_weak: f64,
    beta_strong: f64,
    p_strong: f64,
    p_weak: f64,
    gamma_strong: f64,
    gamma_weak: f64,
    alpha: f64,
) -> NomaRadii {
    let strong = radius_from_unit_snr(snr_strong, beta_strong * p_strong, gamma_strong, alpha);
    let margin = p_weak - p_strong * gamma_weak;
    let weak = if margin > 0.0 {
        radius_from_unit_snr(snr_weak, (1.0 - beta_strong) * margin, gamma_weak, alpha)
    } else {
        Radius::INFEASIBLE
    };
    NomaRadii { strong, weak }
}

/// NOMA radii with user `r` as the strong user.
pub fn radius_noma(
    budget: &LinkBudget,
    alloc: NomaAllocation,
    chi: (f64, f64),
    gamma_th: (f64, f64),
) -> Result<(Radius, Radius)> {
    alloc.validate()?;
    check_threshold(gamma_th.0)?;
    check_threshold(gamma_th.1)?;
    let r = noma_radii_from_unit_snr(
        budget.unit_snr(chi.0),
        budget.unit_snr(chi.1),
        alloc.beta_r,
        alloc.p_r,
        alloc.p_t,
        gamma_th.0,
        gamma_th.1,
        budget.alpha,
    );
    Ok((r.strong, r.weak))
}

/// Radii of both sides plus their total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageResult {
    pub d_r: f64,
    pub d_t: f64,
    pub d_tot: f64,
    pub feasible_r: bool,
    pub feasible_t: bool,
    /// Some returned radius is at or below the Rayleigh distance.
    pub rayleigh_warning: bool,
}

impl CoverageResult {
    pub fn new(r: Radius, t: Radius, rayleigh_distance: f64) -> Self {
        Self {
            d_r: r.meters,
            d_t: t.meters,
            d_tot: r.meters + t.meters,
            feasible_r: r.feasible,
            feasible_t: t.feasible,
            rayleigh_warning: r.meters <= rayleigh_distance || t.meters <= rayleigh_distance,
        }
    }
}
