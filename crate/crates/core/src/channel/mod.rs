//! Per-hop Rician channels over the active elements.
//!
//! Each hop `q ∈ {f, r, t}` is
//! `h_q = √l_q (√(K/(K+1)) a_q + √(1/(K+1)) z_q)` where `a_q` is the
//! unit-modulus steering vector at the element positions and `z_q` is a
//! correlated circular Gaussian vector with the active Jakes covariance.

pub mod correlation;
pub mod phase;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ApertureConfig, Placement};
use crate::rng::circular_normal;

pub use correlation::{
    active_covariance, active_covariance_direct, factor_active, factor_psd, jakes_covariance,
    jakes_entry, sinc, CorrelationModel, NlosFactor,
};
pub use phase::{phase_attenuation, PhaseErrorModel};

/// Which hop a channel belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hop {
    /// Base station to surface.
    Feed,
    /// Surface to the reflection-side user.
    Reflect,
    /// Surface to the transmission-side user.
    Transmit,
}

impl Hop {
    pub const ALL: [Hop; 3] = [Hop::Feed, Hop::Reflect, Hop::Transmit];

    pub fn index(self) -> usize {
        match self {
            Hop::Feed => 0,
            Hop::Reflect => 1,
            Hop::Transmit => 2,
        }
    }
}

/// Large-scale and Rician parameters of one hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopParams {
    pub hop: Hop,
    /// Large-scale power gain `l_q` (linear).
    pub gain: f64,
    /// Rician factor `K_q` (linear); `f64::INFINITY` means pure LoS.
    pub k_factor: f64,
    pub azimuth: f64,
    pub elevation: f64,
}

impl HopParams {
    pub fn new(hop: Hop, gain: f64, k_factor: f64, azimuth: f64, elevation: f64) -> Result<Self> {
        let p = Self {
            hop,
            gain,
            k_factor,
            azimuth,
            elevation,
        };
        p.validate()?;
        Ok(p)
    }

    /// Hop whose LoS direction points from the surface centre towards
    /// `direction` (surface in the `xy` plane, normal along `+z`).
    /// Reflection-side users have `z > 0`, transmission-side users `z < 0`.
    pub fn toward(hop: Hop, gain: f64, k_factor: f64, direction: [f64; 3]) -> Result<Self> {
        let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("direction must be a non-zero vector".into()));
        }
        let [dx, dy, dz] = direction.map(|v| v / norm);
        let elevation = dy.clamp(-1.0, 1.0).asin();
        let azimuth = dx.atan2(dz);
        Self::new(hop, gain, k_factor, azimuth, elevation)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain.is_finite() && self.gain > 0.0) {
            return Err(Error::Domain(format!("hop gain must be positive, got {}", self.gain)));
        }
        if !(self.k_factor >= 0.0) {
            return Err(Error::Domain(format!(
                "Rician factor must be non-negative, got {}",
                self.k_factor
            )));
        }
        let pi = std::f64::consts::PI;
        for (name, a) in [("azimuth", self.azimuth), ("elevation", self.elevation)] {
            if !(a > -pi && a <= pi) {
                return Err(Error::Domain(format!("{name} {a} outside (-π, π]")));
            }
        }
        Ok(())
    }

    /// `(√(K/(K+1)), √(1/(K+1)))`.
    pub fn rician_weights(&self) -> (f64, f64) {
        if self.k_factor.is_infinite() {
            (1.0, 0.0)
        } else {
            let k = self.k_factor;
            ((k / (k + 1.0)).sqrt(), (1.0 / (k + 1.0)).sqrt())
        }
    }
}

/// Realized channel of one hop over the `M` active elements.
#[derive(Debug, Clone, PartialEq)]
pub struct HopChannel {
    pub coefficients: Vec<Complex64>,
}

impl HopChannel {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm()).collect()
    }
}

/// Steering vector `[a]_m = exp(j 2π/λ (x_m sinψa cosψe + y_m sinψe))`.
pub fn steering_vector(
    cfg: &ApertureConfig,
    placement: &Placement,
    azimuth: f64,
    elevation: f64,
) -> Vec<Complex64> {
    let k = 2.0 * std::f64::consts::PI / cfg.wavelength;
    let ux = azimuth.sin() * elevation.cos();
    let uy = elevation.sin();
    placement
        .positions()
        .iter()
        .map(|p| Complex64::from_polar(1.0, k * (p[0] * ux + p[1] * uy)))
        .collect()
}

/// Combines a LoS steering vector and a correlated NLoS vector.
pub fn compose_hop(params: &HopParams, los: &[Complex64], nlos: &[Complex64]) -> HopChannel {
    debug_assert_eq!(los.len(), nlos.len());
    let (wl, wn) = params.rician_weights();
    let amp = params.gain.sqrt();
    let coefficients = los
        .iter()
        .zip(nlos)
        .map(|(a, z)| {
            if wn == 0.0 {
                a * (amp * wl)
            } else {
                (a * wl + z * wn) * amp
            }
        })
        .collect();
    HopChannel { coefficients }
}

/// Draws one Rician realization of a hop at the given placement.
pub fn draw_hop<R: Rng + ?Sized>(
    params: &HopParams,
    cfg: &ApertureConfig,
    placement: &Placement,
    factor: &NlosFactor<'_>,
    rng: &mut R,
) -> Result<HopChannel> {
    params.validate()?;
    if factor.outputs() != placement.len() {
        return Err(Error::Contract(format!(
            "NLoS factor has {} outputs for {} elements",
            factor.outputs(),
            placement.len()
        )));
    }
    let los = steering_vector(cfg, placement, params.azimuth, params.elevation);
    let g: Vec<Complex64> = (0..factor.innovations())
        .map(|_| circular_normal(rng))
        .collect();
    let nlos = factor.apply(&g);
    if nlos.iter().any(|z| !z.is_finite()) {
        return Err(Error::Numerical("non-finite NLoS draw".into()));
    }
    Ok(compose_hop(params, &los, &nlos))
}

/// Phase-aligned cascaded gain `H = Σ_m |h_u,m| |h_f,m|`.
pub fn cascaded_gain(feed: &HopChannel, user: &HopChannel) -> Result<f64> {
    if feed.len() != user.len() {
        return Err(Error::Contract(format!(
            "hop lengths differ: {} vs {}",
            feed.len(),
            user.len()
        )));
    }
    Ok(feed
        .coefficients
        .iter()
        .zip(&user.coefficients)
        .map(|(a, b)| a.norm() * b.norm())
        .sum())
}
