//! Residual phase-error models and their coherent-combining attenuation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Phase-control imperfection applied to every element of one side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseErrorModel {
    #[default]
    Ideal,
    /// Zero-mean Gaussian jitter with variance in rad².
    GaussianJitter { variance: f64 },
    /// Uniform error on `[-π/Q, π/Q]` from `Q`-level quantization.
    Quantized { levels: u32 },
}

/// Deterministic attenuation `χ = |E[exp(jε)]|`.
pub fn phase_attenuation(model: PhaseErrorModel) -> Result<f64> {
    match model {
        PhaseErrorModel::Ideal => Ok(1.0),
        PhaseErrorModel::GaussianJitter { variance } => {
            if !(variance.is_finite() && variance >= 0.0) {
                return Err(Error::Domain(format!(
                    "jitter variance must be non-negative, got {variance}"
                )));
            }
            Ok((-variance / 2.0).exp())
        }
        PhaseErrorModel::Quantized { levels } => {
            if levels == 0 {
                return Err(Error::Domain("quantization needs at least one level".into()));
            }
            let half_width = std::f64::consts::PI / levels as f64;
            Ok((half_width.sin() / half_width).abs())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(phase_attenuation(PhaseErrorModel::Ideal).unwrap(), 1.0);
        let zero = PhaseErrorModel::GaussianJitter { variance: 0.0 };
        assert_eq!(phase_attenuation(zero).unwrap(), 1.0);
        let q2 = phase_attenuation(PhaseErrorModel::Quantized { levels: 2 }).unwrap();
        assert!((q2 - 2.0 / std::f64::consts::PI).abs() < 1e-15);
        assert!((q2 - 0.636620).abs() < 1e-6);
        let fine = phase_attenuation(PhaseErrorModel::Quantized { levels: 1_000_000 }).unwrap();
        assert!((fine - 1.0).abs() < 1e-11);
    }

    #[test]
    fn invalid_models_are_domain_errors() {
        assert!(phase_attenuation(PhaseErrorModel::Quantized { levels: 0 }).is_err());
        let neg = PhaseErrorModel::GaussianJitter { variance: -0.1 };
        assert!(phase_attenuation(neg).is_err());
    }

    #[test]
    fn single_level_is_still_positive() {
        // Q = 1: sin(π)/π, numerically a few 1e-17 but not negative.
        let chi = phase_attenuation(PhaseErrorModel::Quantized { levels: 1 }).unwrap();
        assert!(chi >= 0.0 && chi < 1e-15);
    }
}
