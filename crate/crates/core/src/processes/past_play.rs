use super::LearningSpec;
use crate::{Error, Result};

/// State signals plus noisy observations of last period's aggregate play.
///
/// Observing `Φ⁻¹(λ_{t−1})` with noise `τ_t²` is informative about `θ`
/// because `Φ⁻¹(λ_{t−1})` is an affine function of `θ` with slope `η_{t−1}⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct PastPlaySpec {
    /// State-signal variances `σ_t²`, index `t − 1`.
    pub sigma2: Vec<f64>,
    /// Past-play signal variances `τ_t²` for `t ≥ 2`, index `t − 2`.
    pub tau2: Vec<f64>,
}

impl PastPlaySpec {
    pub fn validate(&self) -> Result<()> {
        for (i, &s) in self.sigma2.iter().enumerate() {
            if s.is_nan() || s <= 0.0 {
                return Err(Error::InvalidSpec { t: i + 1, reason: format!("variance {s} must lie in (0, inf]") });
            }
        }
        for (i, &s) in self.tau2.iter().enumerate() {
            if s.is_nan() || s <= 0.0 {
                return Err(Error::InvalidSpec {
                    t: i + 2,
                    reason: format!("past-play variance {s} must lie in (0, inf]"),
                });
            }
        }
        Ok(())
    }
}

/// Equivalent single-signal process over `horizon` periods.
///
/// Precisions follow `η_t⁻² = η_{t−1}⁻²(1 + τ_t⁻²) + σ_t⁻²`; the returned
/// variances are `σ'_t² = 1/(η_t⁻² − η_{t−1}⁻²)`.
pub fn reduce_past_play_signals(spec: &PastPlaySpec, horizon: usize) -> Result<LearningSpec> {
    spec.validate()?;
    if spec.sigma2.len() < horizon {
        return Err(Error::Length { needed: horizon, available: spec.sigma2.len() });
    }
    let tau_needed = horizon.saturating_sub(1);
    if spec.tau2.len() < tau_needed {
        return Err(Error::Length { needed: tau_needed, available: spec.tau2.len() });
    }
    let mut sigma2 = Vec::with_capacity(horizon);
    let mut prev = 0.0;
    for t in 1..=horizon {
        let coupling = if t == 1 { 0.0 } else { prev / spec.tau2[t - 2] };
        let next = prev + coupling + 1.0 / spec.sigma2[t - 1];
        if !next.is_finite() {
            return Err(Error::InvalidSpec { t, reason: "precision overflow".into() });
        }
        sigma2.push(1.0 / (next - prev));
        prev = next;
    }
    Ok(LearningSpec::Explicit { sigma2 })
}
