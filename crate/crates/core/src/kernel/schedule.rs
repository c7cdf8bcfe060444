use crate::{Error, Result};

/// Posterior precision schedule for periods `t = 1..=T`.
///
/// Stored as cumulative precisions `η_t⁻²` and per-period increments
/// `σ_t⁻²`; variances are derived on demand. A zero increment is an
/// uninformative period (`σ_t² = ∞`).
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSchedule {
    precision: Vec<f64>,
    increment: Vec<f64>,
}

impl PosteriorSchedule {
    /// Builds a schedule from signal variances `σ_t²`, each in `(0, ∞]`.
    pub fn from_variances(sigma2: &[f64]) -> Result<Self> {
        let mut precision = Vec::with_capacity(sigma2.len());
        let mut increment = Vec::with_capacity(sigma2.len());
        let mut total = 0.0;
        for (i, &s2) in sigma2.iter().enumerate() {
            if s2.is_nan() || s2 <= 0.0 {
                return Err(Error::InvalidSpec {
                    t: i + 1,
                    reason: format!("signal variance {s2} must lie in (0, inf]"),
                });
            }
            let inc = 1.0 / s2;
            total += inc;
            if !total.is_finite() {
                return Err(Error::InvalidSpec { t: i + 1, reason: "precision overflow".into() });
            }
            precision.push(total);
            increment.push(inc);
        }
        Ok(Self { precision, increment })
    }

    /// Builds a schedule from cumulative precisions `η_t⁻²`, which must be
    /// finite, non-negative and non-decreasing.
    pub fn from_precisions(precision: Vec<f64>) -> Result<Self> {
        let mut increment = Vec::with_capacity(precision.len());
        let mut prev = 0.0;
        for (i, &p) in precision.iter().enumerate() {
            let t = i + 1;
            if !p.is_finite() {
                return Err(Error::InvalidSpec { t, reason: format!("precision {p} is not finite") });
            }
            if p < prev {
                return Err(Error::InvalidSpec { t, reason: format!("precision decreases from {prev} to {p}") });
            }
            increment.push(p - prev);
            prev = p;
        }
        Ok(Self { precision, increment })
    }

    pub fn len(&self) -> usize {
        self.precision.len()
    }

    pub fn is_empty(&self) -> bool {
        self.precision.is_empty()
    }

    /// Cumulative precisions, index `t − 1`.
    pub fn precisions(&self) -> &[f64] {
        &self.precision
    }

    /// Per-period precision increments `σ_t⁻²`, index `t − 1`.
    pub fn increments(&self) -> &[f64] {
        &self.increment
    }

    /// `η_t⁻²` for 1-based `t`.
    pub fn precision(&self, t: usize) -> f64 {
        self.precision[t - 1]
    }

    /// Posterior variance `η_t²` (infinite before the first informative signal).
    pub fn eta2(&self, t: usize) -> f64 {
        1.0 / self.precision[t - 1]
    }

    /// Signal variance `σ_t²`.
    pub fn sigma2(&self, t: usize) -> f64 {
        1.0 / self.increment[t - 1]
    }

    /// Step scale `A_t = sqrt(η_t² + η_{t−1}²)` for `t ≥ 2`.
    pub fn step_scale(&self, t: usize) -> f64 {
        step_scale(self.precision[t - 1], self.precision[t - 2])
    }

    pub fn eta2_seq(&self) -> Vec<f64> {
        self.precision.iter().map(|p| 1.0 / p).collect()
    }

    pub fn sigma2_seq(&self) -> Vec<f64> {
        self.increment.iter().map(|p| 1.0 / p).collect()
    }

    /// First `t` periods.
    pub fn truncated(&self, t: usize) -> Self {
        let t = t.min(self.len());
        Self { precision: self.precision[..t].to_vec(), increment: self.increment[..t].to_vec() }
    }
}

/// `sqrt(1/p + 1/p_prev)` from two cumulative precisions.
#[inline]
pub(crate) fn step_scale(p: f64, p_prev: f64) -> f64 {
    (1.0 / p + 1.0 / p_prev).sqrt()
}
