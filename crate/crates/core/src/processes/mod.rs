//! Learning processes and the precision schedules they induce.
//!
//! A [`LearningSpec`] describes the sequence of signal variances `σ_t²`,
//! either directly or through a closed form for the posterior precision
//! `η_t⁻²`. Precisions are produced lazily by [`LearningSpec::precisions`] so
//! long-horizon limit computations never allocate the whole schedule.

mod growth;
mod past_play;

pub use growth::{classify_growth, default_window, sufficient_precision_constant, GrowthClass, GrowthVerdict};
pub use past_play::{reduce_past_play_signals, PastPlaySpec};

use crate::kernel::{GameConfig, PosteriorSchedule};
use crate::{Error, Result};

/// A learning process `Σ = (σ_t²)_t`.
#[derive(Debug, Clone, PartialEq)]
pub enum LearningSpec {
    /// One signal of variance `σ²` every period: `η_t⁻² = t/σ²`.
    Iid { sigma: f64 },
    /// A single signal at `t = 1`, nothing afterwards.
    OneShot { sigma: f64 },
    /// Precision doubles every period: `η_t⁻² = 2^{t−1}/σ²`.
    SocialDoubling { sigma: f64 },
    /// `η_t⁻² = C·t^p`.
    PowerPrecision { scale: f64, exponent: f64 },
    /// `η_t⁻² = C·r^t` with `r > 1`.
    GeometricPrecision { scale: f64, ratio: f64 },
    /// Finite list of variances; `f64::INFINITY` marks an uninformative period.
    Explicit { sigma2: Vec<f64> },
    /// `prefix` variances for the first periods, then the increments of `base`.
    Prefixed { prefix: Vec<f64>, base: Box<LearningSpec> },
}

impl LearningSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} = {v} must be positive and finite")))
            }
        };
        match self {
            Self::Iid { sigma } | Self::OneShot { sigma } | Self::SocialDoubling { sigma } => positive("sigma", *sigma),
            Self::PowerPrecision { scale, exponent } => {
                positive("scale", *scale)?;
                positive("exponent", *exponent)
            }
            Self::GeometricPrecision { scale, ratio } => {
                positive("scale", *scale)?;
                if ratio.is_finite() && *ratio > 1.0 {
                    Ok(())
                } else {
                    Err(Error::domain(format!("ratio = {ratio} must exceed 1")))
                }
            }
            Self::Explicit { sigma2 } => check_variances(sigma2),
            Self::Prefixed { prefix, base } => {
                check_variances(prefix)?;
                base.validate()
            }
        }
    }

    /// Number of periods the spec defines, `None` if unbounded.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            Self::Explicit { sigma2 } => Some(sigma2.len()),
            Self::Prefixed { prefix, base } => base.horizon().map(|h| h.max(prefix.len())),
            _ => None,
        }
    }

    /// Lazy stream of cumulative precisions `η_t⁻²` for `t = 1, 2, …`.
    pub fn precisions(&self) -> Precisions<'_> {
        Precisions { inner: Stream::new(self) }
    }

    /// Precision increments `σ_t⁻²` for the first `n` periods.
    pub fn increments(&self, n: usize) -> Result<Vec<f64>> {
        Ok(materialize(self, n)?.increments().to_vec())
    }

    /// Replaces the first `prefix.len()` variances.
    pub fn with_prefix(&self, prefix: Vec<f64>) -> Self {
        if prefix.is_empty() {
            return self.clone();
        }
        Self::Prefixed { prefix, base: Box::new(self.clone()) }
    }

    /// Every variance multiplied by `factor` (precisions divided by it).
    pub fn scale_variances(&self, factor: f64) -> Self {
        let sd = factor.sqrt();
        match self {
            Self::Iid { sigma } => Self::Iid { sigma: sigma * sd },
            Self::OneShot { sigma } => Self::OneShot { sigma: sigma * sd },
            Self::SocialDoubling { sigma } => Self::SocialDoubling { sigma: sigma * sd },
            Self::PowerPrecision { scale, exponent } => {
                Self::PowerPrecision { scale: scale / factor, exponent: *exponent }
            }
            Self::GeometricPrecision { scale, ratio } => {
                Self::GeometricPrecision { scale: scale / factor, ratio: *ratio }
            }
            Self::Explicit { sigma2 } => Self::Explicit { sigma2: sigma2.iter().map(|s| s * factor).collect() },
            Self::Prefixed { prefix, base } => Self::Prefixed {
                prefix: prefix.iter().map(|s| s * factor).collect(),
                base: Box::new(base.scale_variances(factor)),
            },
        }
    }

    /// Exchanges the signals of periods `s` and `s2` (1-based).
    pub fn swapped(&self, s: usize, s2: usize) -> Result<Self> {
        if s == 0 || s2 == 0 {
            return Err(Error::domain("periods are 1-based"));
        }
        let k = s.max(s2);
        let mut prefix: Vec<f64> = self.increments(k)?.iter().map(|p| 1.0 / p).collect();
        prefix.swap(s - 1, s2 - 1);
        Ok(Self::Prefixed { prefix, base: Box::new(self.clone()) })
    }

    fn closed_precision(&self, t: usize) -> f64 {
        let tf = t as f64;
        match *self {
            Self::Iid { sigma } => tf / (sigma * sigma),
            Self::OneShot { sigma } => 1.0 / (sigma * sigma),
            Self::SocialDoubling { sigma } => (tf - 1.0).exp2() / (sigma * sigma),
            Self::PowerPrecision { scale, exponent } => {
                if exponent.fract() == 0.0 && exponent <= 64.0 {
                    scale * tf.powi(exponent as i32)
                } else {
                    scale * tf.powf(exponent)
                }
            }
            Self::GeometricPrecision { scale, ratio } => scale * ratio.powf(tf),
            Self::Explicit { .. } | Self::Prefixed { .. } => unreachable!("not a closed form"),
        }
    }
}

fn check_variances(sigma2: &[f64]) -> Result<()> {
    for (i, &s) in sigma2.iter().enumerate() {
        if s.is_nan() || s <= 0.0 {
            return Err(Error::InvalidSpec { t: i + 1, reason: format!("variance {s} must lie in (0, inf]") });
        }
    }
    Ok(())
}

/// Iterator over cumulative precisions of a [`LearningSpec`].
pub struct Precisions<'a> {
    inner: Stream<'a>,
}

impl Iterator for Precisions<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.inner.next()
    }
}

enum Stream<'a> {
    Closed {
        spec: &'a LearningSpec,
        t: usize,
    },
    Explicit {
        rest: std::slice::Iter<'a, f64>,
        total: f64,
    },
    Prefixed {
        prefix: std::slice::Iter<'a, f64>,
        total: f64,
        base: Box<Stream<'a>>,
        base_last: f64,
        offset: Option<f64>,
    },
}

impl<'a> Stream<'a> {
    fn new(spec: &'a LearningSpec) -> Self {
        match spec {
            LearningSpec::Explicit { sigma2 } => Stream::Explicit { rest: sigma2.iter(), total: 0.0 },
            LearningSpec::Prefixed { prefix, base } => Stream::Prefixed {
                prefix: prefix.iter(),
                total: 0.0,
                base: Box::new(Stream::new(base)),
                base_last: 0.0,
                offset: None,
            },
            _ => Stream::Closed { spec, t: 0 },
        }
    }

    fn next(&mut self) -> Option<f64> {
        match self {
            Stream::Closed { spec, t } => {
                *t += 1;
                Some(spec.closed_precision(*t))
            }
            Stream::Explicit { rest, total } => {
                let s2 = rest.next()?;
                *total += 1.0 / s2;
                Some(*total)
            }
            Stream::Prefixed { prefix, total, base, base_last, offset } => {
                if offset.is_none() {
                    if let Some(s2) = prefix.next() {
                        *total += 1.0 / s2;
                        if let Some(p) = base.next() {
                            *base_last = p;
                        }
                        return Some(*total);
                    }
                    *offset = Some(*total - *base_last);
                }
                base.next().map(|p| offset.unwrap_or(0.0) + p)
            }
        }
    }
}

/// Schedule for periods `1..=horizon`.
pub fn materialize(spec: &LearningSpec, horizon: usize) -> Result<PosteriorSchedule> {
    spec.validate()?;
    let precision: Vec<f64> = spec.precisions().take(horizon).collect();
    if precision.len() < horizon {
        return Err(Error::Length { needed: horizon, available: precision.len() });
    }
    if let Some(t) = precision.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidSpec { t: t + 1, reason: "precision overflow".into() });
    }
    PosteriorSchedule::from_precisions(precision)
}

/// Schedule on the grid `{1/n, 2/n, …, horizon}`.
///
/// Within `(s − 1, s]` precision accrues in `n` equal increments (signals of
/// variance `n·σ_s²`), so values at integer times equal the unrefined ones
/// exactly.
pub fn refine_time_grid(spec: &LearningSpec, n: usize, horizon: usize) -> Result<PosteriorSchedule> {
    if n == 0 {
        return Err(Error::domain("refinement factor must be at least 1"));
    }
    let base = materialize(spec, horizon)?;
    let nf = n as f64;
    let mut precision = Vec::with_capacity(n * horizon);
    let mut prev = 0.0;
    for &p in base.precisions() {
        for k in 1..n {
            precision.push(prev + (k as f64) * (p - prev) / nf);
        }
        precision.push(p);
        prev = p;
    }
    PosteriorSchedule::from_precisions(precision)
}

/// Normalized game and learning process with unit payoff scales.
#[derive(Debug, Clone, PartialEq)]
pub struct Rescaled {
    pub config: GameConfig,
    pub spec: LearningSpec,
    /// Multiplier mapping `θ` to the normalized fundamental.
    pub theta_scale: f64,
}

impl Rescaled {
    pub fn theta(&self, theta: f64) -> f64 {
        self.theta_scale * theta
    }
}

/// Maps an `(a, b)` game to the equivalent game with `a = b = 1`:
/// `θ̃ = (a/b)θ`, `c̃ = c/b`, `σ̃² = (a/b)²σ²`.
pub fn rescale_payoffs(config: &GameConfig, spec: &LearningSpec) -> Result<Rescaled> {
    let k = config.a() / config.b();
    Ok(Rescaled {
        config: GameConfig::new(config.c() / config.b(), config.lambda0())?,
        spec: if k == 1.0 { spec.clone() } else { spec.scale_variances(k * k) },
        theta_scale: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixed_stream_continues_base_increments() {
        let base = LearningSpec::Iid { sigma: 1.0 };
        let spec = base.with_prefix(vec![0.5, f64::INFINITY]);
        let p: Vec<f64> = spec.precisions().take(5).collect();
        assert_eq!(p, vec![2.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn swapped_exchanges_two_periods() {
        let spec = LearningSpec::Explicit { sigma2: vec![1.0, 2.0, 4.0, 8.0] };
        let s = spec.swapped(3, 1).unwrap();
        let inc = s.increments(4).unwrap();
        assert_eq!(inc, vec![0.25, 0.5, 1.0, 0.125]);
    }

    #[test]
    fn explicit_shorter_than_horizon_is_a_length_error() {
        let spec = LearningSpec::Explicit { sigma2: vec![1.0; 3] };
        assert_eq!(materialize(&spec, 5), Err(Error::Length { needed: 5, available: 3 }));
    }
}
