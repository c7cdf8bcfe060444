//! Per-period equilibrium recursions.
//!
//! Agents take the risky action iff their posterior mean of `θ` is at least
//! the belief threshold `μ*_t`. Thresholds follow
//!
//! ```text
//! a·μ*_t + b·Φ((μ*_t − μ*_{t−1}) / A_t) = c,   μ*_1 = (c − b·λ₀)/a,
//! ```
//!
//! with `A_t = sqrt(η_t² + η_{t−1}²)`. Writing `γ_t = (μ*_t − μ*_{t−1})/A_t`
//! gives the companion recursion `(a/b)·A_t·γ_t = Φ(γ_{t−1}) − Φ(γ_t)`,
//! `γ_1 = Φ⁻¹(λ₀)`. Roots are solved in γ-space, where the equation is
//! well scaled for every `A_t`.

pub mod normal;
mod schedule;
pub(crate) mod solve;

pub(crate) use schedule::step_scale;
pub use schedule::PosteriorSchedule;

use crate::{Error, Result};
use normal::{cdf, quantile};
use solve::{advance_gamma, solve_gamma};

/// Payoff primitives: safe-action cost `c`, initial play `λ₀`, and the
/// payoff scales `a` (on `θ`) and `b` (on last period's play).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameConfig {
    c: f64,
    lambda0: f64,
    a: f64,
    b: f64,
}

impl GameConfig {
    /// Unit payoff scales; `λ₀` must lie strictly inside `(0, 1)`.
    pub fn new(c: f64, lambda0: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::domain(format!("cost c = {c} must be finite")));
        }
        if !(lambda0 > 0.0 && lambda0 < 1.0) {
            return Err(Error::domain(format!("initial play {lambda0} must lie in (0, 1)")));
        }
        Ok(Self { c, lambda0, a: 1.0, b: 1.0 })
    }

    /// Replaces the payoff scales; both must lie in `(0, 1]`.
    pub fn with_payoff_scales(self, a: f64, b: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::domain(format!("payoff scale {name} = {v} must lie in (0, 1]")));
            }
        }
        Ok(Self { a, b, ..self })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Same game started from `1 − λ₀`.
    pub fn mirrored(&self) -> Self {
        Self { lambda0: 1.0 - self.lambda0, ..*self }
    }

    pub fn with_lambda0(&self, lambda0: f64) -> Result<Self> {
        Self::new(self.c, lambda0)?.with_payoff_scales(self.a, self.b)
    }

    /// The unique steady-state threshold (risk-dominance cutoff).
    pub fn steady_state(&self) -> f64 {
        (self.c - 0.5 * self.b) / self.a
    }

    /// `μ*_1`.
    pub fn initial_threshold(&self) -> f64 {
        (self.c - self.b * self.lambda0) / self.a
    }

    /// `γ_1 = Φ⁻¹(λ₀)`.
    pub fn initial_gamma(&self) -> f64 {
        quantile(self.lambda0)
    }

    /// Threshold associated with a γ value: `(c − b·Φ(γ))/a`.
    pub fn threshold_from_gamma(&self, gamma: f64) -> f64 {
        (self.c - self.b * cdf(gamma)) / self.a
    }

    /// Ratio `a/b` multiplying `A_t` in the γ recursion.
    pub fn gamma_scale(&self) -> f64 {
        self.a / self.b
    }
}

/// Belief thresholds with their γ companions.
///
/// All vectors are indexed by `t − 1`. `step_scale[0]` is NaN because
/// `A_1` is undefined; `residuals[0]` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPath {
    pub mu_star: Vec<f64>,
    pub gamma: Vec<f64>,
    pub step_scale: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl ThresholdPath {
    pub fn len(&self) -> usize {
        self.mu_star.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu_star.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Aggregate risky-action share per period for one fundamental.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayPath {
    pub theta: f64,
    pub lambda: Vec<f64>,
}

/// One solved threshold step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdStep {
    pub mu: f64,
    pub gamma: f64,
    pub residual: f64,
}

/// Φ(x) for finite `x`.
pub fn normal_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("normal_cdf needs a finite argument, got {x}")));
    }
    Ok(cdf(x))
}

/// Φ⁻¹(p) for `p` in `(0, 1)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("normal_quantile needs p in (0, 1), got {p}")));
    }
    Ok(quantile(p))
}

/// Solves `μ + Φ((μ − mu_prev)/A) = c` for the next threshold.
pub fn threshold_step(mu_prev: f64, a_t: f64, c: f64) -> Result<f64> {
    threshold_step_scaled(mu_prev, a_t, c, 1.0, 1.0).map(|s| s.mu)
}

/// Solves `a·μ + b·Φ((μ − mu_prev)/A) = c`. `A = ∞` is accepted.
pub fn threshold_step_scaled(mu_prev: f64, a_t: f64, c: f64, a: f64, b: f64) -> Result<ThresholdStep> {
    if a_t.is_nan() || a_t <= 0.0 {
        return Err(Error::domain(format!("step scale A = {a_t} must be positive")));
    }
    if !mu_prev.is_finite() || !c.is_finite() {
        return Err(Error::domain("threshold and cost must be finite"));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("payoff scales must be positive"));
    }
    let (mu_lo, mu_hi) = ((c - b) / a, c / a);
    let slack = 1e-12 * (1.0 + mu_lo.abs().max(mu_hi.abs()));
    if mu_prev < mu_lo - slack || mu_prev > mu_hi + slack {
        return Err(Error::domain(format!("previous threshold {mu_prev} outside [{mu_lo}, {mu_hi}]")));
    }
    if a_t == f64::INFINITY {
        return Ok(ThresholdStep { mu: (c - 0.5 * b) / a, gamma: 0.0, residual: 0.0 });
    }

    let scale = a / b * a_t;
    let target = (c - a * mu_prev) / b;
    let mut lo = (mu_lo - mu_prev) / a_t;
    let mut hi = (mu_hi - mu_prev) / a_t;
    let mut start = 0.0;
    if target == 0.5 {
        return Ok(ThresholdStep { mu: mu_prev, gamma: 0.0, residual: 0.0 });
    }
    if target > 0.0 && target < 1.0 {
        // Root lies between 0 and Φ⁻¹(target); widen slightly for quantile error.
        let g = quantile(target);
        let edge = g + 1e-12 * g.abs() * g.signum() + 1e-300 * g.signum();
        if g > 0.0 {
            lo = lo.max(0.0);
            hi = hi.min(edge);
        } else {
            lo = lo.max(edge);
            hi = hi.min(0.0);
        }
        if scale * g.abs() < (target - 0.5).abs() {
            start = g;
        }
    }
    let root = solve_gamma(scale, lo, hi, start, |x| target - cdf(x));
    Ok(ThresholdStep { mu: mu_prev + a_t * root.gamma, gamma: root.gamma, residual: b * root.residual })
}

/// Solves `A·γ = Φ(gamma_prev) − Φ(γ)`.
pub fn gamma_step(gamma_prev: f64, a_t: f64) -> Result<f64> {
    if a_t.is_nan() || a_t <= 0.0 {
        return Err(Error::domain(format!("step scale A = {a_t} must be positive")));
    }
    if !gamma_prev.is_finite() {
        return Err(Error::domain("gamma must be finite"));
    }
    Ok(advance_gamma(gamma_prev, a_t).gamma)
}

/// Thresholds for `t = 1..=horizon`.
pub fn threshold_path(config: &GameConfig, schedule: &PosteriorSchedule, horizon: usize) -> Result<ThresholdPath> {
    if horizon == 0 {
        return Ok(ThresholdPath { mu_star: vec![], gamma: vec![], step_scale: vec![], residuals: vec![] });
    }
    if schedule.len() < horizon {
        return Err(Error::Length { needed: horizon, available: schedule.len() });
    }
    let mut path = ThresholdPath {
        mu_star: Vec::with_capacity(horizon),
        gamma: Vec::with_capacity(horizon),
        step_scale: Vec::with_capacity(horizon),
        residuals: Vec::with_capacity(horizon),
    };
    let mut mu = config.initial_threshold();
    path.mu_star.push(mu);
    path.gamma.push(config.initial_gamma());
    path.step_scale.push(f64::NAN);
    path.residuals.push(0.0);
    for t in 2..=horizon {
        let a_t = schedule.step_scale(t);
        let step = threshold_step_scaled(mu, a_t, config.c, config.a, config.b)?;
        mu = step.mu;
        path.mu_star.push(mu);
        path.gamma.push(step.gamma);
        path.step_scale.push(a_t);
        path.residuals.push(step.residual);
    }
    Ok(path)
}

/// `λ_t(θ) = Φ((θ − μ*_t)/η_t)`.
pub fn aggregate_play(theta: f64, path: &ThresholdPath, schedule: &PosteriorSchedule) -> Result<PlayPath> {
    if schedule.len() < path.len() {
        return Err(Error::Length { needed: path.len(), available: schedule.len() });
    }
    let lambda = path.mu_star.iter().zip(schedule.precisions()).map(|(mu, p)| cdf((theta - mu) * p.sqrt())).collect();
    Ok(PlayPath { theta, lambda })
}

/// Perfect-information dynamics `λ_t = 1{θ + λ_{t−1} ≥ c}` from `λ₀`.
///
/// Ties take the risky action.
pub fn simulate_complete_info(theta: f64, lambda0: f64, c: f64, horizon: usize) -> Result<PlayPath> {
    if !(theta.is_finite() && lambda0.is_finite() && c.is_finite()) {
        return Err(Error::domain("complete-information inputs must be finite"));
    }
    let mut lambda = Vec::with_capacity(horizon);
    let mut prev = lambda0;
    for _ in 0..horizon {
        prev = if theta + prev >= c { 1.0 } else { 0.0 };
        lambda.push(prev);
    }
    Ok(PlayPath { theta, lambda })
}

/// Risk-dominant action: 1 iff `a·θ ≥ c − b/2`.
pub fn risk_dominant(theta: f64, config: &GameConfig) -> u8 {
    u8::from(config.a * theta >= config.c - 0.5 * config.b)
}
