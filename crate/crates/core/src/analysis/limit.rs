use crate::kernel::solve::advance_gamma;
use crate::kernel::{step_scale, GameConfig};
use crate::processes::LearningSpec;
use crate::{Error, Result};

/// How the γ iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitVerdict {
    /// `|γ_t|` fell below tolerance: the limit is the risk-dominance cutoff.
    RiskDominant,
    /// Step scales vanished with `γ` bounded away from zero.
    Frozen,
    /// The horizon ran out first.
    Unconverged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitReport {
    pub mu_inf: f64,
    pub gamma_inf: f64,
    pub converged: bool,
    pub verdict: LimitVerdict,
    pub periods_used: usize,
    /// `|γ_T − γ_{T−1}|`.
    pub last_step_size: f64,
    /// `|γ_T − γ_{T−w}|` over the drift window, NaN when `T ≤ w`.
    pub drift: f64,
    /// Largest root residual along the iteration.
    pub max_residual: f64,
    /// `γ` kept its sign and `|γ|` never increased.
    pub monotone: bool,
}

/// Stopping rules for [`limit_threshold_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions {
    /// Risk dominance is declared once `|γ_t| < tol`.
    pub tol: f64,
    pub t_max: usize,
    /// A period counts as frozen when `A_t < freeze_scale·max(1, |γ_t|)`.
    pub freeze_scale: f64,
    /// Consecutive frozen periods required.
    pub freeze_run: usize,
    /// `|γ_t − γ_{t−drift_window}|` must also be below `drift_tol`.
    pub drift_window: usize,
    pub drift_tol: f64,
}

impl LimitOptions {
    pub fn new(tol: f64, t_max: usize) -> Self {
        Self { tol, t_max, freeze_scale: 1e-13, freeze_run: 50, drift_window: 100, drift_tol: 1e-12 }
    }
}

/// Limit threshold `μ*_∞` by iterating the γ recursion with default
/// freezing rules.
pub fn limit_threshold(config: &GameConfig, spec: &LearningSpec, tol: f64, t_max: usize) -> Result<LimitReport> {
    limit_threshold_with(config, spec, &LimitOptions::new(tol, t_max))
}

pub fn limit_threshold_with(config: &GameConfig, spec: &LearningSpec, opts: &LimitOptions) -> Result<LimitReport> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::domain(format!("tolerance {} must be positive", opts.tol)));
    }
    if opts.t_max == 0 {
        return Err(Error::domain("horizon must be at least 1"));
    }
    spec.validate()?;
    let mut precisions = spec.precisions();
    let mut p_prev = precisions.next().ok_or(Error::Length { needed: 1, available: 0 })?;
    let scale = config.gamma_scale();

    let window = opts.drift_window.max(1);
    let mut history = vec![0.0; window + 1];
    let mut gamma = config.initial_gamma();
    // γ_t lives in slot `t mod (window + 1)`; `slot` tracks it without division.
    let mut slot = 1 % history.len();
    history[slot] = gamma;

    let mut report = LimitReport {
        mu_inf: f64::NAN,
        gamma_inf: gamma,
        converged: false,
        verdict: LimitVerdict::Unconverged,
        periods_used: 1,
        last_step_size: f64::NAN,
        drift: f64::NAN,
        max_residual: 0.0,
        monotone: true,
    };
    let mut frozen_run = 0;
    let mut t = 1;
    if gamma.abs() < opts.tol {
        report.verdict = LimitVerdict::RiskDominant;
        report.converged = true;
    }
    while !report.converged && t < opts.t_max {
        let Some(p) = precisions.next() else { break };
        t += 1;
        if p < p_prev {
            return Err(Error::InvalidSpec { t, reason: format!("precision decreases from {p_prev} to {p}") });
        }
        let a_t = scale * step_scale(p, p_prev);
        p_prev = p;
        let root = advance_gamma(gamma, a_t);
        report.max_residual = report.max_residual.max(root.residual);
        if root.gamma.abs() > gamma.abs() || root.gamma * gamma < 0.0 {
            report.monotone = false;
        }
        report.last_step_size = (root.gamma - gamma).abs();
        gamma = root.gamma;
        slot = if slot == window { 0 } else { slot + 1 };
        if t > window {
            // γ_{t−window} sits one slot ahead.
            let oldest = if slot == window { 0 } else { slot + 1 };
            report.drift = (gamma - history[oldest]).abs();
        }
        history[slot] = gamma;

        if gamma.abs() < opts.tol {
            report.verdict = LimitVerdict::RiskDominant;
            report.converged = true;
        } else if a_t < opts.freeze_scale * gamma.abs().max(1.0) {
            frozen_run += 1;
            if frozen_run >= opts.freeze_run
                && report.last_step_size < opts.tol * 1e-3
                && gamma.abs() > 10.0 * opts.tol
                && report.drift < opts.drift_tol
            {
                report.verdict = LimitVerdict::Frozen;
                report.converged = true;
            }
        } else {
            frozen_run = 0;
        }
    }
    report.periods_used = t;
    report.gamma_inf = gamma;
    report.mu_inf = config.threshold_from_gamma(gamma);
    report.converged &= report.monotone;
    Ok(report)
}

/// Limit action `1{θ ≥ μ*_∞}`; refuses unconverged reports.
pub fn limit_play(theta: f64, report: &LimitReport) -> Result<u8> {
    if !report.converged {
        return Err(Error::Unconverged(format!(
            "limit threshold not converged after {} periods (last step {:e})",
            report.periods_used, report.last_step_size
        )));
    }
    Ok(u8::from(theta >= report.mu_inf))
}
