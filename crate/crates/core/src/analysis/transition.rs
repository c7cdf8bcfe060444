use crate::kernel::normal::INV_SQRT_2PI;
use crate::kernel::{risk_dominant, threshold_step_scaled, GameConfig, PlayPath};
use crate::processes::LearningSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Play sits at initial-play dominance, then jumps to risk dominance.
    Sudden,
    /// Every period-to-period change is small.
    Gradual,
    Mixed,
}

/// Window parameters for [`detect_transition`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionParams {
    pub epsilon: f64,
    pub alpha: f64,
    /// `None` picks `min(1.04, (1 + β̄)/2)`.
    pub beta: Option<f64>,
}

impl Default for TransitionParams {
    fn default() -> Self {
        Self { epsilon: 0.05, alpha: 0.5, beta: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionReport {
    /// Last period before the threshold passes `θ`.
    pub t_cross: Option<usize>,
    pub max_step: f64,
    pub regime: Regime,
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub beta_bar: f64,
    /// Largest `|λ_t − NRD(θ)|` over `t ≤ α·T_cross`.
    pub early_deviation: f64,
    /// Largest `|λ_t − RD(θ)|` over `t ≥ β·T_cross`.
    pub late_deviation: f64,
    /// Analytic bound on the per-period change for i.i.d. signals.
    pub step_bound: Option<f64>,
}

/// `1 + |c − 1/2 − θ|/2` in normalized payoff units.
pub fn beta_bar(theta: f64, config: &GameConfig) -> f64 {
    let theta_n = config.gamma_scale() * theta;
    let c_n = config.c() / config.b();
    1.0 + (c_n - 0.5 - theta_n).abs() / 2.0
}

/// Initial-play dominance `1{a·θ ≥ c − b·λ₀}`.
pub fn initial_play_dominant(theta: f64, config: &GameConfig) -> u8 {
    u8::from(config.a() * theta >= config.c() - config.b() * config.lambda0())
}

/// Bound `(1/(√(2π)σ))·((√2 − 1)(|θ| + c) + √2)` on `|λ_{t+1} − λ_t|`
/// under i.i.d. signals of standard deviation `σ`.
pub fn gradual_step_bound(theta: f64, c: f64, sigma: f64) -> f64 {
    let s2 = std::f64::consts::SQRT_2;
    INV_SQRT_2PI / sigma * ((s2 - 1.0) * (theta.abs() + c) + s2)
}

/// Period `T` with `μ*_T ≤ θ < μ*_{T+1}` (reversed inequalities when `λ₀ < 1/2`).
pub fn crossing_time(config: &GameConfig, spec: &LearningSpec, theta: f64, t_max: usize) -> Result<usize> {
    let start = config.initial_threshold();
    let steady = config.steady_state();
    let (lo, hi) = (start.min(steady), start.max(steady));
    if !(theta > lo && theta < hi) {
        return Err(Error::domain(format!("θ = {theta} must lie strictly between {lo} and {hi}")));
    }
    spec.validate()?;
    let rising = config.lambda0() > 0.5;
    let mut precisions = spec.precisions();
    let mut p_prev = precisions.next().ok_or(Error::Length { needed: 1, available: 0 })?;
    let mut mu = start;
    for t in 1..t_max {
        let p = precisions.next().ok_or(Error::Length { needed: t + 1, available: t })?;
        let a_t = crate::kernel::step_scale(p, p_prev);
        p_prev = p;
        let next = threshold_step_scaled(mu, a_t, config.c(), config.a(), config.b())?.mu;
        let crossed = if rising { mu <= theta && theta < next } else { mu >= theta && theta > next };
        if crossed {
            return Ok(t);
        }
        mu = next;
    }
    Err(Error::Unconverged(format!("threshold did not pass θ = {theta} within {t_max} periods")))
}

/// Classifies a play path as a sudden or gradual transition.
///
/// The crossing period is read from the path itself: `μ*_t ≤ θ` exactly when
/// `λ_t ≥ 1/2`. `spec` only feeds the analytic step bound.
pub fn detect_transition(
    play: &PlayPath,
    config: &GameConfig,
    spec: Option<&LearningSpec>,
    params: &TransitionParams,
) -> Result<TransitionReport> {
    let theta = play.theta;
    let bb = beta_bar(theta, config);
    let beta = params.beta.unwrap_or_else(|| 1.04f64.min(0.5 * (1.0 + bb)));
    let TransitionParams { epsilon, alpha, .. } = *params;
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::domain(format!("epsilon = {epsilon} must lie in (0, 1/2)")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    if !(beta > 1.0 && beta < bb) {
        return Err(Error::domain(format!("beta = {beta} must lie in (1, {bb})")));
    }

    let lambda = &play.lambda;
    let rising = config.lambda0() > 0.5;
    let before = |l: f64| if rising { l >= 0.5 } else { l <= 0.5 };
    let t_cross = (1..lambda.len()).find(|&t| before(lambda[t - 1]) && !before(lambda[t]));

    let max_step = lambda.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    let nrd = f64::from(initial_play_dominant(theta, config));
    let rd = f64::from(risk_dominant(theta, config));
    let (mut early_deviation, mut late_deviation) = (f64::NAN, f64::NAN);
    let mut sudden = false;
    if let Some(tc) = t_cross {
        let early_end = (alpha * tc as f64).floor() as usize;
        let late_start = ((beta * tc as f64).ceil() as usize).max(1);
        let dev = |range: std::ops::RangeInclusive<usize>, target: f64| {
            range.map(|t| (lambda[t - 1] - target).abs()).fold(f64::NAN, f64::max)
        };
        if early_end >= 1 && late_start <= lambda.len() {
            early_deviation = dev(1..=early_end, nrd);
            late_deviation = dev(late_start..=lambda.len(), rd);
            sudden = early_deviation < epsilon && late_deviation < epsilon;
        }
    }
    let regime = if sudden {
        Regime::Sudden
    } else if max_step < epsilon {
        Regime::Gradual
    } else {
        Regime::Mixed
    };
    let step_bound = match spec {
        Some(LearningSpec::Iid { sigma }) => {
            let theta_n = config.gamma_scale() * theta;
            Some(gradual_step_bound(theta_n, config.c() / config.b(), config.gamma_scale() * sigma))
        }
        _ => None,
    };
    Ok(TransitionReport {
        t_cross,
        max_step,
        regime,
        epsilon,
        alpha,
        beta,
        beta_bar: bb,
        early_deviation,
        late_deviation,
        step_bound,
    })
}
