//! Synthesis of learning processes that reach a prescribed limit threshold.
//!
//! For a target `μ*` strictly between `c − λ₀` and `c − 1/2`, set
//! `γ* = Φ⁻¹(c − μ*)`. The γ path is pinned in advance, `γ_t → γ*` with the
//! gap halving each period, and the step scales `A_t` that make the γ
//! recursion follow it are read off. The `A` sequence is then realized as
//! posterior variances: `η₁²` is the unique point of a nested family of
//! intervals and `η_{t+1}² = A_{t+1}² − η_t²` for the rest.
//!
//! Everything is computed in the `λ₀ > 1/2` orientation; the other side
//! follows from the reflection `μ ↦ 2c − 1 − μ`.

use crate::analysis::{limit_threshold, LimitReport};
use crate::kernel::normal::{pdf, prob_between, prob_span, quantile};
use crate::kernel::GameConfig;
use crate::processes::LearningSpec;
use crate::{Error, Result};

/// Step scales below this are dropped; later periods carry no signal.
pub const TRUNCATION: f64 = 1e-16;
/// Bound on `C/c` that makes the nested intervals non-empty.
pub const RATIO_LIMIT: f64 = 1.457_737_973_711_325_3; // sqrt(17/8)
/// Slack allowed on the nested-interval and monotonicity constraints.
pub const SANDWICH_TOL: f64 = 1e-10;
/// Largest allowed gap between achieved and target limit.
pub const VERIFY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignTarget {
    mu_target: f64,
    lambda0: f64,
    c: f64,
}

impl DesignTarget {
    pub fn new(mu_target: f64, lambda0: f64, c: f64) -> Result<Self> {
        let config = GameConfig::new(c, lambda0)?;
        let (lo, hi) = {
            let (x, y) = (c - lambda0, config.steady_state());
            (x.min(y), x.max(y))
        };
        if !(mu_target > lo && mu_target < hi) {
            return Err(Error::domain(format!("target {mu_target} must lie strictly between {lo} and {hi}")));
        }
        Ok(Self { mu_target, lambda0, c })
    }

    pub fn mu_target(&self) -> f64 {
        self.mu_target
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    fn reflected(&self) -> bool {
        self.lambda0 < 0.5
    }

    /// `(γ₁, γ*)` in the `λ₀ > 1/2` orientation.
    fn oriented_gammas(&self) -> (f64, f64) {
        let (lambda0, mu) = if self.reflected() {
            (1.0 - self.lambda0, 2.0 * self.c - 1.0 - self.mu_target)
        } else {
            (self.lambda0, self.mu_target)
        };
        (quantile(lambda0), quantile(self.c - mu))
    }
}

/// Step scales implementing the pinned γ path.
#[derive(Debug, Clone, PartialEq)]
pub struct ASequence {
    /// `γ_1, …, γ_K` in the caller's orientation.
    pub gamma: Vec<f64>,
    /// `A_2, …, A_K`; element `i` is `A_{i+2}`.
    pub a: Vec<f64>,
    pub gamma_star: f64,
    pub gamma2: f64,
    /// First period whose step scale fell below [`TRUNCATION`].
    pub truncated_at: usize,
    /// Bound on the sum of all dropped step scales.
    pub tail_bound: f64,
    /// Constants with `c·2^{−t} ≤ A_t ≤ C·2^{−t}` for `t ≥ 3`.
    pub lower_const: f64,
    pub upper_const: f64,
    /// `C/c`, at most [`RATIO_LIMIT`].
    pub ratio: f64,
    /// `A_2 − √2·A_{γ*}(γ₂)`, positive.
    pub a2_margin: f64,
}

impl ASequence {
    /// `A_t` for `t ≥ 2`.
    pub fn at(&self, t: usize) -> f64 {
        self.a[t - 2]
    }
}

/// Step scale moving `γ₁` to `x` in one period.
fn a_from_start(gamma1: f64, x: f64) -> f64 {
    prob_between(x, gamma1) / x
}

/// Step scale moving `x` halfway to `γ*` in one period.
fn a_halving(gamma_star: f64, x: f64) -> f64 {
    let m = 0.5 * (gamma_star + x);
    prob_between(m, x) / m
}

fn gamma2_admissible(gamma1: f64, gamma_star: f64, g2: f64) -> bool {
    let ratio = (pdf(gamma_star) / gamma_star) / (pdf(g2) / g2);
    a_from_start(gamma1, g2) > std::f64::consts::SQRT_2 * a_halving(gamma_star, g2) && ratio <= RATIO_LIMIT
}

/// Chooses `γ₂` and builds the truncated `A` sequence.
pub fn design_a_sequence(target: &DesignTarget) -> Result<ASequence> {
    let (gamma1, gamma_star) = target.oriented_gammas();
    if !(gamma_star > 0.0 && gamma_star < gamma1) {
        return Err(Error::Infeasible(format!("γ* = {gamma_star} not inside (0, {gamma1})")));
    }

    // Halve toward γ* until both sufficient conditions hold, then 10% closer.
    let mut offset = 0.5 * (gamma1 - gamma_star);
    while !gamma2_admissible(gamma1, gamma_star, gamma_star + offset) {
        offset *= 0.5;
        if offset < 1e-14 {
            return Err(Error::Infeasible("no admissible γ₂ near γ*".into()));
        }
    }
    if gamma2_admissible(gamma1, gamma_star, gamma_star + 0.9 * offset) {
        offset *= 0.9;
    }
    let gamma2 = gamma_star + offset;

    let slope_lo = pdf(gamma2) / gamma2;
    let slope_hi = pdf(gamma_star) / gamma_star;
    let lower_const = 4.0 * slope_lo * offset;
    let upper_const = 4.0 * slope_hi * offset;

    let a2 = a_from_start(gamma1, gamma2);
    let mut gamma = vec![gamma1, gamma2];
    let mut a = vec![a2];
    let mut t = 3;
    loop {
        // γ_t − γ* = offset·2^{2−t}, exact in binary.
        let d = offset * (2.0 - t as f64).exp2();
        let g = gamma_star + d;
        let a_t = prob_span(g, d) / g;
        if a_t < TRUNCATION {
            break;
        }
        gamma.push(g);
        a.push(a_t);
        t += 1;
    }
    let sign = if target.reflected() { -1.0 } else { 1.0 };
    Ok(ASequence {
        gamma: gamma.iter().map(|g| sign * g).collect(),
        a,
        gamma_star: sign * gamma_star,
        gamma2: sign * gamma2,
        truncated_at: t,
        tail_bound: upper_const * (1.0 - t as f64).exp2(),
        lower_const,
        upper_const,
        ratio: upper_const / lower_const,
        a2_margin: a2 - std::f64::consts::SQRT_2 * a_halving(gamma_star, gamma2),
    })
}

/// Posterior and signal variances realizing a step-scale sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    /// `η_t²` for `t = 1..=len(A)+1`.
    pub eta2: Vec<f64>,
    /// `σ_t²`; infinite where no signal arrives.
    pub sigma2: Vec<f64>,
    pub eta1_sq: f64,
    /// Distance of `η₁²` inside each nested interval `[L_t, U_t]`.
    pub sandwich_slack: Vec<f64>,
    /// Largest relative error of `η_{t+1}² + η_t² = A_{t+1}²`.
    pub identity_error: f64,
}

impl Realization {
    pub fn min_slack(&self) -> f64 {
        self.sandwich_slack.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Intersection of the feasibility intervals for `η_t²` given the squared
/// step scales `A_{t+1}², A_{t+2}², …`, with one interval per constraint
/// `A_{t+j+1}²/2 ≤ η_{t+j}² ≤ A_{t+j+1}²`.
fn nested_intervals(squares: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(squares.len());
    // η_{t+j}² = (−1)^j·x + alt_j
    let mut alt = 0.0;
    for (j, &b) in squares.iter().enumerate() {
        if j > 0 {
            alt = squares[j - 1] - alt;
        }
        if j % 2 == 0 {
            out.push((0.5 * b - alt, b - alt));
        } else {
            out.push((alt - b, alt - 0.5 * b));
        }
    }
    out
}

fn nested_bounds(squares: &[f64]) -> (f64, f64) {
    nested_intervals(squares)
        .into_iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(l, u), (a, b)| (l.max(a), u.min(b)))
}

/// Relative interval width above which `η_t²` follows from the identity instead.
const NESTED_WIDTH: f64 = 1e-9;
/// Geometric continuation appended before realizing a designed sequence.
const EXTENSION: usize = 64;

/// Realizes `A_2, A_3, …` (element `i` is `A_{i+2}`) as a noise process.
///
/// `η_1²` is the midpoint of the intersection of all nested intervals. Each
/// later `η_t²` is the nested-interval point of its own tail
/// `A_{t+1}, A_{t+2}, …` while that interval is tight, which keeps full
/// relative precision even where `η_t²` is many orders of magnitude below
/// `η_1²`; near the end of a finite sequence it follows from
/// `η_t² = A_t² − η_{t−1}²`.
pub fn realize_noise_process(a: &[f64]) -> Result<Realization> {
    if a.is_empty() {
        return Err(Error::Length { needed: 1, available: 0 });
    }
    if let Some(i) = a.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::domain(format!("A_{} = {} must be positive and finite", i + 2, a[i])));
    }
    let squares: Vec<f64> = a.iter().map(|x| x * x).collect();
    for i in 0..squares.len().saturating_sub(2) {
        let (d0, d1) = (squares[i] - squares[i + 1], squares[i + 1] - squares[i + 2]);
        if d1 > d0 + 1e-12 * squares[i] {
            return Err(Error::domain(format!("squared step scales not convex at t = {}", i + 2)));
        }
    }

    let n = squares.len();
    let mut eta2 = Vec::with_capacity(n + 1);
    let (lo, hi) = nested_bounds(&squares);
    eta2.push(0.5 * (lo + hi));
    for i in 1..=n {
        let prev = eta2[i - 1];
        let from_identity = (squares[i - 1] - prev).clamp(0.0, prev);
        let next = if i < n {
            let (lo, hi) = nested_bounds(&squares[i..]);
            if hi - lo <= NESTED_WIDTH * hi {
                0.5 * (lo + hi)
            } else {
                from_identity.clamp(lo.max(0.0), hi)
            }
        } else {
            from_identity
        };
        eta2.push(next);
    }

    let eta1_sq = eta2[0];
    let sandwich_slack: Vec<f64> =
        nested_intervals(&squares).iter().map(|(lo, hi)| (eta1_sq - lo).min(hi - eta1_sq)).collect();
    if let Some(j) = sandwich_slack.iter().position(|s| *s < -SANDWICH_TOL) {
        return Err(Error::Realization { t: j + 1, slack: sandwich_slack[j] });
    }
    let mut identity_error: f64 = 0.0;
    for t in 1..=n {
        let (cur, next) = (eta2[t - 1], eta2[t]);
        if next < -SANDWICH_TOL || next > cur + SANDWICH_TOL {
            return Err(Error::Realization { t: t + 1, slack: (cur - next).min(next) });
        }
        identity_error = identity_error.max(((next + cur) - squares[t - 1]).abs() / squares[t - 1]);
    }

    let mut sigma2 = Vec::with_capacity(eta2.len());
    sigma2.push(eta1_sq);
    for t in 1..eta2.len() {
        let (p_prev, p) = (1.0 / eta2[t - 1], 1.0 / eta2[t]);
        let inc = p - p_prev;
        if inc < 0.0 {
            if inc < -1e-12 * p {
                return Err(Error::Realization { t: t + 1, slack: inc / p });
            }
            sigma2.push(f64::INFINITY);
        } else {
            sigma2.push(1.0 / inc);
        }
    }
    Ok(Realization { eta2, sigma2, eta1_sq, sandwich_slack, identity_error })
}

/// Everything produced by [`design_process`].
#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub target: DesignTarget,
    pub sequence: ASequence,
    pub realization: Realization,
    /// Signal variances padded with `∞` up to the verification horizon.
    pub sigma2: Vec<f64>,
    pub achieved_mu_inf: f64,
    pub limit: LimitReport,
    /// Lower bound `(c² − C²/4)/15` on `η₁²` from the step-scale constants.
    pub eta1_lower_bound: f64,
}

impl DesignResult {
    pub fn spec(&self) -> LearningSpec {
        LearningSpec::Explicit { sigma2: self.sigma2.clone() }
    }
}

/// Designs, realizes, and verifies by forward simulation over `verify_horizon` periods.
pub fn design_process(target: &DesignTarget, verify_horizon: usize) -> Result<DesignResult> {
    let sequence = design_a_sequence(target)?;
    let mut extended = sequence.a.clone();
    let last = *extended.last().expect("sequence has A_2");
    extended.extend((1..=EXTENSION).map(|k| last * (-(k as f64)).exp2()));
    let mut realization = realize_noise_process(&extended)?;
    let n = sequence.a.len();
    realization.eta2.truncate(n + 1);
    realization.sigma2.truncate(n + 1);
    realization.sandwich_slack.truncate(n);
    let mut sigma2 = realization.sigma2.clone();
    sigma2.resize(verify_horizon.max(sigma2.len()), f64::INFINITY);
    sigma2.truncate(verify_horizon.max(1));

    let config = GameConfig::new(target.c, target.lambda0)?;
    let spec = LearningSpec::Explicit { sigma2: sigma2.clone() };
    let limit = limit_threshold(&config, &spec, 1e-8, verify_horizon)?;
    let achieved_mu_inf = limit.mu_inf;
    let miss = (achieved_mu_inf - target.mu_target).abs();
    if miss.is_nan() || miss > VERIFY_TOL {
        return Err(Error::DesignVerification { achieved: achieved_mu_inf, target: target.mu_target });
    }
    let (lo, hi) = (sequence.lower_const, sequence.upper_const);
    Ok(DesignResult {
        target: *target,
        eta1_lower_bound: (lo * lo - hi * hi / 4.0) / 15.0,
        sequence,
        realization,
        sigma2,
        achieved_mu_inf,
        limit,
    })
}
