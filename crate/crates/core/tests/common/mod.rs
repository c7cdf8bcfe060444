//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the crate's solvers or its normal-distribution
//! code: Φ comes from `libm::erfc` or an exact fixed-point series, and
//! every implicit equation is solved by plain bisection.
#![allow(dead_code)]

use inertial::kernel::{gamma_step, threshold_path, GameConfig};
use inertial::processes::{materialize, LearningSpec, PastPlaySpec};
use num_bigint::BigInt;
use proptest::prelude::*;

/// Φ from the C library's `erfc`.
pub fn phi_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn phi_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Φ⁻¹ by bisection on [`phi_cdf`], or on [`phi_sf`] above one half where
/// `1 − p` is exact and the upper tail keeps its resolution.
pub fn phi_quantile(p: f64) -> f64 {
    if p > 0.5 {
        let q = 1.0 - p;
        bisect(-40.0, 40.0, |x| q - phi_sf(x))
    } else {
        bisect(-40.0, 40.0, |x| phi_cdf(x) - p)
    }
}

/// Root of an increasing function on `[lo, hi]`, iterated to adjacent floats.
pub fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `μ` solving `μ + Φ((μ − mu_prev)/A) = c` on `[c − 1, c]`.
pub fn threshold_oracle(mu_prev: f64, a: f64, c: f64) -> f64 {
    bisect(c - 1.0, c, |mu| {
        let z = (mu - mu_prev) / a;
        if z > 0.0 {
            (mu - c + 1.0) - phi_sf(z)
        } else {
            mu + phi_cdf(z) - c
        }
    })
}

/// `γ` solving `A·γ = Φ(γ_prev) − Φ(γ)` between 0 and `γ_prev`.
pub fn gamma_oracle(gamma_prev: f64, a: f64) -> f64 {
    let (lo, hi) = if gamma_prev >= 0.0 { (0.0, gamma_prev) } else { (gamma_prev, 0.0) };
    bisect(lo, hi, |g| a * g - phi_between(g, gamma_prev))
}

/// `Φ(b) − Φ(a)`, differencing whichever tail avoids cancellation.
pub fn phi_between(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        phi_sf(a) - phi_sf(b)
    } else {
        phi_cdf(b) - phi_cdf(a)
    }
}

pub fn phi_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Thresholds `μ*_1..μ*_T` from step scales `A_2..A_T` via [`threshold_oracle`].
pub fn threshold_path_oracle(c: f64, lambda0: f64, step_scales: &[f64]) -> Vec<f64> {
    let mut mu = vec![c - lambda0];
    for &a in step_scales {
        let prev = *mu.last().unwrap();
        mu.push(threshold_oracle(prev, a, c));
    }
    mu
}

/// `A_t = sqrt(1/P_t + 1/P_{t−1})` for `t = 2..=len` from cumulative precisions.
pub fn step_scales(precision: &[f64]) -> Vec<f64> {
    precision.windows(2).map(|w| (1.0 / w[1] + 1.0 / w[0]).sqrt()).collect()
}

/// Decimal digits carried by the fixed-point oracle.
const DIGITS: u32 = 80;

fn one() -> BigInt {
    BigInt::from(10u32).pow(DIGITS)
}

/// Exact fixed-point image `round_down(x·10^DIGITS)` of a finite double.
fn to_fixed(x: f64) -> BigInt {
    let bits = x.abs().to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let mut v = BigInt::from(mantissa) * one();
    if e >= 0 {
        v <<= e as usize;
    } else {
        v >>= (-e) as usize;
    }
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn to_f64(v: &BigInt) -> f64 {
    format!("{v}e-{DIGITS}").parse().unwrap()
}

fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    a * b / one()
}

fn div(a: &BigInt, b: &BigInt) -> BigInt {
    a * one() / b
}

/// `e^y` for `y ≥ 0` by Taylor series.
fn exp_fixed(y: &BigInt) -> BigInt {
    let mut term = one();
    let mut sum = one();
    let mut k = 1u32;
    while term != BigInt::from(0) {
        term = mul(&term, y) / k;
        sum += &term;
        k += 1;
    }
    sum
}

/// `arctan(1/n)` for integer `n ≥ 2`.
fn arctan_inv(n: u32) -> BigInt {
    let n2 = BigInt::from(n) * n;
    let mut power = one() / n;
    let mut sum = BigInt::from(0);
    let mut k = 0u32;
    while power != BigInt::from(0) {
        let term = &power / (2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    sum
}

/// `π` from Machin's formula.
fn pi_fixed() -> BigInt {
    arctan_inv(5) * 16u32 - arctan_inv(239) * 4u32
}

/// Φ(x) to about 70 significant digits via
/// `Φ(x) = 1/2 + φ(x)·Σ_n x^{2n+1}/(2n+1)!!`, then rounded to `f64`.
pub fn phi_cdf_exact(x: f64) -> f64 {
    let xf = to_fixed(x);
    let x2 = mul(&xf, &xf);
    let density = div(&one(), &mul(&exp_fixed(&(&x2 / 2u32)), &(pi_fixed() * 2u32 * one()).sqrt()));
    let mut term = xf.clone();
    let mut sum = xf;
    let mut k = 1u32;
    while term != BigInt::from(0) {
        term = mul(&term, &x2) / (2 * k + 1);
        sum += &term;
        k += 1;
    }
    to_f64(&(one() / 2u32 + mul(&density, &sum)))
}

/// Learning processes covering every growth regime and spec shape.
pub fn corpus() -> Vec<LearningSpec> {
    vec![
        LearningSpec::Iid { sigma: 1.0 },
        LearningSpec::Iid { sigma: 0.1 },
        LearningSpec::OneShot { sigma: 0.5 },
        LearningSpec::SocialDoubling { sigma: 0.05 },
        LearningSpec::SocialDoubling { sigma: 1.0 },
        LearningSpec::PowerPrecision { scale: 1.0, exponent: 0.5 },
        LearningSpec::PowerPrecision { scale: 1.0, exponent: 1.5 },
        LearningSpec::PowerPrecision { scale: 926.8, exponent: 3.0 },
        LearningSpec::GeometricPrecision { scale: 1.0, ratio: 2.0 },
        LearningSpec::Explicit { sigma2: [0.3, f64::INFINITY, 2.0, 0.01, f64::INFINITY].repeat(20) },
        LearningSpec::Iid { sigma: 1.0 }.with_prefix(vec![1e-3; 10]),
    ]
}

/// Checks every path invariant on one run.
pub fn check_path_invariants(config: &GameConfig, spec: &LearningSpec, horizon: usize) -> Result<(), TestCaseError> {
    let schedule = materialize(spec, horizon).unwrap();
    let path = threshold_path(config, &schedule, horizon).unwrap();
    let (c, l0) = (config.c(), config.lambda0());
    let steady = c - 0.5;
    let dir = (l0 - 0.5).signum();
    // One rounding of a threshold of magnitude ~max(1, |c|).
    let ulp = 4.0 * f64::EPSILON * c.abs().max(1.0);
    prop_assert_eq!(path.mu_star[0], c - l0);
    prop_assert!(path.max_residual() <= 1e-12, "residual {:e}", path.max_residual());
    for t in 1..horizon {
        let (prev, cur) = (path.mu_star[t - 1], path.mu_star[t]);
        prop_assert!(cur > c - 1.0 && cur < c);
        // Monotone approach towards c − 1/2 from the side of c − λ₀.
        prop_assert!(dir * (cur - prev) >= -ulp, "t = {}: {} → {}", t + 1, prev, cur);
        prop_assert!(dir * (steady - cur) >= -ulp);
        // γ keeps its sign and shrinks.
        let (g_prev, g) = (path.gamma[t - 1], path.gamma[t]);
        // Near γ = 0 the threshold form resolves γ only to about one ulp of μ over A_t.
        let g_tol = ulp / path.step_scale[t];
        prop_assert!(g * dir >= -g_tol && g.abs() <= g_prev.abs() + g_tol, "t = {}: γ {} → {}", t + 1, g_prev, g);
        // Cross-identity.
        let cross = (cur - prev) - path.step_scale[t] * g;
        prop_assert!(cross.abs() <= 1e-10);
        // The γ form of the recursion agrees with the threshold form.
        let via_gamma = gamma_step(g_prev, schedule.step_scale(t + 1) * config.gamma_scale()).unwrap();
        prop_assert!((via_gamma - g).abs() <= 1e-11 * (1.0 + g_prev.abs()), "t = {}", t + 1);
        if t >= 2 {
            let step = (cur - prev).abs();
            let step_prev = (prev - path.mu_star[t - 2]).abs();
            prop_assert!(step <= step_prev + ulp, "t = {}", t + 1);
        }
    }
    let mirrored = threshold_path(&config.mirrored(), &schedule, horizon).unwrap();
    for (a, b) in path.mu_star.iter().zip(&mirrored.mu_star) {
        prop_assert!((a - (2.0 * c - 1.0 - b)).abs() <= 1e-10);
    }
    Ok(())
}

/// Two-signal model iterated directly: precision recursion, then the
/// threshold recursion and `λ_t = Φ((θ − μ*_t)/η_t)`.
pub fn two_signal_play(spec: &PastPlaySpec, horizon: usize, c: f64, l0: f64, theta: f64) -> Vec<f64> {
    let mut precision = Vec::with_capacity(horizon);
    let mut p = 0.0;
    for t in 1..=horizon {
        let coupling = if t == 1 { 0.0 } else { p / spec.tau2[t - 2] };
        p = p + coupling + 1.0 / spec.sigma2[t - 1];
        precision.push(p);
    }
    let mu = threshold_path_oracle(c, l0, &step_scales(&precision));
    mu.iter().zip(&precision).map(|(m, p)| phi_cdf((theta - m) * p.sqrt())).collect()
}
