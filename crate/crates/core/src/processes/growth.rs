use std::ops::RangeInclusive;

use crate::kernel::normal::{pdf, quantile};
use crate::kernel::PosteriorSchedule;
use crate::{Error, Result};

/// Growth class of the posterior precision relative to `t²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrowthVerdict {
    SubQuadratic,
    SuperQuadratic,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthClass {
    pub verdict: GrowthVerdict,
    /// Least-squares slope of `ln η_t⁻²` on `ln t` over the window.
    pub exponent: f64,
    /// Slopes over the first and second half of the window.
    pub early_slope: f64,
    pub late_slope: f64,
    /// The slope rises across the window: growth faster than any power.
    pub super_polynomial: bool,
}

/// Last half of a schedule of length `len`.
pub fn default_window(len: usize) -> RangeInclusive<usize> {
    (len / 2 + 1)..=len
}

/// Curvature (rise in slope between half-windows) flagged as super-polynomial.
const CURVATURE_LIMIT: f64 = 0.5;

/// Classifies precision growth by a log-log fit over `window` (1-based periods).
pub fn classify_growth(schedule: &PosteriorSchedule, window: RangeInclusive<usize>, delta: f64) -> Result<GrowthClass> {
    let (start, end) = (*window.start(), *window.end());
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::domain(format!("delta = {delta} must be positive")));
    }
    if start == 0 || end < start {
        return Err(Error::domain(format!("bad window {start}..={end}")));
    }
    if end > schedule.len() {
        return Err(Error::Length { needed: end, available: schedule.len() });
    }
    let n = end - start + 1;
    if n < 8 {
        return Err(Error::domain(format!("window holds {n} periods, need at least 8")));
    }
    let mut points = Vec::with_capacity(n);
    for t in start..=end {
        let p = schedule.precision(t);
        if p <= 0.0 {
            return Err(Error::domain(format!("zero precision at t = {t} inside the fit window")));
        }
        points.push(((t as f64).ln(), p.ln()));
    }
    let exponent = slope(&points);
    let half = n / 2;
    let early_slope = slope(&points[..half]);
    let late_slope = slope(&points[n - half..]);
    let super_polynomial = late_slope - early_slope > CURVATURE_LIMIT;
    let verdict = if super_polynomial || exponent >= 2.0 + delta {
        GrowthVerdict::SuperQuadratic
    } else if exponent <= 2.0 - delta {
        GrowthVerdict::SubQuadratic
    } else {
        GrowthVerdict::Indeterminate
    };
    Ok(GrowthClass { verdict, exponent, early_slope, late_slope, super_polynomial })
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Terms summed explicitly before the Euler–Maclaurin tail.
const HEAD_TERMS: u32 = 1000;

/// Precision scale `C̲` such that `η_t⁻² ≥ C̲·t^q` for all `t` keeps the
/// threshold away from risk dominance (`γ_∞ ≠ 0`).
///
/// `C̲ = 1/(L·K)` with `L = 2^{−q}/(2^{−q} + 1)`, `K = (φ(γ₁)/(2S))²`,
/// `S = Σ_{t≥2} t^{−q/2}`.
pub fn sufficient_precision_constant(q: f64, lambda0: f64) -> Result<f64> {
    if !(q > 2.0 && q.is_finite()) {
        return Err(Error::domain(format!("exponent q = {q} must exceed 2")));
    }
    if !(lambda0 > 0.0 && lambda0 < 1.0) {
        return Err(Error::domain(format!("initial play {lambda0} must lie in (0, 1)")));
    }
    let l = 2f64.powf(-q) / (2f64.powf(-q) + 1.0);
    let s = zeta_tail(q / 2.0);
    let k = (pdf(quantile(lambda0)) / (2.0 * s)).powi(2);
    Ok(1.0 / (l * k))
}

/// `Σ_{t≥2} t^{−r}` for `r > 1`.
pub(crate) fn zeta_tail(r: f64) -> f64 {
    // Smallest terms first to limit rounding.
    let n = HEAD_TERMS as f64;
    let mut head = 0.0;
    for t in (2..=HEAD_TERMS).rev() {
        head += (t as f64).powf(-r);
    }
    // Σ_{t>N} t^{−r} = ∫_N^∞ − f(N)/2 − f'(N)/12 + f'''(N)/720 − …
    let f = n.powf(-r);
    let tail = n.powf(1.0 - r) / (r - 1.0) - 0.5 * f + r * f / (12.0 * n)
        - r * (r + 1.0) * (r + 2.0) * f / (720.0 * n.powi(3));
    head + tail
}
