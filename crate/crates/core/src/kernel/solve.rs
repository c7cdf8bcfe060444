use super::normal::{pdf, prob_between};

const MAX_ITER: usize = 200;
/// Floor for relative step tests near γ = 0.
const TINY: f64 = 1e-300;

/// A solved step of the γ recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Root {
    pub gamma: f64,
    /// |scale·γ − gap(γ)| at the returned γ.
    pub residual: f64,
}

/// Solves `scale·γ = gap(γ)` on `[lo, hi]` by safeguarded Newton.
///
/// `gap` must be decreasing with derivative `−φ(γ)`, so the residual
/// `scale·γ − gap(γ)` is strictly increasing and changes sign on the bracket.
pub(crate) fn solve_gamma(scale: f64, mut lo: f64, mut hi: f64, start: f64, gap: impl Fn(f64) -> f64) -> Root {
    let mut x = start.clamp(lo, hi);
    let mut best = Root { gamma: x, residual: f64::INFINITY };
    for _ in 0..MAX_ITER {
        let gx = scale * x - gap(x);
        if gx.abs() < best.residual {
            best = Root { gamma: x, residual: gx.abs() };
        }
        if gx == 0.0 {
            break;
        }
        if gx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let dx = gx / (scale + pdf(x));
        if dx.abs() <= 4.0 * f64::EPSILON * x.abs().max(TINY) {
            break;
        }
        let mut next = x - dx;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(TINY) || next == x {
            break;
        }
        x = next;
    }
    best
}

/// One period of the γ recursion `A·γ = Φ(γ_prev) − Φ(γ)`.
///
/// Accepts `A = 0` (precision already infinite: γ frozen) and `A = ∞`
/// (uninformative period: γ = 0).
pub(crate) fn advance_gamma(gamma_prev: f64, a: f64) -> Root {
    if gamma_prev == 0.0 || a == f64::INFINITY {
        return Root { gamma: 0.0, residual: 0.0 };
    }
    if a == 0.0 {
        return Root { gamma: gamma_prev, residual: 0.0 };
    }
    if gamma_prev < 0.0 {
        let r = advance_gamma(-gamma_prev, a);
        return Root { gamma: -r.gamma, residual: r.residual };
    }
    // Newton from γ_prev needs no CDF: the residual there is A·γ_prev.
    let slope = pdf(gamma_prev);
    let x = gamma_prev - a * gamma_prev / (a + slope);
    let width = gamma_prev - x;
    if width * (1.0 + gamma_prev) <= 1e-8 {
        // Midpoint rule is exact to double precision on such short intervals.
        let residual = a * x - width * pdf(0.5 * (x + gamma_prev));
        if (residual / (a + slope)).abs() <= 4.0 * f64::EPSILON * x {
            return Root { gamma: x, residual: residual.abs() };
        }
    }
    solve_gamma(a, 0.0, gamma_prev, x, |x| prob_between(x, gamma_prev))
}
