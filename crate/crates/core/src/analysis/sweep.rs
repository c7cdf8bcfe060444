use rayon::prelude::*;

use super::limit::{limit_play, limit_threshold, LimitReport};
use crate::kernel::{threshold_step, GameConfig};
use crate::processes::{classify_growth, default_window, materialize, GrowthClass, GrowthVerdict, LearningSpec};
use crate::{Error, Result};

/// Periods used to classify a process before a prefix check.
const CLASSIFY_HORIZON: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct PrefixCheck {
    pub growth: GrowthClass,
    pub base: LimitReport,
    pub prefixed: LimitReport,
    /// Both limits converged to within `tol` of the risk-dominance cutoff.
    pub holds: bool,
}

/// Replaces the first periods of a sub-quadratic process and checks that
/// the limit threshold stays at risk dominance.
pub fn prefix_irrelevance_check(
    config: &GameConfig,
    spec: &LearningSpec,
    prefix: &[f64],
    tol: f64,
    t_max: usize,
) -> Result<PrefixCheck> {
    spec.validate()?;
    // Stop early where precision overflows; such growth is far from sub-quadratic.
    let horizon = spec.precisions().take(CLASSIFY_HORIZON).take_while(|p| p.is_finite()).count();
    let schedule = materialize(spec, horizon)?;
    let growth = classify_growth(&schedule, default_window(horizon), 0.15)?;
    if growth.verdict != GrowthVerdict::SubQuadratic {
        return Err(Error::domain(format!("process is {:?}, not sub-quadratic", growth.verdict)));
    }
    let base = limit_threshold(config, spec, 1e-8, t_max)?;
    let prefixed = limit_threshold(config, &spec.with_prefix(prefix.to_vec()), 1e-8, t_max)?;
    let steady = config.steady_state();
    let holds = [&base, &prefixed].iter().all(|r| r.converged && (r.mu_inf - steady).abs() <= tol);
    Ok(PrefixCheck { growth, base, prefixed, holds })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCell {
    pub lambda0: f64,
    pub theta: f64,
    pub limit_action: u8,
    pub mu_inf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    /// Row-major over `(λ₀, θ)`.
    pub cells: Vec<PhaseCell>,
    /// `(λ₀, μ*_∞(λ₀))`: the fundamental at which limit play switches.
    pub boundary: Vec<(f64, f64)>,
}

/// Limit action over a `(λ₀, θ)` grid.
pub fn phase_diagram(
    spec: &LearningSpec,
    c: f64,
    lambda0_grid: &[f64],
    theta_grid: &[f64],
    t_max: usize,
) -> Result<PhaseDiagram> {
    if lambda0_grid.is_empty() || theta_grid.is_empty() {
        return Err(Error::Length { needed: 1, available: 0 });
    }
    let reports: Vec<LimitReport> = lambda0_grid
        .par_iter()
        .map(|&l0| limit_threshold(&GameConfig::new(c, l0)?, spec, 1e-8, t_max))
        .collect::<Result<_>>()?;
    let mut cells = Vec::with_capacity(lambda0_grid.len() * theta_grid.len());
    let mut boundary = Vec::with_capacity(lambda0_grid.len());
    for (&lambda0, report) in lambda0_grid.iter().zip(&reports) {
        boundary.push((lambda0, report.mu_inf));
        for &theta in theta_grid {
            cells.push(PhaseCell { lambda0, theta, limit_action: limit_play(theta, report)?, mu_inf: report.mu_inf });
        }
    }
    Ok(PhaseDiagram { cells, boundary })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdsdsCutoffs {
    /// `b^k(c)` for `k = 0, 1, …`.
    pub upper: Vec<f64>,
    /// `b^k(c − 1)`.
    pub lower: Vec<f64>,
    pub converged: bool,
}

/// Gap between the two cutoff sequences at which iteration stops.
const IDSDS_GAP: f64 = 1e-10;

/// Iterated best-response cutoffs of the game where players move at once
/// with posterior variance `η²`: `b(x)` solves `μ + Φ((μ − x)/(√2·η)) = c`.
pub fn idsds_contemporaneous_cutoffs(eta: f64, c: f64, k_max: usize) -> Result<IdsdsCutoffs> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::domain(format!("eta = {eta} must be positive")));
    }
    let a = std::f64::consts::SQRT_2 * eta;
    let mut upper = vec![c];
    let mut lower = vec![c - 1.0];
    let mut converged = false;
    for _ in 0..k_max {
        let (u, l) = (*upper.last().unwrap(), *lower.last().unwrap());
        if u - l < IDSDS_GAP {
            converged = true;
            break;
        }
        upper.push(threshold_step(u, a, c)?);
        lower.push(threshold_step(l, a, c)?);
    }
    let (u, l) = (*upper.last().unwrap(), *lower.last().unwrap());
    converged |= u - l < IDSDS_GAP;
    Ok(IdsdsCutoffs { upper, lower, converged })
}
