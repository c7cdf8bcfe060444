use rayon::prelude::*;

use super::limit::{limit_threshold_with, LimitOptions};
use crate::kernel::GameConfig;
use crate::processes::LearningSpec;
use crate::{Error, Result};

/// One comparison of limit gaps `|μ*_∞ − (c − 1/2)|`.
#[derive(Debug, Clone, PartialEq)]
pub enum StaticsInstance {
    /// Initial play closer to 1/2 gives a limit closer to risk dominance:
    /// requires `|lambda0 − 1/2| ≤ |lambda0_far − 1/2|`.
    InitialPlay { spec: LearningSpec, c: f64, lambda0: f64, lambda0_far: f64 },
    /// Noisier signals in every period give a smaller gap: requires
    /// `σ_t²(slow) ≥ σ_t²(fast)` for all `t`.
    LearningSpeed { slow: LearningSpec, fast: LearningSpec, c: f64, lambda0: f64 },
    /// Moving the more precise signal from period `early` to the later
    /// period `late` gives a smaller gap: requires `late ≥ early` and
    /// `σ²_late ≥ σ²_early` in `spec`.
    FrontLoading { spec: LearningSpec, c: f64, lambda0: f64, early: usize, late: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clause {
    InitialPlay,
    LearningSpeed,
    FrontLoading,
}

impl StaticsInstance {
    pub fn clause(&self) -> Clause {
        match self {
            Self::InitialPlay { .. } => Clause::InitialPlay,
            Self::LearningSpeed { .. } => Clause::LearningSpeed,
            Self::FrontLoading { .. } => Clause::FrontLoading,
        }
    }
}

/// A pair whose gaps were ordered the wrong way.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub index: usize,
    pub clause: Clause,
    /// Gap that should be the smaller one.
    pub smaller: f64,
    pub larger: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticsReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
    /// `(smaller, larger)` gaps per instance.
    pub gaps: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnessOptions {
    pub slack: f64,
    pub limit: LimitOptions,
    /// Periods over which elementwise variance orderings are checked.
    pub check_periods: usize,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self { slack: 1e-8, limit: LimitOptions::new(1e-10, 1_000_000), check_periods: 256 }
    }
}

fn gap(config: &GameConfig, spec: &LearningSpec, opts: &LimitOptions) -> Result<f64> {
    let report = limit_threshold_with(config, spec, opts)?;
    if !report.converged {
        return Err(Error::Unconverged(format!("limit threshold not converged after {} periods", report.periods_used)));
    }
    Ok((report.mu_inf - config.steady_state()).abs())
}

fn check_periods(spec: &LearningSpec, wanted: usize) -> usize {
    spec.horizon().map_or(wanted, |h| h.min(wanted))
}

fn validate(instance: &StaticsInstance, opts: &HarnessOptions) -> Result<()> {
    match instance {
        StaticsInstance::InitialPlay { lambda0, lambda0_far, .. } => {
            if (lambda0 - 0.5).abs() > (lambda0_far - 0.5).abs() {
                return Err(Error::Validation(format!(
                    "initial play {lambda0} is further from 1/2 than {lambda0_far}"
                )));
            }
        }
        StaticsInstance::LearningSpeed { slow, fast, .. } => {
            let n = check_periods(slow, opts.check_periods).min(check_periods(fast, opts.check_periods));
            let (a, b) = (slow.increments(n)?, fast.increments(n)?);
            if let Some(t) = (0..n).find(|&i| a[i] > b[i] * (1.0 + 1e-12)) {
                return Err(Error::Validation(format!("slow process is more precise at t = {}", t + 1)));
            }
        }
        StaticsInstance::FrontLoading { spec, early, late, .. } => {
            if *early == 0 || late < early {
                return Err(Error::Validation(format!("need 1 ≤ early ≤ late, got {early}, {late}")));
            }
            let inc = spec.increments(*late)?;
            if inc[late - 1] > inc[early - 1] {
                return Err(Error::Validation(format!("period {late} is more precise than period {early}")));
            }
        }
    }
    Ok(())
}

/// `(gap expected smaller, gap expected larger)`.
fn gaps(instance: &StaticsInstance, opts: &LimitOptions) -> Result<(f64, f64)> {
    match instance {
        StaticsInstance::InitialPlay { spec, c, lambda0, lambda0_far } => Ok((
            gap(&GameConfig::new(*c, *lambda0)?, spec, opts)?,
            gap(&GameConfig::new(*c, *lambda0_far)?, spec, opts)?,
        )),
        StaticsInstance::LearningSpeed { slow, fast, c, lambda0 } => {
            let config = GameConfig::new(*c, *lambda0)?;
            Ok((gap(&config, slow, opts)?, gap(&config, fast, opts)?))
        }
        StaticsInstance::FrontLoading { spec, c, lambda0, early, late } => {
            let config = GameConfig::new(*c, *lambda0)?;
            Ok((gap(&config, &spec.swapped(*early, *late)?, opts)?, gap(&config, spec, opts)?))
        }
    }
}

/// Checks each instance's ordering of limit gaps, allowing `opts.slack`.
pub fn comparative_statics_harness(instances: &[StaticsInstance], opts: &HarnessOptions) -> Result<StaticsReport> {
    for inst in instances {
        validate(inst, opts)?;
    }
    let gaps: Vec<(f64, f64)> = instances.par_iter().map(|inst| gaps(inst, &opts.limit)).collect::<Result<_>>()?;
    let violations = gaps
        .iter()
        .enumerate()
        .filter(|(_, (small, large))| small > &(large + opts.slack))
        .map(|(index, &(smaller, larger))| Violation { index, clause: instances[index].clause(), smaller, larger })
        .collect();
    Ok(StaticsReport { checked: instances.len(), violations, gaps })
}
