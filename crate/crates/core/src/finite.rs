//! Monte Carlo simulation with finitely many players.
//!
//! Each of `N` players receives private signals `x_it ~ N(θ, σ_t²)` and acts
//! on the same cutoffs `μ*_t` as the continuum model, so only posterior
//! means have to be simulated.
//!
//! Draws come from ChaCha8 with the seed as key and the replication index as
//! stream. The standard normal for player `i` in period `t` (0-based) is the
//! inverse CDF of the 64-bit word at position `t·N + i`, which makes every
//! draw addressable by `(seed, replication, period, player)` and the results
//! independent of how replications are scheduled across threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::kernel::normal::quantile;
use crate::kernel::{aggregate_play, threshold_path, GameConfig};
use crate::processes::{materialize, LearningSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteSimConfig {
    pub players: usize,
    pub horizon: usize,
    pub theta: f64,
    pub seed: u64,
    pub replications: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupErrorSummary {
    pub mean: f64,
    pub sd: f64,
    pub p95: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSimResult {
    pub players: usize,
    /// Empirical risky shares `λ_{N,t}`, one path per replication.
    pub paths: Vec<Vec<f64>>,
    /// Continuum reference `λ_t(θ)`.
    pub continuum: Vec<f64>,
    /// Cutoffs `μ*_t` shared by all players.
    pub cutoffs: Vec<f64>,
    /// `max_t |λ_{N,t} − λ_t(θ)|` per replication.
    pub sup_errors: Vec<f64>,
    pub summary: SupErrorSummary,
}

/// Standard normal draw from one 64-bit word.
///
/// The top 52 bits give `u = (k + 1/2)·2^{−52}`, exact in double precision
/// and strictly inside `(0, 1)`.
#[inline]
pub fn normal_from_bits(bits: u64) -> f64 {
    let u = ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64);
    quantile(u)
}

/// Generator for one replication, positioned at its first draw.
pub fn replication_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

pub fn simulate_finite(config: &GameConfig, spec: &LearningSpec, fsc: &FiniteSimConfig) -> Result<FiniteSimResult> {
    if fsc.players == 0 || fsc.replications == 0 {
        return Err(Error::Validation("players and replications must be at least 1".into()));
    }
    if !fsc.theta.is_finite() {
        return Err(Error::Validation("theta must be finite".into()));
    }
    let schedule = materialize(spec, fsc.horizon)?;
    if fsc.horizon > 0 && schedule.precision(1) <= 0.0 {
        return Err(Error::Validation("the first period must carry a signal".into()));
    }
    let path = threshold_path(config, &schedule, fsc.horizon)?;
    let continuum = aggregate_play(fsc.theta, &path, &schedule)?.lambda;

    let paths: Vec<Vec<f64>> = (0..fsc.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(fsc.seed, rep as u64);
            let mut sums = vec![0.0; fsc.players];
            let mut shares = Vec::with_capacity(fsc.horizon);
            for t in 0..fsc.horizon {
                let inc = schedule.increments()[t];
                let (drift, sd) = (inc * fsc.theta, inc.sqrt());
                let precision = schedule.precisions()[t];
                let cutoff = path.mu_star[t];
                let mut risky = 0usize;
                for s in sums.iter_mut() {
                    // Σ σ_s⁻² x_is with x = θ + σ z
                    *s += drift + sd * normal_from_bits(rng.next_u64());
                    risky += usize::from(*s / precision >= cutoff);
                }
                shares.push(risky as f64 / fsc.players as f64);
            }
            shares
        })
        .collect();

    let sup_errors: Vec<f64> =
        paths.iter().map(|p| p.iter().zip(&continuum).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)).collect();
    let summary = summarize(&sup_errors);
    Ok(FiniteSimResult { players: fsc.players, paths, continuum, cutoffs: path.mu_star, sup_errors, summary })
}

fn summarize(values: &[f64]) -> SupErrorSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((0.95 * n).ceil() as usize).clamp(1, sorted.len());
    SupErrorSummary { mean, sd, p95: sorted[rank - 1], max: sorted[sorted.len() - 1] }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationRow {
    pub players: usize,
    pub mean_sup_error: f64,
    pub p95_sup_error: f64,
}

/// Sup-error table over runs with different player counts.
pub fn concentration_report(results: &[FiniteSimResult]) -> Result<Vec<ConcentrationRow>> {
    if results.len() < 2 {
        return Err(Error::Length { needed: 2, available: results.len() });
    }
    Ok(results
        .iter()
        .map(|r| ConcentrationRow { players: r.players, mean_sup_error: r.summary.mean, p95_sup_error: r.summary.p95 })
        .collect())
}
