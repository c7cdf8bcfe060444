//! Equilibrium dynamics of inertial coordination games.
//!
//! A continuum of agents repeatedly chooses between a safe action with cost
//! `c` and a risky action whose payoff is the fundamental `θ` plus last
//! period's share of risky players. Agents learn `θ` from Gaussian signals.
//! The crate computes the equilibrium belief thresholds, aggregate play,
//! their limits, and the learning processes that produce a given limit.
//!
//! - [`kernel`]: per-period recursions and the normal distribution.
//! - [`processes`]: learning processes and their precision schedules.
//! - [`designer`]: synthesis of noise processes that hit a target limit.
//! - [`finite`]: Monte Carlo simulation with finitely many players.
//! - [`analysis`]: limits, transitions, comparative statics, phase diagrams.

pub mod analysis;
pub mod designer;
mod error;
pub mod finite;
pub mod kernel;
pub mod processes;

pub use error::{Error, Result};
