//! Limits, transitions, and structural checks built on the kernel.
//!
//! - [`limit_threshold`] iterates the γ recursion lazily to its limit and
//!   tells the two regimes apart: convergence to the risk-dominance cutoff
//!   (`γ → 0`) or a frozen limit where step scales vanish first.
//! - [`detect_transition`] labels play paths as sudden or gradual switches.
//! - [`comparative_statics_harness`] checks orderings of limit gaps.
//! - [`phase_diagram`], [`prefix_irrelevance_check`] and
//!   [`idsds_contemporaneous_cutoffs`] cover the remaining experiments.

mod limit;
mod statics;
mod sweep;
mod transition;

pub use limit::{limit_play, limit_threshold, limit_threshold_with, LimitOptions, LimitReport, LimitVerdict};
pub use statics::{comparative_statics_harness, Clause, HarnessOptions, StaticsInstance, StaticsReport, Violation};
pub use sweep::{
    idsds_contemporaneous_cutoffs, phase_diagram, prefix_irrelevance_check, IdsdsCutoffs, PhaseCell, PhaseDiagram,
    PrefixCheck,
};
pub use transition::{
    beta_bar, crossing_time, detect_transition, gradual_step_bound, initial_play_dominant, Regime, TransitionParams,
    TransitionReport,
};
