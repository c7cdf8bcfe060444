mod common;

use common::{gamma_oracle, phi_between, phi_pdf, phi_quantile};
use inertial::analysis::limit_threshold;
use inertial::designer::{
    design_a_sequence, design_process, realize_noise_process, DesignTarget, RATIO_LIMIT, SANDWICH_TOL,
};
use inertial::kernel::GameConfig;
use inertial::processes::{classify_growth, materialize, GrowthVerdict, LearningSpec};
use inertial::Error;
use proptest::prelude::*;

/// `A_{γ₁}(x)`: step scale taking `γ₁` to `x` in one period.
fn a_from(gamma1: f64, x: f64) -> f64 {
    phi_between(x, gamma1) / x
}

/// `A_{γ*}(x)`: step scale taking `x` halfway to `γ*`.
fn a_half(gamma_star: f64, x: f64) -> f64 {
    let m = 0.5 * (gamma_star + x);
    phi_between(m, x) / m
}

fn grid_targets() -> Vec<DesignTarget> {
    let mut out = Vec::new();
    for l0 in [0.6, 0.75, 0.9] {
        let (lo, hi) = (1.0 - l0, 0.5);
        for k in 1..=4 {
            let mu = lo + (hi - lo) * k as f64 / 5.0;
            out.push(DesignTarget::new(mu, l0, 1.0).unwrap());
        }
    }
    out
}

#[test]
fn target_must_lie_strictly_inside_the_interval() {
    assert!(matches!(DesignTarget::new(0.25, 0.75, 1.0), Err(Error::Domain(_))));
    assert!(matches!(DesignTarget::new(0.5, 0.75, 1.0), Err(Error::Domain(_))));
    assert!(matches!(DesignTarget::new(0.6, 0.75, 1.0), Err(Error::Domain(_))));
    assert!(DesignTarget::new(0.65, 0.25, 1.0).is_ok());
    assert!(matches!(DesignTarget::new(0.3, 1.0, 1.0), Err(Error::Domain(_))));
}

#[test]
fn a_sequence_for_target_0_35() {
    let target = DesignTarget::new(0.35, 0.75, 1.0).unwrap();
    let seq = design_a_sequence(&target).unwrap();
    let (g1, gs) = (phi_quantile(0.75), phi_quantile(0.65));
    assert!((seq.gamma_star - gs).abs() < 1e-14 && (gs - 0.3853).abs() < 1e-4);
    assert!((seq.gamma[0] - g1).abs() < 1e-14 && (g1 - 0.6745).abs() < 1e-4);
    let g2 = seq.gamma2;
    assert!(g2 > gs && g2 < g1);
    // Both sufficient conditions, evaluated from their definitions.
    assert!(a_from(g1, g2) > std::f64::consts::SQRT_2 * a_half(gs, g2));
    assert!((phi_pdf(gs) / gs) / (phi_pdf(g2) / g2) <= RATIO_LIMIT);
    assert!((seq.at(2) - a_from(g1, g2)).abs() < 1e-14);
    assert!(seq.a.windows(2).all(|w| w[1] < w[0]));
    assert!(seq.ratio <= RATIO_LIMIT && seq.a2_margin > 0.0);
}

#[test]
fn a_sequence_drives_the_pinned_gamma_path() {
    let target = DesignTarget::new(0.35, 0.75, 1.0).unwrap();
    let seq = design_a_sequence(&target).unwrap();
    let offset = seq.gamma2 - seq.gamma_star;
    for t in 2..seq.truncated_at {
        // Halving rule γ_t = γ* + (γ₂ − γ*)/2^{t−2}.
        let pinned = seq.gamma_star + offset / 2f64.powi(t as i32 - 2);
        assert!((seq.gamma[t - 1] - pinned).abs() <= 1e-15, "t = {t}");
        // The bisection oracle recovers γ_t from γ_{t−1} and A_t.
        let g = gamma_oracle(seq.gamma[t - 2], seq.at(t));
        let err = f64::EPSILON / (seq.at(t) + phi_pdf(g));
        assert!((g - seq.gamma[t - 1]).abs() <= 1e-14 + err, "t = {t}");
    }
}

#[test]
fn a_sequence_sandwich_and_ratios() {
    for target in grid_targets() {
        let seq = design_a_sequence(&target).unwrap();
        let (c, big_c) = (seq.lower_const, seq.upper_const);
        let gs = seq.gamma_star.abs();
        let g2 = seq.gamma2.abs();
        assert!((c - 4.0 * phi_pdf(g2) / g2 * (g2 - gs)).abs() < 1e-14);
        assert!((big_c - 4.0 * phi_pdf(gs) / gs * (g2 - gs)).abs() < 1e-14);
        let offset = seq.gamma2.abs() - gs;
        let tol = 1e-12 + 4.0 * f64::EPSILON * g2 / offset;
        for t in 3..seq.truncated_at {
            let (prev, cur) = (seq.gamma[t - 2].abs(), seq.gamma[t - 1].abs());
            let a = seq.at(t);
            // Mean value form: A_t·γ_t/(γ_{t−1} − γ_t) ∈ [φ(γ_{t−1}), φ(γ_t)] with the exact gap.
            let d = offset * 2f64.powi(2 - t as i32);
            let slope = a * cur / d;
            assert!(slope >= phi_pdf(prev) * (1.0 - tol) && slope <= phi_pdf(cur) * (1.0 + tol), "t = {t}");
            let scale = 2f64.powi(-(t as i32));
            assert!(a >= c * scale * (1.0 - tol) && a <= big_c * scale * (1.0 + tol), "t = {t}");
            if t + 1 < seq.truncated_at {
                let r = a / seq.at(t + 1);
                assert!(r >= 2.0 * c / big_c * (1.0 - 2.0 * tol) && r <= 2.0 * big_c / c * (1.0 + 2.0 * tol));
            }
        }
        // Convexity in squares.
        let sq: Vec<f64> = seq.a.iter().map(|a| a * a).collect();
        for w in sq.windows(3) {
            assert!(w[1] - w[2] <= w[0] - w[1]);
        }
        assert!(seq.at(seq.truncated_at - 1) >= 1e-16);
        assert!(seq.tail_bound > 0.0 && seq.tail_bound < 1e-15);
    }
}

#[test]
fn constant_step_scales_give_constant_posterior_variance() {
    let a = 0.3;
    let r = realize_noise_process(&[a; 12]).unwrap();
    for e in &r.eta2 {
        assert!((e - a * a / 2.0).abs() <= 1e-17);
    }
    assert!(r.sigma2[1..].iter().all(|s| *s == f64::INFINITY));
    assert_eq!(r.min_slack(), 0.0);
}

#[test]
fn realization_rejects_non_convex_or_invalid_input() {
    assert!(matches!(realize_noise_process(&[]), Err(Error::Length { .. })));
    assert!(matches!(realize_noise_process(&[1.0, 0.0]), Err(Error::Domain(_))));
    assert!(matches!(realize_noise_process(&[1.0, 0.9, 0.1]), Err(Error::Domain(_))));
}

#[test]
fn realization_of_the_designed_sequence() {
    let target = DesignTarget::new(0.35, 0.75, 1.0).unwrap();
    let seq = design_a_sequence(&target).unwrap();
    let r = realize_noise_process(&seq.a).unwrap();
    assert!(r.eta2.windows(2).all(|w| w[1] <= w[0]));
    assert!(r.sigma2.iter().all(|s| *s > 0.0));
    assert!(r.min_slack() >= -SANDWICH_TOL);
    // η_{t+1}² + η_t² = A_{t+1}² and the induced step scales reproduce A.
    let schedule = materialize(&LearningSpec::Explicit { sigma2: r.sigma2.clone() }, r.sigma2.len()).unwrap();
    for t in 2..=seq.a.len() + 1 {
        let got = schedule.step_scale(t);
        assert!((got / seq.at(t) - 1.0).abs() < 1e-6, "t = {t}: {got:e} vs {:e}", seq.at(t));
    }
    // Nested-interval bound on η₁².
    let (c, big_c) = (seq.lower_const, seq.upper_const);
    let bound = (c * c - big_c * big_c / 4.0) / 15.0;
    assert!(bound > 0.0 && r.eta1_sq >= bound);
    // η₁² = Σ_{s≥1} (A_{2s}² − A_{2s+1}²).
    let series: f64 = seq.a.chunks(2).filter(|p| p.len() == 2).map(|p| p[0] * p[0] - p[1] * p[1]).sum();
    assert!((r.eta1_sq - series).abs() < 1e-15, "{} vs {series}", r.eta1_sq);
}

#[test]
fn design_process_hits_0_35() {
    let target = DesignTarget::new(0.35, 0.75, 1.0).unwrap();
    let d = design_process(&target, 400).unwrap();
    assert!((d.achieved_mu_inf - 0.35).abs() < 1e-3);
    assert!(d.limit.converged);
    assert!((d.limit.gamma_inf - phi_quantile(0.65)).abs() < 1e-6);
    assert_eq!(d.sigma2.len(), 400);
    assert!(d.realization.eta1_sq >= d.eta1_lower_bound);
}

#[test]
fn reflected_design_mirrors_the_original() {
    let up = design_process(&DesignTarget::new(0.35, 0.75, 1.0).unwrap(), 400).unwrap();
    let down = design_process(&DesignTarget::new(0.65, 0.25, 1.0).unwrap(), 400).unwrap();
    assert!((down.achieved_mu_inf - 0.65).abs() < 1e-3);
    assert!((up.achieved_mu_inf + down.achieved_mu_inf - 1.0).abs() < 1e-12);
    assert_eq!(up.sigma2, down.sigma2);
    assert_eq!(up.sequence.gamma2, -down.sequence.gamma2);
}

#[test]
fn midway_target_with_extreme_initial_play() {
    let target = DesignTarget::new(0.3, 0.9, 1.0).unwrap();
    let d = design_process(&target, 400).unwrap();
    assert!((d.achieved_mu_inf - 0.3).abs() < 1e-3);
}

#[test]
fn twelve_target_grid_round_trip() {
    for target in grid_targets() {
        let d = design_process(&target, 400).unwrap();
        assert!((d.achieved_mu_inf - target.mu_target()).abs() < 1e-3, "{target:?}");
        assert!(d.realization.sigma2.iter().all(|s| *s > 0.0));
        assert!(d.realization.min_slack() >= -SANDWICH_TOL);
        // Realized precisions grow geometrically.
        let k = d.realization.sigma2.len();
        let schedule = materialize(&d.spec(), k).unwrap();
        let growth = classify_growth(&schedule, (k / 2 + 1)..=k, 0.15).unwrap();
        assert_eq!(growth.verdict, GrowthVerdict::SuperQuadratic, "{target:?}");
    }
}

#[test]
fn noisier_designed_signals_move_the_limit_toward_risk_dominance() {
    for target in grid_targets() {
        let d = design_process(&target, 400).unwrap();
        let config = GameConfig::new(target.c(), target.lambda0()).unwrap();
        let noisier = d.spec().scale_variances(4.0);
        let r = limit_threshold(&config, &noisier, 1e-8, 400).unwrap();
        assert!(r.converged);
        assert!((r.mu_inf - 0.5).abs() < (d.achieved_mu_inf - 0.5).abs(), "{target:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_targets_round_trip(l0 in 0.03f64..0.97, frac in 0.02f64..0.98, c in 0.5f64..1.5) {
        prop_assume!((l0 - 0.5).abs() > 0.02);
        let (a, b) = (c - l0, c - 0.5);
        let mu = a + (b - a) * frac;
        let target = DesignTarget::new(mu, l0, c).unwrap();
        let d = design_process(&target, 400).unwrap();
        prop_assert!((d.achieved_mu_inf - mu).abs() < 1e-3);
        prop_assert!(d.realization.min_slack() >= -SANDWICH_TOL);
        prop_assert!(d.sequence.ratio <= RATIO_LIMIT);
    }
}
