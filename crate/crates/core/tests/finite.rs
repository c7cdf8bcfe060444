mod common;

use common::phi_quantile;
use inertial::finite::{concentration_report, normal_from_bits, replication_rng, simulate_finite, FiniteSimConfig};
use inertial::kernel::{aggregate_play, threshold_path, GameConfig};
use inertial::processes::{materialize, LearningSpec};
use inertial::Error;
use proptest::prelude::*;
use rand::RngCore;
use sha2::{Digest, Sha256};

fn base() -> (GameConfig, LearningSpec) {
    (GameConfig::new(1.0, 0.2).unwrap(), LearningSpec::Iid { sigma: 1.0 })
}

fn fsc(players: usize, horizon: usize, seed: u64, replications: usize) -> FiniteSimConfig {
    FiniteSimConfig { players, horizon, theta: 0.6, seed, replications }
}

fn digest(paths: &[Vec<f64>]) -> Vec<u8> {
    let mut h = Sha256::new();
    for p in paths {
        for x in p {
            h.update(x.to_le_bytes());
        }
    }
    h.finalize().to_vec()
}

#[test]
fn single_player_acts_on_its_own_posterior_mean() {
    let (config, spec) = base();
    let (horizon, seed) = (30, 11);
    let r = simulate_finite(&config, &spec, &fsc(1, horizon, seed, 5)).unwrap();
    for (rep, path) in r.paths.iter().enumerate() {
        // Independent replay: draws via a bisection quantile, posterior mean as a plain average.
        let mut rng = replication_rng(seed, rep as u64);
        let mut total = 0.0;
        assert_eq!(path.len(), horizon);
        for (t, (&share, &cutoff)) in path.iter().zip(&r.cutoffs).enumerate() {
            let u = ((rng.next_u64() >> 12) as f64 + 0.5) / (1u64 << 52) as f64;
            total += 0.6 + phi_quantile(u);
            let mean = total / (t + 1) as f64;
            let expected = if mean >= cutoff { 1.0 } else { 0.0 };
            assert_eq!(share, expected, "rep {rep}, t = {}", t + 1);
        }
    }
}

#[test]
fn bit_draws_map_through_the_normal_quantile() {
    for bits in [0u64, 1 << 63, u64::MAX, 0x0123_4567_89ab_cdef, 0xfedc_ba98_7654_3210] {
        let u = ((bits >> 12) as f64 + 0.5) / (1u64 << 52) as f64;
        let (got, want) = (normal_from_bits(bits), phi_quantile(u));
        assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()), "{bits:x}: {got} vs {want}");
    }
    // Extreme words stay finite and mirror each other.
    let (lo, hi) = (normal_from_bits(0), normal_from_bits(u64::MAX));
    assert!(lo.is_finite() && hi.is_finite());
    assert!((lo + hi).abs() < 1e-9 && hi > 8.0);
}

#[test]
fn draws_are_addressable_by_period_and_player() {
    let (seed, rep, players) = (99u64, 3u64, 7usize);
    let mut sequential = replication_rng(seed, rep);
    let words: Vec<u64> = (0..5 * players).map(|_| sequential.next_u64()).collect();
    for t in 0..5 {
        for i in 0..players {
            let mut keyed = replication_rng(seed, rep);
            // Word positions count 32-bit halves.
            keyed.set_word_pos(2 * (t * players + i) as u128);
            assert_eq!(keyed.next_u64(), words[t * players + i]);
        }
    }
    let mut other = replication_rng(seed, rep + 1);
    assert_ne!(other.next_u64(), words[0]);
}

#[test]
fn same_seed_gives_identical_results() {
    let (config, spec) = base();
    let a = simulate_finite(&config, &spec, &fsc(300, 25, 5, 16)).unwrap();
    let b = simulate_finite(&config, &spec, &fsc(300, 25, 5, 16)).unwrap();
    assert_eq!(a, b);
    let c = simulate_finite(&config, &spec, &fsc(300, 25, 6, 16)).unwrap();
    assert_ne!(a.paths, c.paths);
}

#[test]
fn results_do_not_depend_on_the_thread_count() {
    let (config, spec) = base();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| simulate_finite(&config, &spec, &fsc(500, 30, 42, 24)).unwrap())
    };
    let (one, eight) = (run(1), run(8));
    assert_eq!(digest(&one.paths), digest(&eight.paths));
    assert_eq!(one, eight);
}

#[test]
fn cutoffs_and_continuum_match_the_kernel() {
    let (config, spec) = base();
    let r = simulate_finite(&config, &spec, &fsc(10, 40, 1, 2)).unwrap();
    let schedule = materialize(&spec, 40).unwrap();
    let path = threshold_path(&config, &schedule, 40).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&r.cutoffs), bits(&path.mu_star));
    assert_eq!(r.continuum, aggregate_play(0.6, &path, &schedule).unwrap().lambda);
}

#[test]
fn empirical_shares_are_unbiased() {
    let (config, spec) = base();
    let (players, reps) = (50, 400);
    let r = simulate_finite(&config, &spec, &fsc(players, 12, 2024, reps)).unwrap();
    for t in 0..12 {
        let p = r.continuum[t];
        let mean = r.paths.iter().map(|path| path[t]).sum::<f64>() / reps as f64;
        // Each share is Binomial(N, λ_t)/N.
        let se = (p * (1.0 - p) / (players * reps) as f64).sqrt();
        assert!((mean - p).abs() <= 3.0 * se, "t = {}: {mean} vs {p} (se {se:e})", t + 1);
    }
}

#[test]
fn sup_error_concentrates_at_rate_root_n() {
    let (config, spec) = base();
    let results: Vec<_> =
        [100, 1000, 10_000].iter().map(|&n| simulate_finite(&config, &spec, &fsc(n, 50, 7, 200)).unwrap()).collect();
    let table = concentration_report(&results).unwrap();
    assert_eq!(table.iter().map(|r| r.players).collect::<Vec<_>>(), vec![100, 1000, 10_000]);
    for w in table.windows(2) {
        assert!(w[1].mean_sup_error < w[0].mean_sup_error);
        assert!(w[1].p95_sup_error < w[0].p95_sup_error);
        let ratio = w[0].mean_sup_error / w[1].mean_sup_error;
        let target = 10f64.sqrt();
        assert!(ratio >= target / 2.0 && ratio <= 2.0 * target, "ratio {ratio}");
    }
    assert!(table[2].mean_sup_error < 0.02);
    for r in &results {
        assert!(r.summary.p95 <= r.summary.max && r.summary.mean <= r.summary.max);
        assert!(r.summary.sd > 0.0);
    }
}

#[test]
fn a_million_players_track_the_continuum() {
    let (config, spec) = base();
    let r = simulate_finite(&config, &spec, &fsc(1_000_000, 20, 3, 1)).unwrap();
    // Binomial oracle: 5 standard deviations at λ = 1/2 is 0.0025.
    assert!(r.sup_errors[0] < 0.005, "{}", r.sup_errors[0]);
}

#[test]
fn report_needs_two_player_counts() {
    let (config, spec) = base();
    let one = simulate_finite(&config, &spec, &fsc(10, 5, 1, 3)).unwrap();
    assert!(matches!(concentration_report(&[]), Err(Error::Length { needed: 2, available: 0 })));
    assert!(matches!(concentration_report(&[one]), Err(Error::Length { needed: 2, available: 1 })));
}

#[test]
fn invalid_inputs_are_rejected() {
    let (config, spec) = base();
    assert!(matches!(simulate_finite(&config, &spec, &fsc(0, 5, 1, 3)), Err(Error::Validation(_))));
    assert!(matches!(simulate_finite(&config, &spec, &fsc(5, 5, 1, 0)), Err(Error::Validation(_))));
    let mut bad = fsc(5, 5, 1, 1);
    bad.theta = f64::NAN;
    assert!(simulate_finite(&config, &spec, &bad).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shares_live_on_the_player_grid(n in 1usize..40, theta in -1.0f64..2.0, seed in any::<u64>()) {
        let (config, spec) = base();
        let cfg = FiniteSimConfig { players: n, horizon: 15, theta, seed, replications: 3 };
        let r = simulate_finite(&config, &spec, &cfg).unwrap();
        for path in &r.paths {
            for &share in path {
                let k = share * n as f64;
                prop_assert!((0.0..=1.0).contains(&share));
                prop_assert!((k - k.round()).abs() < 1e-9);
            }
        }
        for (path, err) in r.paths.iter().zip(&r.sup_errors) {
            let direct = path.iter().zip(&r.continuum).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert_eq!(direct, *err);
        }
    }
}
