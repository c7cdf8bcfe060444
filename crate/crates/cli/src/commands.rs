use inertial::analysis::{
    crossing_time, detect_transition, idsds_contemporaneous_cutoffs, limit_play, limit_threshold, phase_diagram,
    LimitReport, LimitVerdict, TransitionParams,
};
use inertial::designer::{design_process, DesignTarget};
use inertial::finite::{concentration_report, simulate_finite, FiniteSimConfig};
use inertial::kernel::{aggregate_play, threshold_path, GameConfig, PosteriorSchedule, ThresholdPath};
use inertial::processes::{
    classify_growth, default_window, materialize, reduce_past_play_signals, refine_time_grid, GrowthClass, LearningSpec,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{ClassifySection, Command, RunConfig, Variance};
use crate::error::CliError;
use crate::output::{hex, json_bytes, num, path_table, summary_bytes, Csv, Headline, SCHEMA_VERSION};
use crate::svg::{line_chart, Series};

/// Files produced by a command, plus a note when a limit was not reached.
pub struct Run {
    pub files: Vec<(&'static str, Vec<u8>)>,
    pub unconverged: Option<String>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    plot: bool,
}

/// Runs the command recorded in `cfg`, which must already be resolved.
pub fn execute(cfg: &RunConfig, plot: bool) -> Result<Run, CliError> {
    let ctx = Ctx { cfg, plot };
    match cfg.command.expect("resolved config names its command") {
        Command::Simulate => simulate(&ctx),
        Command::Design => design(&ctx),
        Command::Limit => limit(&ctx),
        Command::Classify => classify(&ctx),
        Command::Finite => finite(&ctx),
        Command::Phase => phase(&ctx),
        Command::Transition => transition(&ctx),
        Command::Reduce => reduce(&ctx),
        Command::Refine => refine(&ctx),
        Command::Idsds => idsds(&ctx),
    }
}

fn section<T>(s: &Option<T>) -> &T {
    s.as_ref().expect("resolved config fills the command's sections")
}

fn verdict_name(v: LimitVerdict) -> String {
    format!("{v:?}")
}

fn unconverged_note(r: &LimitReport) -> Option<String> {
    (!r.converged).then(|| format!("limit not reached after {} periods", r.periods_used))
}

fn limit_diagnostics(r: &LimitReport, theta: f64) -> Result<Value, CliError> {
    let action = if r.converged { json!(limit_play(theta, r)?) } else { Value::Null };
    Ok(json!({
        "verdict": verdict_name(r.verdict),
        "periods_used": r.periods_used,
        "last_step_size": finite_or_null(r.last_step_size),
        "drift": finite_or_null(r.drift),
        "max_residual": finite_or_null(r.max_residual),
        "monotone": r.monotone,
        "limit_action": action,
    }))
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn limit_headline(r: &LimitReport) -> Headline {
    Headline {
        mu_inf: Some(r.mu_inf),
        gamma_inf: Some(r.gamma_inf),
        converged: Some(r.converged),
        regime: Some(verdict_name(r.verdict)),
    }
}

/// Thresholds and play over `horizon` periods.
struct Simulated {
    schedule: PosteriorSchedule,
    path: ThresholdPath,
    lambda: Vec<f64>,
}

fn run_path(config: &GameConfig, schedule: PosteriorSchedule, theta: f64) -> Result<Simulated, CliError> {
    let path = threshold_path(config, &schedule, schedule.len())?;
    let lambda = aggregate_play(theta, &path, &schedule)?.lambda;
    Ok(Simulated { schedule, path, lambda })
}

impl Simulated {
    fn table(&self, times: Option<&[f64]>) -> Vec<u8> {
        path_table(&self.path, &self.schedule, &self.lambda, times).into_bytes()
    }

    fn chart(&self, title: &str, times: Option<&[f64]>) -> Vec<u8> {
        let t = |i: usize| times.map_or((i + 1) as f64, |ts| ts[i]);
        let mu = Series::new("mu_star", self.path.mu_star.iter().enumerate().map(|(i, &m)| (t(i), m)));
        let lambda = Series::new("lambda", self.lambda.iter().enumerate().map(|(i, &l)| (t(i), l)));
        line_chart(title, "t", "value", &[mu, lambda])
    }
}

fn growth(spec: &LearningSpec, s: &ClassifySection) -> Result<GrowthClass, CliError> {
    let schedule = materialize(spec, s.horizon)?;
    let window = match s.window_start {
        Some(start) => start..=s.horizon,
        None => default_window(s.horizon),
    };
    Ok(classify_growth(&schedule, window, s.delta)?)
}

fn growth_json(g: &GrowthClass) -> Value {
    json!({
        "verdict": format!("{:?}", g.verdict),
        "exponent": finite_or_null(g.exponent),
        "early_slope": finite_or_null(g.early_slope),
        "late_slope": finite_or_null(g.late_slope),
        "super_polynomial": g.super_polynomial,
    })
}

fn simulate(ctx: &Ctx) -> Result<Run, CliError> {
    let cfg = ctx.cfg;
    let config = cfg.game.config()?;
    let spec = cfg.learning()?;
    let horizon = section(&cfg.simulate).horizon;
    let sim = run_path(&config, materialize(&spec, horizon)?, cfg.game.theta)?;
    let lim = section(&cfg.limit);
    let report = limit_threshold(&config, &spec, lim.tol, lim.t_max)?;
    // Finite processes may be too short for a fit; the summary then omits it.
    let growth = growth(&spec, section(&cfg.classify)).ok();
    let mut diagnostics = limit_diagnostics(&report, cfg.game.theta)?;
    diagnostics["growth"] = growth.as_ref().map_or(Value::Null, growth_json);
    diagnostics["final_lambda"] = sim.lambda.last().map_or(Value::Null, |&l| json!(l));
    diagnostics["max_residual_path"] = json!(sim.path.max_residual());
    let table = sim.table(None);
    let mut files = vec![
        ("thresholds.csv", table.clone()),
        ("play.csv", table),
        ("summary.json", summary_bytes(cfg, &limit_headline(&report), &diagnostics)),
    ];
    if ctx.plot {
        files.push(("plot.svg", sim.chart("thresholds and aggregate play", None)));
    }
    Ok(Run { files, unconverged: unconverged_note(&report) })
}

fn design(ctx: &Ctx) -> Result<Run, CliError> {
    let cfg = ctx.cfg;
    let d = section(&cfg.design);
    let g = &cfg.game;
    if g.a != 1.0 || g.b != 1.0 {
        return Err(CliError::Config("design requires unit payoff scales a = b = 1".into()));
    }
    let config = g.config()?;
    let result = design_process(&DesignTarget::new(d.target, g.lambda0, g.c)?, d.verify_horizon)?;
    let seq = &result.sequence;
    let sigma2: Vec<Variance> = result.sigma2.iter().map(|&s| Variance(s)).collect();
    let design_json = json!({
        "schema_version": SCHEMA_VERSION,
        "target": d.target,
        "lambda0": g.lambda0,
        "c": g.c,
        "achieved_mu_inf": result.achieved_mu_inf,
        "error": (result.achieved_mu_inf - d.target).abs(),
        "gamma_star": seq.gamma_star,
        "gamma2": seq.gamma2,
        "truncated_at": seq.truncated_at,
        "tail_bound": seq.tail_bound,
        "lower_const": seq.lower_const,
        "upper_const": seq.upper_const,
        "ratio": seq.ratio,
        "eta1_sq": result.realization.eta1_sq,
        "eta1_lower_bound": result.eta1_lower_bound,
        "min_slack": result.realization.min_slack(),
        "sigma2": sigma2,
    });
    let sim = run_path(&config, materialize(&result.spec(), d.verify_horizon)?, g.theta)?;
    let mut head = limit_headline(&result.limit);
    head.mu_inf = Some(result.achieved_mu_inf);
    let mut diagnostics = limit_diagnostics(&result.limit, g.theta)?;
    diagnostics["achieved_mu_inf"] = json!(result.achieved_mu_inf);
    let mut files = vec![
        ("design.json", json_bytes(&design_json)),
        ("thresholds.csv", sim.table(None)),
        ("summary.json", summary_bytes(cfg, &head, &diagnostics)),
    ];
    if ctx.plot {
        files.push(("plot.svg", sim.chart("designed process", None)));
    }
    Ok(Run { files, unconverged: unconverged_note(&result.limit) })
}

fn limit(ctx: &Ctx) -> Result<Run, CliError> {
    let cfg = ctx.cfg;
    let lim = section(&cfg.limit);
    let report = limit_threshold(&cfg.game.config()?, &cfg.learning()?, lim.tol, lim.t_max)?;
    let diagnostics = limit_diagnostics(&report, cfg.game.theta)?;
    Ok(Run {
        files: vec![("summary.json", summary_bytes(cfg, &limit_headline(&report), &diagnostics))],
        unconverged: unconverged_note(&report),
    })
}

fn classify(ctx: &Ctx) -> Result<Run, CliError> {
    let cfg = ctx.cfg;
    let s = section(&cfg.classify);
    let g = growth(&cfg.learning()?, s)?;
    let mut diagnostics = growth_json(&g);
    diagnostics["window_start"] = json!(s.window_start.unwrap_or(*default_window(s.horizon).start()));
    diagnostics["window_end"] = json!(s.horizon);
    let head = Headline { regime: Some(format!("{:?}", g.verdict)), ..Headline::default() };
    Ok(Run { files: vec![("summary.json", summary_bytes(cfg, &head, &diagnostics))], unconverged: None })
}

fn finite(ctx: &Ctx) -> Result<Run, CliError> {
    let cfg = ctx.cfg;
    let s = section(&cfg.finite);
    let config = cfg.game.config()?;
    let spec = cfg.learning()?;
    let mut csv = Csv::new(&["N", "rep", "sup_error"]);
    let mut hasher = Sha256::new();
    let mut results = Vec::with_capacity(s.players.len());
    let mut per_n = Vec::with_capacity(s.players.len());
    for &players in &s.players {
        let fsc = FiniteSimConfig {
            players,
            horizon: s.horizon,
            theta: cfg.game.theta,
            seed: cfg.seed,
            replications: s.replications,
        };
        let r = simulate_finite(&config, &spec, &fsc)?;
        for (rep, e) in r.sup_errors.iter().enumerate() {
            csv.row(&[players.to_string(), rep.to_string(), num(*e)]);
        }
        for x in r.paths.iter().flatten() {
            hasher.update(x.to_le_bytes());
        }
        per_n.push(json!({
            "N": players,
            "mean": r.summary.mean,
            "sd": finite_or_null(r.summary.sd),
            "p95": r.summary.p95,
            "max": r.summary.max,
        }));
        results.push(r);
    }
    let concentration = if results.len() >= 2 {
        let rows = concentration_report(&results)?;
        Value::Array(
            rows.iter()
                .map(
                    |r| json!({ "N": r.players, "mean_sup_error": r.mean_sup_error, "p95_sup_error": r.p95_sup_error }),
                )
                .collect(),
        )
    } else {
        Value::Null
    };
    let diagnostics = json!({
        "per_player_count": per_n,
        "concentration": concentration,
        "paths_sha256": hex(&hasher.finalize()),
    });
    let mut files = vec![
        ("finite.csv", csv.into_bytes()),
        ("summary.json", summary_bytes(cfg, &Headline::default(), &diagnostics)),
    ];
    if ctx.plot {
        let mean = Series::new("mean sup error", results.iter().map(|r| (r.players as f64, r.summary.mean)));
        files.push(("plot.svg", line_chart("finite-player sup error", "N", "sup error", &[mean])));
    }
    Ok(Run { files, unconverged: None })
}

fn phase(ctx: &Ctx) -> Result<Run, CliError> {
    let cfg = ctx.cfg;
    let s = section(&cfg.phase);
    let diagram = phase_diagram(&cfg.learning()?, cfg.game.c, &s.lambda0, &s.theta, s.t_max)?;
    let mut csv = Csv::new(&["lambda0", "theta", "limit_action", "mu_inf"]);
    for cell in &diagram.cells {
        csv.row(&[num(cell.lambda0), num(cell.theta), cell.limit_action.to_string(), num(cell.mu_inf)]);
    }
    let boundary: Vec<[f64; 2]> = diagram.boundary.iter().map(|&(l, m)| [l, m]).collect();
    let diagnostics = json!({ "boundary": boundary });
    let mut files =
        vec![("phase.csv", csv.into_bytes()), ("summary.json", summary_bytes(cfg, &Headline::default(), &diagnostics))];
    if ctx.plot {
        let series = Series::new("mu_inf", diagram.boundary.iter().copied());
        files.push(("plot.svg", line_chart("limit-play boundary", "lambda0", "theta", &[series])));
    }
    Ok(Run { files, unconverged: None })
}

fn transition(ctx: &Ctx) -> Result<Run, CliError> {
    let cfg = ctx.cfg;
    let s = section(&cfg.transition);
    let config = cfg.game.config()?;
    let spec = cfg.learning()?;
    let theta = cfg.game.theta;
    let horizon = match s.horizon {
        Some(h) => h,
        None => 3 * crossing_time(&config, &spec, theta, s.t_max)?,
    };
    let sim = run_path(&config, materialize(&spec, horizon)?, theta)?;
    let params = TransitionParams { epsilon: s.epsilon, alpha: s.alpha, beta: s.beta };
    let play = inertial::kernel::PlayPath { theta, lambda: sim.lambda.clone() };
    let r = detect_transition(&play, &config, Some(&spec), &params)?;
    let diagnostics = json!({
        "horizon": horizon,
        "t_cross": r.t_cross,
        "max_step": r.max_step,
        "epsilon": r.epsilon,
        "alpha": r.alpha,
        "beta": r.beta,
        "beta_bar": r.beta_bar,
        "early_deviation": finite_or_null(r.early_deviation),
        "late_deviation": finite_or_null(r.late_deviation),
        "step_bound": r.step_bound,
    });
    let head = Headline { regime: Some(format!("{:?}", r.regime)), ..Headline::default() };
    let mut files = vec![("play.csv", sim.table(None)), ("summary.json", summary_bytes(cfg, &head, &diagnostics))];
    if ctx.plot {
        files.push(("plot.svg", sim.chart("transition", None)));
    }
    Ok(Run { files, unconverged: None })
}

fn reduce(ctx: &Ctx) -> Result<Run, CliError> {
    let cfg = ctx.cfg;
    let s = section(&cfg.reduce);
    let horizon = s.horizon.unwrap_or(s.sigma2.len());
    let reduced = reduce_past_play_signals(&s.spec(), horizon)?;
    let sim = run_path(&cfg.game.config()?, materialize(&reduced, horizon)?, cfg.game.theta)?;
    let sigma2: Vec<Variance> = sim.schedule.sigma2_seq().into_iter().map(Variance).collect();
    let diagnostics = json!({ "reduced_sigma2": sigma2 });
    let mut files =
        vec![("play.csv", sim.table(None)), ("summary.json", summary_bytes(cfg, &Headline::default(), &diagnostics))];
    if ctx.plot {
        files.push(("plot.svg", sim.chart("reduced process", None)));
    }
    Ok(Run { files, unconverged: None })
}

fn refine(ctx: &Ctx) -> Result<Run, CliError> {
    let cfg = ctx.cfg;
    let s = section(&cfg.refine);
    let schedule = refine_time_grid(&cfg.learning()?, s.n, s.horizon)?;
    let times: Vec<f64> = (1..=schedule.len()).map(|k| k as f64 / s.n as f64).collect();
    let sim = run_path(&cfg.game.config()?, schedule, cfg.game.theta)?;
    let diagnostics = json!({ "n": s.n, "steps": times.len() });
    let mut files = vec![
        ("play.csv", sim.table(Some(&times))),
        ("summary.json", summary_bytes(cfg, &Headline::default(), &diagnostics)),
    ];
    if ctx.plot {
        files.push(("plot.svg", sim.chart("refined time grid", Some(&times))));
    }
    Ok(Run { files, unconverged: None })
}

fn idsds(ctx: &Ctx) -> Result<Run, CliError> {
    let cfg = ctx.cfg;
    let s = section(&cfg.idsds);
    let r = idsds_contemporaneous_cutoffs(s.eta, cfg.game.c, s.k_max)?;
    let mut csv = Csv::new(&["k", "upper", "lower"]);
    for (k, (u, l)) in r.upper.iter().zip(&r.lower).enumerate() {
        csv.row(&[k.to_string(), num(*u), num(*l)]);
    }
    let (u, l) = (*r.upper.last().expect("k = 0 present"), *r.lower.last().expect("k = 0 present"));
    let diagnostics = json!({ "iterations": r.upper.len() - 1, "final_upper": u, "final_lower": l });
    let head = Headline { converged: Some(r.converged), ..Headline::default() };
    let mut files = vec![("idsds.csv", csv.into_bytes()), ("summary.json", summary_bytes(cfg, &head, &diagnostics))];
    if ctx.plot {
        let upper = Series::new("upper", r.upper.iter().enumerate().map(|(k, &v)| (k as f64, v)));
        let lower = Series::new("lower", r.lower.iter().enumerate().map(|(k, &v)| (k as f64, v)));
        files.push(("plot.svg", line_chart("iterated dominance cutoffs", "k", "cutoff", &[upper, lower])));
    }
    let unconverged = (!r.converged).then(|| format!("cutoffs still {} apart after {} rounds", u - l, s.k_max));
    Ok(Run { files, unconverged })
}
