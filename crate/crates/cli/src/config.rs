use std::fmt;
use std::path::{Path, PathBuf};

use inertial::kernel::GameConfig;
use inertial::processes::{LearningSpec, PastPlaySpec};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

/// Experiment selected by a config or on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Design,
    Limit,
    Classify,
    Finite,
    Phase,
    Transition,
    Reduce,
    Refine,
    Idsds,
}

/// A signal variance; `inf` marks a period without a signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variance(pub f64);

impl Serialize for Variance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Variance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Variance;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Variance, E> {
                Ok(Variance(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Variance, E> {
                Ok(Variance(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Variance, E> {
                Ok(Variance(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Variance, E> {
                match v {
                    "inf" | "+inf" | "infinity" => Ok(Variance(f64::INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

fn variances(v: &[Variance]) -> Vec<f64> {
    v.iter().map(|x| x.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_lambda0")]
    pub lambda0: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default = "one")]
    pub b: f64,
}

fn default_c() -> f64 {
    1.0
}
fn default_lambda0() -> f64 {
    0.75
}
fn default_theta() -> f64 {
    0.4
}
fn one() -> f64 {
    1.0
}

impl Default for GameSection {
    fn default() -> Self {
        Self { c: default_c(), lambda0: default_lambda0(), theta: default_theta(), a: 1.0, b: 1.0 }
    }
}

impl GameSection {
    pub fn config(&self) -> Result<GameConfig, CliError> {
        let g = GameConfig::new(self.c, self.lambda0)?;
        if self.a == 1.0 && self.b == 1.0 {
            Ok(g)
        } else {
            Ok(g.with_payoff_scales(self.a, self.b)?)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Iid,
    OneShot,
    SocialDoubling,
    Power,
    Geometric,
    Explicit,
}

/// Learning process; which keys apply depends on `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningSection {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<Vec<Variance>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<Vec<Variance>>,
}

impl Default for LearningSection {
    fn default() -> Self {
        Self { kind: Kind::Iid, sigma: Some(1.0), scale: None, exponent: None, ratio: None, sigma2: None, prefix: None }
    }
}

impl LearningSection {
    pub fn spec(&self) -> Result<LearningSpec, CliError> {
        let allowed: &[&str] = match self.kind {
            Kind::Iid | Kind::OneShot | Kind::SocialDoubling => &["sigma"],
            Kind::Power => &["scale", "exponent"],
            Kind::Geometric => &["scale", "ratio"],
            Kind::Explicit => &["sigma2"],
        };
        let present = [
            ("sigma", self.sigma.is_some()),
            ("scale", self.scale.is_some()),
            ("exponent", self.exponent.is_some()),
            ("ratio", self.ratio.is_some()),
            ("sigma2", self.sigma2.is_some()),
        ];
        for (key, set) in present {
            if set && !allowed.contains(&key) {
                return Err(CliError::Config(format!("learning.{key} does not apply to kind {:?}", self.kind)));
            }
        }
        let need = |key: &str, v: Option<f64>| {
            v.ok_or_else(|| CliError::Config(format!("learning.{key} is required for kind {:?}", self.kind)))
        };
        let base = match self.kind {
            Kind::Iid => LearningSpec::Iid { sigma: need("sigma", self.sigma)? },
            Kind::OneShot => LearningSpec::OneShot { sigma: need("sigma", self.sigma)? },
            Kind::SocialDoubling => LearningSpec::SocialDoubling { sigma: need("sigma", self.sigma)? },
            Kind::Power => LearningSpec::PowerPrecision {
                scale: need("scale", self.scale)?,
                exponent: need("exponent", self.exponent)?,
            },
            Kind::Geometric => LearningSpec::GeometricPrecision {
                scale: need("scale", self.scale)?,
                ratio: need("ratio", self.ratio)?,
            },
            Kind::Explicit => LearningSpec::Explicit {
                sigma2: variances(
                    self.sigma2.as_deref().ok_or_else(|| CliError::Config("learning.sigma2 is required".into()))?,
                ),
            },
        };
        let spec = match &self.prefix {
            Some(p) => base.with_prefix(variances(p)),
            None => base,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    #[serde(default = "default_horizon")]
    pub horizon: usize,
}

fn default_horizon() -> usize {
    100
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { horizon: default_horizon() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
}

fn default_tol() -> f64 {
    1e-8
}
fn default_t_max() -> usize {
    1_000_000
}

impl Default for LimitSection {
    fn default() -> Self {
        Self { tol: default_tol(), t_max: default_t_max() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    #[serde(default = "default_classify_horizon")]
    pub horizon: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// First period of the fit window; defaults to `horizon/2 + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_start: Option<usize>,
}

fn default_classify_horizon() -> usize {
    200
}
fn default_delta() -> f64 {
    0.15
}

impl Default for ClassifySection {
    fn default() -> Self {
        Self { horizon: default_classify_horizon(), delta: default_delta(), window_start: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub target: f64,
    #[serde(default = "default_verify_horizon")]
    pub verify_horizon: usize,
}

fn default_verify_horizon() -> usize {
    400
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSection {
    #[serde(default = "default_players")]
    pub players: Vec<usize>,
    #[serde(default = "default_finite_horizon")]
    pub horizon: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
}

fn default_players() -> Vec<usize> {
    vec![100, 1000, 10_000]
}
fn default_finite_horizon() -> usize {
    50
}
fn default_replications() -> usize {
    200
}

impl Default for FiniteSection {
    fn default() -> Self {
        Self { players: default_players(), horizon: default_finite_horizon(), replications: default_replications() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSection {
    #[serde(default = "default_lambda0_grid")]
    pub lambda0: Vec<f64>,
    #[serde(default = "default_theta_grid")]
    pub theta: Vec<f64>,
    #[serde(default = "default_phase_t_max")]
    pub t_max: usize,
}

fn grid(lo: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + step * k as f64).collect()
}
fn default_lambda0_grid() -> Vec<f64> {
    grid(0.05, 0.05, 19)
}
fn default_theta_grid() -> Vec<f64> {
    grid(0.0, 0.05, 21)
}
fn default_phase_t_max() -> usize {
    100_000
}

impl Default for PhaseSection {
    fn default() -> Self {
        Self { lambda0: default_lambda0_grid(), theta: default_theta_grid(), t_max: default_phase_t_max() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSection {
    /// Periods simulated; defaults to three times the crossing time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Defaults to `min(1.04, (1 + β̄)/2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Search limit for the crossing time.
    #[serde(default = "default_cross_t_max")]
    pub t_max: usize,
}

fn default_epsilon() -> f64 {
    0.05
}
fn default_alpha() -> f64 {
    0.5
}
fn default_cross_t_max() -> usize {
    10_000_000
}

impl Default for TransitionSection {
    fn default() -> Self {
        Self {
            horizon: None,
            epsilon: default_epsilon(),
            alpha: default_alpha(),
            beta: None,
            t_max: default_cross_t_max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceSection {
    pub sigma2: Vec<Variance>,
    #[serde(default)]
    pub tau2: Vec<Variance>,
    /// Defaults to the number of state-signal variances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

impl ReduceSection {
    pub fn spec(&self) -> PastPlaySpec {
        PastPlaySpec { sigma2: variances(&self.sigma2), tau2: variances(&self.tau2) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefineSection {
    #[serde(default = "default_refine_n")]
    pub n: usize,
    #[serde(default = "default_refine_horizon")]
    pub horizon: usize,
}

fn default_refine_n() -> usize {
    2
}
fn default_refine_horizon() -> usize {
    50
}

impl Default for RefineSection {
    fn default() -> Self {
        Self { n: default_refine_n(), horizon: default_refine_horizon() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdsdsSection {
    #[serde(default = "one")]
    pub eta: f64,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
}

fn default_k_max() -> usize {
    100_000
}

impl Default for IdsdsSection {
    fn default() -> Self {
        Self { eta: 1.0, k_max: default_k_max() }
    }
}

/// Whole run configuration. Sections a command reads are filled with their
/// defaults before the run, so the echoed config reproduces it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub plot: bool,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub game: GameSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning: Option<LearningSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite: Option<FiniteSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<PhaseSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<TransitionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduce: Option<ReduceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<RefineSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idsds: Option<IdsdsSection>,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Parses TOML, JSON, or an emitted `summary.json` (its `config_echo`).
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim_start().starts_with('{') {
            let mut value: serde_json::Value =
                serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
            if let Some(echo) = value.get_mut("config_echo") {
                value = echo.take();
            }
            serde_json::from_value(value).map_err(|e| CliError::Config(format!("invalid config: {e}")))
        } else {
            toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fills the sections `command` reads with their defaults.
    pub fn resolve(&mut self, command: Command) -> Result<(), CliError> {
        self.command = Some(command);
        let needs_learning = !matches!(command, Command::Reduce | Command::Idsds | Command::Design);
        if needs_learning && self.learning.is_none() {
            self.learning = Some(LearningSection::default());
        }
        match command {
            Command::Simulate => {
                self.simulate.get_or_insert_with(Default::default);
                self.limit.get_or_insert_with(Default::default);
                self.classify.get_or_insert_with(Default::default);
            }
            Command::Limit => {
                self.limit.get_or_insert_with(Default::default);
            }
            Command::Classify => {
                self.classify.get_or_insert_with(Default::default);
            }
            Command::Design => {
                if self.design.is_none() {
                    return Err(CliError::Config("design.target is required".into()));
                }
            }
            Command::Finite => {
                self.finite.get_or_insert_with(Default::default);
            }
            Command::Phase => {
                self.phase.get_or_insert_with(Default::default);
            }
            Command::Transition => {
                self.transition.get_or_insert_with(Default::default);
            }
            Command::Reduce => {
                if self.reduce.is_none() {
                    return Err(CliError::Config("reduce.sigma2 is required".into()));
                }
            }
            Command::Refine => {
                self.refine.get_or_insert_with(Default::default);
            }
            Command::Idsds => {
                self.idsds.get_or_insert_with(Default::default);
            }
        }
        Ok(())
    }

    pub fn learning(&self) -> Result<LearningSpec, CliError> {
        self.learning.clone().unwrap_or_default().spec()
    }
}

/// Config reference printed by `--help`.
pub const CONFIG_HELP: &str = "\
CONFIG FILE
  TOML (or JSON) with flat sections; unknown keys are rejected. An emitted
  summary.json is also accepted and reruns the recorded configuration.
  Variances accept the literal inf (TOML) or the string \"inf\" (JSON).

  command = \"simulate\"   used by `inertial run`
  seed = 0               random seed (finite)
  out = \"out\"            output directory
  plot = false           also write plot.svg
  strict = false         exit 4 when a limit is not reached

  [game]        c = 1.0, lambda0 = 0.75, theta = 0.4, a = 1.0, b = 1.0
  [learning]    kind = iid | one_shot | social_doubling | power | geometric | explicit
                  iid, one_shot, social_doubling: sigma (default process: iid, sigma = 1.0)
                  power: scale, exponent       geometric: scale, ratio
                  explicit: sigma2 = [..]      any kind: prefix = [..] (leading variances)
  [simulate]    horizon = 100
  [limit]       tol = 1e-8, t_max = 1000000
  [classify]    horizon = 200, delta = 0.15, window_start = horizon/2 + 1
  [design]      target (required), verify_horizon = 400
  [finite]      players = [100, 1000, 10000], horizon = 50, replications = 200
  [phase]       lambda0 = [0.05, 0.10, .., 0.95], theta = [0.0, 0.05, .., 1.0], t_max = 100000
  [transition]  horizon = 3 x crossing time, epsilon = 0.05, alpha = 0.5,
                beta = min(1.04, (1 + beta_bar)/2), t_max = 10000000
  [reduce]      sigma2 (required), tau2 = [], horizon = len(sigma2)
  [refine]      n = 2, horizon = 50
  [idsds]       eta = 1.0, k_max = 100000

OUTPUTS (in the output directory)
  simulate    thresholds.csv, play.csv, summary.json
  design      design.json, thresholds.csv, summary.json
  limit       summary.json
  classify    summary.json
  finite      finite.csv, summary.json
  phase       phase.csv, summary.json
  transition  play.csv, summary.json
  reduce      play.csv, summary.json
  refine      play.csv, summary.json
  idsds       idsds.csv, summary.json
  Path tables use the columns t,mu_star,gamma,A,eta2,lambda.

EXIT CODES
  0 ok, 2 config or validation error, 3 numerical failure,
  4 unconverged under --strict. Errors are reported as JSON on stderr.
";
