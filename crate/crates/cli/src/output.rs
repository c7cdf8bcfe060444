use std::fmt::Write as _;
use std::path::Path;

use inertial::kernel::{PosteriorSchedule, ThresholdPath};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const PATH_HEADER: &[&str] = &["t", "mu_star", "gamma", "A", "eta2", "lambda"];

/// Shortest round-trip decimal; non-finite values as `nan`, `inf`, `-inf`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        ryu::Buffer::new().format_finite(x).to_owned()
    }
}

/// CSV text with LF line endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

/// Path table; `times` relabels rows (refined grids), otherwise `t = 1, 2, …`.
pub fn path_table(path: &ThresholdPath, schedule: &PosteriorSchedule, lambda: &[f64], times: Option<&[f64]>) -> Csv {
    let mut csv = Csv::new(PATH_HEADER);
    for i in 0..path.len() {
        let t = match times {
            Some(ts) => num(ts[i]),
            None => (i + 1).to_string(),
        };
        csv.row(&[
            t,
            num(path.mu_star[i]),
            num(path.gamma[i]),
            num(path.step_scale[i]),
            num(schedule.eta2(i + 1)),
            num(lambda[i]),
        ]);
    }
    csv
}

/// Fields shared by every `summary.json`.
#[derive(Debug, Default)]
pub struct Headline {
    pub mu_inf: Option<f64>,
    pub gamma_inf: Option<f64>,
    pub converged: Option<bool>,
    pub regime: Option<String>,
}

#[derive(Serialize)]
struct Summary<'a> {
    schema_version: u32,
    config_echo: &'a RunConfig,
    mu_inf: Option<f64>,
    gamma_inf: Option<f64>,
    converged: Option<bool>,
    regime: Option<&'a str>,
    diagnostics: &'a Value,
}

/// Compact JSON with a trailing newline.
pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec(value).expect("JSON values serialize");
    bytes.push(b'\n');
    bytes
}

pub fn summary_bytes(config: &RunConfig, head: &Headline, diagnostics: &Value) -> Vec<u8> {
    let finite = |x: Option<f64>| x.filter(|v| v.is_finite());
    json_bytes(&Summary {
        schema_version: SCHEMA_VERSION,
        config_echo: config,
        mu_inf: finite(head.mu_inf),
        gamma_inf: finite(head.gamma_inf),
        converged: head.converged,
        regime: head.regime.as_deref(),
        diagnostics,
    })
}

/// Lowercase hex digest.
pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Writes each named file directly inside `dir`.
pub fn write_all(dir: &Path, files: &[(&'static str, Vec<u8>)]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    for (name, bytes) in files {
        let target = dir.join(name);
        std::fs::write(&target, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", target.display())))?;
    }
    Ok(())
}
