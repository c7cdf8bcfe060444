//! `inertial`: runs coordination-game experiments from a config file and
//! writes CSV tables, JSON summaries and optional SVG plots.

mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, RunConfig, CONFIG_HELP};
use error::CliError;

#[derive(Parser)]
#[command(name = "inertial", version, about = "Equilibrium dynamics of inertial coordination games")]
#[command(after_long_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Random seed, overriding the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write plot.svg.
    #[arg(long, global = true)]
    plot: bool,
    /// Exit with code 4 when a limit or iteration is not reached.
    #[arg(long, global = true)]
    strict: bool,
    /// Output directory, overriding the config's `out`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConfigArg {
    /// TOML or JSON config, or an emitted summary.json.
    config: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the command named by the config's `command` key.
    Run(ConfigArg),
    /// Threshold and play paths with the limit threshold.
    Simulate(ConfigArg),
    /// Noise process whose limit threshold hits `design.target`.
    Design(ConfigArg),
    /// Limit threshold and its regime.
    Limit(ConfigArg),
    /// Growth class of the posterior precision.
    Classify(ConfigArg),
    /// Finite-player Monte Carlo against the continuum.
    Finite(ConfigArg),
    /// Limit action over a (lambda0, theta) grid.
    Phase(ConfigArg),
    /// Sudden or gradual switch of aggregate play.
    Transition(ConfigArg),
    /// Equivalent single-signal process for past-play signals.
    Reduce(ConfigArg),
    /// Play on a refined time grid.
    Refine(ConfigArg),
    /// Iterated dominance cutoffs of the simultaneous-move game.
    Idsds(ConfigArg),
}

impl Cmd {
    fn split(&self) -> (Option<Command>, &PathBuf) {
        match self {
            Cmd::Run(a) => (None, &a.config),
            Cmd::Simulate(a) => (Some(Command::Simulate), &a.config),
            Cmd::Design(a) => (Some(Command::Design), &a.config),
            Cmd::Limit(a) => (Some(Command::Limit), &a.config),
            Cmd::Classify(a) => (Some(Command::Classify), &a.config),
            Cmd::Finite(a) => (Some(Command::Finite), &a.config),
            Cmd::Phase(a) => (Some(Command::Phase), &a.config),
            Cmd::Transition(a) => (Some(Command::Transition), &a.config),
            Cmd::Reduce(a) => (Some(Command::Reduce), &a.config),
            Cmd::Refine(a) => (Some(Command::Refine), &a.config),
            Cmd::Idsds(a) => (Some(Command::Idsds), &a.config),
        }
    }
}

/// Loads, resolves and runs; returns whether `--strict` was in effect on failure.
fn run(cli: &Cli) -> Result<(), (CliError, bool)> {
    let (command, path) = cli.command.split();
    let mut cfg = RunConfig::load(path).map_err(|e| (e, cli.strict))?;
    let strict = cli.strict || cfg.strict;
    let command = command
        .or(cfg.command)
        .ok_or_else(|| (CliError::Config("config has no `command`; name one on the command line".into()), strict))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.resolve(command).map_err(|e| (e, strict))?;
    let out = cli.out.clone().unwrap_or_else(|| cfg.out.clone());
    let result = commands::execute(&cfg, cli.plot || cfg.plot).map_err(|e| (e, strict))?;
    output::write_all(&out, &result.files).map_err(|e| (e, strict))?;
    match result.unconverged {
        Some(note) if strict => Err((CliError::Unconverged(note), true)),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Config(e.to_string().trim_end().to_owned());
            eprintln!("{}", err.to_json(false));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((err, strict)) => {
            eprintln!("{}", err.to_json(strict));
            ExitCode::from(err.exit_code(strict) as u8)
        }
    }
}
