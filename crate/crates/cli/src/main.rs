//! `ergolab COMMAND --config FILE [--out DIR] [--grid-n N]`

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use commands::{Command, Outcome};
use config::{ConfigError, ExperimentConfig};
use report::Section;

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "ergolab", version, about = "Ergodic constants, explosive solutions and boundary rates on 1-D grids")]
struct Cli {
    command: Command,
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the report, profiles and log.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides `[grid] n`.
    #[arg(long)]
    grid_n: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let resolved = match cfg.resolve() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let (outcome, error) = match commands::run(cli.command, &resolved) {
        Ok(o) => (o, None),
        Err(f) => (*f.partial, Some(f.error)),
    };
    let ok = outcome.passed && error.is_none();
    if let Err(e) = persist(&cli.out, cli.command, &cfg, outcome, error.as_ref()) {
        eprintln!("cannot write results to {}: {e}", cli.out.display());
        return ExitCode::from(EXIT_FAILED);
    }
    if let Some(e) = error {
        eprintln!("{} failed: {e}", cli.command.name());
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = config::load(&cli.config)?;
    if let Some(n) = cli.grid_n {
        cfg.grid.n = n;
    }
    Ok(cfg)
}

fn persist(out: &Path, cmd: Command, cfg: &ExperimentConfig, outcome: Outcome, error: Option<&ergolab::Error>) -> std::io::Result<()> {
    let resolved_toml = cfg.to_toml();
    let table: toml::Table = toml::from_str(&resolved_toml).expect("serialized config parses");
    let mut root = Section::new();
    root.set("command", cmd.name()).set(
        "status",
        match (error, outcome.passed) {
            (Some(_), _) => "error",
            (None, true) => "ok",
            (None, false) => "failed",
        },
    );
    if let Some(e) = error {
        root.set("error", e);
    }
    root.child("config", report::from_toml(&table)).child("result", outcome.result);
    for (name, contents) in &outcome.files {
        output::write_atomic(out, name, contents)?;
    }
    output::write_atomic(out, "config.toml", &resolved_toml)?;
    let mut log = outcome.log.join("\n");
    log.push('\n');
    output::write_atomic(out, "run.log", &log)?;
    output::write_atomic(out, "report.txt", &root.render())?;
    for line in &outcome.summary {
        println!("{line}");
    }
    Ok(())
}
