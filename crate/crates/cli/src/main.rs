//! `invsq`: flows, bound states, scheme comparisons and wavefunctions of the
//! renormalized inverse-square potential.
//!
//! Units are `ħ = 2m = 1`: lengths share the unit of `r0`, momenta are
//! inverse lengths and energies `E = -k²` inverse lengths squared.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{BindArgs, Report, WaveArgs, EXIT_USAGE};
use config::{CommonArgs, FileConfig, RunConfig, UsageError};

#[derive(Parser)]
#[command(name = "invsq", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Counterterm λ(R) along a grid of cutoffs.
    Flow {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Bound-state momentum by the exact matching, closed form or ODE oracle.
    Bind {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        bind: BindArgs,
    },
    /// Square well against δ shell against closed form over R.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Samples of u(r) for one scheme and cutoff.
    Wave {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        wave: WaveArgs,
    },
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Flow { common } | Command::Compare { common } => common,
            Command::Bind { common, .. } | Command::Wave { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Flow { .. } => "flow",
            Command::Bind { .. } => "bind",
            Command::Compare { .. } => "compare",
            Command::Wave { .. } => "wave",
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<(Report, RunConfig)> {
    let common = cli.command.common();
    let file = match &common.config {
        Some(path) => config::load_file(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(common, &file)?;
    let report = match &cli.command {
        Command::Flow { .. } => commands::flow(&cfg)?,
        Command::Bind { bind, .. } => commands::bind(&cfg, bind, &file)?,
        Command::Compare { .. } => commands::compare(&cfg)?,
        Command::Wave { wave, .. } => commands::wave(&cfg, wave, &file)?,
    };
    Ok((report, cfg))
}

fn emit(cli: &Cli, report: &Report, cfg: &RunConfig) -> anyhow::Result<()> {
    let text = report.table.render(cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if cfg.meta {
        let unix_time = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let meta = json!({
            "tool": "invsq",
            "version": env!("CARGO_PKG_VERSION"),
            "command": cli.command.name(),
            "args": std::env::args().skip(1).collect::<Vec<_>>(),
            "unix_time": unix_time,
            "exit_status": report.exit,
        });
        let text = serde_json::to_string_pretty(&meta)? + "\n";
        match &cfg.out {
            Some(path) => {
                let mut meta_path = path.clone().into_os_string();
                meta_path.push(".meta.json");
                std::fs::write(meta_path, text)?;
            }
            None => eprint!("{text}"),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, cfg)) => {
            if let Err(e) = emit(&cli, &report, &cfg) {
                eprintln!("invsq: {e:#}");
                return ExitCode::FAILURE;
            }
            ExitCode::from(report.exit)
        }
        Err(e) if e.is::<UsageError>() => {
            eprintln!("invsq: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("invsq: {e:#}");
            ExitCode::FAILURE
        }
    }
}
