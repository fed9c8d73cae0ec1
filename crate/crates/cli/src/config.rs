//! Run configuration: command-line flags layered over an optional flat TOML file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use invsq::{Coupling, Cutoff, Extension, Scheme};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    SquareWell,
    DeltaShell,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Exact,
    ClosedForm,
    Oracle,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Regulator scheme(s); repeat or comma-separate. Defaults to both.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub scheme: Vec<SchemeArg>,

    /// Bessel index ν = √(g + 1/4), in [0, 1].
    #[arg(long, conflicts_with = "g")]
    pub nu: Option<f64>,

    /// Long-range strength g = 2mα/ħ², in [-0.25, 0.75].
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,

    /// Self-adjoint-extension constant c (any sign).
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,

    /// Length scale r0 of the extension; also the unit of R in output ratios.
    #[arg(long)]
    pub r0: Option<f64>,

    /// Cutoff radii R (same length unit as r0).
    #[arg(long = "R", num_args = 1.., conflicts_with = "r_log")]
    pub r: Vec<f64>,

    /// Log-spaced cutoffs: MIN MAX N.
    #[arg(long = "R-log", num_args = 3, value_names = ["MIN", "MAX", "N"])]
    pub r_log: Option<Vec<f64>>,

    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Flat TOML file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Write run metadata (version, arguments, time) to `<out>.meta.json`,
    /// or to stderr without `--out`.
    #[arg(long)]
    pub meta: bool,
}

/// Contents of a `--config` file. Keys mirror the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scheme: Option<SchemeList>,
    pub nu: Option<f64>,
    pub g: Option<f64>,
    pub c: Option<f64>,
    pub r0: Option<f64>,
    #[serde(rename = "R")]
    pub r: Option<RList>,
    #[serde(rename = "R-log")]
    pub r_log: Option<Vec<f64>>,
    pub method: Option<MethodArg>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub meta: Option<bool>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub points: Option<usize>,
    pub zero_energy: Option<bool>,
    pub oracle_steps: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum SchemeList {
    One(SchemeArg),
    Many(Vec<SchemeArg>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum RList {
    One(f64),
    Many(Vec<f64>),
}

/// Invalid configuration; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn load_file(path: &Path) -> anyhow::Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
}

/// Validated settings shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub schemes: Vec<Scheme>,
    pub coupling: Coupling,
    pub ext: Extension,
    pub cutoffs: Vec<Cutoff>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub meta: bool,
}

impl RunConfig {
    pub fn resolve(cli: &CommonArgs, file: &FileConfig) -> anyhow::Result<Self> {
        let schemes = if !cli.scheme.is_empty() {
            expand_schemes(&cli.scheme)
        } else {
            match &file.scheme {
                Some(SchemeList::One(s)) => expand_schemes(&[*s]),
                Some(SchemeList::Many(v)) => expand_schemes(v),
                None => Scheme::ALL.to_vec(),
            }
        };

        // a flag on the command line replaces the whole {g, nu} pair from the file
        let (nu, g) = if cli.nu.is_some() || cli.g.is_some() {
            (cli.nu, cli.g)
        } else {
            (file.nu, file.g)
        };
        let coupling = match (nu, g) {
            (Some(nu), None) => Coupling::from_nu(nu),
            (None, Some(g)) => Coupling::from_g(g),
            (Some(_), Some(_)) => return Err(usage("give exactly one of --nu and --g")),
            (None, None) => return Err(usage("missing coupling: give --nu or --g")),
        }
        .map_err(|e| usage(e.to_string()))?;

        let c = cli.c.or(file.c).ok_or_else(|| usage("missing --c"))?;
        let r0 = cli.r0.or(file.r0).unwrap_or(1.0);
        let ext = Extension::new(c, r0).map_err(|e| usage(e.to_string()))?;

        let radii = if !cli.r.is_empty() {
            cli.r.clone()
        } else if let Some(spec) = &cli.r_log {
            log_range(spec)?
        } else if let Some(list) = &file.r {
            match list {
                RList::One(r) => vec![*r],
                RList::Many(v) => v.clone(),
            }
        } else if let Some(spec) = &file.r_log {
            log_range(spec)?
        } else {
            Vec::new()
        };
        let cutoffs = radii
            .iter()
            .map(|&r| Cutoff::new(r, r0).map_err(|e| usage(e.to_string())))
            .collect::<anyhow::Result<Vec<_>>>()?;

        Ok(RunConfig {
            schemes,
            coupling,
            ext,
            cutoffs,
            format: cli.format.or(file.format).unwrap_or(Format::Csv),
            out: cli.out.clone().or_else(|| file.out.clone()),
            meta: cli.meta || file.meta.unwrap_or(false),
        })
    }

    pub fn require_cutoffs(&self, at_least: usize) -> anyhow::Result<()> {
        if self.cutoffs.len() < at_least {
            return Err(usage(format!(
                "need at least {at_least} cutoff value(s) via --R or --R-log (got {})",
                self.cutoffs.len()
            )));
        }
        Ok(())
    }
}

fn expand_schemes(args: &[SchemeArg]) -> Vec<Scheme> {
    let mut out = Vec::new();
    for a in args {
        let add: &[Scheme] = match a {
            SchemeArg::SquareWell => &[Scheme::SquareWell],
            SchemeArg::DeltaShell => &[Scheme::DeltaShell],
            SchemeArg::Both => &Scheme::ALL,
        };
        for s in add {
            if !out.contains(s) {
                out.push(*s);
            }
        }
    }
    out
}

fn log_range(spec: &[f64]) -> anyhow::Result<Vec<f64>> {
    let [min, max, n] = spec else {
        return Err(usage("--R-log takes MIN MAX N"));
    };
    if !(*min > 0.0 && max > min && max.is_finite()) {
        return Err(usage(format!("--R-log needs 0 < MIN < MAX (got {min}, {max})")));
    }
    if !(n.fract() == 0.0 && *n >= 2.0 && *n <= 1e6) {
        return Err(usage(format!("--R-log needs an integer N >= 2 (got {n})")));
    }
    let n = *n as usize;
    let (a, b) = (min.ln(), max.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => *min,
            _ if i == n - 1 => *max,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

pub fn usage_error(msg: impl Into<String>) -> anyhow::Error {
    usage(msg)
}
