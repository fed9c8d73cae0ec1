//! The four subcommands. Each returns a table and the exit status it implies.

use clap::Args;
use invsq::oracle::energy_bracket;
use invsq::spectrum::{Conditioning, ScanWindow};
use invsq::{
    closed_form_k, flow_point, flow_trajectory, shoot_bound_state, solve_bound_state_exact, BoundState, Error,
    GridSpec, PiecewiseWave, Scheme,
};

use crate::config::{usage_error, FileConfig, MethodArg, RunConfig};
use crate::output::{format_num, Cell, Table};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_MULTIPLICITY: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

pub struct Report {
    pub table: Table,
    pub exit: u8,
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Usage(_) | Error::Domain(_) => EXIT_USAGE,
        Error::Multiplicity { .. } => EXIT_MULTIPLICITY,
        Error::Numerical(_) | Error::Range(_) | Error::FlowPole { .. } => EXIT_NUMERICAL,
    }
}

/// Worst in-band failure: multiplicity outranks solver failures; domain
/// errors stay in-band.
fn fold_exit(current: u8, err: &Error) -> u8 {
    match err {
        Error::Multiplicity { .. } => EXIT_MULTIPLICITY,
        Error::Numerical(_) | Error::Range(_) | Error::FlowPole { .. } if current != EXIT_MULTIPLICITY => EXIT_NUMERICAL,
        _ => current,
    }
}

fn status_of(err: &Error) -> &'static str {
    match err {
        Error::FlowPole { .. } => "pole",
        Error::Multiplicity { .. } => "multiplicity",
        _ => "error",
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// ---------------------------------------------------------------- flow

pub fn flow(cfg: &RunConfig) -> anyhow::Result<Report> {
    cfg.require_cutoffs(1)?;
    let mut table = Table::new(
        "flow",
        vec![
            ("scheme", "-"),
            ("R", "length"),
            ("R_over_r0", "1"),
            ("lambda", "1"),
            ("branch_index", "1"),
            ("lambda_positive", "bool"),
            ("pole", "bool"),
            ("critical_R_over_r0", "1"),
            ("message", "-"),
        ],
    );
    let critical = invsq::flow::critical_ratio(&cfg.coupling, &cfg.ext);
    let (mut rows, mut failed) = (0usize, 0usize);
    for &scheme in &cfg.schemes {
        let points = flow_trajectory(scheme, &cfg.coupling, &cfg.ext, &cfg.cutoffs)
            .map_err(|e| usage_error(e.to_string()))?;
        for (cut, point) in cfg.cutoffs.iter().zip(points) {
            rows += 1;
            let head = [Cell::from(scheme.as_str()), cut.radius().into(), cut.ratio().into()];
            let tail = match point {
                Ok(fp) => vec![
                    fp.lambda.into(),
                    Cell::Int(fp.branch_index.into()),
                    (fp.lambda > 0.0).into(),
                    false.into(),
                    critical.into(),
                    Cell::Empty,
                ],
                Err(err) => {
                    failed += 1;
                    let pole = matches!(err, Error::FlowPole { .. });
                    vec![Cell::Empty, Cell::Empty, Cell::Empty, pole.into(), critical.into(), err.to_string().into()]
                }
            };
            table.push(head.into_iter().chain(tail).collect());
        }
    }
    let exit = if failed == rows { EXIT_NUMERICAL } else { EXIT_OK };
    Ok(Report { table, exit })
}

// ---------------------------------------------------------------- bind

#[derive(Debug, Clone, Default, Args)]
pub struct BindArgs {
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,

    /// Number of Numerov steps for the oracle (default: set by the grid step rule).
    #[arg(long)]
    pub oracle_steps: Option<usize>,
}

fn bind_columns() -> Vec<(&'static str, &'static str)> {
    vec![
        ("scheme", "-"),
        ("R", "length"),
        ("R_over_r0", "1"),
        ("method", "-"),
        ("status", "-"),
        ("k", "1/length"),
        ("E", "1/length^2"),
        ("rel_dev_closed", "1"),
        ("rel_dev_exact", "1"),
        ("conditioning", "-"),
        ("message", "-"),
    ]
}

fn conditioning_label(b: &BoundState) -> &'static str {
    match b.conditioning {
        Conditioning::Normal => "normal",
        Conditioning::SmallNu => "small-nu",
    }
}

struct BindRow {
    scheme: Option<Scheme>,
    cutoff: Option<invsq::Cutoff>,
    method: &'static str,
    result: invsq::Result<Option<BoundState>>,
}

pub fn bind(cfg: &RunConfig, args: &BindArgs, file: &FileConfig) -> anyhow::Result<Report> {
    let method = args.method.or(file.method).unwrap_or(MethodArg::Exact);
    let steps = args.oracle_steps.or(file.oracle_steps);
    let want = |m: MethodArg| method == m || method == MethodArg::All;
    if (want(MethodArg::Exact) || want(MethodArg::Oracle)) && cfg.cutoffs.is_empty() {
        return Err(usage_error("methods exact and oracle need a cutoff via --R or --R-log"));
    }
    if let Some(n) = steps {
        if n < 16 {
            return Err(usage_error(format!("--oracle-steps must be at least 16 (got {n})")));
        }
    }

    let closed = closed_form_k(&cfg.coupling, &cfg.ext);
    let mut rows = Vec::new();
    if want(MethodArg::ClosedForm) {
        rows.push(BindRow { scheme: None, cutoff: None, method: "closed-form", result: closed.clone() });
    }
    for &scheme in &cfg.schemes {
        for cut in &cfg.cutoffs {
            let exact = want(MethodArg::Exact).then(|| solve_bound_state_exact(scheme, &cfg.coupling, &cfg.ext, cut));
            let oracle = want(MethodArg::Oracle).then(|| {
                let fp = flow_point(scheme, &cfg.coupling, &cfg.ext, cut)?;
                let bracket = energy_bracket(&ScanWindow::default_for(scheme, &cfg.ext, &fp));
                let mut grid = GridSpec::for_bracket(cut, bracket);
                if let Some(n) = steps {
                    grid.n_steps = n;
                }
                shoot_bound_state(scheme, &cfg.coupling, &cfg.ext, cut, &grid, bracket)
            });
            for (name, result) in [("exact", exact), ("oracle", oracle)] {
                if let Some(result) = result {
                    rows.push(BindRow { scheme: Some(scheme), cutoff: Some(*cut), method: name, result });
                }
            }
        }
    }

    let all = method == MethodArg::All;
    let k_closed = closed.as_ref().ok().and_then(|b| b.map(|b| b.k));
    let exact_k = |scheme: Option<Scheme>, cut: Option<invsq::Cutoff>| {
        rows.iter()
            .find(|r| r.method == "exact" && r.scheme == scheme && r.cutoff == cut)
            .and_then(|r| r.result.as_ref().ok().copied().flatten())
            .map(|b| b.k)
    };

    let mut table = Table::new("bind", bind_columns());
    let mut exit = EXIT_OK;
    for row in &rows {
        let head = vec![
            Cell::from(row.scheme.map_or("-", |s| s.as_str())),
            row.cutoff.map(|c| c.radius()).into(),
            row.cutoff.map(|c| c.ratio()).into(),
            row.method.into(),
        ];
        let tail = match &row.result {
            Ok(Some(b)) => {
                let dev_closed = if all && row.method != "closed-form" { k_closed.map(|kc| rel(b.k, kc)) } else { None };
                let dev_exact = if all && row.method == "oracle" {
                    exact_k(row.scheme, row.cutoff).map(|ke| rel(b.k, ke))
                } else {
                    None
                };
                vec![
                    "bound".into(),
                    b.k.into(),
                    b.energy.into(),
                    dev_closed.into(),
                    dev_exact.into(),
                    conditioning_label(b).into(),
                    Cell::Empty,
                ]
            }
            Ok(None) => vec![
                "no-bound-state".into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                no_bound_message(cfg).into(),
            ],
            Err(err) => {
                exit = fold_exit(exit, err);
                vec![
                    status_of(err).into(),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    err.to_string().into(),
                ]
            }
        };
        table.push(head.into_iter().chain(tail).collect());
    }
    Ok(Report { table, exit })
}

fn no_bound_message(cfg: &RunConfig) -> String {
    if cfg.ext.c <= 0.0 {
        format!("no bound state: c = {} <= 0", cfg.ext.c)
    } else {
        "no bound state in the scan window".into()
    }
}

// ---------------------------------------------------------------- compare

pub fn compare(cfg: &RunConfig) -> anyhow::Result<Report> {
    cfg.require_cutoffs(2)?;
    let mut table = Table::new(
        "compare",
        vec![
            ("row", "-"),
            ("R", "length"),
            ("R_over_r0", "1"),
            ("k_SW", "1/length"),
            ("k_DS", "1/length"),
            ("k_closed", "1/length"),
            ("gap_SW_DS", "1"),
            ("dev_SW_closed", "1"),
            ("dev_DS_closed", "1"),
            ("message", "-"),
        ],
    );
    let closed = closed_form_k(&cfg.coupling, &cfg.ext);
    let k_closed = closed.as_ref().ok().and_then(|b| b.map(|b| b.k));
    let mut exit = EXIT_OK;
    let mut series: [Vec<(f64, f64)>; 3] = Default::default();
    for cut in &cfg.cutoffs {
        let mut messages = Vec::new();
        let mut solve = |scheme| match solve_bound_state_exact(scheme, &cfg.coupling, &cfg.ext, cut) {
            Ok(b) => {
                if b.is_none() {
                    messages.push(format!("{scheme}: no bound state"));
                }
                b.map(|b| b.k)
            }
            Err(err) => {
                exit = fold_exit(exit, &err);
                messages.push(format!("{scheme}: {err}"));
                None
            }
        };
        let k_sw = solve(Scheme::SquareWell);
        let k_ds = solve(Scheme::DeltaShell);
        if let Err(err) = &closed {
            messages.push(format!("closed form: {err}"));
        }
        let gap = k_sw.zip(k_ds).zip(k_closed).map(|((a, b), c)| (a - b).abs() / c);
        let dev_sw = k_sw.zip(k_closed).map(|(a, c)| rel(a, c));
        let dev_ds = k_ds.zip(k_closed).map(|(a, c)| rel(a, c));
        for (s, v) in series.iter_mut().zip([gap, dev_sw, dev_ds]) {
            if let Some(v) = v {
                s.push((cut.ratio(), v));
            }
        }
        table.push(vec![
            "R".into(),
            cut.radius().into(),
            cut.ratio().into(),
            k_sw.into(),
            k_ds.into(),
            k_closed.into(),
            gap.into(),
            dev_sw.into(),
            dev_ds.into(),
            if messages.is_empty() { Cell::Empty } else { messages.join("; ").into() },
        ]);
    }
    let [gap_order, sw_order, ds_order] = series.map(|s| fitted_order(&s));
    table.push(vec![
        "order".into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        k_closed.into(),
        gap_order.into(),
        sw_order.into(),
        ds_order.into(),
        "least-squares slope of ln(deviation) against ln(R/r0)".into(),
    ]);
    Ok(Report { table, exit })
}

/// Slope of `ln y` against `ln x` over points with `y > 0`.
fn fitted_order(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

// ---------------------------------------------------------------- wave

#[derive(Debug, Clone, Default, Args)]
pub struct WaveArgs {
    /// Smallest sampled radius (default R/100).
    #[arg(long)]
    pub r_min: Option<f64>,

    /// Largest sampled radius (default 20/k, or 10 max(r0, R) at zero energy).
    #[arg(long)]
    pub r_max: Option<f64>,

    /// Number of log-spaced samples.
    #[arg(long)]
    pub points: Option<usize>,

    /// Sample the zero-energy solution instead of the bound state.
    #[arg(long)]
    pub zero_energy: bool,
}

pub fn wave(cfg: &RunConfig, args: &WaveArgs, file: &FileConfig) -> anyhow::Result<Report> {
    let [scheme] = cfg.schemes[..] else {
        return Err(usage_error("wave needs exactly one --scheme (square-well or delta-shell)"));
    };
    let [cut] = cfg.cutoffs[..] else {
        return Err(usage_error("wave needs exactly one cutoff via --R"));
    };
    let zero_energy = args.zero_energy || file.zero_energy.unwrap_or(false);
    let points = args.points.or(file.points).unwrap_or(200);
    if points < 2 {
        return Err(usage_error("--points must be at least 2"));
    }

    let solved = if zero_energy {
        PiecewiseWave::zero_energy(scheme, &cfg.coupling, &cfg.ext, &cut).map(Some)
    } else {
        solve_bound_state_exact(scheme, &cfg.coupling, &cfg.ext, &cut).and_then(|state| match state {
            Some(b) => PiecewiseWave::bound_state(scheme, &cfg.coupling, &cfg.ext, &cut, b.k)?
                .normalize()
                .map(Some),
            None => Ok(None),
        })
    };
    let unit = if zero_energy { "1" } else { "length^-1/2" };
    let mut table = Table::new("wave", vec![("r", "length"), ("u", unit)]);
    let wave = match solved {
        Ok(Some(w)) => w,
        Ok(None) => {
            table.note = Some(format!("{}; no samples", no_bound_message(cfg)));
            return Ok(Report { table, exit: EXIT_OK });
        }
        Err(err) => {
            let exit = exit_code(&err);
            table.note = Some(err.to_string());
            return Ok(Report { table, exit });
        }
    };

    let r0 = cfg.ext.r0;
    let r_min = args.r_min.or(file.r_min).unwrap_or(cut.radius() / 100.0);
    let r_max = args.r_max.or(file.r_max).unwrap_or_else(|| match wave.k {
        Some(k) => 20.0 / k,
        None => 10.0 * r0.max(cut.radius()),
    });
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(usage_error(format!("sample range needs 0 < r-min < r-max (got {r_min}, {r_max})")));
    }
    let (a, b) = (r_min.ln(), r_max.ln());
    for i in 0..points {
        let r = match i {
            0 => r_min,
            _ if i == points - 1 => r_max,
            _ => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        };
        let u = wave.value(r).map_err(|e| anyhow::anyhow!(e))?;
        table.push(vec![r.into(), u.into()]);
    }
    table.note = Some(match wave.k {
        Some(k) => format!(
            "{scheme} bound state k = {} [1/length], E = {} [1/length^2], normalized to integral u^2 dr = 1",
            format_num(k),
            format_num(-k * k)
        ),
        None => format!(
            "{scheme} zero-energy solution, exterior (r/r0)^(1/2+nu) - c (r/r0)^(1/2-nu) with unit coefficient, not normalizable"
        ),
    });
    Ok(Report { table, exit: EXIT_OK })
}
