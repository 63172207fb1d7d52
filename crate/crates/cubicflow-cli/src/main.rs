mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cubicflow::algebra::C64;
use cubicflow::constraints::{
    complete_pair, constraint_residuals, solve_first_for, solve_second_for, Completion, ConstraintReport,
};
use cubicflow::integrator::{integrate, OdeProblem, Solution, Tolerances};
use cubicflow::inversion::{invert, InversionResult};
use cubicflow::isochronous::{detect_period, solve_tilde, IsochronousSystem, PeriodReport, DEFAULT_K_MAX};
use cubicflow::model::{
    forward, k_values, rhs_eval, spectral, Coeff, CoefficientSet, KValues, ParameterSet, SpectralData,
};
use cubicflow::reduced::{
    reduced_alpha, reduced_constraint_residuals, reduced_invert, reduced_pair_solve, GIndex, ReducedCompletion,
    ReducedRadicals, ReducedReport,
};
use cubicflow::solver::{solve_ivp, IvpSpec, Trajectory};
use cubicflow::{Error, ErrorClass, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::io::{num, parse_coeff_list, Envelope, Input, Sink, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "cubicflow", version, about = "Solve, invert and check solvable two-variable cubic ODE systems")]
struct Cli {
    /// Input JSON: a file path, or inline JSON starting with '{'
    #[arg(long, global = true)]
    input: Option<String>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Integrator relative tolerance (absolute is 1e-2 of it); recurrence
    /// threshold for `isochron`
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized sweeps
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Real time grid t0:t1:n
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Frequency of the isochronous extension
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Largest multiple of the period searched by `isochron`
    #[arg(long, global = true, default_value_t = DEFAULT_K_MAX)]
    kmax: u32,
    /// Also integrate numerically and append deviation columns
    #[arg(long, global = true)]
    oracle: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficients, K-values and spectral data from parameters
    Forward,
    /// Closed-form trajectory as CSV
    Solve,
    /// Runge-Kutta trajectory of the cubic system as CSV
    Integrate,
    /// Recover parameters from coefficients
    Invert,
    /// Constraint residuals and invertibility of coefficients
    Check,
    /// Solve for one or two missing coefficients
    Complete {
        /// Unknown coefficients, e.g. c11 or c12,c23 (default: those absent from the input)
        #[arg(long)]
        missing: Option<String>,
    },
    /// Period detection for the isochronous extension (CSV trajectory with --grid)
    Isochron,
    /// Reduced system: residuals, inversion, or pair completion
    Reduced {
        /// Unknown pair, e.g. g12,g21 (default: those absent from the input)
        #[arg(long)]
        missing: Option<String>,
    },
    /// Seeded round-trip sweep over random real parameters
    Sweep {
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

fn tolerances(tol: Option<f64>) -> Result<Tolerances> {
    match tol {
        None => Ok(Tolerances::default()),
        Some(t) if t > 0.0 && t.is_finite() => Ok(Tolerances { rtol: t, atol: 1e-2 * t }),
        Some(t) => Err(Error::Validation(format!("tolerance must be positive, got {t}"))),
    }
}

fn coefficients_of(input: &Input) -> Result<CoefficientSet> {
    match (&input.coefficients, &input.parameters) {
        (Some(c), _) => c.complete(),
        (None, Some(p)) => forward(p),
        (None, None) => Err(Error::Validation("coefficients or parameters required".into())),
    }
}

fn parameters_of(input: &Input) -> Result<ParameterSet> {
    match (&input.parameters, &input.coefficients) {
        (Some(p), _) => Ok(*p),
        (None, Some(c)) => Ok(invert(&c.complete()?)?.parameters),
        (None, None) => Err(Error::Validation("parameters or coefficients required".into())),
    }
}

fn with_zero(times: &[C64]) -> Vec<C64> {
    let mut path = times.to_vec();
    if path.first().is_none_or(|t| t.norm() != 0.0) {
        path.insert(0, C64::new(0.0, 0.0));
    }
    path
}

/// Runge-Kutta states at `times` (a leading `0` implied), `None` past a blow-up.
fn rk_states(c: &CoefficientSet, x0: [C64; 2], times: &[C64], tol: Tolerances) -> Result<Vec<Option<[C64; 2]>>> {
    let rhs = |_: C64, x: &[C64], d: &mut [C64]| {
        let (d1, d2) = rhs_eval(c, x[0], x[1]);
        d[0] = d1;
        d[1] = d2;
    };
    let path = with_zero(times);
    let skip = path.len() - times.len();
    let sol: Solution = integrate(&OdeProblem { rhs: &rhs, y0: x0.to_vec(), path, tol })?;
    if let Some(t) = sol.blowup {
        log::warn!("integration stopped near t = {t}");
    }
    Ok((0..times.len()).map(|i| sol.states.get(i + skip).map(|s| [s[0], s[1]])).collect())
}

fn sup_dist(x: [C64; 2], y: [C64; 2]) -> f64 {
    (x[0] - y[0]).norm().max((x[1] - y[1]).norm())
}

fn sup_norm(x: [C64; 2]) -> f64 {
    x[0].norm().max(x[1].norm())
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Trajectory table. `im t` is added only for non-real grids; oracle
/// columns only when `oracle` is given.
fn trajectory_table(
    times: &[C64],
    states: &[[C64; 2]],
    residuals: Option<&[f64]>,
    oracle: Option<&[Option<[C64; 2]>]>,
) -> Table {
    let complex_t = times.iter().any(|t| t.im != 0.0);
    let mut header = vec!["t".to_string()];
    if complex_t {
        header.push("im t".into());
    }
    header.extend(["re x1", "im x1", "re x2", "im x2", "residual"].map(String::from));
    if oracle.is_some() {
        header.extend(["rk re x1", "rk im x1", "rk re x2", "rk im x2", "deviation"].map(String::from));
    }
    let rows = states
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let t = times[i];
            let mut r = vec![num(t.re)];
            if complex_t {
                r.push(num(t.im));
            }
            r.extend([x[0].re, x[0].im, x[1].re, x[1].im].map(num));
            r.push(residuals.map_or(String::new(), |res| num(res[i])));
            if let Some(o) = oracle {
                match o.get(i).copied().flatten() {
                    Some(y) => {
                        r.extend([y[0].re, y[0].im, y[1].re, y[1].im].map(num));
                        r.push(num(sup_dist(*x, y) / sup_norm(y).max(f64::MIN_POSITIVE)));
                    }
                    None => r.extend(std::iter::repeat_n(String::new(), 5)),
                }
            }
            r
        })
        .collect();
    Table { header, rows }
}

#[derive(Serialize)]
struct ForwardReport {
    parameters: ParameterSet,
    coefficients: CoefficientSet,
    k_values: KValues,
    spectral: SpectralData,
}

#[derive(Serialize)]
struct InvertReport {
    #[serde(flatten)]
    inversion: InversionResult,
    spectral: SpectralData,
}

#[derive(Serialize)]
struct CheckReport {
    coefficients: CoefficientSet,
    constraints: ConstraintReport,
    invertible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameters: Option<ParameterSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inversion_error: Option<String>,
}

#[derive(Serialize)]
struct SingleReport {
    missing: Coeff,
    /// Values making the first constraint vanish.
    first: Vec<C64>,
    /// Values making the second constraint vanish.
    second: Vec<C64>,
    /// Completions satisfying both constraints.
    completions: Vec<CoefficientSet>,
}

#[derive(Serialize)]
struct PairReport {
    missing: [Coeff; 2],
    completions: Vec<Completion>,
}

#[derive(Serialize)]
struct IsochronReport {
    omega: f64,
    period_tilde: f64,
    #[serde(flatten)]
    period: PeriodReport,
}

#[derive(Serialize)]
struct ReducedCheck {
    residuals: ReducedReport,
    radicals: ReducedRadicals,
    alpha: Option<C64>,
    full: CoefficientSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameters: Option<ParameterSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inversion_error: Option<String>,
}

#[derive(Serialize)]
struct ReducedPair {
    missing: [GIndex; 2],
    completions: Vec<ReducedCompletion>,
}

#[derive(Serialize)]
struct SweepReport {
    seed: u64,
    count: usize,
    worst_constraint_residual: f64,
    worst_round_trip: f64,
    inversion_failures: usize,
    constraint_violations: usize,
}

fn emit<T: Serialize>(sink: &Sink, command: &str, body: T) -> Result<()> {
    sink.json(&Envelope { schema_version: SCHEMA_VERSION, command, body })
}

fn run(cli: &Cli) -> Result<()> {
    let input = Input::load(cli.input.as_deref())?;
    let sink = Sink::new(cli.output.as_deref());
    let grid = cli.grid.as_deref();
    match &cli.command {
        Command::Forward => {
            let p = input.parameters.ok_or_else(|| Error::Validation("parameters required".into()))?;
            let report = ForwardReport {
                parameters: p,
                coefficients: forward(&p)?,
                k_values: k_values(&p),
                spectral: spectral(p.gamma1, p.gamma2, p.gamma3),
            };
            emit(&sink, "forward", report)
        }
        Command::Solve => {
            let x0 = input.x0()?;
            let times = input.times(grid)?;
            let p = parameters_of(&input)?;
            let traj: Trajectory = solve_ivp(&IvpSpec::new(p, x0, times.clone()))?;
            if let Some(t) = traj.singularity {
                log::warn!("trajectory truncated at singularity near t = {t}");
            }
            let oracle =
                if cli.oracle { Some(rk_states(&forward(&p)?, x0, &traj.times, tolerances(cli.tol)?)?) } else { None };
            let table = trajectory_table(&traj.times, &traj.states, Some(&traj.implicit_residuals), oracle.as_deref());
            sink.csv(&table.header, &table.rows)
        }
        Command::Integrate => {
            let c = coefficients_of(&input)?;
            let times = input.times(grid)?;
            let states = rk_states(&c, input.x0()?, &times, tolerances(cli.tol)?)?;
            let reached: Vec<[C64; 2]> = states.iter().map_while(|s| *s).collect();
            let table = trajectory_table(&times, &reached, None, None);
            sink.csv(&table.header, &table.rows)
        }
        Command::Invert => {
            let c = coefficients_of(&input)?;
            let inversion = invert(&c)?;
            let q = inversion.parameters;
            emit(&sink, "invert", InvertReport { spectral: spectral(q.gamma1, q.gamma2, q.gamma3), inversion })
        }
        Command::Check => {
            let c = coefficients_of(&input)?;
            let constraints = constraint_residuals(&c);
            let inv = invert(&c);
            let report = CheckReport {
                coefficients: c,
                constraints,
                invertible: inv.is_ok(),
                parameters: inv.as_ref().ok().map(|r| r.parameters),
                inversion_error: inv.err().map(|e| e.to_string()),
            };
            emit(&sink, "check", report)
        }
        Command::Complete { missing } => {
            let partial =
                input.coefficients.as_ref().ok_or_else(|| Error::Validation("coefficients required".into()))?;
            let unknowns: Vec<Coeff> = match missing {
                Some(m) => parse_coeff_list(m)?,
                None => partial.missing(),
            };
            let base = partial.filled();
            match *unknowns.as_slice() {
                [k] => {
                    let first = solve_first_for(&base, k)?;
                    let second = solve_second_for(&base, k)?;
                    let mut completions: Vec<CoefficientSet> = Vec::new();
                    for &v in &first {
                        let c = base.with(k, v);
                        let ok = constraint_residuals(&c).max_residual() < cubicflow::constraints::COMPLETION_TOL;
                        if ok && !completions.iter().any(|d| d.relative_distance(&c) < 1e-10) {
                            completions.push(c);
                        }
                    }
                    emit(&sink, "complete", SingleReport { missing: k, first, second, completions })
                }
                [p, q] => {
                    emit(&sink, "complete", PairReport { missing: [p, q], completions: complete_pair(&base, p, q)? })
                }
                _ => Err(Error::Validation("complete needs one or two unknown coefficients".into())),
            }
        }
        Command::Isochron => {
            let omega = input.omega(cli.omega)?;
            let x0 = input.x0()?;
            if grid.is_some() || input.grid.is_some() || input.times.is_some() {
                let p = parameters_of(&input)?;
                let times = input.times(grid)?;
                let ts: Vec<f64> = times
                    .iter()
                    .map(|t| {
                        if t.im == 0.0 {
                            Ok(t.re)
                        } else {
                            Err(Error::Validation("isochron needs real times".into()))
                        }
                    })
                    .collect::<Result<_>>()?;
                let traj = solve_tilde(&p, omega, x0, &ts)?;
                let oracle = if cli.oracle {
                    let sys = IsochronousSystem::new(forward(&p)?, omega)?;
                    let mut grid_with_zero = ts.clone();
                    if ts.first() != Some(&0.0) {
                        grid_with_zero.insert(0, 0.0);
                    }
                    let sol = sys.integrate(x0, &grid_with_zero, tolerances(cli.tol)?)?;
                    let skip = grid_with_zero.len() - ts.len();
                    Some((0..ts.len()).map(|i| sol.states.get(i + skip).map(|s| [s[0], s[1]])).collect::<Vec<_>>())
                } else {
                    None
                };
                let table =
                    trajectory_table(&traj.times, &traj.states, Some(&traj.implicit_residuals), oracle.as_deref());
                return sink.csv(&table.header, &table.rows);
            }
            let c = coefficients_of(&input)?;
            let period = detect_period(&c, omega, x0, cli.kmax, cli.tol.unwrap_or(1e-6))?;
            let sys = IsochronousSystem::new(c, omega)?;
            emit(&sink, "isochron", IsochronReport { omega, period_tilde: sys.period_tilde, period })
        }
        Command::Reduced { missing } => {
            let partial =
                input.reduced.as_ref().ok_or_else(|| Error::Validation("reduced coefficients required".into()))?;
            let unknowns: Vec<GIndex> = match missing {
                Some(m) => parse_coeff_list(m)?,
                None => partial.missing(),
            };
            let g = partial.filled();
            match unknowns.as_slice() {
                [] => {
                    let inv = reduced_invert(&g);
                    let report = ReducedCheck {
                        residuals: reduced_constraint_residuals(&g),
                        radicals: g.radicals(),
                        alpha: reduced_alpha(&g),
                        full: g.to_full(),
                        parameters: inv.as_ref().ok().copied(),
                        inversion_error: inv.err().map(|e| e.to_string()),
                    };
                    emit(&sink, "reduced", report)
                }
                &[p, q] => {
                    emit(&sink, "reduced", ReducedPair { missing: [p, q], completions: reduced_pair_solve(&g, p, q)? })
                }
                _ => Err(Error::Validation("reduced needs zero or two unknown coefficients".into())),
            }
        }
        Command::Sweep { count } => emit(&sink, "sweep", sweep(cli.seed, *count)),
    }
}

/// Random real parameters with entries in [-3, 3], forward map, constraint
/// check and inversion round trip.
fn sweep(seed: u64, count: usize) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SweepReport {
        seed,
        count,
        worst_constraint_residual: 0.0,
        worst_round_trip: 0.0,
        inversion_failures: 0,
        constraint_violations: 0,
    };
    let mut done = 0;
    while done < count {
        let v: [f64; 7] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
        let Ok(p) = ParameterSet::real([v[0], v[1]], [v[2], v[3]], [v[4], v[5], v[6]]) else { continue };
        if p.c().norm() < 0.1 {
            continue;
        }
        let Ok(c) = forward(&p) else { continue };
        done += 1;
        let res = constraint_residuals(&c);
        report.worst_constraint_residual = report.worst_constraint_residual.max(res.max_residual());
        report.constraint_violations += usize::from(!res.satisfied);
        match invert(&c).and_then(|r| forward(&r.parameters)) {
            Ok(back) => report.worst_round_trip = report.worst_round_trip.max(back.relative_distance(&c)),
            Err(e) => {
                log::info!("inversion failed: {e}");
                report.inversion_failures += 1;
            }
        }
    }
    report
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Validation => 2,
        ErrorClass::Numerical => 3,
        ErrorClass::Constraint => 4,
    }
}

fn class_name(e: &Error) -> &'static str {
    match e.class() {
        ErrorClass::Validation => "validation",
        ErrorClass::Numerical => "numerical",
        ErrorClass::Constraint => "constraint",
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CUBICFLOW_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = serde_json::json!({ "error": { "class": class_name(&e), "message": e.to_string() } });
            eprintln!("{msg}");
            ExitCode::from(exit_code(&e))
        }
    }
}
