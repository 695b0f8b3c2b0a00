use std::fs;
use std::path::{Path, PathBuf};

use perturbreg::experiment::{aggregate, run_all, Example, ExperimentReport};
use perturbreg::fredholm::solve_fredholm_regularized;
use perturbreg::regularization::{coordinate_alpha, solve_perturbed, stabilization_sweep};
use perturbreg::stable_diff::{regularized_derivative, BaselineChoice};
use perturbreg::{CoordinationRule, Execution, GridFunction, Warning};

use crate::failure::{CliResult, Failure};
use crate::output::{csv_bytes, emit, float_rows, fmt_f64, write_atomic};
use crate::problem::{self, StabilizerKind};
use crate::samples::read_samples;

pub struct DifferentiateArgs {
    pub input: PathBuf,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub rule: CoordinationRule,
    pub baseline: BaselineArg,
    pub window: Option<f64>,
    pub out: Option<PathBuf>,
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineArg {
    Auto,
    Given { c: f64, d: f64 },
}

impl std::str::FromStr for BaselineArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim() == "auto" {
            return Ok(BaselineArg::Auto);
        }
        let bad = || format!("expected 'auto' or 'c,d', got '{s}'");
        let (c, d) = s.split_once(',').ok_or_else(bad)?;
        let c: f64 = c.trim().parse().map_err(|_| bad())?;
        let d: f64 = d.trim().parse().map_err(|_| bad())?;
        if !(c.is_finite() && d.is_finite()) {
            return Err(bad());
        }
        Ok(BaselineArg::Given { c, d })
    }
}

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn derivative_csv(derivative: &GridFunction, x_alpha: &GridFunction) -> CliResult<Vec<u8>> {
    let rows = derivative.times().zip(derivative.values()).zip(x_alpha.values()).map(|((t, d), x)| [t, *d, *x]);
    csv_bytes(&["t", "dy", "x_alpha"], float_rows(rows))
}

fn samples_csv(y: &GridFunction) -> CliResult<Vec<u8>> {
    csv_bytes(&["t", "y"], float_rows(y.times().zip(y.values()).map(|(t, v)| [t, *v])))
}

pub fn differentiate(args: DifferentiateArgs) -> CliResult<()> {
    let samples = read_samples(&read_file(&args.input)?[..])?;
    let alpha = match (args.alpha, args.delta) {
        (Some(a), _) => a,
        (None, Some(delta)) => coordinate_alpha(delta, args.rule)?,
        (None, None) => return Err(Failure::Input("need --delta or --alpha".into())),
    };
    let choice = match (args.baseline, args.window) {
        (BaselineArg::Auto, None) => BaselineChoice::Auto,
        (BaselineArg::Auto, Some(w)) => BaselineChoice::Window(w),
        (BaselineArg::Given { c, d }, None) => BaselineChoice::Given { c, d },
        (BaselineArg::Given { .. }, Some(_)) => {
            return Err(Failure::Input("--window only applies to --baseline auto".into()))
        }
    };
    let result = regularized_derivative(&samples, alpha, choice)?;

    eprintln!("alpha = {}", fmt_f64(alpha));
    match args.delta {
        Some(delta) => eprintln!("q_proxy = {}", fmt_f64(2.0 * delta / alpha)),
        None => eprintln!("q_proxy = n/a (no --delta)"),
    }
    eprintln!("boundary_layer = {}", fmt_f64(result.boundary_layer_width));
    eprintln!("baseline = {}, {}", fmt_f64(result.baseline.c), fmt_f64(result.baseline.d));
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    if args.strict {
        if let Some(w @ Warning::AlphaTooSmall { .. }) = result.warnings.first() {
            return Err(Failure::Strict(format!("--strict: {w}")));
        }
    }
    emit(args.out.as_deref(), &derivative_csv(&result.derivative, &result.x_alpha)?)
}

pub fn solve(problem_path: &Path, out: Option<&Path>) -> CliResult<()> {
    let text = String::from_utf8(read_file(problem_path)?).map_err(|e| Failure::Input(format!("problem file: {e}")))?;
    let p = problem::parse(&text)?;
    let rhs = p.rhs.as_ref().ok_or_else(|| Failure::Input("problem file: 'solve' needs 'rhs'".into()))?;
    let report = match (&p.stabilizer, p.alpha) {
        (StabilizerKind::Finite(basis), _) => solve_fredholm_regularized(&p.a_tilde, basis, rhs, &p.config, p.exact.as_ref())?,
        (StabilizerKind::Scalar, Some(alpha)) => {
            solve_perturbed(&p.a_tilde, &p.stabilizer(), alpha, rhs, &p.config, p.exact.as_ref())?
        }
        (StabilizerKind::Scalar, None) => unreachable!("scalar stabilizers always carry α"),
    };
    if report.q_exceeded {
        eprintln!("warning: q = {} is not below q_max = {}", fmt_f64(report.q_est), fmt_f64(p.config.q_max));
    }
    let mut json = serde_json::to_vec_pretty(&report).map_err(|e| Failure::Runtime(e.to_string()))?;
    json.push(b'\n');
    emit(out, &json)
}

pub fn sweep(problem_path: &Path, alphas: &[f64], out: Option<&Path>, exec: Execution) -> CliResult<()> {
    if alphas.is_empty() {
        return Err(Failure::Input("--alphas must list at least one value".into()));
    }
    let text = String::from_utf8(read_file(problem_path)?).map_err(|e| Failure::Input(format!("problem file: {e}")))?;
    let p = problem::parse(&text)?;
    let x_star = &p.exact.as_ref().ok_or_else(|| Failure::Input("problem file: 'sweep' needs 'exact_solution'".into()))?.x_star;
    let points = stabilization_sweep(p.reference_operator(), &p.stabilizer(), alphas, x_star, exec)
        .into_iter()
        .collect::<perturbreg::Result<Vec<_>>>()?;
    let rows = points.iter().map(|pt| [pt.alpha, pt.gap, pt.c_alpha_est, p.config.delta * pt.c_alpha_est]);
    emit(out, &csv_bytes(&["alpha", "S", "c_alpha_est", "q_est"], float_rows(rows))?)
}

pub struct ExperimentArgs {
    pub example: u32,
    pub deltas: Vec<f64>,
    pub seeds: usize,
    pub seed: u64,
    pub n: usize,
    pub out: PathBuf,
    pub exec: Execution,
}

fn run_stem(r: &ExperimentReport) -> String {
    format!("d{}_s{}", fmt_f64(r.delta), r.seed)
}

pub fn experiment(args: ExperimentArgs) -> CliResult<()> {
    let example = Example::try_from(args.example)?;
    if args.seeds == 0 {
        return Err(Failure::Input("--seeds must be at least 1".into()));
    }
    if let Some(d) = args.deltas.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(Failure::Input(format!("--deltas entries must be positive, got {d}")));
    }
    let seeds: Vec<u64> = (0..args.seeds as u64).map(|k| args.seed.wrapping_add(k)).collect();
    let reports = run_all(example, &args.deltas, &seeds, args.n, args.exec)?;
    fs::create_dir_all(&args.out)?;

    for r in &reports {
        let stem = run_stem(r);
        write_atomic(&args.out.join(format!("input_{stem}.csv")), &samples_csv(&r.noisy)?)?;
        write_atomic(&args.out.join(format!("run_{stem}.csv")), &derivative_csv(&r.derivative, &r.x_alpha)?)?;
    }

    let runs = reports.iter().map(|r| {
        vec![fmt_f64(r.delta), fmt_f64(r.alpha), r.seed.to_string(), fmt_f64(r.max_error_full), fmt_f64(r.max_error_interior)]
    });
    write_atomic(
        &args.out.join("runs.csv"),
        &csv_bytes(&["delta", "alpha", "seed", "max_error_full", "max_error_interior"], runs)?,
    )?;

    let table = aggregate(&reports).into_iter().map(|row| {
        vec![
            fmt_f64(row.delta),
            fmt_f64(row.alpha),
            row.seed_count.to_string(),
            fmt_f64(row.median_max_error_full),
            fmt_f64(row.median_max_error_interior),
        ]
    });
    write_atomic(
        &args.out.join("table.csv"),
        &csv_bytes(&["delta", "alpha", "seed_count", "median_max_error_full", "median_max_error_interior"], table)?,
    )?;

    // first seed of the noisiest level
    let largest = reports.iter().fold(&reports[0], |best, r| if r.delta > best.delta { r } else { best });
    let plot = largest
        .exact_derivative
        .times()
        .zip(largest.exact_derivative.values())
        .zip(largest.derivative.values())
        .map(|((t, e), c)| [t, *e, *c, c - e]);
    write_atomic(&args.out.join("plot_data.csv"), &csv_bytes(&["t", "exact", "computed", "error"], float_rows(plot))?)?;

    for r in &reports {
        for w in &r.warnings {
            eprintln!("warning ({}): {w}", run_stem(r));
        }
    }
    eprintln!("wrote {} runs to {}", reports.len(), args.out.display());
    Ok(())
}
