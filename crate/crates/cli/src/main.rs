//! `tauspec` command-line front end.

mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tauspec::basis::{orth_eval, uniform_grid};
use tauspec::solution::SolutionFile;
use tauspec::solver::{convergence_study, equation_defects, error_vs_exact, solve_with};
use tauspec::{Execution, TauError};

use input::Input;
use output::Sink;

#[derive(Parser, Debug)]
#[command(name = "tauspec", version, about = "Lanczos tau solver for integro-differential systems")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a problem file or built-in problem.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Number of coefficients per unknown.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve for several n and tabulate error, residual and iterations.
    Convergence {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Comma-separated list of n.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Uniform points used for the error against a known solution.
        #[arg(long, default_value_t = 1001)]
        points: usize,
        /// Solve the rows one after another instead of concurrently.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate a stored solution at given points.
    Eval {
        /// Solution file written by `solve --format json`.
        solution: PathBuf,
        /// Comma-separated evaluation points.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        points: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit |error| (or residual) curves on a uniform grid as CSV.
    Plotdata {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        n: Option<usize>,
        /// Number of uniform grid points.
        #[arg(long, default_value_t = 501)]
        points: usize,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in reference problems.
    ListExamples,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Problem document path or built-in name.
    problem: String,
    /// Override the basis family.
    #[arg(long, value_enum)]
    basis: Option<BasisArg>,
    /// Newton tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Points in the residual grid.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_enum)]
    initial: Option<InitialArg>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BasisArg {
    Chebyshev,
    Legendre,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InitialArg {
    Conditions,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Exit status of a finished command.
enum Status {
    Ok,
    NotConverged,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            let singular = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<TauError>(), Some(TauError::Singular { .. })));
            ExitCode::from(if singular { 3 } else { 1 })
        }
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn run(command: Command) -> Result<Status> {
    match command {
        Command::Solve { problem, n, out } => cmd_solve(&problem, n, &out),
        Command::Convergence { problem, n, points, sequential, out } => {
            cmd_convergence(&problem, &n, points, execution(sequential), &out)
        }
        Command::Eval { solution, points, out } => cmd_eval(&solution, &points, &out),
        Command::Plotdata { problem, n, points, out } => cmd_plotdata(&problem, n, points, out),
        Command::ListExamples => {
            for b in tauspec::builtin::builtins() {
                println!("{:<14} {}", b.name, b.summary);
            }
            Ok(Status::Ok)
        }
    }
}

fn cmd_solve(args: &ProblemArgs, n: Option<usize>, out: &OutputArgs) -> Result<Status> {
    let input = Input::load(args, n)?;
    let sol = solve_with(&input.spec, Execution::Sequential)?;
    let mut file = SolutionFile::from_solution(&sol);
    if let Some(exact) = input.exact {
        let (a, b) = sol.basis.domain();
        let grid = uniform_grid(a, b, 1001);
        let values: Vec<Vec<f64>> = exact.iter().map(|f| grid.iter().map(|&x| f(x)).collect()).collect();
        file.max_error = Some(error_vs_exact(&sol, &grid, &values)?);
    }
    let mut sink = Sink::open(out.out.as_deref())?;
    output::write_solution(&mut sink, out.format, &file, &sol.warnings)?;
    sink.finish()?;
    Ok(if sol.converged { Status::Ok } else { Status::NotConverged })
}

fn cmd_convergence(
    args: &ProblemArgs,
    ns: &[usize],
    points: usize,
    exec: Execution,
    out: &OutputArgs,
) -> Result<Status> {
    if ns.is_empty() {
        bail!("--n needs at least one value");
    }
    if points == 0 {
        bail!("--points must be at least 1");
    }
    let input = Input::load(args, None)?;
    let (a, b) = input.spec.basis.domain();
    let grid = uniform_grid(a, b, points);
    let study = convergence_study(&input.spec, ns, input.exact, &grid, exec);
    let mut sink = Sink::open(out.out.as_deref())?;
    output::write_convergence(&mut sink, out.format, &input.spec.name, &study)?;
    sink.finish()?;
    for row in study.rows.iter().filter(|r| r.failure.is_some()) {
        eprintln!("n = {}: {}", row.n, row.failure.as_deref().unwrap_or_default());
    }
    if study.rows.iter().all(|r| r.failure.is_some()) {
        bail!("every solve in the sweep failed");
    }
    Ok(Status::Ok)
}

fn cmd_eval(path: &std::path::Path, points: &str, out: &OutputArgs) -> Result<Status> {
    let points = points
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().with_context(|| format!("bad evaluation point {p:?}")))
        .collect::<Result<Vec<_>>>()?;
    if points.is_empty() {
        bail!("no evaluation points given (use --points x1,x2,...)");
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = SolutionFile::from_json(&text).with_context(|| format!("in {}", path.display()))?;
    let mut columns = Vec::new();
    for (name, series) in file.series() {
        columns.push((name, orth_eval(&series, &points)?));
    }
    let mut sink = Sink::open(out.out.as_deref())?;
    output::write_columns(&mut sink, out.format, "x", &points, &columns, None)?;
    sink.finish()?;
    Ok(Status::Ok)
}

fn cmd_plotdata(args: &ProblemArgs, n: Option<usize>, points: usize, out: Option<PathBuf>) -> Result<Status> {
    if points == 0 {
        bail!("--points must be at least 1");
    }
    let input = Input::load(args, n)?;
    let sol = solve_with(&input.spec, Execution::Sequential)?;
    let (a, b) = sol.basis.domain();
    let grid = uniform_grid(a, b, points);
    let mut columns = Vec::new();
    let note = match input.exact {
        Some(exact) => {
            for (f, (name, series)) in exact.iter().zip(sol.variables.iter().zip(&sol.series)) {
                let approx = orth_eval(series, &grid)?;
                let err = approx.iter().zip(&grid).map(|(y, &x)| (y - f(x)).abs()).collect();
                columns.push((format!("abs_error_{name}"), err));
            }
            None
        }
        None => {
            for (e, defect) in equation_defects(&input.spec, &sol.series)?.iter().enumerate() {
                let values = orth_eval(defect, &grid)?.iter().map(|v| v.abs()).collect();
                columns.push((format!("abs_residual_eq{e}"), values));
            }
            Some("no exact solution available; columns are equation residuals")
        }
    };
    let mut sink = Sink::open(out.as_deref())?;
    output::write_columns(&mut sink, Format::Csv, "x", &grid, &columns, note)?;
    sink.finish()?;
    Ok(if sol.converged { Status::Ok } else { Status::NotConverged })
}
