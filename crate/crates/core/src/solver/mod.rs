//! Tau discretization: system assembly, dense solves, the Newton loop for
//! nonlinear problems, residual diagnostics and convergence sweeps.

mod assemble;
pub mod lu;
mod report;

pub use assemble::{assemble, term_block, RowKind, TauSystem};
pub use report::{
    convergence_study, equation_defects, error_vs_exact, residual_report, ConvergenceRow, ConvergenceStudy,
    ExactFn, ResidualReport,
};

use crate::basis::{BasisSpec, Series};
use crate::error::{Result, TauError};
use crate::exec::Execution;
use crate::problem::{augment_variables, equation_lhs, initial_iterate, linearize, ProblemSpec};
use lu::Lu;

/// One completed Newton iteration (a linear problem records a single state).
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonState {
    /// 1-based iteration index.
    pub iteration: usize,
    pub iterate: Vec<Series>,
    /// `max_v |a_k - a_{k-1}|_inf` over coefficient vectors.
    pub update_norm: f64,
    /// Largest coefficient of `LHS(y_k) - f` over all equations.
    pub residual_norm: f64,
}

/// Result of a tau solve. All series have exactly `n` coefficients.
#[derive(Clone, Debug)]
pub struct TauSolution {
    pub problem: String,
    pub basis: BasisSpec,
    pub n: usize,
    /// Variable names; auxiliary variables follow the declared ones.
    pub variables: Vec<String>,
    pub series: Vec<Series>,
    pub newton: Vec<NewtonState>,
    pub converged: bool,
    pub residual: ResidualReport,
    /// Smallest `|pivot| / max|T_ij|` of the last factorization.
    pub min_pivot_ratio: f64,
    /// Number of tau systems assembled and solved.
    pub assemblies: usize,
    pub warnings: Vec<String>,
}

impl TauSolution {
    pub fn series(&self, name: &str) -> Option<&Series> {
        self.variables.iter().position(|v| v == name).map(|i| &self.series[i])
    }

    pub fn iterations(&self) -> usize {
        self.newton.len()
    }
}

/// Factors and solves an assembled system, returning the per-variable
/// coefficient vectors and the smallest pivot ratio.
pub fn solve_system(sys: &TauSystem, refine: bool) -> Result<(Vec<Series>, f64)> {
    let lu = Lu::factor(sys.matrix.clone()).map_err(|p| TauError::Singular {
        block: sys.describe_row(p.row),
        iteration: None,
    })?;
    let x = if refine { lu.solve_refined(&sys.matrix, &sys.rhs) } else { lu.solve(&sys.rhs) };
    let series = x
        .chunks(sys.n)
        .map(|c| Series::new(sys.basis, c.to_vec()))
        .collect();
    Ok((series, lu.min_pivot_ratio()))
}

/// Solves a linear problem with one assembly and one factorization.
pub fn solve_linear(spec: &ProblemSpec) -> Result<TauSolution> {
    solve_linear_with(spec, Execution::Sequential)
}

fn solve_linear_with(spec: &ProblemSpec, exec: Execution) -> Result<TauSolution> {
    let sys = assemble(spec, exec)?;
    let (series, ratio) = solve_system(&sys, spec.settings.refine)?;
    let update_norm = max_norm(&series);
    let residual_norm = coefficient_residual(spec, &series)?;
    let newton = vec![NewtonState { iteration: 1, iterate: series.clone(), update_norm, residual_norm }];
    finish(spec, series, newton, true, ratio, 1, Vec::new(), exec)
}

/// Solves any valid problem. Product terms flagged for augmentation are first
/// replaced by auxiliary variables; linear problems take a single solve and
/// nonlinear ones run Newton's method from [`initial_iterate`].
///
/// Running out of iterations is not an error: the iterate with the smallest
/// residual is returned with `converged == false`.
pub fn solve(spec: &ProblemSpec) -> Result<TauSolution> {
    solve_with(spec, Execution::Sequential)
}

/// [`solve`] with an explicit execution mode for assembly and grid evaluation.
pub fn solve_with(spec: &ProblemSpec, exec: Execution) -> Result<TauSolution> {
    spec.validate()?;
    let spec = augment_variables(spec)?;
    spec.validate()?;
    if spec.is_linear() {
        return solve_linear_with(&spec, exec);
    }
    let settings = &spec.settings;
    let (mut current, mut warnings) = initial_iterate(&spec)?;
    let mut current_residual = coefficient_residual(&spec, &current)?;
    let mut newton: Vec<NewtonState> = Vec::new();
    let mut ratio = f64::NAN;
    let mut converged = false;
    for k in 1..=settings.max_iter {
        let lin = linearize(&spec, &current)?;
        let sys = assemble::build(&lin, exec)?;
        let (mut next, r) = solve_system(&sys, settings.refine).map_err(|e| match e {
            TauError::Singular { block, .. } => TauError::Singular { block, iteration: Some(k) },
            other => other,
        })?;
        ratio = r;
        let mut residual = coefficient_residual(&spec, &next)?;
        if settings.damping {
            let mut step = 1.0;
            let full = next.clone();
            for _ in 0..6 {
                if residual <= current_residual {
                    break;
                }
                step *= 0.5;
                next = blend(&current, &full, step);
                residual = coefficient_residual(&spec, &next)?;
            }
            if step < 1.0 {
                log::debug!("iteration {k}: damped step {step}");
            }
        }
        let update_norm = current
            .iter()
            .zip(&next)
            .map(|(a, b)| a.coeffs().iter().zip(b.coeffs()).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())))
            .fold(0.0, f64::max);
        let scale = max_norm(&next).max(1.0);
        log::debug!("iteration {k}: update {update_norm:.3e}, residual {residual:.3e}");
        newton.push(NewtonState { iteration: k, iterate: next.clone(), update_norm, residual_norm: residual });
        current = next;
        current_residual = residual;
        if update_norm <= settings.newton_tol * scale {
            converged = true;
            break;
        }
    }
    let assemblies = newton.len();
    let series = if converged {
        current
    } else {
        let best = newton
            .iter()
            .min_by(|a, b| a.residual_norm.total_cmp(&b.residual_norm))
            .expect("at least one iteration");
        warnings.push(format!(
            "Newton did not converge in {} iterations; returning iteration {}",
            settings.max_iter, best.iteration
        ));
        log::warn!("{}", warnings.last().unwrap());
        best.iterate.clone()
    };
    finish(&spec, series, newton, converged, ratio, assemblies, warnings, exec)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    spec: &ProblemSpec,
    series: Vec<Series>,
    newton: Vec<NewtonState>,
    converged: bool,
    min_pivot_ratio: f64,
    assemblies: usize,
    mut warnings: Vec<String>,
    exec: Execution,
) -> Result<TauSolution> {
    let residual = residual_report(spec, &series, exec)?;
    for (i, (&d, c)) in residual.condition_defects.iter().zip(&spec.conditions).enumerate() {
        if d > 1e-12 * c.value.abs().max(1.0) {
            warnings.push(format!("condition {i} violated by {d:.3e}"));
        }
    }
    Ok(TauSolution {
        problem: spec.name.clone(),
        basis: spec.basis,
        n: spec.settings.n,
        variables: spec.variables.clone(),
        series,
        newton,
        converged,
        residual,
        min_pivot_ratio,
        assemblies,
        warnings,
    })
}

fn max_norm(series: &[Series]) -> f64 {
    series.iter().map(Series::max_abs).fold(0.0, f64::max)
}

fn blend(from: &[Series], to: &[Series], step: f64) -> Vec<Series> {
    from.iter()
        .zip(to)
        .map(|(a, b)| {
            let c = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x + step * (y - x)).collect();
            Series::new(*a.basis(), c)
        })
        .collect()
}

/// Largest coefficient of `LHS(y) - f` over all equations.
fn coefficient_residual(spec: &ProblemSpec, ys: &[Series]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for eq in &spec.equations {
        let defect = equation_lhs(eq, ys)?.add(&eq.rhs.scaled(-1.0))?;
        worst = worst.max(defect.max_abs());
    }
    Ok(worst)
}
