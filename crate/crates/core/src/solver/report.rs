use std::time::Instant;

use super::{solve, TauSolution};
use crate::basis::{chebyshev_grid, orth_eval_with, Series};
use crate::error::{Result, TauError};
use crate::exec::Execution;
use crate::problem::{augment_variables, equation_lhs, ProblemSpec};

/// Closed-form solution of one variable.
pub type ExactFn = fn(f64) -> f64;

/// Defects of a solution: per equation the largest `|LHS(y_n) - f|` on a
/// Chebyshev grid, per condition `|c_i(y_n) - s_i|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub grid: Vec<f64>,
    pub equation_defects: Vec<f64>,
    pub condition_defects: Vec<f64>,
}

impl ResidualReport {
    pub fn max_equation_defect(&self) -> f64 {
        self.equation_defects.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_condition_defect(&self) -> f64 {
        self.condition_defects.iter().copied().fold(0.0, f64::max)
    }
}

pub fn residual_report(spec: &ProblemSpec, ys: &[Series], exec: Execution) -> Result<ResidualReport> {
    let (a, b) = spec.basis.domain();
    let grid = chebyshev_grid(a, b, spec.settings.grid);
    let mut equation_defects = Vec::with_capacity(spec.equations.len());
    for eq in &spec.equations {
        let defect = equation_lhs(eq, ys)?.add(&eq.rhs.scaled(-1.0))?;
        let values = orth_eval_with(&defect, &grid, exec)?;
        equation_defects.push(values.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
    }
    let mut condition_defects = Vec::with_capacity(spec.conditions.len());
    for c in &spec.conditions {
        let mut value = 0.0;
        for t in &c.terms {
            value += t.weight * ys[t.var].derivative(t.order).eval(t.at)?;
        }
        condition_defects.push((value - c.value).abs());
    }
    Ok(ResidualReport { grid, equation_defects, condition_defects })
}

/// Defect series `LHS(y) - f` of every equation. `ys` may be the output of a
/// solve, which includes auxiliary variables: the problem is augmented the
/// same way before evaluating.
pub fn equation_defects(spec: &ProblemSpec, ys: &[Series]) -> Result<Vec<Series>> {
    let spec = augment_variables(spec)?;
    if ys.len() != spec.num_vars() {
        return Err(TauError::Validation(format!(
            "{} series for {} variables",
            ys.len(),
            spec.num_vars()
        )));
    }
    spec.equations
        .iter()
        .map(|eq| equation_lhs(eq, ys)?.add(&eq.rhs.scaled(-1.0)))
        .collect()
}

/// Sup-norm error per variable on `grid`. `exact[v]` holds the exact values of
/// variable `v` at the grid points; trailing (auxiliary) variables may be
/// omitted.
pub fn error_vs_exact(sol: &TauSolution, grid: &[f64], exact: &[Vec<f64>]) -> Result<Vec<f64>> {
    error_vs_exact_with(sol, grid, exact, Execution::Sequential)
}

fn error_vs_exact_with(
    sol: &TauSolution,
    grid: &[f64],
    exact: &[Vec<f64>],
    exec: Execution,
) -> Result<Vec<f64>> {
    if exact.len() > sol.series.len() {
        return Err(TauError::Validation(format!(
            "{} exact solutions for {} variables",
            exact.len(),
            sol.series.len()
        )));
    }
    if let Some(bad) = exact.iter().position(|e| e.len() != grid.len()) {
        return Err(TauError::Validation(format!(
            "exact values of variable {bad} have {} points, grid has {}",
            exact[bad].len(),
            grid.len()
        )));
    }
    exact
        .iter()
        .zip(&sol.series)
        .map(|(e, s)| {
            let approx = orth_eval_with(s, grid, exec)?;
            Ok(approx.iter().zip(e).fold(0.0_f64, |m, (y, z)| m.max((y - z).abs())))
        })
        .collect()
}

/// Largest error over the leading variables against closed forms.
pub(crate) fn max_error_with(
    sol: &TauSolution,
    grid: &[f64],
    exact: &[ExactFn],
    exec: Execution,
) -> Result<f64> {
    let values: Vec<Vec<f64>> = exact.iter().map(|f| grid.iter().map(|&x| f(x)).collect()).collect();
    Ok(error_vs_exact_with(sol, grid, &values, exec)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// One row of a convergence sweep. A failed solve leaves the numeric fields
/// empty and records the message.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub error: Option<f64>,
    pub residual: Option<f64>,
    pub iterations: usize,
    /// Wall time, informational only.
    pub seconds: f64,
    pub converged: bool,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    /// Ordered by position in the requested list of `n`.
    pub rows: Vec<ConvergenceRow>,
    pub warnings: Vec<String>,
}

/// Solves `spec` for every `n` in `ns` and tabulates error (on `error_grid`,
/// when closed forms are given), grid residual and iteration counts. Rows are
/// independent and may run concurrently; each row is solved sequentially.
pub fn convergence_study(
    spec: &ProblemSpec,
    ns: &[usize],
    exact: Option<&[ExactFn]>,
    error_grid: &[f64],
    exec: Execution,
) -> ConvergenceStudy {
    let rows = exec.map(ns, |&n| {
        let start = Instant::now();
        let outcome = solve(&spec.with_n(n)).and_then(|sol| {
            let error = match exact {
                Some(f) => Some(max_error_with(&sol, error_grid, f, Execution::Sequential)?),
                None => None,
            };
            Ok((sol, error))
        });
        let seconds = start.elapsed().as_secs_f64();
        match outcome {
            Ok((sol, error)) => ConvergenceRow {
                n,
                error,
                residual: Some(sol.residual.max_equation_defect()),
                iterations: sol.iterations(),
                seconds,
                converged: sol.converged,
                failure: None,
            },
            Err(e) => ConvergenceRow {
                n,
                error: None,
                residual: None,
                iterations: 0,
                seconds,
                converged: false,
                failure: Some(e.to_string()),
            },
        }
    });
    let mut warnings = Vec::new();
    let mut last: Option<(usize, f64)> = None;
    for row in &rows {
        let Some(r) = row.residual else { continue };
        if let Some((n_prev, prev)) = last {
            // growth above the roundoff floor breaks the expected decay
            if r > 10.0 * prev && r > 1e-12 {
                warnings.push(format!(
                    "residual grew from {prev:.3e} (n = {n_prev}) to {r:.3e} (n = {})",
                    row.n
                ));
            }
        }
        last = Some((row.n, r));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    ConvergenceStudy { rows, warnings }
}
