use ndarray::{s, Array2};

use crate::basis::BasisSpec;
use crate::error::{Result, TauError};
use crate::exec::Execution;
use crate::opalg::{
    condition_row, derivative_matrix, embedding, fredholm_apply, integral_matrix,
    poly_of_m_times, volterra_apply,
};
use crate::problem::{LinearTerm, ProblemSpec, TermKind};

/// What a row of the tau system enforces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Condition(usize),
    /// Operator row `row` (a coefficient index) of equation `equation`.
    Equation { equation: usize, row: usize },
}

/// Square tau system `T a = b` with `a` the stacked coefficient vectors.
#[derive(Clone, Debug)]
pub struct TauSystem {
    pub basis: BasisSpec,
    pub n: usize,
    pub m: usize,
    pub matrix: Array2<f64>,
    pub rhs: Vec<f64>,
    pub rows: Vec<RowKind>,
    pub nu_total: usize,
}

impl TauSystem {
    /// Human-readable owner of a row, used in singularity diagnostics.
    pub fn describe_row(&self, row: usize) -> String {
        match self.rows[row] {
            RowKind::Condition(i) => format!("condition {i}"),
            RowKind::Equation { equation, .. } => format!("equation {equation}"),
        }
    }
}

/// `n x n` block of one linear term: the leading block of the exact operator.
pub fn term_block(basis: &BasisSpec, term: &LinearTerm, n: usize) -> Array2<f64> {
    let family = basis.family();
    let kernel_growth = term.kind.kernel().map_or(0, |k| k.growth());
    let size = n + term.order.unsigned_abs() as usize + kernel_growth + term.coeff.len() + 1;
    let mut x = embedding(size, n);
    if term.order > 0 {
        let dm = derivative_matrix(basis, size);
        for _ in 0..term.order {
            x = dm.dot(&x);
        }
    } else if term.order < 0 {
        let im = integral_matrix(basis, size);
        for _ in 0..term.order.unsigned_abs() {
            x = im.dot(&x);
        }
    }
    x = match &term.kind {
        TermKind::Local => x,
        TermKind::Volterra { kernel, x0 } => volterra_apply(kernel, *x0, &x),
        TermKind::Fredholm { kernel } => fredholm_apply(kernel, &x),
    };
    let is_unit = term.coeff.coeffs().first() == Some(&1.0)
        && term.coeff.coeffs()[1..].iter().all(|&c| c == 0.0);
    if !is_unit {
        x = poly_of_m_times(family, term.coeff.coeffs(), &x);
    }
    x.slice(s![..n, ..]).to_owned()
}

/// Builds the tau system of a linear problem: all condition rows first, then
/// for each equation `e` its first `n - nu_e` operator rows.
pub fn assemble(spec: &ProblemSpec, exec: Execution) -> Result<TauSystem> {
    if !spec.is_linear() {
        return Err(TauError::Validation(
            "assemble needs a linear problem; linearize product terms first".into(),
        ));
    }
    let n = spec.settings.n;
    let (nu, lambda) = (spec.nu_total(), spec.lambda());
    if n == 0 || n < nu + lambda {
        return Err(TauError::DegreeTooSmall { n, required: (nu + lambda).max(1), nu, lambda });
    }
    build(spec, exec)
}

/// Assembly without the degree rule. Newton iterates come here: their
/// right-hand sides carry frozen products whose degree does not count
/// towards `lambda`.
pub(crate) fn build(spec: &ProblemSpec, exec: Execution) -> Result<TauSystem> {
    let n = spec.settings.n;
    let nu = spec.nu_total();
    let m = spec.num_vars();
    let per_eq = spec.conditions_per_equation();
    if let Some((e, &count)) = per_eq.iter().enumerate().find(|(_, &c)| c > n) {
        return Err(TauError::Validation(format!(
            "equation {e} carries {count} conditions but has only {n} rows"
        )));
    }
    let basis = spec.basis;
    let size = m * n;

    // operator rows of each equation, terms summed in declaration order
    let equation_rows: Vec<Array2<f64>> = exec.map(&spec.equations, |eq| {
        let mut rows = Array2::zeros((n, size));
        for term in &eq.linear {
            let block = term_block(&basis, term, n);
            let mut target = rows.slice_mut(s![.., term.var * n..(term.var + 1) * n]);
            target += &block;
        }
        rows
    });

    let mut matrix = Array2::zeros((size, size));
    let mut rhs = Vec::with_capacity(size);
    let mut rows = Vec::with_capacity(size);
    for (i, c) in spec.conditions.iter().enumerate() {
        let r = rows.len();
        for t in &c.terms {
            let values = condition_row(&basis, t.at, t.order, n);
            for (j, v) in values.into_iter().enumerate() {
                matrix[[r, t.var * n + j]] += t.weight * v;
            }
        }
        rhs.push(c.value);
        rows.push(RowKind::Condition(i));
    }
    for (e, eq) in spec.equations.iter().enumerate() {
        for k in 0..n - per_eq[e] {
            let r = rows.len();
            matrix.row_mut(r).assign(&equation_rows[e].row(k));
            rhs.push(eq.rhs.coeffs().get(k).copied().unwrap_or(0.0));
            rows.push(RowKind::Equation { equation: e, row: k });
        }
    }
    debug_assert_eq!(rows.len(), size);
    Ok(TauSystem { basis, n, m, matrix, rhs, rows, nu_total: nu })
}
