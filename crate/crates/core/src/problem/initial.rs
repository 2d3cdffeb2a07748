use ndarray::Array2;

use super::{InitialPolicy, ProblemSpec};
use crate::basis::Series;
use crate::error::Result;
use crate::opalg::condition_row;
use crate::solver::lu::Lu;

/// Starting iterate for Newton's method, one series of `n` coefficients per
/// variable, plus any warnings raised while building it.
///
/// Under the `Conditions` policy each variable gets the lowest-degree
/// polynomial satisfying the conditions that involve only that variable;
/// conflicting conditions fall back to a regularized least-squares fit.
pub fn initial_iterate(spec: &ProblemSpec) -> Result<(Vec<Series>, Vec<String>)> {
    let n = spec.settings.n;
    let m = spec.num_vars();
    let basis = spec.basis;
    let mut warnings = Vec::new();
    let series = match &spec.settings.initial {
        InitialPolicy::Zero => vec![Series::zeros(basis, n); m],
        InitialPolicy::User(coeffs) => coeffs
            .iter()
            .map(|c| Series::new(basis, c.clone()).resized(n))
            .collect(),
        InitialPolicy::Conditions => (0..m)
            .map(|v| {
                let own: Vec<_> = spec
                    .conditions
                    .iter()
                    .filter(|c| c.terms.iter().all(|t| t.var == v))
                    .collect();
                if own.is_empty() {
                    return Series::zeros(basis, n);
                }
                let k = own.len().min(n);
                let mut a = Array2::zeros((own.len(), k));
                for (i, c) in own.iter().enumerate() {
                    for t in &c.terms {
                        let row = condition_row(&basis, t.at, t.order, k);
                        for j in 0..k {
                            a[[i, j]] += t.weight * row[j];
                        }
                    }
                }
                let s: Vec<f64> = own.iter().map(|c| c.value).collect();
                let direct = if own.len() == k {
                    Lu::factor(a.clone()).ok().map(|lu| lu.solve(&s))
                } else {
                    None
                };
                let coeffs = direct.unwrap_or_else(|| {
                    warnings.push(format!(
                        "conditions on {} do not determine a unique interpolant; using a least-squares fit",
                        spec.variables[v]
                    ));
                    least_squares(&a, &s)
                });
                Series::new(basis, coeffs).resized(n)
            })
            .collect(),
    };
    Ok((series, warnings))
}

/// Minimizes `|A x - s|^2 + delta |x|^2` with a tiny `delta`.
fn least_squares(a: &Array2<f64>, s: &[f64]) -> Vec<f64> {
    let k = a.ncols();
    let ata = a.t().dot(a);
    let trace: f64 = (0..k).map(|i| ata[[i, i]]).sum();
    let delta = 1e-10 * trace.max(1.0);
    let reg = ata + Array2::<f64>::eye(k) * delta;
    let rhs = a.t().dot(&ndarray::Array1::from(s.to_vec()));
    match Lu::factor(reg) {
        Ok(lu) => lu.solve(rhs.as_slice().unwrap()),
        Err(_) => vec![0.0; k],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin;
    use crate::problem::{augment_variables, parse_problem};

    #[test]
    fn example1_starts_from_constants() {
        let spec = augment_variables(&builtin("example1").unwrap().spec().unwrap()).unwrap();
        let (ys, warnings) = initial_iterate(&spec.with_n(6)).unwrap();
        assert!(warnings.is_empty());
        for y in &ys {
            assert_eq!(y.coeffs(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn zero_policy() {
        let mut spec = builtin("example2").unwrap().spec().unwrap();
        spec.settings.initial = InitialPolicy::Zero;
        let (ys, _) = initial_iterate(&spec).unwrap();
        assert!(ys.iter().all(|y| y.is_zero() && y.len() == spec.settings.n));
    }

    const TWO: &str = r#"{"basis": {"family": "chebyshev", "domain": [0, 1]},
        "variables": ["y"],
        "equations": [{"terms": [{"kind": "diff", "var": "y", "order": 2}]}],
        "conditions": [{"terms": [{"var": "y", "at": 0}], "value": 0},
                       {"terms": [{"var": "y", "order": ORDER, "at": 0}], "value": 1}],
        "solve": {"n": 4}}"#;

    #[test]
    fn value_and_slope_give_identity() {
        let spec = parse_problem(&TWO.replace("ORDER", "1")).unwrap();
        let (ys, warnings) = initial_iterate(&spec).unwrap();
        assert!(warnings.is_empty());
        // x = (T*_0 + T*_1) / 2 on [0, 1]
        assert_eq!(ys[0].coeffs(), &[0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn conflicting_conditions_fall_back_to_least_squares() {
        let spec = parse_problem(&TWO.replace("ORDER", "0")).unwrap();
        let (ys, warnings) = initial_iterate(&spec).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!((ys[0].eval(0.0).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn user_coefficients_are_padded() {
        let mut spec = parse_problem(&TWO.replace("ORDER", "1")).unwrap();
        spec.settings.initial = InitialPolicy::User(vec![vec![0.25, 1.0]]);
        let (ys, _) = initial_iterate(&spec).unwrap();
        assert_eq!(ys[0].coeffs(), &[0.25, 1.0, 0.0, 0.0]);
    }
}
