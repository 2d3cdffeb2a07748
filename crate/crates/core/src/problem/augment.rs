use std::collections::BTreeMap;

use super::{
    Augment, Condition, Equation, Factor, LinearTerm, PointEval, ProblemSpec, ProductTerm,
    TermKind,
};
use crate::basis::Series;
use crate::error::{Result, TauError};

/// Replaces every flagged product under an integral by an auxiliary unknown.
///
/// For `z = u_1 ... u_m` the new equation is `z' - sum_i u_1 .. u_i' .. u_m = 0`
/// (a product term per `i`, identical ones merged) with `z(x_c) = prod u_i(x_c)`
/// taken from point conditions on the factors at a common point `x_c`, or the
/// value supplied with the flag. The integral then acts linearly on `z`.
pub fn augment_variables(spec: &ProblemSpec) -> Result<ProblemSpec> {
    let mut out = spec.clone();
    let basis = spec.basis;
    let mut new_equations = Vec::new();
    for e in 0..out.equations.len() {
        let products = std::mem::take(&mut out.equations[e].products);
        for prod in products {
            let Some(flag) = prod.augment else {
                out.equations[e].products.push(prod);
                continue;
            };
            let aux = out.variables.len();
            let name = aux_name(&out.variables, &prod.factors);
            let (at, value) = match flag {
                Augment::Given { at, value } => (at, value),
                Augment::Derive => derive_initial(spec, &prod.factors).ok_or_else(|| {
                    TauError::Validation(format!(
                        "cannot determine the initial value of auxiliary variable {name}: \
                         no common point where every factor is fixed by a condition; \
                         supply \"augment\": {{\"at\": x, \"value\": v}}"
                    ))
                })?,
            };
            out.variables.push(name);

            let mut merged: BTreeMap<Vec<Factor>, f64> = BTreeMap::new();
            for i in 0..prod.factors.len() {
                let mut factors = prod.factors.clone();
                factors[i].order += 1;
                factors.sort();
                *merged.entry(factors).or_insert(0.0) -= 1.0;
            }
            let defining = Equation {
                linear: vec![LinearTerm {
                    var: aux,
                    order: 1,
                    coeff: Series::constant(basis, 1.0),
                    kind: TermKind::Local,
                }],
                products: merged
                    .into_iter()
                    .map(|(factors, weight)| ProductTerm {
                        factors,
                        weight,
                        enclosing: TermKind::Local,
                        augment: None,
                    })
                    .collect(),
                rhs: Series::zeros(basis, 1),
            };
            new_equations.push((
                defining,
                Condition {
                    terms: vec![PointEval { var: aux, order: 0, at, weight: 1.0 }],
                    value,
                    equation: Some(aux),
                },
            ));
            out.equations[e].linear.push(LinearTerm {
                var: aux,
                order: 0,
                coeff: Series::constant(basis, prod.weight),
                kind: prod.enclosing,
            });
        }
    }
    for (eq, cond) in new_equations {
        out.equations.push(eq);
        out.conditions.push(cond);
    }
    Ok(out)
}

fn aux_name(existing: &[String], factors: &[Factor]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for f in factors {
        let base = &existing[f.var];
        parts.push(match f.order {
            0 => base.clone(),
            k if k > 0 => format!("{base}{}", "'".repeat(k as usize)),
            k => format!("I{}({base})", -k),
        });
    }
    let mut name = parts.join("*");
    while existing.contains(&name) {
        name.push('_');
    }
    name
}

/// Value of `prod u_i` at a point where every factor is pinned by a
/// single-term condition.
fn derive_initial(spec: &ProblemSpec, factors: &[Factor]) -> Option<(f64, f64)> {
    let pinned = |f: &Factor, at: f64| -> Option<f64> {
        if f.order < 0 {
            return None;
        }
        spec.conditions.iter().find_map(|c| match c.terms.as_slice() {
            [t] if t.var == f.var && t.order == f.order as u32 && t.at == at && t.weight != 0.0 => {
                Some(c.value / t.weight)
            }
            _ => None,
        })
    };
    let candidates = spec.conditions.iter().filter_map(|c| match c.terms.as_slice() {
        [t] => Some(t.at),
        _ => None,
    });
    for at in candidates {
        let values: Option<Vec<f64>> = factors.iter().map(|f| pinned(f, at)).collect();
        if let Some(v) = values {
            return Some((at, v.iter().product()));
        }
    }
    None
}
