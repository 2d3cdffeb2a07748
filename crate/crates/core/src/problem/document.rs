//! JSON problem documents. See `docs/problem-format.md` for the schema.

use std::path::Path;

use ndarray::Array2;
use serde::Deserialize;

use super::{
    Augment, Condition, Equation, Factor, InitialPolicy, LinearTerm, PointEval, ProblemSpec,
    ProductTerm, SolveSettings, TermKind, DEFAULT_MAX_ORDER,
};
use crate::basis::{BasisSpec, Family, Series};
use crate::error::{Result, TauError};
use crate::opalg::{power_to_orthogonal, KernelPoly};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDocument {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
    basis: BasisDoc,
    variables: Vec<String>,
    equations: Vec<EquationDoc>,
    #[serde(default)]
    conditions: Vec<ConditionDoc>,
    #[serde(default)]
    solve: SolveDoc,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisDoc {
    family: String,
    domain: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EquationDoc {
    terms: Vec<TermDoc>,
    #[serde(default)]
    rhs: Option<PolyDoc>,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
enum CoeffBasis {
    #[default]
    Power,
    Orthogonal,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PolyDoc {
    Bare(Vec<f64>),
    Full {
        #[serde(default)]
        basis: CoeffBasis,
        coeffs: Vec<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum KernelDoc {
    Bare(Vec<Vec<f64>>),
    Full {
        #[serde(default)]
        basis: CoeffBasis,
        coeffs: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum TermDoc {
    Diff {
        var: String,
        #[serde(default)]
        order: u32,
        #[serde(default)]
        coeff: Option<PolyDoc>,
        #[serde(default)]
        weight: Option<f64>,
    },
    Int {
        var: String,
        #[serde(default = "one_u32")]
        order: u32,
        #[serde(default)]
        coeff: Option<PolyDoc>,
        #[serde(default)]
        weight: Option<f64>,
    },
    Volterra {
        var: String,
        x0: f64,
        #[serde(default)]
        kernel: Option<KernelDoc>,
        #[serde(default)]
        order: i32,
        #[serde(default)]
        coeff: Option<PolyDoc>,
        #[serde(default)]
        weight: Option<f64>,
    },
    Fredholm {
        var: String,
        #[serde(default)]
        kernel: Option<KernelDoc>,
        #[serde(default)]
        order: i32,
        #[serde(default)]
        coeff: Option<PolyDoc>,
        #[serde(default)]
        weight: Option<f64>,
    },
    Product {
        factors: Vec<FactorDoc>,
        #[serde(default = "one_f64")]
        weight: f64,
        #[serde(default)]
        integral: Option<IntegralDoc>,
        #[serde(default)]
        augment: Option<AugmentDoc>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorDoc {
    var: String,
    #[serde(default)]
    order: i32,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum IntegralDoc {
    Volterra {
        x0: f64,
        #[serde(default)]
        kernel: Option<KernelDoc>,
    },
    Fredholm {
        #[serde(default)]
        kernel: Option<KernelDoc>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum AugmentDoc {
    Flag(bool),
    Given { at: f64, value: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionDoc {
    terms: Vec<PointDoc>,
    value: f64,
    #[serde(default)]
    equation: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    var: String,
    #[serde(default)]
    order: u32,
    at: f64,
    #[serde(default = "one_f64")]
    weight: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveDoc {
    #[serde(default = "default_n")]
    n: usize,
    #[serde(default = "default_tol")]
    newton_tol: f64,
    #[serde(default = "default_max_iter")]
    max_iter: usize,
    #[serde(default)]
    initial: Option<InitialDoc>,
    #[serde(default)]
    damping: bool,
    #[serde(default)]
    refine: bool,
    #[serde(default = "default_grid")]
    grid: usize,
}

impl Default for SolveDoc {
    fn default() -> Self {
        let s = SolveSettings::default();
        Self {
            n: s.n,
            newton_tol: s.newton_tol,
            max_iter: s.max_iter,
            initial: None,
            damping: s.damping,
            refine: s.refine,
            grid: s.grid,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum InitialDoc {
    Policy(String),
    Coeffs(Vec<Vec<f64>>),
}

fn one_u32() -> u32 {
    1
}
fn one_f64() -> f64 {
    1.0
}
fn default_n() -> usize {
    SolveSettings::default().n
}
fn default_tol() -> f64 {
    SolveSettings::default().newton_tol
}
fn default_max_iter() -> usize {
    SolveSettings::default().max_iter
}
fn default_grid() -> usize {
    SolveSettings::default().grid
}

/// Parses and validates a JSON problem document.
pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    let doc: ProblemDocument = serde_json::from_str(text).map_err(|e| {
        TauError::schema(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    let spec = Builder::new(&doc)?.build(&doc)?;
    spec.validate()?;
    Ok(spec)
}

pub fn parse_problem_file(path: impl AsRef<Path>) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_problem(&text)
}

struct Builder {
    basis: BasisSpec,
    variables: Vec<String>,
}

impl Builder {
    fn new(doc: &ProblemDocument) -> Result<Self> {
        let family = Family::from_name(&doc.basis.family)
            .map_err(|e| TauError::schema("basis.family", e.to_string()))?;
        let [a, b] = doc.basis.domain;
        let basis =
            BasisSpec::new(family, a, b).map_err(|e| TauError::schema("basis.domain", e.to_string()))?;
        for (i, v) in doc.variables.iter().enumerate() {
            if v.is_empty() || doc.variables[..i].contains(v) {
                return Err(TauError::schema(
                    format!("variables[{i}]"),
                    format!("variable name {v:?} is empty or repeated"),
                ));
            }
        }
        Ok(Self {
            basis,
            variables: doc.variables.clone(),
        })
    }

    fn var(&self, name: &str, path: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| TauError::schema(path, format!("unknown variable {name:?}")))
    }

    fn poly(&self, doc: Option<&PolyDoc>, weight: Option<f64>, path: &str) -> Result<Series> {
        let mut s = match doc {
            None => Series::constant(self.basis, 1.0),
            Some(PolyDoc::Bare(c)) => self.poly_coeffs(CoeffBasis::Power, c, path)?,
            Some(PolyDoc::Full { basis, coeffs }) => self.poly_coeffs(*basis, coeffs, path)?,
        };
        if let Some(w) = weight {
            s = s.scaled(w);
        }
        Ok(s)
    }

    fn poly_coeffs(&self, basis: CoeffBasis, coeffs: &[f64], path: &str) -> Result<Series> {
        if coeffs.is_empty() {
            return Err(TauError::schema(path, "polynomial needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(TauError::schema(path, "non-finite coefficient"));
        }
        Ok(match basis {
            CoeffBasis::Power => power_to_orthogonal(&self.basis, coeffs),
            CoeffBasis::Orthogonal => Series::new(self.basis, coeffs.to_vec()),
        })
    }

    fn kernel(&self, doc: Option<&KernelDoc>, path: &str) -> Result<KernelPoly> {
        let (basis, rows) = match doc {
            None => return Ok(KernelPoly::unit(self.basis)),
            Some(KernelDoc::Bare(rows)) => (CoeffBasis::Power, rows),
            Some(KernelDoc::Full { basis, coeffs }) => (*basis, coeffs),
        };
        let nt = rows.iter().map(Vec::len).max().unwrap_or(0);
        if rows.is_empty() || nt == 0 {
            return Err(TauError::schema(path, "kernel coefficient matrix is empty"));
        }
        let mut m = Array2::zeros((rows.len(), nt));
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(TauError::schema(path, "non-finite kernel coefficient"));
                }
                m[[i, j]] = v;
            }
        }
        let k = match basis {
            CoeffBasis::Power => KernelPoly::from_power(self.basis, &m),
            CoeffBasis::Orthogonal => KernelPoly::new(self.basis, m),
        };
        k.map_err(|e| TauError::schema(path, e.to_string()))
    }

    fn build(&self, doc: &ProblemDocument) -> Result<ProblemSpec> {
        let mut equations = Vec::with_capacity(doc.equations.len());
        for (e, eq) in doc.equations.iter().enumerate() {
            let mut linear = Vec::new();
            let mut products = Vec::new();
            for (t, term) in eq.terms.iter().enumerate() {
                let path = format!("equations[{e}].terms[{t}]");
                match term {
                    TermDoc::Diff { var, order, coeff, weight } => linear.push(LinearTerm {
                        var: self.var(var, &format!("{path}.var"))?,
                        order: *order as i32,
                        coeff: self.poly(coeff.as_ref(), *weight, &format!("{path}.coeff"))?,
                        kind: TermKind::Local,
                    }),
                    TermDoc::Int { var, order, coeff, weight } => {
                        if *order == 0 {
                            return Err(TauError::schema(
                                format!("{path}.order"),
                                "integral order must be at least 1",
                            ));
                        }
                        linear.push(LinearTerm {
                            var: self.var(var, &format!("{path}.var"))?,
                            order: -(*order as i32),
                            coeff: self.poly(coeff.as_ref(), *weight, &format!("{path}.coeff"))?,
                            kind: TermKind::Local,
                        })
                    }
                    TermDoc::Volterra { var, x0, kernel, order, coeff, weight } => {
                        linear.push(LinearTerm {
                            var: self.var(var, &format!("{path}.var"))?,
                            order: *order,
                            coeff: self.poly(coeff.as_ref(), *weight, &format!("{path}.coeff"))?,
                            kind: TermKind::Volterra {
                                kernel: self.kernel(kernel.as_ref(), &format!("{path}.kernel"))?,
                                x0: *x0,
                            },
                        })
                    }
                    TermDoc::Fredholm { var, kernel, order, coeff, weight } => {
                        linear.push(LinearTerm {
                            var: self.var(var, &format!("{path}.var"))?,
                            order: *order,
                            coeff: self.poly(coeff.as_ref(), *weight, &format!("{path}.coeff"))?,
                            kind: TermKind::Fredholm {
                                kernel: self.kernel(kernel.as_ref(), &format!("{path}.kernel"))?,
                            },
                        })
                    }
                    TermDoc::Product { factors, weight, integral, augment } => {
                        if factors.len() < 2 {
                            return Err(TauError::schema(
                                format!("{path}.factors"),
                                "a product needs at least two factors (use a linear term otherwise)",
                            ));
                        }
                        let factors = factors
                            .iter()
                            .enumerate()
                            .map(|(f, fd)| {
                                Ok(Factor {
                                    var: self.var(&fd.var, &format!("{path}.factors[{f}].var"))?,
                                    order: fd.order,
                                })
                            })
                            .collect::<Result<Vec<_>>>()?;
                        let enclosing = match integral {
                            None => TermKind::Local,
                            Some(IntegralDoc::Volterra { x0, kernel }) => TermKind::Volterra {
                                kernel: self.kernel(kernel.as_ref(), &format!("{path}.integral.kernel"))?,
                                x0: *x0,
                            },
                            Some(IntegralDoc::Fredholm { kernel }) => TermKind::Fredholm {
                                kernel: self.kernel(kernel.as_ref(), &format!("{path}.integral.kernel"))?,
                            },
                        };
                        let augment = match augment {
                            None | Some(AugmentDoc::Flag(false)) => None,
                            Some(AugmentDoc::Flag(true)) => Some(Augment::Derive),
                            Some(AugmentDoc::Given { at, value }) => {
                                Some(Augment::Given { at: *at, value: *value })
                            }
                        };
                        if augment.is_some() && !enclosing.is_integral() {
                            return Err(TauError::schema(
                                format!("{path}.augment"),
                                "augmentation needs an enclosing integral",
                            ));
                        }
                        products.push(ProductTerm { factors, weight: *weight, enclosing, augment });
                    }
                }
            }
            let rhs = match &eq.rhs {
                None => Series::zeros(self.basis, 1),
                Some(p) => self.poly(Some(p), None, &format!("equations[{e}].rhs"))?,
            };
            equations.push(Equation { linear, products, rhs });
        }

        let mut conditions = Vec::with_capacity(doc.conditions.len());
        for (i, c) in doc.conditions.iter().enumerate() {
            let path = format!("conditions[{i}]");
            if c.terms.is_empty() {
                return Err(TauError::schema(format!("{path}.terms"), "condition has no terms"));
            }
            let terms = c
                .terms
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    let here = format!("{path}.terms[{k}]");
                    if !self.basis.contains(p.at) {
                        return Err(TauError::schema(
                            format!("{here}.at"),
                            format!("point {} outside the domain {:?}", p.at, self.basis.domain()),
                        ));
                    }
                    Ok(PointEval {
                        var: self.var(&p.var, &format!("{here}.var"))?,
                        order: p.order,
                        at: p.at,
                        weight: p.weight,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(e) = c.equation {
                if e >= doc.equations.len() {
                    return Err(TauError::schema(
                        format!("{path}.equation"),
                        format!("no equation {e}"),
                    ));
                }
            }
            conditions.push(Condition { terms, value: c.value, equation: c.equation });
        }

        let s = &doc.solve;
        let initial = match &s.initial {
            None => InitialPolicy::Conditions,
            Some(InitialDoc::Policy(p)) => match p.as_str() {
                "conditions" => InitialPolicy::Conditions,
                "zero" => InitialPolicy::Zero,
                other => {
                    return Err(TauError::schema(
                        "solve.initial",
                        format!("unknown initial policy {other:?} (conditions, zero or coefficient arrays)"),
                    ))
                }
            },
            Some(InitialDoc::Coeffs(c)) => {
                if c.len() != self.variables.len() {
                    return Err(TauError::schema(
                        "solve.initial",
                        format!("{} coefficient arrays for {} variables", c.len(), self.variables.len()),
                    ));
                }
                InitialPolicy::User(c.clone())
            }
        };
        Ok(ProblemSpec {
            name: doc.name.clone().unwrap_or_else(|| "problem".into()),
            basis: self.basis,
            variables: self.variables.clone(),
            equations,
            conditions,
            settings: SolveSettings {
                n: s.n,
                newton_tol: s.newton_tol,
                max_iter: s.max_iter,
                initial,
                damping: s.damping,
                refine: s.refine,
                grid: s.grid,
                max_order: DEFAULT_MAX_ORDER,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "basis": {"family": "chebyshev", "domain": [0, 1]},
        "variables": ["y"],
        "equations": [{"terms": [
            {"kind": "diff", "var": "y", "order": 1},
            {"kind": "diff", "var": "y", "weight": -1}
        ]}],
        "conditions": [{"terms": [{"var": "y", "at": 0}], "value": 1}],
        "solve": {"n": 12}
    }"#;

    #[test]
    fn minimal_document() {
        let spec = parse_problem(MINIMAL).unwrap();
        assert_eq!(spec.variables, vec!["y"]);
        assert_eq!(spec.equations[0].linear.len(), 2);
        assert_eq!(spec.equations[0].linear[1].coeff.coeffs(), &[-1.0]);
        assert_eq!(spec.conditions.len(), 1);
        assert_eq!(spec.settings.n, 12);
        assert!(spec.is_linear());
    }

    #[test]
    fn errors_carry_positions() {
        let bad_var = MINIMAL.replace(r#""var": "y", "weight""#, r#""var": "z", "weight""#);
        match parse_problem(&bad_var) {
            Err(TauError::Schema { path, .. }) => assert_eq!(path, "equations[0].terms[1].var"),
            other => panic!("{other:?}"),
        }
        match parse_problem("{\n \"basis\": 3 }") {
            Err(TauError::Schema { path, .. }) => assert!(path.starts_with("line 2")),
            other => panic!("{other:?}"),
        }
        let bad_family = MINIMAL.replace("chebyshev", "hermite");
        assert!(matches!(parse_problem(&bad_family), Err(TauError::Schema { .. })));
        let small = MINIMAL.replace(r#""n": 12"#, r#""n": 0"#);
        assert!(matches!(parse_problem(&small), Err(TauError::DegreeTooSmall { .. })));
        let outside = MINIMAL.replace(r#""at": 0"#, r#""at": 2"#);
        match parse_problem(&outside) {
            Err(TauError::Schema { path, .. }) => assert_eq!(path, "conditions[0].terms[0].at"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn power_rhs_is_converted() {
        let doc = MINIMAL.replace(
            r#"{"kind": "diff", "var": "y", "weight": -1}
        ]}"#,
            r#"{"kind": "diff", "var": "y", "weight": -1}
        ], "rhs": {"basis": "power", "coeffs": [0, 1]}}"#,
        );
        let spec = parse_problem(&doc).unwrap();
        assert_eq!(spec.equations[0].rhs.coeffs(), &[0.5, 0.5]);
        assert_eq!(spec.lambda(), 1);
    }
}
