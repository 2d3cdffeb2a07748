//! Problem model for systems of integro-differential equations.
//!
//! An equation is a sum of linear terms (`p(x) y^(k)`, indefinite integrals,
//! Volterra and Fredholm operators with polynomial kernels) and multilinear
//! product terms, equal to a polynomial right-hand side. Conditions are linear
//! combinations of point values of the unknowns and their derivatives.

mod augment;
mod images;
mod document;
mod initial;
mod linearize;

pub use augment::augment_variables;
pub use document::{parse_problem, parse_problem_file};
pub use initial::initial_iterate;
pub use linearize::linearize;
pub(crate) use images::equation_lhs;

use crate::basis::{BasisSpec, Series};
use crate::error::{Result, TauError};
use crate::opalg::KernelPoly;

/// Largest derivative or integral order accepted in a term.
pub const DEFAULT_MAX_ORDER: u32 = 8;

/// How a term acts after the inner derivative/antiderivative is applied.
#[derive(Clone, Debug, PartialEq)]
pub enum TermKind {
    /// No integral: `p(x) y^(order)(x)`.
    Local,
    /// `p(x) int_{x0}^{x} K(x, t) y^(order)(t) dt`.
    Volterra { kernel: KernelPoly, x0: f64 },
    /// `p(x) int_a^b K(x, t) y^(order)(t) dt`.
    Fredholm { kernel: KernelPoly },
}

impl TermKind {
    pub fn kernel(&self) -> Option<&KernelPoly> {
        match self {
            TermKind::Local => None,
            TermKind::Volterra { kernel, .. } | TermKind::Fredholm { kernel } => Some(kernel),
        }
    }

    pub fn is_integral(&self) -> bool {
        !matches!(self, TermKind::Local)
    }
}

/// A term linear in one unknown. `order > 0` differentiates, `order < 0`
/// takes repeated antiderivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearTerm {
    pub var: usize,
    pub order: i32,
    pub coeff: Series,
    pub kind: TermKind,
}

/// `y_var^(order)`, one factor of a product term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub var: usize,
    pub order: i32,
}

/// Auxiliary-variable request for a product under an integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Augment {
    /// Initial value taken from the existing point conditions.
    Derive,
    /// Initial value supplied by the user.
    Given { at: f64, value: f64 },
}

/// `weight * prod_i factor_i`, optionally inside a Volterra/Fredholm integral.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTerm {
    pub factors: Vec<Factor>,
    pub weight: f64,
    pub enclosing: TermKind,
    pub augment: Option<Augment>,
}

/// `weight * y_var^(order)(at)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointEval {
    pub var: usize,
    pub order: u32,
    pub at: f64,
    pub weight: f64,
}

/// `sum terms = value`. `equation` selects which equation gives up an operator
/// row for this condition; by default the equation with the index of the
/// first term's variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub terms: Vec<PointEval>,
    pub value: f64,
    pub equation: Option<usize>,
}

impl Condition {
    pub fn attributed_equation(&self) -> usize {
        self.equation.unwrap_or(self.terms[0].var)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub linear: Vec<LinearTerm>,
    pub products: Vec<ProductTerm>,
    pub rhs: Series,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialPolicy {
    /// Lowest-degree polynomial through each variable's own conditions.
    Conditions,
    Zero,
    /// Orthogonal coefficients per variable.
    User(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveSettings {
    /// Number of coefficients per unknown (degree `n - 1`).
    pub n: usize,
    pub newton_tol: f64,
    pub max_iter: usize,
    pub initial: InitialPolicy,
    /// Halve Newton steps (up to 6 times) while the residual grows.
    pub damping: bool,
    /// One step of iterative refinement after each LU solve.
    pub refine: bool,
    /// Points in the residual grid.
    pub grid: usize,
    pub max_order: u32,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            n: 16,
            newton_tol: 1e-14,
            max_iter: 25,
            initial: InitialPolicy::Conditions,
            damping: false,
            refine: false,
            grid: 257,
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub basis: BasisSpec,
    pub variables: Vec<String>,
    pub equations: Vec<Equation>,
    pub conditions: Vec<Condition>,
    pub settings: SolveSettings,
}

impl ProblemSpec {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn is_linear(&self) -> bool {
        self.equations.iter().all(|e| e.products.is_empty())
    }

    /// Total number of conditions.
    pub fn nu_total(&self) -> usize {
        self.conditions.len()
    }

    /// Highest right-hand side degree.
    pub fn lambda(&self) -> usize {
        self.equations.iter().map(|e| e.rhs.degree()).max().unwrap_or(0)
    }

    /// Conditions attributed to each equation.
    pub fn conditions_per_equation(&self) -> Vec<usize> {
        let mut counts = vec![0; self.equations.len()];
        for c in &self.conditions {
            if let Some(slot) = counts.get_mut(c.attributed_equation()) {
                *slot += 1;
            }
        }
        counts
    }

    pub fn with_n(&self, n: usize) -> ProblemSpec {
        let mut spec = self.clone();
        spec.settings.n = n;
        spec
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Structural checks plus the `n >= nu + lambda` rule.
    pub fn validate(&self) -> Result<()> {
        let m = self.num_vars();
        if m == 0 {
            return Err(TauError::Validation("no variables declared".into()));
        }
        if self.equations.len() != m {
            return Err(TauError::Validation(format!(
                "{} equations for {m} variables; the system must be square",
                self.equations.len()
            )));
        }
        let max_order = self.settings.max_order as i32;
        let mut highest_derivative = 0;
        let check_order = |order: i32, what: &str| -> Result<()> {
            if order.abs() > max_order {
                return Err(TauError::Validation(format!(
                    "{what}: order {order} exceeds the cap of {max_order}"
                )));
            }
            Ok(())
        };
        let check_kind = |kind: &TermKind, what: &str| -> Result<()> {
            if let Some(k) = kind.kernel() {
                crate::opalg::ensure_kernel_basis(k, &self.basis)?;
            }
            if let TermKind::Volterra { x0, .. } = kind {
                if !self.basis.contains(*x0) {
                    return Err(TauError::Validation(format!(
                        "{what}: Volterra lower limit {x0} outside the domain"
                    )));
                }
            }
            Ok(())
        };
        for (e, eq) in self.equations.iter().enumerate() {
            if eq.rhs.basis() != &self.basis {
                return Err(TauError::Validation(format!(
                    "equation {e}: right-hand side in a different basis"
                )));
            }
            for (t, term) in eq.linear.iter().enumerate() {
                let what = format!("equation {e}, term {t}");
                if term.var >= m {
                    return Err(TauError::Validation(format!("{what}: unknown variable")));
                }
                check_order(term.order, &what)?;
                check_kind(&term.kind, &what)?;
                if term.coeff.basis() != &self.basis {
                    return Err(TauError::Validation(format!(
                        "{what}: coefficient in a different basis"
                    )));
                }
                highest_derivative = highest_derivative.max(term.order);
            }
            for (t, prod) in eq.products.iter().enumerate() {
                let what = format!("equation {e}, product {t}");
                if prod.factors.len() < 2 {
                    return Err(TauError::Validation(format!(
                        "{what}: a product needs at least two factors"
                    )));
                }
                for f in &prod.factors {
                    if f.var >= m {
                        return Err(TauError::Validation(format!("{what}: unknown variable")));
                    }
                    check_order(f.order, &what)?;
                    highest_derivative = highest_derivative.max(f.order);
                }
                check_kind(&prod.enclosing, &what)?;
                if prod.augment.is_some() && !prod.enclosing.is_integral() {
                    return Err(TauError::Validation(format!(
                        "{what}: augmentation is only available for products under an integral"
                    )));
                }
            }
        }
        for (i, c) in self.conditions.iter().enumerate() {
            if c.terms.is_empty() {
                return Err(TauError::Validation(format!("condition {i} has no terms")));
            }
            for t in &c.terms {
                if t.var >= m {
                    return Err(TauError::Validation(format!("condition {i}: unknown variable")));
                }
                if !self.basis.contains(t.at) {
                    return Err(TauError::Validation(format!(
                        "condition {i}: point {} outside the domain {:?}",
                        t.at,
                        self.basis.domain()
                    )));
                }
            }
            if c.attributed_equation() >= m {
                return Err(TauError::Validation(format!(
                    "condition {i}: attributed to missing equation {}",
                    c.attributed_equation()
                )));
            }
        }
        if highest_derivative > 0 && self.conditions.is_empty() {
            return Err(TauError::Validation(
                "the system has derivative terms but no conditions".into(),
            ));
        }
        let n = self.settings.n;
        let (nu, lambda) = (self.nu_total(), self.lambda());
        if n == 0 || n < nu + lambda {
            return Err(TauError::DegreeTooSmall {
                n,
                required: (nu + lambda).max(1),
                nu,
                lambda,
            });
        }
        for (e, &count) in self.conditions_per_equation().iter().enumerate() {
            if count > n {
                return Err(TauError::Validation(format!(
                    "equation {e} carries {count} conditions but has only {n} rows"
                )));
            }
        }
        if !(self.settings.newton_tol > 0.0) || self.settings.max_iter == 0 {
            return Err(TauError::Validation(
                "newton_tol must be positive and max_iter at least 1".into(),
            ));
        }
        if self.settings.grid == 0 {
            return Err(TauError::Validation("residual grid needs at least one point".into()));
        }
        Ok(())
    }
}
