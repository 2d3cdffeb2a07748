//! Reference problems shipped with the library, each with a closed-form
//! solution. The documents are the files under `problems/`, embedded verbatim.

use crate::error::Result;
use crate::problem::{parse_problem, ProblemSpec};
use crate::solver::ExactFn;

#[derive(Debug)]
pub struct Builtin {
    pub name: &'static str,
    pub summary: &'static str,
    /// The JSON problem document.
    pub document: &'static str,
    /// Exact solution of each declared variable.
    pub exact: &'static [ExactFn],
}

impl Builtin {
    pub fn spec(&self) -> Result<ProblemSpec> {
        parse_problem(self.document)
    }
}

static BUILTINS: [Builtin; 4] = [
    Builtin {
        name: "example1",
        summary: "nonlinear Fredholm integro-differential equation, exact exp(-x)",
        document: include_str!("../problems/example1.json"),
        exact: &[exp_neg],
    },
    Builtin {
        name: "example2",
        summary: "nonlinear Volterra integro-differential system, exact (sinh x, cosh x)",
        document: include_str!("../problems/example2.json"),
        exact: &[f64::sinh, f64::cosh],
    },
    Builtin {
        name: "exp-ode",
        summary: "y' - y = 0, y(0) = 1, exact exp(x)",
        document: include_str!("../problems/exp-ode.json"),
        exact: &[f64::exp],
    },
    Builtin {
        name: "volterra-exp",
        summary: "y - int_0^x y = 1, exact exp(x)",
        document: include_str!("../problems/volterra-exp.json"),
        exact: &[f64::exp],
    },
];

fn exp_neg(x: f64) -> f64 {
    (-x).exp()
}

pub fn builtins() -> &'static [Builtin] {
    &BUILTINS
}

pub fn builtin(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_documents_parse() {
        for b in builtins() {
            let spec = b.spec().unwrap();
            assert_eq!(spec.name, b.name);
            assert_eq!(spec.num_vars(), b.exact.len());
        }
    }
}
