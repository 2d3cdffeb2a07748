use anyhow::{bail, Context, Result};
use serde_json::Value;
use tauspec::builtin::builtin;
use tauspec::problem::InitialPolicy;
use tauspec::solver::ExactFn;
use tauspec::{parse_problem, ProblemSpec};

use super::{BasisArg, InitialArg, ProblemArgs};

/// A problem ready to solve plus its closed-form solution when built in.
pub struct Input {
    pub spec: ProblemSpec,
    pub exact: Option<&'static [ExactFn]>,
}

impl Input {
    /// Resolves the problem argument (existing file first, then built-in name)
    /// and applies command-line overrides.
    pub fn load(args: &ProblemArgs, n: Option<usize>) -> Result<Input> {
        let path = std::path::Path::new(&args.problem);
        let (text, exact) = if path.is_file() {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            (text, None)
        } else if let Some(b) = builtin(&args.problem) {
            (b.document.to_string(), Some(b.exact))
        } else {
            bail!(
                "{:?} is neither a readable file nor a built-in problem (see list-examples)",
                args.problem
            );
        };
        let text = match args.basis {
            Some(family) => with_family(&text, family)?,
            None => text,
        };
        let mut spec = parse_problem(&text).with_context(|| format!("in {}", args.problem))?;
        let s = &mut spec.settings;
        if let Some(n) = n {
            s.n = n;
        }
        if let Some(tol) = args.tol {
            s.newton_tol = tol;
        }
        if let Some(max_iter) = args.max_iter {
            s.max_iter = max_iter;
        }
        if let Some(grid) = args.grid {
            s.grid = grid;
        }
        if let Some(initial) = args.initial {
            s.initial = match initial {
                InitialArg::Conditions => InitialPolicy::Conditions,
                InitialArg::Zero => InitialPolicy::Zero,
            };
        }
        spec.validate()?;
        Ok(Input { spec, exact })
    }
}

/// Rewrites `basis.family`. Orthogonal coefficients would change meaning, so
/// documents containing them are refused.
fn with_family(text: &str, family: BasisArg) -> Result<String> {
    let mut doc: Value = serde_json::from_str(text).context("parsing problem document")?;
    if mentions_orthogonal(&doc) {
        bail!("--basis cannot be combined with coefficients given in the orthogonal basis");
    }
    let name = match family {
        BasisArg::Chebyshev => "chebyshev",
        BasisArg::Legendre => "legendre",
    };
    match doc.pointer_mut("/basis/family") {
        Some(slot) => *slot = Value::from(name),
        None => bail!("problem document has no basis.family"),
    }
    Ok(doc.to_string())
}

fn mentions_orthogonal(v: &Value) -> bool {
    match v {
        Value::Object(map) => map
            .iter()
            .any(|(k, v)| (k == "basis" && v == "orthogonal") || mentions_orthogonal(v)),
        Value::Array(items) => items.iter().any(mentions_orthogonal),
        _ => false,
    }
}
