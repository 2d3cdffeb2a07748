//! The `tauspec-solution/1` file: basis, per-variable orthogonal coefficients,
//! Newton log and residual summary. Timings are never written, so identical
//! solves produce identical files.

use serde::{Deserialize, Serialize};

use crate::basis::{BasisSpec, Series};
use crate::error::{Result, TauError};
use crate::solver::TauSolution;

pub const FORMAT: &str = "tauspec-solution/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub format: String,
    pub problem: String,
    pub basis: BasisSpec,
    pub n: usize,
    pub converged: bool,
    pub variables: Vec<VariableRecord>,
    pub newton: Vec<NewtonRecord>,
    pub residual: ResidualRecord,
    /// Sup-norm error of each declared variable against a known solution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_error: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableRecord {
    pub name: String,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonRecord {
    pub iteration: usize,
    pub update_norm: f64,
    pub residual_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualRecord {
    pub grid_points: usize,
    pub equations: Vec<f64>,
    pub conditions: Vec<f64>,
}

impl SolutionFile {
    pub fn from_solution(sol: &TauSolution) -> Self {
        Self {
            format: FORMAT.to_string(),
            problem: sol.problem.clone(),
            basis: sol.basis,
            n: sol.n,
            converged: sol.converged,
            variables: sol
                .variables
                .iter()
                .zip(&sol.series)
                .map(|(name, s)| VariableRecord { name: name.clone(), coeffs: s.coeffs().to_vec() })
                .collect(),
            newton: sol
                .newton
                .iter()
                .map(|s| NewtonRecord {
                    iteration: s.iteration,
                    update_norm: s.update_norm,
                    residual_norm: s.residual_norm,
                })
                .collect(),
            residual: ResidualRecord {
                grid_points: sol.residual.grid.len(),
                equations: sol.residual.equation_defects.clone(),
                conditions: sol.residual.condition_defects.clone(),
            },
            max_error: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    /// Parses and checks a solution file.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SolutionFile = serde_json::from_str(text).map_err(|e| {
            TauError::schema(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        if file.format != FORMAT {
            return Err(TauError::schema(
                "format",
                format!("expected {FORMAT:?}, found {:?}", file.format),
            ));
        }
        if let Some(i) = file.variables.iter().position(|v| v.coeffs.is_empty()) {
            return Err(TauError::schema(format!("variables[{i}].coeffs"), "no coefficients"));
        }
        Ok(file)
    }

    /// Series of every variable in the stored basis.
    pub fn series(&self) -> Vec<(String, Series)> {
        self.variables
            .iter()
            .map(|v| (v.name.clone(), Series::new(self.basis, v.coeffs.clone())))
            .collect()
    }
}
