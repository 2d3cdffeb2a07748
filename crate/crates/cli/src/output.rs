use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};
use tauspec::solution::SolutionFile;
use tauspec::solver::ConvergenceStudy;

use super::Format;

/// Standard output or a file.
pub struct Sink {
    inner: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Sink> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Sink { inner })
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.inner.write(buf)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// 17 significant digits.
pub fn machine(v: f64) -> String {
    format!("{v:.16e}")
}

/// 3 significant digits.
pub fn human(v: f64) -> String {
    format!("{v:.2e}")
}

fn opt(v: Option<f64>, f: fn(f64) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn write_solution(out: &mut Sink, format: Format, file: &SolutionFile, warnings: &[String]) -> Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", file.to_json())?,
        Format::Csv => {
            writeln!(out, "variable,k,coefficient")?;
            for v in &file.variables {
                for (k, c) in v.coeffs.iter().enumerate() {
                    writeln!(out, "{},{k},{}", v.name, machine(*c))?;
                }
            }
        }
        Format::Table => {
            let (a, b) = file.basis.domain();
            writeln!(
                out,
                "problem  {} ({} on [{a}, {b}], n = {})",
                file.problem,
                file.basis.family().name(),
                file.n
            )?;
            let status = if file.converged { "converged" } else { "NOT converged" };
            writeln!(out, "status   {status} after {} iteration(s)", file.newton.len())?;
            if let Some(errors) = &file.max_error {
                for (v, e) in file.variables.iter().zip(errors) {
                    writeln!(out, "error    {}: {}", v.name, human(*e))?;
                }
            }
            let worst = |xs: &[f64]| xs.iter().copied().fold(0.0, f64::max);
            writeln!(
                out,
                "residual equations {}, conditions {} ({} grid points)",
                human(worst(&file.residual.equations)),
                human(worst(&file.residual.conditions)),
                file.residual.grid_points
            )?;
            writeln!(out)?;
            writeln!(out, "{:>5} {:>10} {:>10}", "iter", "update", "residual")?;
            for s in &file.newton {
                writeln!(out, "{:>5} {:>10} {:>10}", s.iteration, human(s.update_norm), human(s.residual_norm))?;
            }
            writeln!(out)?;
            write!(out, "{:>5}", "k")?;
            for v in &file.variables {
                write!(out, " {:>10}", v.name)?;
            }
            writeln!(out)?;
            for k in 0..file.n {
                write!(out, "{k:>5}")?;
                for v in &file.variables {
                    write!(out, " {:>10}", human(v.coeffs[k]))?;
                }
                writeln!(out)?;
            }
            for w in warnings {
                writeln!(out, "warning: {w}")?;
            }
        }
    }
    Ok(())
}

pub fn write_convergence(out: &mut Sink, format: Format, problem: &str, study: &ConvergenceStudy) -> Result<()> {
    match format {
        Format::Json => {
            let rows: Vec<Value> = study
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "error": r.error,
                        "residual": r.residual,
                        "iterations": r.iterations,
                        "seconds": r.seconds,
                        "converged": r.converged,
                        "failure": r.failure,
                    })
                })
                .collect();
            let doc = json!({ "problem": problem, "rows": rows, "warnings": study.warnings });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Format::Csv => {
            writeln!(out, "n,error,residual,iterations,seconds,converged,failure")?;
            for r in &study.rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.n,
                    opt(r.error, machine),
                    opt(r.residual, machine),
                    r.iterations,
                    machine(r.seconds),
                    r.converged,
                    r.failure.as_deref().map(csv_field).unwrap_or_default()
                )?;
            }
        }
        Format::Table => {
            writeln!(out, "{problem}")?;
            writeln!(
                out,
                "{:>5} {:>10} {:>10} {:>5} {:>9}  status",
                "n", "error", "residual", "iter", "seconds"
            )?;
            for r in &study.rows {
                let status = match (&r.failure, r.converged) {
                    (Some(f), _) => format!("failed: {f}"),
                    (None, true) => "ok".into(),
                    (None, false) => "not converged".into(),
                };
                writeln!(
                    out,
                    "{:>5} {:>10} {:>10} {:>5} {:>9.3}  {status}",
                    r.n,
                    opt(r.error, human),
                    opt(r.residual, human),
                    r.iterations,
                    r.seconds
                )?;
            }
        }
    }
    Ok(())
}

/// `x` followed by one column per series; CSV rows, a JSON object of arrays,
/// or an aligned table.
pub fn write_columns(
    out: &mut Sink,
    format: Format,
    x_name: &str,
    xs: &[f64],
    columns: &[(String, Vec<f64>)],
    note: Option<&str>,
) -> Result<()> {
    match format {
        Format::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert(x_name.into(), json!(xs));
            for (name, values) in columns {
                doc.insert(name.clone(), json!(values));
            }
            if let Some(n) = note {
                doc.insert("note".into(), json!(n));
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&Value::Object(doc))?)?;
        }
        Format::Csv => {
            if let Some(n) = note {
                writeln!(out, "# {n}")?;
            }
            let header: Vec<&str> =
                std::iter::once(x_name).chain(columns.iter().map(|c| c.0.as_str())).collect();
            writeln!(out, "{}", header.join(","))?;
            for (i, x) in xs.iter().enumerate() {
                let mut line = machine(*x);
                for (_, values) in columns {
                    line.push(',');
                    line.push_str(&machine(values[i]));
                }
                writeln!(out, "{line}")?;
            }
        }
        Format::Table => {
            write!(out, "{x_name:>12}")?;
            for (name, _) in columns {
                write!(out, " {name:>12}")?;
            }
            writeln!(out)?;
            for (i, x) in xs.iter().enumerate() {
                write!(out, "{:>12}", human(*x))?;
                for (_, values) in columns {
                    write!(out, " {:>12}", human(values[i]))?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
