//! Orthogonal polynomial families shifted to an interval `[a, b]`, series in
//! those bases, evaluation by forward recurrence, and products through
//! linearization coefficients.

mod linearization;

pub use linearization::{linearization_coeff, product, LinearizationTable};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TauError};
use crate::exec::Execution;

/// Supported orthogonal families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "chebyshev", alias = "ChebyshevT", alias = "chebyshevt")]
    ChebyshevT,
    #[serde(rename = "legendre", alias = "LegendreP", alias = "legendrep")]
    LegendreP,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::ChebyshevT => "chebyshev",
            Family::LegendreP => "legendre",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "chebyshev" | "chebyshevt" => Ok(Family::ChebyshevT),
            "legendre" | "legendrep" => Ok(Family::LegendreP),
            other => Err(TauError::Config(format!(
                "unsupported basis family {other:?} (expected chebyshev or legendre)"
            ))),
        }
    }

    /// Three-term coefficients on the reference interval `[-1, 1]`:
    /// `x P_j = alpha_j P_{j+1} + beta_j P_j + gamma_j P_{j-1}`.
    pub fn recurrence(self, j: usize) -> Recurrence {
        match self {
            Family::ChebyshevT => {
                if j == 0 {
                    Recurrence::new(1.0, 0.0, 0.0)
                } else {
                    Recurrence::new(0.5, 0.0, 0.5)
                }
            }
            Family::LegendreP => {
                let j = j as f64;
                let d = 2.0 * j + 1.0;
                Recurrence::new((j + 1.0) / d, 0.0, j / d)
            }
        }
    }
}

/// One row of the three-term recurrence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Recurrence {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Recurrence {
    pub const fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }
}

/// An orthogonal family shifted to `[a, b]` through `x* = c1 x + c2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BasisRepr", into = "BasisRepr")]
pub struct BasisSpec {
    family: Family,
    a: f64,
    b: f64,
}

#[derive(Serialize, Deserialize)]
struct BasisRepr {
    family: Family,
    domain: [f64; 2],
}

impl TryFrom<BasisRepr> for BasisSpec {
    type Error = TauError;

    fn try_from(r: BasisRepr) -> Result<Self> {
        BasisSpec::new(r.family, r.domain[0], r.domain[1])
    }
}

impl From<BasisSpec> for BasisRepr {
    fn from(b: BasisSpec) -> Self {
        BasisRepr {
            family: b.family,
            domain: [b.a, b.b],
        }
    }
}

impl BasisSpec {
    pub fn new(family: Family, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(TauError::Config(format!(
                "invalid domain [{a}, {b}]: need finite a < b"
            )));
        }
        Ok(Self { family, a, b })
    }

    /// The family on its reference interval `[-1, 1]`.
    pub fn reference(family: Family) -> Self {
        Self {
            family,
            a: -1.0,
            b: 1.0,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn c1(&self) -> f64 {
        2.0 / (self.b - self.a)
    }

    pub fn c2(&self) -> f64 {
        (self.a + self.b) / (self.a - self.b)
    }

    /// Maps a problem coordinate onto the reference interval.
    pub fn to_reference(&self, x: f64) -> f64 {
        self.c1() * x + self.c2()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    pub fn recurrence(&self, j: usize) -> Recurrence {
        self.family.recurrence(j)
    }

    /// `[P*_0(x), ..., P*_{n-1}(x)]`, the evaluation row of the shifted basis.
    pub fn values_at(&self, x: f64, n: usize) -> Vec<f64> {
        reference_values(self.family, self.to_reference(x), n)
    }
}

/// `[P_0(t), ..., P_{n-1}(t)]` on the reference interval.
pub fn reference_values(family: Family, t: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(1.0);
    let mut prev = 0.0;
    let mut cur = 1.0;
    for i in 1..n {
        let r = family.recurrence(i - 1);
        let next = ((t - r.beta) * cur - r.gamma * prev) / r.alpha;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// `recurrence_coeffs(basis, j)`: reference-domain `(alpha_j, beta_j, gamma_j)`.
pub fn recurrence_coeffs(basis: &BasisSpec, j: usize) -> (f64, f64, f64) {
    let r = basis.recurrence(j);
    (r.alpha, r.beta, r.gamma)
}

/// A finite series `sum_i a_i P*_i(x)` in a shifted orthogonal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    basis: BasisSpec,
    coeffs: Vec<f64>,
}

impl Series {
    pub fn new(basis: BasisSpec, coeffs: Vec<f64>) -> Self {
        Self { basis, coeffs }
    }

    pub fn zeros(basis: BasisSpec, len: usize) -> Self {
        Self::new(basis, vec![0.0; len])
    }

    pub fn constant(basis: BasisSpec, value: f64) -> Self {
        Self::new(basis, vec![value])
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the last nonzero coefficient (0 for the zero series).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Copy resized to `len` coefficients: zero padded or cut.
    pub fn resized(&self, len: usize) -> Series {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len, 0.0);
        Series::new(self.basis, coeffs)
    }

    /// Cuts the series to `len` coefficients, returning the largest dropped
    /// magnitude.
    pub fn truncate(&mut self, len: usize) -> f64 {
        let dropped = self
            .coeffs
            .iter()
            .skip(len)
            .fold(0.0_f64, |m, c| m.max(c.abs()));
        self.coeffs.truncate(len);
        dropped
    }

    fn check_compatible(&self, other: &Series) -> Result<()> {
        if self.basis != other.basis {
            return Err(TauError::Domain(format!(
                "series in different bases: {:?} vs {:?}",
                self.basis, other.basis
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_compatible(other)?;
        let len = self.len().max(other.len());
        let coeffs = (0..len)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(0.0)
                    + other.coeffs.get(i).copied().unwrap_or(0.0)
            })
            .collect();
        Ok(Series::new(self.basis, coeffs))
    }

    pub fn scaled(&self, factor: f64) -> Series {
        Series::new(self.basis, self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn product(&self, other: &Series) -> Result<Series> {
        product(self, other)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(orth_eval(self, &[x])?[0])
    }

    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        orth_eval(self, xs)
    }
}

/// Evaluates a series at every point of `xs` with the shifted forward
/// recurrence, never leaving the orthogonal basis.
pub fn orth_eval(s: &Series, xs: &[f64]) -> Result<Vec<f64>> {
    orth_eval_with(s, xs, Execution::Parallel)
}

pub fn orth_eval_with(s: &Series, xs: &[f64], exec: Execution) -> Result<Vec<f64>> {
    if s.coeffs.is_empty() {
        return Err(TauError::Domain(
            "cannot evaluate a series with no coefficients".into(),
        ));
    }
    let outside = xs.iter().filter(|&&x| !s.basis.contains(x)).count();
    if outside > 0 {
        log::debug!("orth_eval: {outside} point(s) outside the domain are extrapolated");
    }
    let c1 = s.basis.c1();
    let c2 = s.basis.c2();
    let family = s.basis.family;
    let coeffs = &s.coeffs;
    Ok(exec.map_chunks(xs, 1024, |chunk| {
        chunk
            .iter()
            .map(|&x| eval_shifted(family, coeffs, c1 * x + c2))
            .collect()
    }))
}

/// `sum_i a_i P_i(t)` at a reference coordinate `t = c1 x + c2`.
fn eval_shifted(family: Family, coeffs: &[f64], t: f64) -> f64 {
    let r0 = family.recurrence(0);
    let mut prev = 1.0;
    let mut acc = coeffs[0];
    if coeffs.len() == 1 {
        return acc;
    }
    let mut cur = (t - r0.beta) / r0.alpha;
    acc += coeffs[1] * cur;
    for (i, &a) in coeffs.iter().enumerate().skip(2) {
        let r = family.recurrence(i - 1);
        let next = ((t - r.beta) * cur - r.gamma * prev) / r.alpha;
        prev = cur;
        cur = next;
        acc += a * cur;
    }
    acc
}

/// `count` Chebyshev–Lobatto points on `[a, b]`, in increasing order.
pub fn chebyshev_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.5 * (a + b)];
    }
    let m = (count - 1) as f64;
    (0..count)
        .map(|k| {
            let t = -(std::f64::consts::PI * k as f64 / m).cos();
            (0.5 * (a + b) + 0.5 * (b - a) * t).clamp(a, b)
        })
        .collect()
}

/// `count` equispaced points on `[a, b]` including both ends.
pub fn uniform_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    let h = (b - a) / (count - 1) as f64;
    (0..count)
        .map(|k| if k + 1 == count { b } else { a + h * k as f64 })
        .collect()
}
