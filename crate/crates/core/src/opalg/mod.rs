//! Operational matrices acting on coefficient vectors.
//!
//! `M` (multiplication by the reference variable), `N` (differentiation) and
//! `O` (integration) are built directly from the three-term recurrence; the
//! basis matrices `V` and `W = V^-1` are only needed for power-basis input and
//! `W` is produced by a recurrence, not by inversion. All of `M`, `N` and `O`
//! act on the reference interval: in problem coordinates the derivative is
//! `c1 N` and the antiderivative `O / c1`.
//!
//! An `n x n` matrix here is always the leading block of the corresponding
//! infinite operator. Builders that combine several factors work at an
//! enlarged size internally so that the leading block is exact.

mod kernel;

pub use kernel::{fredholm_operator, volterra_operator, KernelPoly};
pub(crate) use kernel::{ensure_kernel_basis, fredholm_apply, volterra_apply};

use ndarray::{s, Array1, Array2};

use crate::basis::{reference_values, BasisSpec, Family, Series};
use crate::error::{Result, TauError};

/// What an [`OperatorMatrix`] represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    M,
    N,
    O,
    V,
    W,
    D,
    S,
    Volterra,
    Fredholm,
    Condition,
    Composite,
}

/// Dense matrix acting on coefficient vectors of a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub basis: BasisSpec,
    pub role: Role,
    pub entries: Array2<f64>,
}

impl OperatorMatrix {
    pub fn new(basis: BasisSpec, role: Role, entries: Array2<f64>) -> Self {
        Self {
            basis,
            role,
            entries,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.entries.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[[row, col]]
    }

    /// Leading `rows x cols` block.
    pub fn truncated(&self, rows: usize, cols: usize) -> OperatorMatrix {
        OperatorMatrix::new(
            self.basis,
            self.role,
            self.entries.slice(s![..rows, ..cols]).to_owned(),
        )
    }

    pub fn apply(&self, coeffs: &[f64]) -> Vec<f64> {
        let (rows, cols) = self.dims();
        let mut x = Array1::zeros(cols);
        for (xi, &c) in x.iter_mut().zip(coeffs) {
            *xi = c;
        }
        let y = self.entries.dot(&x);
        debug_assert_eq!(y.len(), rows);
        y.to_vec()
    }

    pub fn matmul(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix::new(self.basis, Role::Composite, self.entries.dot(&other.entries))
    }
}

/// `n x n` identity embedded in the top of a `rows x n` matrix.
pub(crate) fn embedding(rows: usize, n: usize) -> Array2<f64> {
    let mut e = Array2::zeros((rows, n));
    for i in 0..n.min(rows) {
        e[[i, i]] = 1.0;
    }
    e
}

/// `M X` where `M` is the multiplication matrix truncated to `X.nrows()`.
pub(crate) fn tri_left_mul(family: Family, x: &Array2<f64>) -> Array2<f64> {
    let (rows, cols) = x.dim();
    let mut out = Array2::zeros((rows, cols));
    for i in 0..rows {
        let beta = family.recurrence(i).beta;
        let mut row = out.row_mut(i);
        if i > 0 {
            let a = family.recurrence(i - 1).alpha;
            row.scaled_add(a, &x.row(i - 1));
        }
        if beta != 0.0 {
            row.scaled_add(beta, &x.row(i));
        }
        if i + 1 < rows {
            let g = family.recurrence(i + 1).gamma;
            row.scaled_add(g, &x.row(i + 1));
        }
    }
    out
}

/// `M v` for a coefficient vector (truncated to `v.len()`).
fn tri_left_mul_vec(family: Family, v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![0.0; n];
    for (k, &vk) in v.iter().enumerate() {
        if vk == 0.0 {
            continue;
        }
        let r = family.recurrence(k);
        if k + 1 < n {
            out[k + 1] += r.alpha * vk;
        }
        out[k] += r.beta * vk;
        if k > 0 {
            out[k - 1] += r.gamma * vk;
        }
    }
    out
}

/// `s M` for a row vector.
fn row_times_m(family: Family, s: &[f64]) -> Vec<f64> {
    let n = s.len();
    (0..n)
        .map(|c| {
            let r = family.recurrence(c);
            let mut v = r.beta * s[c];
            if c > 0 {
                v += r.gamma * s[c - 1];
            }
            if c + 1 < n {
                v += r.alpha * s[c + 1];
            }
            v
        })
        .collect()
}

/// `sum_i p_i P_i(M) X` by the matrix three-term recurrence
/// `P_{j+1}(M) = ((M - beta_j I) P_j(M) - gamma_j P_{j-1}(M)) / alpha_j`,
/// applied directly to the columns of `X`.
pub(crate) fn poly_of_m_times(family: Family, coeffs: &[f64], x: &Array2<f64>) -> Array2<f64> {
    let mut acc = Array2::zeros(x.dim());
    let Some(last) = coeffs.iter().rposition(|&c| c != 0.0) else {
        return acc;
    };
    let mut prev: Option<Array2<f64>> = None;
    let mut cur = x.clone();
    acc.scaled_add(coeffs[0], &cur);
    for j in 0..last {
        let r = family.recurrence(j);
        let mut next = tri_left_mul(family, &cur);
        if r.beta != 0.0 {
            next.scaled_add(-r.beta, &cur);
        }
        if let Some(p) = &prev {
            next.scaled_add(-r.gamma, p);
        }
        next.mapv_inplace(|v| v / r.alpha);
        if coeffs[j + 1] != 0.0 {
            acc.scaled_add(coeffs[j + 1], &next);
        }
        prev = Some(cur);
        cur = next;
    }
    acc
}

/// `s sum_i p_i P_i(M)` for a row vector, using that `P_j(M)` commutes with `M`.
pub(crate) fn row_times_poly_of_m(family: Family, coeffs: &[f64], s: &[f64]) -> Vec<f64> {
    let n = s.len();
    let mut acc = vec![0.0; n];
    let Some(last) = coeffs.iter().rposition(|&c| c != 0.0) else {
        return acc;
    };
    let axpy = |acc: &mut [f64], a: f64, v: &[f64]| {
        for (o, x) in acc.iter_mut().zip(v) {
            *o += a * x;
        }
    };
    let mut prev: Vec<f64> = vec![0.0; n];
    let mut cur = s.to_vec();
    axpy(&mut acc, coeffs[0], &cur);
    for j in 0..last {
        let r = family.recurrence(j);
        let mut next = row_times_m(family, &cur);
        for k in 0..n {
            next[k] = (next[k] - r.beta * cur[k] - r.gamma * prev[k]) / r.alpha;
        }
        axpy(&mut acc, coeffs[j + 1], &next);
        prev = cur;
        cur = next;
    }
    acc
}

/// Basis matrix `V` on the reference interval: column `j` holds the power
/// coefficients of `P_j`.
pub fn build_v(basis: &BasisSpec, n: usize) -> OperatorMatrix {
    let family = basis.family();
    let mut v = Array2::zeros((n, n));
    if n > 0 {
        v[[0, 0]] = 1.0;
    }
    for j in 0..n.saturating_sub(1) {
        let r = family.recurrence(j);
        for i in 0..n {
            let shifted = if i > 0 { v[[i - 1, j]] } else { 0.0 };
            let prev = if j > 0 { v[[i, j - 1]] } else { 0.0 };
            v[[i, j + 1]] = (shifted - r.beta * v[[i, j]] - r.gamma * prev) / r.alpha;
        }
    }
    OperatorMatrix::new(*basis, Role::V, v)
}

/// Multiplication matrix `M` (tridiagonal): column `j` holds `x P_j`.
pub fn build_m(basis: &BasisSpec, n: usize) -> OperatorMatrix {
    let family = basis.family();
    let mut m = Array2::zeros((n, n));
    for j in 0..n {
        let r = family.recurrence(j);
        if j + 1 < n {
            m[[j + 1, j]] = r.alpha;
        }
        m[[j, j]] = r.beta;
        if j > 0 {
            m[[j - 1, j]] = r.gamma;
        }
    }
    OperatorMatrix::new(*basis, Role::M, m)
}

/// `W = V^-1` by `w_0 = e_0`, `w_{j+1} = M w_j`: column `j` holds the
/// orthogonal coefficients of `x^j`.
pub fn build_w(basis: &BasisSpec, n: usize) -> OperatorMatrix {
    let family = basis.family();
    let mut w = Array2::zeros((n, n));
    let mut col = vec![0.0; n];
    if n > 0 {
        col[0] = 1.0;
    }
    for j in 0..n {
        w.column_mut(j).assign(&Array1::from(col.clone()));
        col = tri_left_mul_vec(family, &col);
    }
    OperatorMatrix::new(*basis, Role::W, w)
}

/// Shifted variant of [`build_w`]: column `j` holds the shifted-basis
/// coefficients of `x^j` in problem coordinates, using `(M - c2 I) / c1` for
/// multiplication by `x`.
pub fn build_w_shifted(basis: &BasisSpec, n: usize) -> OperatorMatrix {
    let family = basis.family();
    let (c1, c2) = (basis.c1(), basis.c2());
    let mut w = Array2::zeros((n, n));
    let mut col = vec![0.0; n];
    if n > 0 {
        col[0] = 1.0;
    }
    for j in 0..n {
        w.column_mut(j).assign(&Array1::from(col.clone()));
        let mx = tri_left_mul_vec(family, &col);
        col = mx
            .iter()
            .zip(&col)
            .map(|(m, c)| (m - c2 * c) / c1)
            .collect();
    }
    OperatorMatrix::new(*basis, Role::W, w)
}

/// Converts power-basis coefficients in the problem variable `x` to
/// shifted orthogonal coefficients.
pub fn power_to_orthogonal(basis: &BasisSpec, power: &[f64]) -> Series {
    let n = power.len().max(1);
    let w = build_w_shifted(basis, n);
    let mut x = Array1::zeros(n);
    for (xi, &p) in x.iter_mut().zip(power) {
        *xi = p;
    }
    Series::new(*basis, w.entries.dot(&x).to_vec())
}

/// Differentiation matrix `N` (strictly upper triangular), built column by
/// column from the differentiated recurrence
/// `P'_{j+1} = ((x - beta_j) P'_j + P_j - gamma_j P'_{j-1}) / alpha_j`.
pub fn build_n(basis: &BasisSpec, n: usize) -> OperatorMatrix {
    let family = basis.family();
    let mut nm = Array2::zeros((n, n));
    let mut prev = vec![0.0; n];
    let mut cur = vec![0.0; n];
    for j in 0..n.saturating_sub(1) {
        let r = family.recurrence(j);
        let mut next = tri_left_mul_vec(family, &cur);
        for k in 0..n {
            next[k] = next[k] - r.beta * cur[k] - r.gamma * prev[k];
        }
        next[j] += 1.0;
        for v in next.iter_mut() {
            *v /= r.alpha;
        }
        nm.column_mut(j + 1).assign(&Array1::from(next.clone()));
        prev = std::mem::replace(&mut cur, next);
    }
    OperatorMatrix::new(*basis, Role::N, nm)
}

/// Integration matrix `O`: column `j` holds the antiderivative of `P_j` that
/// vanishes at the reference origin.
///
/// The subdiagonal is `alpha_j / (j + 1)` and the remaining rows come from
/// back-substitution against `N`:
/// `theta_{i+1,j} = -(alpha_i / (i + 1)) sum_{k=i+2}^{j+1} eta_{i,k} theta_{k,j}`.
/// The constant row then fixes the value at the origin. The matrix is the
/// leading block of the exact operator, so the last column is computed with
/// one extra row before truncation.
pub fn build_o(basis: &BasisSpec, n: usize) -> OperatorMatrix {
    let family = basis.family();
    let size = n + 1;
    let nm = build_n(basis, size).entries;
    let at_origin = reference_values(family, 0.0, size);
    let mut o = Array2::zeros((n, n));
    let mut q = vec![0.0; size];
    for j in 0..n {
        q.iter_mut().for_each(|v| *v = 0.0);
        q[j + 1] = family.recurrence(j).alpha / (j + 1) as f64;
        for i in (0..j).rev() {
            let sum: f64 = (i + 2..=j + 1).map(|k| nm[[i, k]] * q[k]).sum();
            q[i + 1] = -family.recurrence(i).alpha / (i + 1) as f64 * sum;
        }
        q[0] = -(1..=j + 1).map(|k| q[k] * at_origin[k]).sum::<f64>();
        for i in 0..n {
            o[[i, j]] = q[i];
        }
    }
    OperatorMatrix::new(*basis, Role::O, o)
}

/// Derivative in problem coordinates, `c1 N`.
pub fn derivative_matrix(basis: &BasisSpec, n: usize) -> Array2<f64> {
    build_n(basis, n).entries * basis.c1()
}

/// Antiderivative in problem coordinates, `O / c1`.
pub fn integral_matrix(basis: &BasisSpec, n: usize) -> Array2<f64> {
    build_o(basis, n).entries / basis.c1()
}

/// `p(M) = sum_i p_i P_i(M)` at size `n` for orthogonal coefficients `p`.
pub fn poly_of_m(basis: &BasisSpec, coeffs: &[f64], n: usize) -> Result<OperatorMatrix> {
    if coeffs.len() > n {
        return Err(TauError::Domain(format!(
            "polynomial with {} coefficients does not fit a {n} x {n} matrix; truncate explicitly",
            coeffs.len()
        )));
    }
    let full = poly_of_m_times(basis.family(), coeffs, &embedding(n + coeffs.len(), n));
    Ok(OperatorMatrix::new(
        *basis,
        Role::Composite,
        full.slice(s![..n, ..]).to_owned(),
    ))
}

/// `M^k` by the banded update
/// `mu^(k)_{i,j} = mu^(k-1)_{i-1,j} alpha_{i-1} + mu^(k-1)_{i,j} beta_i + mu^(k-1)_{i+1,j} gamma_{i+1}`.
/// Computed on `n + k` rows so the result is the leading block of `M^k`.
pub fn m_power(basis: &BasisSpec, k: usize, n: usize) -> OperatorMatrix {
    let mut p = embedding(n + k, n);
    for _ in 0..k {
        p = tri_left_mul(basis.family(), &p);
    }
    OperatorMatrix::new(*basis, Role::Composite, p.slice(s![..n, ..]).to_owned())
}

/// `sum_k c_k M^k` for power-basis coefficients `c`.
pub fn poly_of_m_power(basis: &BasisSpec, power: &[f64], n: usize) -> OperatorMatrix {
    let size = n + power.len();
    let mut acc = Array2::zeros((size, n));
    let mut p = embedding(size, n);
    for (k, &c) in power.iter().enumerate() {
        if k > 0 {
            p = tri_left_mul(basis.family(), &p);
        }
        acc.scaled_add(c, &p);
    }
    OperatorMatrix::new(*basis, Role::Composite, acc.slice(s![..n, ..]).to_owned())
}

fn max_len(polys: &[Series]) -> usize {
    polys.iter().map(|p| p.degree() + 1).max().unwrap_or(1)
}

fn check_basis(basis: &BasisSpec, polys: &[Series]) -> Result<()> {
    match polys.iter().find(|p| p.basis() != basis) {
        Some(p) => Err(TauError::Domain(format!(
            "coefficient polynomial in basis {:?}, operator in {:?}",
            p.basis(),
            basis
        ))),
        None => Ok(()),
    }
}

/// `D = sum_k p_k(M) (c1 N)^k`, where `polys[k]` multiplies the `k`-th
/// derivative.
pub fn diff_operator(basis: &BasisSpec, polys: &[Series], n: usize) -> Result<OperatorMatrix> {
    check_basis(basis, polys)?;
    let size = n + max_len(polys);
    let family = basis.family();
    let dm = derivative_matrix(basis, size);
    let mut power = embedding(size, n);
    let mut acc = Array2::zeros((size, n));
    for (k, p) in polys.iter().enumerate() {
        if k > 0 {
            power = dm.dot(&power);
        }
        acc += &poly_of_m_times(family, p.coeffs(), &power);
    }
    Ok(OperatorMatrix::new(
        *basis,
        Role::D,
        acc.slice(s![..n, ..]).to_owned(),
    ))
}

/// `S = sum_l p_l(M) (O / c1)^l`, where `polys[l]` multiplies the `l`-fold
/// antiderivative.
pub fn int_operator(basis: &BasisSpec, polys: &[Series], n: usize) -> Result<OperatorMatrix> {
    check_basis(basis, polys)?;
    let size = n + max_len(polys) + polys.len();
    let family = basis.family();
    let im = integral_matrix(basis, size);
    let mut power = embedding(size, n);
    let mut acc = Array2::zeros((size, n));
    for (l, p) in polys.iter().enumerate() {
        if l > 0 {
            power = im.dot(&power);
        }
        acc += &poly_of_m_times(family, p.coeffs(), &power);
    }
    Ok(OperatorMatrix::new(
        *basis,
        Role::S,
        acc.slice(s![..n, ..]).to_owned(),
    ))
}

/// Row `c(P*_0), ..., c(P*_{n-1})` of the functional `c(y) = y^(d)(x)`.
pub fn condition_row(basis: &BasisSpec, x: f64, order: u32, n: usize) -> Vec<f64> {
    let mut row = basis.values_at(x, n);
    if order > 0 {
        let dm = derivative_matrix(basis, n);
        for _ in 0..order {
            row = Array1::from(row).dot(&dm).to_vec();
        }
    }
    row
}

impl Series {
    /// `k`-th derivative in problem coordinates.
    pub fn derivative(&self, k: u32) -> Series {
        let mut out = self.clone();
        if k == 0 || self.is_empty() {
            return out;
        }
        let dm = derivative_matrix(self.basis(), self.len());
        let mut v = Array1::from(self.coeffs().to_vec());
        for _ in 0..k {
            v = dm.dot(&v);
        }
        out = Series::new(*self.basis(), v.to_vec());
        out
    }

    /// `l`-fold antiderivative (each one vanishing at the interval midpoint).
    pub fn antiderivative(&self, l: u32) -> Series {
        let mut coeffs = self.coeffs().to_vec();
        for _ in 0..l {
            let size = coeffs.len() + 1;
            let im = integral_matrix(self.basis(), size);
            coeffs.push(0.0);
            coeffs = im.dot(&Array1::from(coeffs)).to_vec();
        }
        Series::new(*self.basis(), coeffs)
    }

    /// `y^(order)`: derivatives for positive orders, antiderivatives for
    /// negative ones.
    pub fn apply_order(&self, order: i32) -> Series {
        if order >= 0 {
            self.derivative(order as u32)
        } else {
            self.antiderivative(order.unsigned_abs())
        }
    }
}
