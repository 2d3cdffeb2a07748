//! Degenerate kernels `K(x, t) = sum_ij k_ij P*_i(x) P*_j(t)` and the Volterra
//! and Fredholm operators built from them.

use ndarray::{s, Array1, Array2};

use super::{
    build_w_shifted, embedding, integral_matrix, poly_of_m_times, row_times_poly_of_m,
    OperatorMatrix, Role,
};
use crate::basis::{product, BasisSpec, Series};
use crate::error::{Result, TauError};

/// Two-variable polynomial kernel in orthogonal coefficients: row `i` is the
/// `x`-index, column `j` the `t`-index.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelPoly {
    basis: BasisSpec,
    coeffs: Array2<f64>,
}

impl KernelPoly {
    pub fn new(basis: BasisSpec, coeffs: Array2<f64>) -> Result<Self> {
        let (nx, nt) = coeffs.dim();
        if nx == 0 || nt == 0 {
            return Err(TauError::Domain("kernel coefficient matrix is empty".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(TauError::Domain("kernel has non-finite coefficients".into()));
        }
        Ok(Self { basis, coeffs })
    }

    /// `K(x, t) = 1`.
    pub fn unit(basis: BasisSpec) -> Self {
        Self {
            basis,
            coeffs: Array2::ones((1, 1)),
        }
    }

    /// Converts `K(x, t) = sum_ij p_ij x^i t^j` to the shifted basis:
    /// `W_s P W_s^T`.
    pub fn from_power(basis: BasisSpec, power: &Array2<f64>) -> Result<Self> {
        let (nx, nt) = power.dim();
        if nx == 0 || nt == 0 {
            return Err(TauError::Domain("kernel coefficient matrix is empty".into()));
        }
        let wx = build_w_shifted(&basis, nx).entries;
        let wt = build_w_shifted(&basis, nt).entries;
        Self::new(basis, wx.dot(power).dot(&wt.t()))
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn coeffs(&self) -> &Array2<f64> {
        &self.coeffs
    }

    /// Number of `x` coefficients (`n_x + 1`).
    pub fn x_len(&self) -> usize {
        self.coeffs.nrows()
    }

    /// Number of `t` coefficients (`n_t + 1`).
    pub fn t_len(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            basis: self.basis,
            coeffs: &self.coeffs * factor,
        }
    }

    /// `K(x, t) g(t)`.
    pub fn times_t(&self, g: &Series) -> Result<Self> {
        let rows: Vec<Vec<f64>> = self
            .coeffs
            .rows()
            .into_iter()
            .map(|r| {
                let row = Series::new(self.basis, r.to_vec());
                product(&row, g).map(Series::into_coeffs)
            })
            .collect::<Result<_>>()?;
        let nt = rows.iter().map(|r| r.len()).max().unwrap_or(1);
        let mut coeffs = Array2::zeros((rows.len(), nt));
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                coeffs[[i, j]] = v;
            }
        }
        Self::new(self.basis, coeffs)
    }

    /// `p(x) K(x, t)`.
    pub fn times_x(&self, p: &Series) -> Result<Self> {
        let t = Self {
            basis: self.basis,
            coeffs: self.coeffs.t().to_owned(),
        }
        .times_t(p)?;
        Ok(Self {
            basis: self.basis,
            coeffs: t.coeffs.t().to_owned(),
        })
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let px = self.basis.values_at(x, self.x_len());
        let pt = self.basis.values_at(t, self.t_len());
        Array1::from(px).dot(&self.coeffs.dot(&Array1::from(pt)))
    }

    /// Extra rows needed so that applying the operator to columns of degree
    /// `< n` is exact.
    pub(crate) fn growth(&self) -> usize {
        self.x_len() + self.t_len() + 1
    }

    fn check_basis(&self, basis: &BasisSpec) -> Result<()> {
        if &self.basis != basis {
            return Err(TauError::Domain(format!(
                "kernel basis {:?} differs from working basis {:?}",
                self.basis, basis
            )));
        }
        Ok(())
    }
}

/// `S_V X` for `y -> int_{x0}^{x} K(x, t) y(t) dt`, applied to the columns of
/// `X` (coefficient vectors with `X.nrows()` entries).
///
/// Each kernel row contributes `(P_i(M) - e_i P|_{x0}) (O / c1) q_i(M)` with
/// `q_i(t) = sum_j k_ij P_j(t)`. The result is exact for columns whose degree
/// plus [`KernelPoly::growth`] stays below `X.nrows()`.
pub(crate) fn volterra_apply(kernel: &KernelPoly, x0: f64, x: &Array2<f64>) -> Array2<f64> {
    let basis = kernel.basis;
    let family = basis.family();
    let size = x.nrows();
    let im = integral_matrix(&basis, size);
    let at_x0 = Array1::from(basis.values_at(x0, size));
    let mut out = Array2::zeros(x.dim());
    for (i, q) in kernel.coeffs.rows().into_iter().enumerate() {
        if q.iter().all(|&c| c == 0.0) {
            continue;
        }
        let q = q.to_vec();
        let integrated = im.dot(&poly_of_m_times(family, &q, x));
        let mut e_i = vec![0.0; i + 1];
        e_i[i] = 1.0;
        let mut term = poly_of_m_times(family, &e_i, &integrated);
        if i < size {
            let lower = at_x0.dot(&integrated);
            let mut row = term.row_mut(i);
            row -= &lower;
        }
        out += &term;
    }
    out
}

/// `S_F X` for `y -> int_a^b K(x, t) y(t) dt`. Only the first `n_x + 1` rows of
/// the result can be nonzero.
pub(crate) fn fredholm_apply(kernel: &KernelPoly, x: &Array2<f64>) -> Array2<f64> {
    let basis = kernel.basis;
    let family = basis.family();
    let size = x.nrows();
    let im = integral_matrix(&basis, size);
    let (a, b) = basis.domain();
    let diff: Array1<f64> = Array1::from(basis.values_at(b, size)) - Array1::from(basis.values_at(a, size));
    let definite = diff.dot(&im).to_vec();
    let mut out = Array2::zeros(x.dim());
    for (i, q) in kernel.coeffs.rows().into_iter().enumerate() {
        if i >= size || q.iter().all(|&c| c == 0.0) {
            continue;
        }
        let row = Array1::from(row_times_poly_of_m(family, &q.to_vec(), &definite));
        out.row_mut(i).assign(&row.dot(x));
    }
    out
}

/// `n x n` Volterra operator `int_{x0}^{x} K(x, t) y(t) dt`.
pub fn volterra_operator(kernel: &KernelPoly, x0: f64, n: usize) -> Result<OperatorMatrix> {
    let basis = kernel.basis;
    if !basis.contains(x0) {
        return Err(TauError::Domain(format!(
            "Volterra lower limit {x0} outside the domain {:?}",
            basis.domain()
        )));
    }
    let size = n + kernel.growth();
    let full = volterra_apply(kernel, x0, &embedding(size, n));
    Ok(OperatorMatrix::new(
        basis,
        Role::Volterra,
        full.slice(s![..n, ..]).to_owned(),
    ))
}

/// `n x n` Fredholm operator `int_a^b K(x, t) y(t) dt` over the basis domain.
pub fn fredholm_operator(kernel: &KernelPoly, n: usize) -> Result<OperatorMatrix> {
    if kernel.x_len() > n {
        log::warn!(
            "Fredholm kernel has {} x-coefficients, operator truncated to {n} rows",
            kernel.x_len()
        );
    }
    let size = n + kernel.growth();
    let full = fredholm_apply(kernel, &embedding(size, n));
    Ok(OperatorMatrix::new(
        kernel.basis,
        Role::Fredholm,
        full.slice(s![..n, ..]).to_owned(),
    ))
}

/// Checks that a kernel lives in `basis`.
pub(crate) fn ensure_kernel_basis(kernel: &KernelPoly, basis: &BasisSpec) -> Result<()> {
    kernel.check_basis(basis)
}
