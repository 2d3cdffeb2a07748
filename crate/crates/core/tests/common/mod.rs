//! Exact rational oracles built from the monomial basis.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use tauspec::Family;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qf(x: f64) -> Q {
    Q::from_float(x).expect("finite")
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap()
}

pub type QMat = Vec<Vec<Q>>;

pub fn zeros(r: usize, c: usize) -> QMat {
    vec![vec![Q::zero(); c]; r]
}

pub fn matmul(a: &QMat, b: &QMat) -> QMat {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    let mut out = zeros(r, c);
    for i in 0..r {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..c {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

/// `(alpha_j, beta_j, gamma_j)` written out independently of the library.
pub fn recurrence(family: Family, j: usize) -> (Q, Q, Q) {
    let j = j as i64;
    match family {
        Family::ChebyshevT if j == 0 => (q(1, 1), q(0, 1), q(0, 1)),
        Family::ChebyshevT => (q(1, 2), q(0, 1), q(1, 2)),
        Family::LegendreP => (q(j + 1, 2 * j + 1), q(0, 1), q(j, 2 * j + 1)),
    }
}

/// Column `j` holds the power coefficients of `P_j` on the reference interval.
pub fn v_matrix(family: Family, n: usize) -> QMat {
    let mut cols: Vec<Vec<Q>> = Vec::with_capacity(n);
    for j in 0..n {
        let col = if j == 0 {
            let mut c = vec![Q::zero(); n];
            c[0] = Q::one();
            c
        } else {
            let (a, b, g) = recurrence(family, j - 1);
            let prev = &cols[j - 1];
            let mut c = vec![Q::zero(); n];
            for k in 0..n {
                let mut v = -&b * &prev[k];
                if k > 0 {
                    v += &prev[k - 1];
                }
                if j >= 2 {
                    v -= &g * &cols[j - 2][k];
                }
                c[k] = v / &a;
            }
            c
        };
        cols.push(col);
    }
    let mut v = zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        for k in 0..n {
            v[k][j] = c[k].clone();
        }
    }
    v
}

/// Inverse of an upper triangular matrix.
pub fn upper_inverse(v: &QMat) -> QMat {
    let n = v.len();
    let mut w = zeros(n, n);
    for j in 0..n {
        w[j][j] = Q::one() / &v[j][j];
        for i in (0..j).rev() {
            let mut s = Q::zero();
            for k in i + 1..=j {
                s += &v[i][k] * &w[k][j];
            }
            w[i][j] = -s / &v[i][i];
        }
    }
    w
}

/// `W A V` for a power-basis operator `A`, then the leading `n x n` block.
pub fn conjugate(family: Family, a: &QMat, n: usize) -> QMat {
    let size = a.len();
    let v = v_matrix(family, size);
    let w = upper_inverse(&v);
    let full = matmul(&matmul(&w, a), &v);
    full.into_iter().take(n).map(|r| r.into_iter().take(n).collect()).collect()
}

pub fn power_shift(size: usize) -> QMat {
    let mut a = zeros(size, size);
    for k in 0..size - 1 {
        a[k + 1][k] = Q::one();
    }
    a
}

pub fn power_derivative(size: usize) -> QMat {
    let mut a = zeros(size, size);
    for k in 1..size {
        a[k - 1][k] = q(k as i64, 1);
    }
    a
}

pub fn power_integral(size: usize) -> QMat {
    let mut a = zeros(size, size);
    for k in 0..size - 1 {
        a[k + 1][k] = q(1, k as i64 + 1);
    }
    a
}

/// Orthogonal coefficients to power coefficients on the reference interval.
pub fn to_power(family: Family, c: &[Q]) -> Vec<Q> {
    let v = v_matrix(family, c.len());
    (0..c.len())
        .map(|k| (0..c.len()).fold(Q::zero(), |s, j| s + &v[k][j] * &c[j]))
        .collect()
}

pub fn from_power(family: Family, p: &[Q]) -> Vec<Q> {
    let w = upper_inverse(&v_matrix(family, p.len()));
    (0..p.len())
        .map(|k| (0..p.len()).fold(Q::zero(), |s, j| s + &w[k][j] * &p[j]))
        .collect()
}

pub fn convolve(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn max_abs_diff(a: &ndarray::Array2<f64>, b: &QMat) -> f64 {
    let mut worst = 0.0_f64;
    for (i, row) in b.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((a[[i, j]] - to_f64(v)).abs());
        }
    }
    worst
}
