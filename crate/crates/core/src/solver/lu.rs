//! Dense LU factorization with partial (row) pivoting.

use ndarray::{Array1, Array2};

/// Pivot failure: no usable pivot in `column`; `row` is the original index of
/// the row that would have been eliminated there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularPivot {
    pub column: usize,
    pub row: usize,
}

#[derive(Clone, Debug)]
pub struct Lu {
    factors: Array2<f64>,
    perm: Vec<usize>,
    min_pivot_ratio: f64,
}

impl Lu {
    /// Factors `a` in place. A pivot smaller than `1e3 * eps * max|a_ij|` is
    /// treated as zero.
    pub fn factor(mut a: Array2<f64>) -> Result<Lu, SingularPivot> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU needs a square matrix");
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let threshold = 1e3 * f64::EPSILON * scale;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_ratio = f64::INFINITY;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, a[[i, k]].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot > threshold) || scale == 0.0 {
                return Err(SingularPivot { column: k, row: perm[p] });
            }
            min_ratio = min_ratio.min(pivot / scale);
            if p != k {
                for j in 0..n {
                    a.swap([k, j], [p, j]);
                }
                perm.swap(k, p);
            }
            let d = a[[k, k]];
            for i in k + 1..n {
                let l = a[[i, k]] / d;
                if l == 0.0 {
                    continue;
                }
                a[[i, k]] = l;
                for j in k + 1..n {
                    let u = a[[k, j]];
                    a[[i, j]] -= l * u;
                }
            }
        }
        Ok(Lu {
            factors: a,
            perm,
            min_pivot_ratio: min_ratio,
        })
    }

    /// Smallest `|pivot| / max|a_ij|` met during elimination.
    pub fn min_pivot_ratio(&self) -> f64 {
        self.min_pivot_ratio
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let lu = &self.factors;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= lu[[i, j]] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= lu[[i, j]] * x[j];
            }
            x[i] = s / lu[[i, i]];
        }
        x
    }

    /// Solve followed by one step of iterative refinement against `a`.
    pub fn solve_refined(&self, a: &Array2<f64>, b: &[f64]) -> Vec<f64> {
        let x = self.solve(b);
        let ax = a.dot(&Array1::from(x.clone()));
        let r: Vec<f64> = b.iter().zip(ax.iter()).map(|(bi, ai)| bi - ai).collect();
        let dx = self.solve(&r);
        x.iter().zip(dx).map(|(xi, d)| xi + d).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn solves_with_pivoting() {
        let a = arr2(&[[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]]);
        let lu = Lu::factor(a.clone()).unwrap();
        let x = lu.solve(&[5.0, 3.0, 6.0]);
        let back = a.dot(&Array1::from(x.clone()));
        for (v, e) in back.iter().zip([5.0, 3.0, 6.0]) {
            assert!((v - e).abs() < 1e-14);
        }
        let xr = lu.solve_refined(&a, &[5.0, 3.0, 6.0]);
        for (a, b) in x.iter().zip(xr) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn detects_singularity() {
        let a = arr2(&[[1.0, 2.0], [2.0, 4.0]]);
        let err = Lu::factor(a).unwrap_err();
        assert_eq!(err.column, 1);
        assert!(Lu::factor(Array2::zeros((2, 2))).is_err());
    }
}
