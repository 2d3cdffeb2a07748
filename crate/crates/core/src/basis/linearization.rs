//! Linearization coefficients `P_i P_j = sum_k l(i, j, k) P_k` and the product
//! of two series computed with them.

use super::{Family, Series};
use crate::error::{Result, TauError};

/// Source of linearization coefficients for one family.
#[derive(Clone, Debug)]
pub struct LinearizationTable {
    family: Family,
    kind: TableKind,
}

#[derive(Clone, Debug)]
enum TableKind {
    /// `T_i T_j = (T_{i+j} + T_{|i-j|}) / 2`.
    ChebyshevClosedForm,
    /// Adams–Neumann formula; `ratios[k] = (1/2)_k / k!`.
    Legendre { ratios: Vec<f64> },
    /// Generic table obtained from the three-term recurrence alone. For each
    /// `i <= j` the band `k = j-i ..= j+i` is stored.
    Recurrence { max_degree: usize, values: Vec<f64> },
}

impl LinearizationTable {
    /// Table for `family` valid for degrees up to `max_degree` (closed forms
    /// remain valid beyond it, at some extra cost for Legendre).
    pub fn new(family: Family, max_degree: usize) -> Self {
        let kind = match family {
            Family::ChebyshevT => TableKind::ChebyshevClosedForm,
            Family::LegendreP => TableKind::Legendre {
                ratios: legendre_ratios(2 * max_degree + 2),
            },
        };
        Self { family, kind }
    }

    /// Builds the table for any family from its recurrence coefficients by
    /// `P_{i+1} P_j = ((x - beta_i) P_i P_j - gamma_i P_{i-1} P_j) / alpha_i`,
    /// where multiplication by `x` is applied in coefficient space.
    pub fn from_recurrence(family: Family, max_degree: usize) -> Self {
        let mut values = Vec::with_capacity((max_degree + 1).pow(3) / 3 + max_degree + 1);
        for j in 0..=max_degree {
            // rows[i] holds P_i P_j over k = 0 ..= i + j
            let mut prev: Vec<f64> = Vec::new();
            let mut cur = vec![0.0; j + 1];
            cur[j] = 1.0;
            for i in 0..=j {
                values.extend_from_slice(&cur[j - i..=j + i]);
                if i == j {
                    break;
                }
                let r = family.recurrence(i);
                let mut next = times_x(family, &cur);
                for (k, v) in next.iter_mut().enumerate() {
                    let c = cur.get(k).copied().unwrap_or(0.0);
                    let p = prev.get(k).copied().unwrap_or(0.0);
                    *v = (*v - r.beta * c - r.gamma * p) / r.alpha;
                }
                prev = cur;
                cur = next;
            }
        }
        Self {
            family,
            kind: TableKind::Recurrence { max_degree, values },
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// `l(i, j, k)`; zero outside the support.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if k > i + j || k < j - i {
            return 0.0;
        }
        match &self.kind {
            TableKind::ChebyshevClosedForm => chebyshev_l(i, j, k),
            TableKind::Legendre { ratios } => legendre_l(ratios, i, j, k),
            TableKind::Recurrence { max_degree, values } => {
                assert!(
                    j <= *max_degree,
                    "degree {j} beyond recurrence table size {max_degree}"
                );
                values[band_offset(i, j) + (k - (j - i))]
            }
        }
    }

    /// Calls `f(k, l(i, j, k))` for every `k` where the coefficient can be
    /// nonzero, in increasing `k`.
    fn for_each_term(&self, i: usize, j: usize, mut f: impl FnMut(usize, f64)) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        match &self.kind {
            TableKind::ChebyshevClosedForm => {
                if i == 0 {
                    f(j, 1.0);
                } else {
                    f(j - i, 0.5);
                    f(j + i, 0.5);
                }
            }
            TableKind::Legendre { ratios } => {
                for k in (j - i..=j + i).step_by(2) {
                    f(k, legendre_l(ratios, i, j, k));
                }
            }
            TableKind::Recurrence { values, .. } => {
                let base = band_offset(i, j);
                for (off, &l) in values[base..base + 2 * i + 1].iter().enumerate() {
                    if l != 0.0 {
                        f(j - i + off, l);
                    }
                }
            }
        }
    }
}

/// Start of the band for the pair `i <= j` in the recurrence table.
fn band_offset(i: usize, j: usize) -> usize {
    // sum_{j' < j} (j' + 1)^2 + sum_{i' < i} (2 i' + 1)
    j * (j + 1) * (2 * j + 1) / 6 + i * i
}

/// Coefficients of `x * sum_k c_k P_k`.
fn times_x(family: Family, c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; c.len() + 1];
    for (k, &ck) in c.iter().enumerate() {
        if ck == 0.0 {
            continue;
        }
        let r = family.recurrence(k);
        out[k + 1] += r.alpha * ck;
        out[k] += r.beta * ck;
        if k > 0 {
            out[k - 1] += r.gamma * ck;
        }
    }
    out
}

fn chebyshev_l(i: usize, j: usize, k: usize) -> f64 {
    let hi = i + j;
    let lo = i.abs_diff(j);
    match (k == hi, k == lo) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.5,
        _ => 0.0,
    }
}

/// `(1/2)_k / k!` for `k < len`, by `A_k = A_{k-1} (2k - 1) / (2k)`.
fn legendre_ratios(len: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(len.max(1));
    a.push(1.0);
    for k in 1..len {
        let kf = k as f64;
        a.push(a[k - 1] * (2.0 * kf - 1.0) / (2.0 * kf));
    }
    a
}

fn legendre_ratio(ratios: &[f64], k: usize) -> f64 {
    match ratios.get(k) {
        Some(&v) => v,
        None => legendre_ratios(k + 1)[k],
    }
}

fn legendre_l(ratios: &[f64], i: usize, j: usize, k: usize) -> f64 {
    let s = i + j;
    if k > s || k < i.abs_diff(j) || (s - k) % 2 == 1 {
        return 0.0;
    }
    let r = (s - k) / 2;
    let a = |m| legendre_ratio(ratios, m);
    let num = a(i - r) * a(r) * a(j - r);
    let sf = s as f64;
    let rf = r as f64;
    num / a(s - r) * (2.0 * sf - 4.0 * rf + 1.0) / (2.0 * sf - 2.0 * rf + 1.0)
}

/// `l(i, j, k)` from a table.
pub fn linearization_coeff(tbl: &LinearizationTable, i: usize, j: usize, k: usize) -> f64 {
    tbl.get(i, j, k)
}

/// Product of two series in the same basis, computed entirely with
/// linearization coefficients.
///
/// Both inputs are padded to a common length `n + 1`; the result has `2n + 1`
/// coefficients. Contributions are accumulated pair by pair over unordered
/// index pairs `p <= q` with weight `(1/2)^[p == q] (a_p b_q + a_q b_p)`, so
/// each output coefficient sums in ascending `p` and `p * q == q * p` holds
/// bitwise.
pub fn product(p: &Series, q: &Series) -> Result<Series> {
    if p.basis != q.basis {
        return Err(TauError::Domain(format!(
            "cannot multiply series in different bases: {:?} vs {:?}",
            p.basis, q.basis
        )));
    }
    let len = p.len().max(q.len()).max(1);
    let n = len - 1;
    let table = LinearizationTable::new(p.basis.family(), n);
    Ok(Series::new(p.basis, product_coeffs(&table, p.coeffs(), q.coeffs(), n)))
}

pub(crate) fn product_coeffs(table: &LinearizationTable, a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let mut c = vec![0.0; 2 * n + 1];
    for lo in 0..=n {
        for hi in lo..=n {
            let cross = at(a, lo) * at(b, hi) + at(a, hi) * at(b, lo);
            if cross == 0.0 {
                continue;
            }
            let w = if lo == hi { 0.5 * cross } else { cross };
            table.for_each_term(lo, hi, |k, l| c[k] += w * l);
        }
    }
    c
}
