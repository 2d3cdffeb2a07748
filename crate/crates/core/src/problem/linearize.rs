use super::images::product_term_image;
use super::{LinearTerm, ProblemSpec, TermKind};
use crate::basis::{product, Series};
use crate::error::{Result, TauError};

/// Newton linearization of every product term about `iterate`.
///
/// A product `w u_1 ... u_m` becomes `sum_i (w prod_{j != i} u_j^0) u_i` on the
/// left, with `(m - 1) w prod_j u_j^0` added to the right-hand side. Frozen
/// factors become coefficient polynomials (or the `t`-dependence of the kernel
/// for products under an integral) and are cut to `n` coefficients. Linear
/// terms and conditions are copied unchanged.
pub fn linearize(spec: &ProblemSpec, iterate: &[Series]) -> Result<ProblemSpec> {
    if iterate.len() != spec.num_vars() {
        return Err(TauError::Validation(format!(
            "iterate has {} series for {} variables",
            iterate.len(),
            spec.num_vars()
        )));
    }
    let n = spec.settings.n;
    let basis = spec.basis;
    let mut out = spec.clone();
    for (e, (eq_out, eq)) in out.equations.iter_mut().zip(&spec.equations).enumerate() {
        eq_out.products.clear();
        let mut rhs = eq.rhs.clone();
        for prod in &eq.products {
            let frozen: Vec<Series> = prod
                .factors
                .iter()
                .map(|f| iterate[f.var].apply_order(f.order))
                .collect();
            let m = frozen.len();
            for (i, factor) in prod.factors.iter().enumerate() {
                let mut coeff = Series::constant(basis, prod.weight);
                for (j, u) in frozen.iter().enumerate() {
                    if j != i {
                        coeff = product(&coeff, u)?;
                    }
                }
                let dropped = coeff.truncate(n);
                if dropped > 0.0 {
                    log::debug!(
                        "equation {e}: frozen factor cut to {n} coefficients (largest dropped {dropped:.3e})"
                    );
                }
                let (coeff, kind) = match &prod.enclosing {
                    TermKind::Local => (coeff, TermKind::Local),
                    TermKind::Volterra { kernel, x0 } => (
                        Series::constant(basis, 1.0),
                        TermKind::Volterra { kernel: kernel.times_t(&coeff)?, x0: *x0 },
                    ),
                    TermKind::Fredholm { kernel } => (
                        Series::constant(basis, 1.0),
                        TermKind::Fredholm { kernel: kernel.times_t(&coeff)? },
                    ),
                };
                eq_out.linear.push(LinearTerm { var: factor.var, order: factor.order, coeff, kind });
            }
            let constant = product_term_image(prod, iterate)?;
            rhs = rhs.add(&constant.scaled((m - 1) as f64))?;
        }
        eq_out.rhs = rhs;
    }
    Ok(out)
}
