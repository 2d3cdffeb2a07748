//! Exact images of terms applied to given series. Used for right-hand side
//! corrections during linearization and for residual evaluation; no
//! truncation happens here.

use ndarray::Array2;

use super::{Equation, LinearTerm, ProductTerm, TermKind};
use crate::basis::{product, Series};
use crate::error::Result;
use crate::opalg::{fredholm_apply, volterra_apply};

/// Applies the integral part of `kind` to `g`.
pub(crate) fn integral_image(kind: &TermKind, g: &Series) -> Series {
    let (kernel, volterra_x0) = match kind {
        TermKind::Local => return g.clone(),
        TermKind::Volterra { kernel, x0 } => (kernel, Some(*x0)),
        TermKind::Fredholm { kernel } => (kernel, None),
    };
    let size = g.len() + kernel.growth();
    let mut column = Array2::zeros((size, 1));
    for (i, &c) in g.coeffs().iter().enumerate() {
        column[[i, 0]] = c;
    }
    let image = match volterra_x0 {
        Some(x0) => volterra_apply(kernel, x0, &column),
        None => fredholm_apply(kernel, &column),
    };
    Series::new(*g.basis(), image.column(0).to_vec())
}

fn is_unit(s: &Series) -> bool {
    s.coeffs().first() == Some(&1.0) && s.coeffs().iter().skip(1).all(|&c| c == 0.0)
}

pub(crate) fn linear_term_image(term: &LinearTerm, y: &Series) -> Result<Series> {
    let inner = integral_image(&term.kind, &y.apply_order(term.order));
    if is_unit(&term.coeff) {
        Ok(inner)
    } else {
        product(&term.coeff, &inner)
    }
}

pub(crate) fn product_term_image(term: &ProductTerm, ys: &[Series]) -> Result<Series> {
    let mut acc = Series::constant(*ys[0].basis(), term.weight);
    for f in &term.factors {
        acc = product(&acc, &ys[f.var].apply_order(f.order))?;
    }
    Ok(integral_image(&term.enclosing, &acc))
}

/// Left-hand side of an equation evaluated at `ys`, as an exact series.
pub(crate) fn equation_lhs(eq: &Equation, ys: &[Series]) -> Result<Series> {
    let mut acc = Series::zeros(*eq.rhs.basis(), 1);
    for t in &eq.linear {
        acc = acc.add(&linear_term_image(t, &ys[t.var])?)?;
    }
    for p in &eq.products {
        acc = acc.add(&product_term_image(p, ys)?)?;
    }
    Ok(acc)
}
