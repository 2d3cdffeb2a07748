mod common;

use common::*;
use num_traits::Zero;
use tauspec::opalg::{
    build_m, build_n, build_o, condition_row, derivative_matrix, fredholm_operator,
    integral_matrix, m_power, poly_of_m, volterra_operator,
};
use tauspec::{BasisSpec, Family, KernelPoly, Series};

const FAMILIES: [Family; 2] = [Family::ChebyshevT, Family::LegendreP];

#[test]
fn recurrence_matrices_match_monomial_route() {
    for family in FAMILIES {
        let basis = BasisSpec::reference(family);
        for n in 1..=12 {
            let m = conjugate(family, &power_shift(n + 1), n);
            assert!(max_abs_diff(&build_m(&basis, n).entries, &m) <= 1e-12, "{family:?} M n={n}");
            let d = conjugate(family, &power_derivative(n), n);
            assert!(max_abs_diff(&build_n(&basis, n).entries, &d) <= 1e-12, "{family:?} N n={n}");
            let o = conjugate(family, &power_integral(n + 1), n);
            assert!(max_abs_diff(&build_o(&basis, n).entries, &o) <= 1e-12, "{family:?} O n={n}");
        }
    }
}

#[test]
fn powers_and_polynomials_of_m() {
    for family in FAMILIES {
        let basis = BasisSpec::reference(family);
        let n = 10;
        // x^3 through the monomial route, leading block of the size n + 3 operator
        let mut cube = power_shift(n + 3);
        for _ in 0..2 {
            cube = matmul(&cube, &power_shift(n + 3));
        }
        let exact = conjugate(family, &cube, n);
        assert!(max_abs_diff(&m_power(&basis, 3, n).entries, &exact) <= 1e-12);
        // p = P_3 acts as multiplication by P_3(x)
        let p3 = poly_of_m(&basis, &[0.0, 0.0, 0.0, 1.0], n).unwrap();
        let p3_power = &v_matrix(family, 4);
        let mut op = zeros(n + 3, n + 3);
        for k in 0..4 {
            let mut sk = zeros(n + 3, n + 3);
            for i in 0..n + 3 {
                sk[i][i] = q(1, 1);
            }
            for _ in 0..k {
                sk = matmul(&sk, &power_shift(n + 3));
            }
            for i in 0..n + 3 {
                for j in 0..n + 3 {
                    op[i][j] += &p3_power[k][3] * &sk[i][j];
                }
            }
        }
        let exact = conjugate(family, &op, n);
        assert!(max_abs_diff(&p3.entries, &exact) <= 1e-12, "{family:?}");
    }
}

#[test]
fn shifted_calculus_is_inverse_on_leading_block() {
    for family in FAMILIES {
        let basis = BasisSpec::new(family, -1.0, 2.0).unwrap();
        for n in [3, 9, 20] {
            let prod = derivative_matrix(&basis, n + 1).dot(&integral_matrix(&basis, n + 1));
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((prod[[i, j]] - want).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn condition_rows_evaluate_derivatives() {
    let basis = BasisSpec::new(Family::ChebyshevT, 0.0, 1.0).unwrap();
    assert_eq!(condition_row(&basis, 0.0, 0, 5), vec![1.0, -1.0, 1.0, -1.0, 1.0]);
    // d/dx T*_j(x) at x = 1 is 2 j^2
    let row = condition_row(&basis, 1.0, 1, 6);
    for (j, v) in row.iter().enumerate() {
        assert!((v - 2.0 * (j * j) as f64).abs() < 1e-12);
    }
}

/// `int_0^x (x - t) t^k dt = x^{k+2} / ((k+1)(k+2))`, mapped into the basis.
#[test]
fn volterra_difference_kernel_on_monomials() {
    for family in FAMILIES {
        let basis = BasisSpec::reference(family);
        let n = 8;
        let kernel = KernelPoly::from_power(basis, &ndarray::arr2(&[[0.0, -1.0], [1.0, 0.0]])).unwrap();
        let op = volterra_operator(&kernel, 0.0, n).unwrap();
        let mut power_op = zeros(n + 2, n + 2);
        for k in 0..n {
            power_op[k + 2][k] = q(1, ((k + 1) * (k + 2)) as i64);
        }
        let exact = conjugate(family, &power_op, n);
        assert!(max_abs_diff(&op.entries, &exact) <= 1e-12, "{family:?}");
    }
}

/// `int_{-1}^{1} (1 + x t) y(t) dt` has rank two in the monomial basis.
#[test]
fn fredholm_separable_kernel() {
    for family in FAMILIES {
        let basis = BasisSpec::reference(family);
        let n = 7;
        let kernel = KernelPoly::from_power(basis, &ndarray::arr2(&[[1.0, 0.0], [0.0, 1.0]])).unwrap();
        let op = fredholm_operator(&kernel, n).unwrap();
        let mut power_op = zeros(n, n);
        for k in 0..n {
            // int t^k and int t^{k+1} over [-1, 1]
            if k % 2 == 0 {
                power_op[0][k] = q(2, k as i64 + 1);
            } else {
                power_op[1][k] = q(2, k as i64 + 2);
            }
        }
        let exact = conjugate(family, &power_op, n);
        assert!(max_abs_diff(&op.entries, &exact) <= 1e-12, "{family:?}");
        let image = Series::new(basis, op.apply(&[0.0, 1.0]));
        assert!(image.coeffs().iter().skip(2).all(|c| c.is_zero()));
    }
}
