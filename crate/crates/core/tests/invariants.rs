use approx::assert_relative_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;
use std::f64::consts::PI;
use taulab::elliptic::genus2::{siegel_defect, symplectic_act, symplectic_unit};
use taulab::elliptic::periodic::expm2;
use taulab::elliptic::theta::{theta1, Nome, ThetaMethod};
use taulab::hankelfact::simultaneous_congruence;
use taulab::isomonodromy::semicircle_recurrence;
use taulab::linsys::{gramians, gramians_quadrature, realize, soliton_system, tau_from_gramians, ExpSymbol};
use taulab::numerics::rational::RationalMatrix;
use taulab::{CMat2, Complex64, Mat2, MaxNorm};

#[rustfmt::skip]
fn shear(s: [i64; 3]) -> RationalMatrix {
    RationalMatrix::from_ratios(
        4,
        4,
        &[
            (1, 1), (0, 1), (s[0], 2), (s[1], 2),
            (0, 1), (1, 1), (s[1], 2), (s[2], 2),
            (0, 1), (0, 1), (1, 1), (0, 1),
            (0, 1), (0, 1), (0, 1), (1, 1),
        ],
    )
    .unwrap()
}

/// `diag(A, A^{-T})` for `A = [[a, b], [0, d]]`.
#[rustfmt::skip]
fn scaling(a: i64, b: i64, d: i64) -> RationalMatrix {
    RationalMatrix::from_ratios(
        4,
        4,
        &[
            (a, 1), (b, 1), (0, 1), (0, 1),
            (0, 1), (d, 1), (0, 1), (0, 1),
            (0, 1), (0, 1), (1, a), (0, 1),
            (0, 1), (0, 1), (-b, a * d), (1, d),
        ],
    )
    .unwrap()
}

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-3i64..=-1, 1i64..=3]
}

fn siegel_point() -> impl Strategy<Value = CMat2> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.6..2.0f64, 0.6..2.0f64, -0.3..0.3f64).prop_map(
        |(x1, x2, x12, y1, y2, y12)| {
            let off = Complex64::new(x12, y12);
            CMat2::new(Complex64::new(x1, y1), off, off, Complex64::new(x2, y2))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_product_equals_series(q in 0.01..0.5f64, re in -4.0..4.0f64, im in -1.0..1.0f64) {
        let nome = Nome::real(q, 60).unwrap();
        let x = Complex64::new(re, im);
        let p = theta1(x, &nome, ThetaMethod::Product);
        let s = theta1(x, &nome, ThetaMethod::Series);
        prop_assert!((p - s).norm() <= 1e-12 * (1.0 + s.norm()), "{p} {s}");
    }

    #[test]
    fn theta_is_odd_and_antiperiodic(q in 0.01..0.5f64, re in -4.0..4.0f64, im in -1.0..1.0f64) {
        let nome = Nome::real(q, 60).unwrap();
        let x = Complex64::new(re, im);
        let t = theta1(x, &nome, ThetaMethod::Product);
        prop_assert!((theta1(-x, &nome, ThetaMethod::Product) + t).norm() <= 1e-12 * (1.0 + t.norm()));
        prop_assert!((theta1(x + PI, &nome, ThetaMethod::Product) + t).norm() <= 1e-11 * (1.0 + t.norm()));
    }

    #[test]
    fn symplectic_action_composes(
        s in prop::array::uniform3(-4i64..=4),
        (a, b, d) in (nonzero(), -2i64..=2, nonzero()),
        omega in siegel_point(),
    ) {
        let x = shear(s);
        let y = scaling(a, b, d).mul(&symplectic_unit()).unwrap();
        let two_step = symplectic_act(&x, &symplectic_act(&y, &omega).unwrap()).unwrap();
        let one_step = symplectic_act(&x.mul(&y).unwrap(), &omega).unwrap();
        prop_assert!((two_step - one_step).max_norm() <= 1e-9 * (1.0 + one_step.max_norm()));
        let (asym, min_eig) = siegel_defect(&one_step);
        prop_assert!(asym <= 1e-10 && min_eig > 0.0);
    }

    #[test]
    fn gramians_symmetric_and_match_quadrature(
        c in prop::collection::vec(0.1..1.0f64, 1..4),
        kappa in 0.0..1.0f64,
        x in 0.0..2.0f64,
    ) {
        let sys = realize(&ExpSymbol::scalar(kappa, &c).unwrap(), DMatrix::from_element(1, 1, 1.0)).unwrap();
        let g = gramians(&sys, x).unwrap();
        prop_assert!((&g.l - g.l.transpose()).amax() == 0.0);
        prop_assert!((&g.q - g.q.transpose()).amax() <= 1e-15 * g.q.amax());
        // exp-map quadrature converges only algebraically unless the rate sums
        // are integer multiples of the map rate
        let h = gramians_quadrature(&sys, x, 200).unwrap();
        prop_assert!((&g.l - &h.l).amax() <= 1e-6 * g.l.amax());
        prop_assert!((&g.q - &h.q).amax() <= 1e-6 * g.q.amax());
        let sys = realize(&ExpSymbol::scalar(0.0, &c).unwrap(), DMatrix::from_element(1, 1, 1.0)).unwrap();
        let g = gramians(&sys, x).unwrap();
        let h = gramians_quadrature(&sys, x, 32).unwrap();
        prop_assert!((&g.l - &h.l).amax() <= 1e-12 * g.l.amax());
        prop_assert!((&g.q - &h.q).amax() <= 1e-12 * g.q.amax());
    }

    #[test]
    fn soliton_tau_closed_form(x in 0.0..5.0f64) {
        assert_relative_eq!(tau_from_gramians(&soliton_system(), x).unwrap(), 1.0 + (-2.0 * x).exp(), max_relative = 1e-14);
    }

    #[test]
    fn semicircle_norms_scale(a in -2.0..1.0f64, width in 0.5..3.0f64) {
        let b = a + width;
        let (_, rec) = semicircle_recurrence(a, b, 8).unwrap();
        for n in 0..=8 {
            assert_relative_eq!(rec.h(n), (width / 4.0).powi(2 * n as i32), max_relative = 1e-10);
        }
    }

    #[test]
    fn congruence_diagonalizes(
        (p, r, s) in (0.5..2.0f64, -0.4..0.4f64, 0.5..2.0f64),
        g in prop::array::uniform4(-1.5..1.5f64),
    ) {
        let m1 = Mat2::new(p, r, r, s);
        let g = Mat2::new(g[0], g[1], g[2], g[3]);
        let m2 = g * g.transpose();
        let c = simultaneous_congruence(&m1, &m2).unwrap();
        prop_assert!(c.residual <= 1e-10, "{}", c.residual);
        prop_assert!((c.s * c.s.transpose() - m1).abs().max() <= 1e-12);
        prop_assert!(c.d[(0, 1)] == 0.0 && c.d[(1, 0)] == 0.0 && c.d[(0, 0)] >= 0.0 && c.d[(1, 1)] >= 0.0);
    }

    #[test]
    fn matrix_exponential_inverts(e in prop::array::uniform4(-2.0..2.0f64), f in prop::array::uniform4(-2.0..2.0f64)) {
        let m = CMat2::new(
            Complex64::new(e[0], f[0]),
            Complex64::new(e[1], f[1]),
            Complex64::new(e[2], f[2]),
            Complex64::new(e[3], f[3]),
        );
        let prod = expm2(&m) * expm2(&(-m));
        prop_assert!((prod - CMat2::identity()).max_norm() <= 1e-10 * expm2(&m).max_norm().powi(2));
    }
}
