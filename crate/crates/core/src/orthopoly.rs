//! Monic orthogonal polynomials, recurrence data and Hankel determinants.

use crate::equilibrium::{EquilibriumMeasure, DEFAULT_NODES};
use crate::error::{invalid, Result, TauError};
use crate::numerics::diff::central_diff;
use crate::numerics::quad::QuadGrid;
use crate::numerics::rational::rational_hankel_det;
use crate::{CMat2, Complex64};
use nalgebra::DMatrix;
use num_rational::BigRational;

/// Recurrence `x p_n = p_{n+1} + b_{n+1} p_n + c_n p_{n-1}` together with the
/// norms `h_n = ∫ p_n² dρ`.
///
/// Data is kept one level past `n_max` so that `V_{n_max}` is available.
#[derive(Debug, Clone)]
pub struct RecurrenceData {
    n_max: usize,
    /// `b[k] = b_{k+1}`.
    b: Vec<f64>,
    /// `c[k] = c_k`, `c[0] = 0`.
    c: Vec<f64>,
    h: Vec<f64>,
    grid: QuadGrid,
    measure: EquilibriumMeasure,
}

impl RecurrenceData {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `b_n`, 1-based as in the recurrence.
    pub fn b(&self, n: usize) -> f64 {
        assert!(n >= 1, "b_n is 1-based");
        self.b[n - 1]
    }

    /// `c_n = h_n / h_{n-1}` for `n ≥ 1`.
    pub fn c(&self, n: usize) -> f64 {
        self.c[n]
    }

    pub fn h(&self, n: usize) -> f64 {
        self.h[n]
    }

    pub fn norms(&self) -> &[f64] {
        &self.h
    }

    pub fn measure(&self) -> &EquilibriumMeasure {
        &self.measure
    }

    /// Quadrature grid (against `ρ`) used for the inner products.
    pub fn grid(&self) -> &QuadGrid {
        &self.grid
    }

    /// `p_0(z), …, p_n(z)`.
    pub fn p_all(&self, n: usize, z: Complex64) -> Vec<Complex64> {
        self.three_term(n, z, Complex64::new(1.0, 0.0), None)
    }

    pub fn p(&self, n: usize, z: Complex64) -> Complex64 {
        self.p_all(n, z)[n]
    }

    pub fn p_real(&self, n: usize, x: f64) -> f64 {
        self.p(n, Complex64::new(x, 0.0)).re
    }

    /// `p_n'(z)` by differentiating the recurrence.
    pub fn p_deriv(&self, n: usize, z: Complex64) -> Complex64 {
        let p = self.p_all(n, z);
        let mut d = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 0..n {
            let prev = if k == 0 { Complex64::new(0.0, 0.0) } else { d[k - 1] };
            d[k + 1] = p[k] + (z - self.b[k]) * d[k] - self.c[k] * prev;
        }
        d[n]
    }

    /// Second-kind polynomials by the same recurrence from `q_0 = 0`,
    /// `q_1 = μ_0` (`= 1` for a probability measure).
    pub fn q_all(&self, n: usize, z: Complex64) -> Vec<Complex64> {
        self.three_term(n, z, Complex64::new(0.0, 0.0), Some(Complex64::new(self.h[0], 0.0)))
    }

    fn three_term(&self, n: usize, z: Complex64, first: Complex64, second: Option<Complex64>) -> Vec<Complex64> {
        assert!(n <= self.n_max + 1, "degree {n} beyond recurrence data");
        let mut out = Vec::with_capacity(n + 1);
        out.push(first);
        if n == 0 {
            return out;
        }
        out.push(second.unwrap_or((z - self.b[0]) * first));
        for k in 1..n {
            let next = (z - self.b[k]) * out[k] - self.c[k] * out[k - 1];
            out.push(next);
        }
        out
    }

    /// `∫ p_n(t) ρ(dt)/(z - t)` and `∫ p_n(t) ρ(dt)/(z - t)²`.
    pub fn cauchy_pair(&self, n: usize, z: Complex64) -> (Complex64, Complex64) {
        let mut c1 = Complex64::new(0.0, 0.0);
        let mut c2 = Complex64::new(0.0, 0.0);
        for (x, w) in self.grid.nodes.iter().zip(&self.grid.weights) {
            let pn = self.p_real(n, *x);
            let r = 1.0 / (z - x);
            c1 += w * pn * r;
            c2 += w * pn * r * r;
        }
        (c1, c2)
    }
}

/// Stieltjes procedure with quadrature inner products.
pub fn stieltjes_recurrence(measure: &EquilibriumMeasure, n_max: usize) -> Result<RecurrenceData> {
    stieltjes_recurrence_with(measure, n_max, DEFAULT_NODES)
}

pub fn stieltjes_recurrence_with(measure: &EquilibriumMeasure, n_max: usize, nodes: usize) -> Result<RecurrenceData> {
    let grid = measure.grid(nodes.max(2 * n_max + 8), None)?;
    let xs = &grid.nodes;
    let ws = &grid.weights;
    let levels = n_max + 2;
    let mut b = Vec::with_capacity(levels);
    let mut c = vec![0.0];
    let mut h = Vec::with_capacity(levels);
    let mut prev = vec![0.0; xs.len()];
    let mut cur = vec![1.0; xs.len()];
    for n in 0..levels {
        let hn: f64 = ws.iter().zip(&cur).map(|(w, p)| w * p * p).sum();
        if !(hn > 0.0) || !hn.is_finite() {
            return Err(TauError::Conditioning { n, h: hn });
        }
        let bn: f64 = ws.iter().zip(&cur).zip(xs).map(|((w, p), x)| w * x * p * p).sum::<f64>() / hn;
        if n > 0 {
            c.push(hn / h[n - 1]);
        }
        h.push(hn);
        b.push(bn);
        let cn = c[n];
        let next: Vec<f64> = (0..xs.len()).map(|i| (xs[i] - bn) * cur[i] - cn * prev[i]).collect();
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(RecurrenceData { n_max, b, c, h, grid, measure: measure.clone() })
}

/// `p_n(z)` by recurrence with `q_n(z)` both from the recurrence and from the
/// defining integral `∫ (p_n(z) - p_n(x))/(z - x) ρ(dx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyPair {
    pub n: usize,
    pub p: Complex64,
    pub q_recurrence: Complex64,
    pub q_quadrature: Complex64,
}

pub fn eval_polys(rec: &RecurrenceData, n: usize, z: Complex64) -> Result<PolyPair> {
    if n > rec.n_max + 1 {
        return invalid(format!("degree {n} exceeds n_max {}", rec.n_max));
    }
    let p = rec.p(n, z);
    let q_recurrence = rec.q_all(n, z)[n];
    let mut q_quadrature = Complex64::new(0.0, 0.0);
    for (x, w) in rec.grid.nodes.iter().zip(&rec.grid.weights) {
        let d = z - x;
        let term = if d.norm() < 1e-10 { rec.p_deriv(n, z) } else { (p - rec.p_real(n, *x)) / d };
        q_quadrature += w * term;
    }
    Ok(PolyPair { n, p, q_recurrence, q_quadrature })
}

/// `D_n = h_0 h_1 ⋯ h_{n-1}`.
pub fn hankel_d(rec: &RecurrenceData, n: usize) -> Result<f64> {
    if n > rec.n_max + 1 {
        return invalid(format!("order {n} exceeds available norms"));
    }
    Ok(rec.h[..n].iter().product())
}

/// Exact Hankel determinant of order `n` from rational moments.
pub fn hankel_d_exact(moments: &[BigRational], n: usize) -> Result<BigRational> {
    rational_hankel_det(moments, n)
}

/// Floating Hankel determinant `det[μ_{j+k}]_{j,k<n}` (ill-conditioned for
/// large `n`; used for the truncated-moment ratio).
pub fn hankel_det_float(moments: &[f64], n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    if moments.len() < 2 * n - 1 {
        return invalid("not enough moments");
    }
    Ok(DMatrix::from_fn(n, n, |j, k| moments[j + k]).lu().determinant())
}

/// Gram determinant of the normalized `p_0..p_n` on `(-∞, t)` against the
/// truncated-moment ratio `D_{n+1}(t)/D_{n+1}`.
pub fn projection_tau(rec: &RecurrenceData, n: usize, t: f64) -> Result<(f64, f64)> {
    if n + 1 > rec.n_max + 1 {
        return invalid(format!("n + 1 = {} exceeds n_max", n + 1));
    }
    let m = n + 1;
    let nodes = rec.grid.len().max(DEFAULT_NODES);
    let cut = rec.measure.grid(nodes, Some(t))?;
    let full = rec.measure.grid(nodes, None)?;
    if cut.is_empty() {
        return Ok((0.0, 0.0));
    }
    let pv: Vec<Vec<f64>> =
        cut.nodes.iter().map(|&x| rec.p_all(n, Complex64::new(x, 0.0)).iter().map(|z| z.re).collect()).collect();
    let gram = DMatrix::from_fn(m, m, |j, k| {
        let s: f64 = cut.weights.iter().zip(&pv).map(|(w, p)| w * p[j] * p[k]).sum();
        s / (rec.h[j] * rec.h[k]).sqrt()
    });
    let lhs = gram.lu().determinant();
    let mom = |g: &QuadGrid| -> Vec<f64> { (0..2 * m - 1).map(|j| g.integrate(|x| x.powi(j as i32))).collect() };
    let rhs = hankel_det_float(&mom(&cut), m)? / hankel_det_float(&mom(&full), m)?;
    Ok((lhs, rhs))
}

/// Christoffel–Darboux kernel
/// `E_n(z,ζ) = (p_n(z)p_{n-1}(ζ) - p_{n-1}(z)p_n(ζ))/(h_{n-1}(z - ζ))`,
/// with the confluent limit on the diagonal.
pub fn cd_kernel(rec: &RecurrenceData, n: usize, z: f64, zeta: f64) -> Result<f64> {
    if n == 0 {
        return invalid("cd_kernel needs n ≥ 1");
    }
    let hp = rec.h[n - 1];
    if (z - zeta).abs() < 1e-6 * (1.0 + z.abs()) {
        let x = 0.5 * (z + zeta);
        let dn = central_diff(|t| rec.p_real(n, t), x, 1e-6, 1)?;
        let dm = central_diff(|t| rec.p_real(n - 1, t), x, 1e-6, 1)?;
        return Ok((dn * rec.p_real(n - 1, x) - dm * rec.p_real(n, x)) / hp);
    }
    let (pz, qz) = (rec.p_real(n, z), rec.p_real(n - 1, z));
    let (pw, qw) = (rec.p_real(n, zeta), rec.p_real(n - 1, zeta));
    Ok((pz * qw - qz * pw) / (hp * (z - zeta)))
}

/// `Σ_{k<n} p_k(z)p_k(ζ)/h_k`.
pub fn cd_kernel_sum(rec: &RecurrenceData, n: usize, z: f64, zeta: f64) -> f64 {
    (0..n).map(|k| rec.p_real(k, z) * rec.p_real(k, zeta) / rec.h[k]).sum()
}

/// `Y_n(z) = [[p_n, ∫p_n ρ/(z-t)], [p_{n-1}/h_{n-1}, ∫p_{n-1} ρ/(z-t) / h_{n-1}]]`.
pub fn y_matrix(rec: &RecurrenceData, n: usize, z: Complex64) -> Result<CMat2> {
    if n == 0 || n > rec.n_max + 1 {
        return invalid(format!("Y_n needs 1 ≤ n ≤ n_max + 1, got {n}"));
    }
    let hp = rec.h[n - 1];
    let (cn, _) = rec.cauchy_pair(n, z);
    let (cm, _) = rec.cauchy_pair(n - 1, z);
    Ok(CMat2::new(rec.p(n, z), cn, rec.p(n - 1, z) / hp, cm / hp))
}

/// `dY_n/dz`.
pub fn y_matrix_deriv(rec: &RecurrenceData, n: usize, z: Complex64) -> Result<CMat2> {
    if n == 0 || n > rec.n_max + 1 {
        return invalid(format!("Y_n needs 1 ≤ n ≤ n_max + 1, got {n}"));
    }
    let hp = rec.h[n - 1];
    let (_, dn) = rec.cauchy_pair(n, z);
    let (_, dm) = rec.cauchy_pair(n - 1, z);
    Ok(CMat2::new(rec.p_deriv(n, z), -dn, rec.p_deriv(n - 1, z) / hp, -dm / hp))
}

/// `V_n(z) = [[z - b_{n+1}, -h_n], [1/h_n, 0]]`.
pub fn v_matrix(rec: &RecurrenceData, n: usize, z: Complex64) -> CMat2 {
    let hn = rec.h[n];
    let zero = Complex64::new(0.0, 0.0);
    CMat2::new(z - rec.b[n], Complex64::new(-hn, 0.0), Complex64::new(1.0 / hn, 0.0), zero)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YvReport {
    /// `‖Y_{n+1} - V_n Y_n‖` (max entry).
    pub recurrence: f64,
    /// `|det Y_n - 1|`.
    pub det: f64,
    pub y: CMat2,
}

pub fn yv_check(rec: &RecurrenceData, n: usize, z: Complex64) -> Result<YvReport> {
    if n + 1 > rec.n_max + 1 {
        return invalid("yv_check needs n + 1 ≤ n_max + 1");
    }
    let y = y_matrix(rec, n, z)?;
    let y1 = y_matrix(rec, n + 1, z)?;
    let diff = y1 - v_matrix(rec, n, z) * y;
    Ok(YvReport {
        recurrence: diff.iter().map(|e| e.norm()).fold(0.0, f64::max),
        det: (y.determinant() - 1.0).norm(),
        y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{make_arcsine, make_semicircle};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn semicircle_norms_and_offsets() {
        let m = make_semicircle(-1.0, 1.0).unwrap();
        let rec = stieltjes_recurrence(&m, 12).unwrap();
        for n in 0..=12 {
            let exact = 4f64.powi(-(n as i32));
            assert!(((rec.h(n) - exact) / exact).abs() < 1e-10, "n={n}");
            assert!(rec.b(n + 1).abs() < 1e-12);
        }
        for n in 1..=12 {
            assert!((rec.c(n) - rec.h(n) / rec.h(n - 1)).abs() < 1e-14);
        }
    }

    #[test]
    fn arcsine_recurrence() {
        let rec = stieltjes_recurrence(&make_arcsine(), 8).unwrap();
        assert!((rec.c(1) - 0.5).abs() < 1e-10);
        for n in 2..=8 {
            assert!((rec.c(n) - 0.25).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn chebyshev_u_values() {
        let rec = stieltjes_recurrence(&make_semicircle(-1.0, 1.0).unwrap(), 8).unwrap();
        assert!((rec.p_real(2, 1.0) - 0.75).abs() < 1e-12);
        assert_eq!(rec.p_real(0, 0.3), 1.0);
        let pair = eval_polys(&rec, 1, c(5.0)).unwrap();
        assert!((pair.q_recurrence - c(1.0)).norm() < 1e-14);
        let pair = eval_polys(&rec, 2, c(2.0)).unwrap();
        assert!((pair.q_recurrence - pair.q_quadrature).norm() < 1e-9);
    }

    #[test]
    fn derivative_of_recurrence() {
        let rec = stieltjes_recurrence(&make_semicircle(0.0, 3.0).unwrap(), 6).unwrap();
        for n in 0..=6 {
            let fd = central_diff(|x| rec.p_real(n, x), 0.7, 1e-5, 1).unwrap();
            assert!((rec.p_deriv(n, c(0.7)).re - fd).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn hankel_small_cases() {
        let m = make_semicircle(-1.0, 1.0).unwrap();
        let rec = stieltjes_recurrence(&m, 6).unwrap();
        assert!((hankel_d(&rec, 3).unwrap() - 1.0 / 64.0).abs() < 1e-14);
        assert_eq!(hankel_d(&rec, 1).unwrap(), rec.h(0));
        let mu = m.exact_moments(11).unwrap();
        let exact = hankel_d_exact(&mu, 6).unwrap();
        assert_eq!(exact, BigRational::new(1.into(), num_bigint::BigInt::from(4).pow(15)));
    }

    #[test]
    fn projection_limits() {
        let m = make_semicircle(-1.0, 1.0).unwrap();
        let rec = stieltjes_recurrence(&m, 6).unwrap();
        let (l, r) = projection_tau(&rec, 3, 2.0).unwrap();
        assert!((l - 1.0).abs() < 1e-10 && (r - 1.0).abs() < 1e-10);
        let (l, r) = projection_tau(&rec, 3, -2.0).unwrap();
        assert!(l.abs() < 1e-10 && r.abs() < 1e-10);
        let (l, r) = projection_tau(&rec, 3, 0.0).unwrap();
        assert!((l - r).abs() < 1e-6, "{l} {r}");
    }

    #[test]
    fn christoffel_darboux() {
        let rec = stieltjes_recurrence(&make_semicircle(0.0, 3.0).unwrap(), 6).unwrap();
        for &(z, w) in &[(0.3, 2.1), (1.0, 1.5), (2.5, -0.4)] {
            let k = cd_kernel(&rec, 4, z, w).unwrap();
            assert!((k - cd_kernel_sum(&rec, 4, z, w)).abs() < 1e-9);
            assert!((k - cd_kernel(&rec, 4, w, z).unwrap()).abs() < 1e-12);
        }
        let diag = cd_kernel(&rec, 4, 1.2, 1.2).unwrap();
        assert!((diag - cd_kernel_sum(&rec, 4, 1.2, 1.2)).abs() < 1e-7);
    }

    #[test]
    fn y_matrix_sample() {
        let rec = stieltjes_recurrence(&make_semicircle(-1.0, 1.0).unwrap(), 4).unwrap();
        let r = yv_check(&rec, 1, c(2.0)).unwrap();
        assert!((r.y[(0, 0)] - c(2.0)).norm() < 1e-12);
        assert!((r.y[(0, 1)] - c(0.0717968)).norm() < 1e-7);
        assert!((r.y[(1, 1)] - c(0.5358984)).norm() < 1e-7);
        assert!(r.det < 1e-7 && r.recurrence < 1e-7);
    }
}
