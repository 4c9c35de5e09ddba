//! Genus-2 Riemann theta functions, the rational off-diagonal reduction and
//! the symplectic action on the Siegel half-space.

use crate::error::{invalid, Result, TauError};
use crate::numerics::rational::RationalMatrix;
use crate::{CMat2, Complex64, MaxNorm};
use nalgebra::{Matrix2, SymmetricEigen};
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use std::f64::consts::PI;

const TAIL: f64 = 1e-12;

fn ipi() -> Complex64 {
    Complex64::new(0.0, PI)
}

/// `θ(z|τ) = Σ_k exp(iπτk² + 2πikz)`.
pub fn theta_genus1(z: Complex64, tau: Complex64) -> Result<Complex64> {
    if !(tau.im > 0.0) {
        return Err(TauError::Domain(format!("θ(z|τ) needs Im τ > 0, got {tau}")));
    }
    let n = cutoff(tau.im, z.im.abs());
    Ok((-n..=n)
        .map(|k| {
            let k = k as f64;
            (ipi() * tau * k * k + ipi() * 2.0 * k * z).exp()
        })
        .sum())
}

/// Smallest `N` with `exp(-πλN² + 2πN|Im s|)` below the tail target.
fn cutoff(lambda_min: f64, im_s: f64) -> i64 {
    let target = -TAIL.ln() + 5.0;
    let mut n = 1i64;
    while PI * lambda_min * (n * n) as f64 - 2.0 * PI * n as f64 * im_s < target {
        n += 1;
    }
    n
}

/// Largest violation of the Siegel conditions: asymmetry, or the negative
/// of the smallest eigenvalue of `Im Ω` when that is not positive.
pub fn siegel_defect(omega: &CMat2) -> (f64, f64) {
    let asym = (omega - omega.transpose()).max_norm();
    let im = omega.map(|z| z.im);
    let sym = (im + im.transpose()) * 0.5;
    let min_eig = SymmetricEigen::new(sym).eigenvalues.min();
    (asym, min_eig)
}

fn check_siegel(omega: &CMat2) -> Result<f64> {
    let (asym, min_eig) = siegel_defect(omega);
    if asym > 1e-10 || !(min_eig > 0.0) {
        return Err(TauError::Domain(format!(
            "Ω is not in the Siegel half-space (asymmetry {asym:.2e}, min eig Im Ω {min_eig:.3e})"
        )));
    }
    Ok(min_eig)
}

/// `[[a, b], [b, d]]` with rational `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannMatrix2 {
    a: Complex64,
    b: Rational64,
    d: Complex64,
}

impl RiemannMatrix2 {
    pub fn new(a: Complex64, b: Rational64, d: Complex64) -> Result<Self> {
        let m = Self { a, b, d };
        check_siegel(&m.matrix())?;
        Ok(m)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Rational64 {
        self.b
    }

    pub fn d(&self) -> Complex64 {
        self.d
    }

    /// Smallest positive `p` with `pb ∈ ℤ`.
    pub fn p(&self) -> i64 {
        *self.b.denom()
    }

    pub fn matrix(&self) -> CMat2 {
        let b = Complex64::new(self.b.to_f64().unwrap_or(f64::NAN), 0.0);
        CMat2::new(self.a, b, b, self.d)
    }
}

/// `Θ(s|Ω) = Σ_{n∈ℤ²} exp(iπ⟨Ωn,n⟩ + 2πi⟨s,n⟩)` by the direct double sum
/// over `|n_i| ≤ cutoff`; `None` picks the cutoff from the smallest
/// eigenvalue of `Im Ω`.
pub fn riemann_theta2(s: [Complex64; 2], omega: &CMat2, cutoff_n: Option<usize>) -> Result<Complex64> {
    let lam = check_siegel(omega)?;
    let im_s = s[0].im.hypot(s[1].im);
    let n = cutoff_n.map(|c| c as i64).unwrap_or_else(|| cutoff(lam, im_s));
    let mut acc = Complex64::zero();
    for n1 in -n..=n {
        for n2 in -n..=n {
            let (x, y) = (n1 as f64, n2 as f64);
            let quad = omega[(0, 0)] * x * x + (omega[(0, 1)] + omega[(1, 0)]) * x * y + omega[(1, 1)] * y * y;
            acc += (ipi() * quad + ipi() * 2.0 * (s[0] * x + s[1] * y)).exp();
        }
    }
    Ok(acc)
}

/// Splitting `n_i = p k_i + residue`:
/// `Σ_{r,μ<p} e^{iπ(ar² + 2brμ + dμ²)} e^{2πi(rs + μt)} θ(ps + par | p²a) θ(pt + pdμ | p²d)`.
pub fn theta2_reduced(s: [Complex64; 2], m: &RiemannMatrix2) -> Result<Complex64> {
    let p = m.p();
    let pf = p as f64;
    let b = m.b.to_f64().unwrap_or(f64::NAN);
    let mut acc = Complex64::zero();
    for r in 0..p {
        for mu in 0..p {
            let (r, mu) = (r as f64, mu as f64);
            let phase =
                (ipi() * (m.a * r * r + 2.0 * b * r * mu + m.d * mu * mu) + ipi() * 2.0 * (s[0] * r + s[1] * mu)).exp();
            let t1 = theta_genus1(s[0] * pf + m.a * pf * r, m.a * pf * pf)?;
            let t2 = theta_genus1(s[1] * pf + m.d * pf * mu, m.d * pf * pf)?;
            acc += phase * t1 * t2;
        }
    }
    Ok(acc)
}

/// The splitting with real exponentials and shifts `θ(ps + r | p²a)`,
/// `θ(pt + μ | p²d)`; kept to report how far it sits from the double sum.
pub fn theta2_reduced_real_phase(s: [Complex64; 2], m: &RiemannMatrix2) -> Result<Complex64> {
    let p = m.p();
    let pf = p as f64;
    let b = m.b.to_f64().unwrap_or(f64::NAN);
    let mut acc = Complex64::zero();
    for r in 0..p {
        for mu in 0..p {
            let (r, mu) = (r as f64, mu as f64);
            let phase =
                ((m.a * r * r + 2.0 * b * r * mu + m.d * mu * mu) * PI + (s[0] * r + s[1] * mu) * 2.0 * PI).exp();
            let t1 = theta_genus1(s[0] * pf + r, m.a * pf * pf)?;
            let t2 = theta_genus1(s[1] * pf + mu, m.d * pf * pf)?;
            acc += phase * t1 * t2;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionReport {
    pub direct: Complex64,
    pub reduced: Complex64,
    pub residual: f64,
    /// Distance of the real-phase variant from the double sum.
    pub real_phase_residual: f64,
}

pub fn reduction_check(s: [Complex64; 2], m: &RiemannMatrix2) -> Result<ReductionReport> {
    let direct = riemann_theta2(s, &m.matrix(), None)?;
    let reduced = theta2_reduced(s, m)?;
    let variant = theta2_reduced_real_phase(s, m)?;
    Ok(ReductionReport {
        direct,
        reduced,
        residual: (direct - reduced).norm(),
        real_phase_residual: (direct - variant).norm(),
    })
}

/// The 4×4 unit `[[0, -I], [I, 0]]`.
pub fn symplectic_unit() -> RationalMatrix {
    let mut r = vec![(0, 1); 16];
    r[2] = (-1, 1);
    r[4 + 3] = (-1, 1);
    r[8] = (1, 1);
    r[12 + 1] = (1, 1);
    RationalMatrix::from_ratios(4, 4, &r).expect("4x4")
}

/// `XJXᵗ = J` in exact arithmetic.
pub fn is_symplectic(x: &RationalMatrix) -> Result<bool> {
    if x.rows() != 4 || x.cols() != 4 {
        return invalid("X must be 4×4");
    }
    let j = symplectic_unit();
    Ok(x.mul(&j)?.mul(&x.transpose())? == j)
}

fn blocks(x: &RationalMatrix) -> [Matrix2<f64>; 4] {
    let v = x.to_f64();
    let blk = |r0: usize, c0: usize| {
        Matrix2::new(v[r0 * 4 + c0], v[r0 * 4 + c0 + 1], v[(r0 + 1) * 4 + c0], v[(r0 + 1) * 4 + c0 + 1])
    };
    [blk(0, 0), blk(0, 2), blk(2, 0), blk(2, 2)]
}

fn cplx(m: &Matrix2<f64>) -> CMat2 {
    m.map(|v| Complex64::new(v, 0.0))
}

fn act_parts(x: &RationalMatrix, omega: &CMat2) -> Result<(CMat2, CMat2)> {
    if !is_symplectic(x)? {
        return Err(TauError::NotSymplectic);
    }
    check_siegel(omega)?;
    let [al, be, ga, de] = blocks(x);
    let den = cplx(&al) + cplx(&be) * omega;
    let num = cplx(&ga) + cplx(&de) * omega;
    if den.determinant().norm() < 1e-14 {
        return Err(TauError::Domain("α + βΩ is singular".into()));
    }
    Ok((num, den))
}

/// `φ_X(Ω) = (γ + δΩ)(α + βΩ)⁻¹` for `X = [[α, β], [γ, δ]]`; the result is
/// checked against the Siegel conditions. `φ_X ∘ φ_Y = φ_{XY}`.
pub fn symplectic_act(x: &RationalMatrix, omega: &CMat2) -> Result<CMat2> {
    let (num, den) = act_parts(x, omega)?;
    let out = num * den.try_inverse().ok_or_else(|| TauError::Domain("α + βΩ is singular".into()))?;
    check_siegel(&out)?;
    Ok(out)
}

/// `(α + βΩ)⁻¹(γ + δΩ)`, unchecked; it is symmetric only for special `X`.
pub fn symplectic_act_left(x: &RationalMatrix, omega: &CMat2) -> Result<CMat2> {
    let (num, den) = act_parts(x, omega)?;
    Ok(den.try_inverse().ok_or_else(|| TauError::Domain("α + βΩ is singular".into()))? * num)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn shear() -> RationalMatrix {
        // [[I, S], [0, I]] with S = [[1, 1/2], [1/2, 2]]
        let r = [
            (1, 1),
            (0, 1),
            (1, 1),
            (1, 2),
            (0, 1),
            (1, 1),
            (1, 2),
            (2, 1),
            (0, 1),
            (0, 1),
            (1, 1),
            (0, 1),
            (0, 1),
            (0, 1),
            (0, 1),
            (1, 1),
        ];
        RationalMatrix::from_ratios(4, 4, &r).unwrap()
    }

    fn scaling() -> RationalMatrix {
        // [[A, 0], [0, A^{-T}]] with A = [[2, 1], [0, 1/3]]
        let r = [
            (2, 1),
            (1, 1),
            (0, 1),
            (0, 1),
            (0, 1),
            (1, 3),
            (0, 1),
            (0, 1),
            (0, 1),
            (0, 1),
            (1, 2),
            (0, 1),
            (0, 1),
            (0, 1),
            (-3, 2),
            (3, 1),
        ];
        RationalMatrix::from_ratios(4, 4, &r).unwrap()
    }

    #[test]
    fn genus_one_factorization() {
        let omega = CMat2::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        let t = riemann_theta2([c(0.0, 0.0); 2], &omega, None).unwrap();
        let t3 = theta_genus1(c(0.0, 0.0), c(0.0, 1.0)).unwrap();
        assert!((t - t3 * t3).norm() < 1e-10);
        // θ₃(0|i) = π^{1/4}/Γ(3/4)
        assert!((t3.re - 1.086_434_811_213_308).abs() < 1e-14);
        let m = RiemannMatrix2::new(c(0.3, 1.2), Rational64::from_integer(0), c(-0.1, 0.8)).unwrap();
        let s = [c(0.1, 0.05), c(-0.2, 0.1)];
        let direct = riemann_theta2(s, &m.matrix(), None).unwrap();
        let prod = theta_genus1(s[0], m.a()).unwrap() * theta_genus1(s[1], m.d()).unwrap();
        assert!((direct - prod).norm() < 1e-12);
    }

    #[test]
    fn reduction_matches_double_sum() {
        let m = RiemannMatrix2::new(c(0.0, 2.0), Rational64::new(1, 2), c(0.0, 2.0)).unwrap();
        assert_eq!(m.p(), 2);
        let r = reduction_check([c(0.1, 0.0), c(0.2, 0.0)], &m).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        assert!(r.real_phase_residual > 1e-3);
        let m = RiemannMatrix2::new(c(0.2, 1.1), Rational64::new(2, 3), c(-0.3, 1.4)).unwrap();
        let r = reduction_check([c(0.3, 0.1), c(-0.1, 0.2)], &m).unwrap();
        assert!(r.residual < 1e-10 * r.direct.norm().max(1.0), "{r:?}");
    }

    #[test]
    fn non_siegel_rejected() {
        let bad = CMat2::new(c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        assert!(matches!(riemann_theta2([c(0.0, 0.0); 2], &bad, None), Err(TauError::Domain(_))));
        assert!(RiemannMatrix2::new(c(0.0, -1.0), Rational64::new(1, 2), c(0.0, 1.0)).is_err());
    }

    #[test]
    fn symplectic_action() {
        let omega = RiemannMatrix2::new(c(0.0, 2.0), Rational64::new(1, 2), c(0.0, 2.0)).unwrap().matrix();
        let id = RationalMatrix::identity(4);
        assert!((symplectic_act(&id, &omega).unwrap() - omega).max_norm() < 1e-15);
        let j = symplectic_unit();
        let inv = symplectic_act(&j, &omega).unwrap();
        let (asym, min_eig) = siegel_defect(&inv);
        assert!(asym < 1e-10 && min_eig > 0.0);
        for (x, y) in [(shear(), j.clone()), (j.clone(), scaling()), (scaling(), shear())] {
            let xy = x.mul(&y).unwrap();
            let lhs = symplectic_act(&x, &symplectic_act(&y, &omega).unwrap()).unwrap();
            let rhs = symplectic_act(&xy, &omega).unwrap();
            assert!((lhs - rhs).max_norm() < 1e-10);
        }
        let left = symplectic_act_left(&shear(), &omega).unwrap();
        assert!(siegel_defect(&left).0 > 1e-3);
        let mut r = vec![(0, 1); 16];
        for i in 0..4 {
            r[i * 5] = (2, 1);
        }
        let not = RationalMatrix::from_ratios(4, 4, &r).unwrap();
        assert_eq!(symplectic_act(&not, &omega), Err(TauError::NotSymplectic));
    }
}
