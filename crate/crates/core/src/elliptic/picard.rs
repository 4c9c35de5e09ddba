//! Complete elliptic integrals, Legendre's equation and the Picard case of
//! the sixth Painlevé equation.

use super::theta::wp_real_roots;
use crate::error::{Result, TauError};
use crate::numerics::quad::gauss_legendre;
use crate::Complex64;
use std::f64::consts::PI;

/// `K(m) = ∫₀^{π/2} dθ/√(1 - m² sin²θ)` by the arithmetic–geometric mean.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(TauError::Domain(format!("K(m) needs 0 ≤ m < 1, got {m}")));
    }
    let (mut a, mut g) = (1.0f64, (1.0 - m * m).sqrt());
    for _ in 0..64 {
        if (a - g).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = next;
    }
    Ok(PI / (2.0 * a))
}

/// Quadrature oracle for [`elliptic_k`].
pub fn elliptic_k_quadrature(m: f64, nodes: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(TauError::Domain(format!("K(m) needs 0 ≤ m < 1, got {m}")));
    }
    let g = gauss_legendre(nodes, 0.0, PI / 2.0)?;
    Ok(g.integrate(|t| 1.0 / (1.0 - m * m * t.sin().powi(2)).sqrt()))
}

fn picard_u(c1: f64, c2: f64, t: f64) -> Result<f64> {
    Ok(c1 * elliptic_k(t.sqrt())? + c2 * elliptic_k((1.0 - t).sqrt())?)
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.02 && t < 0.98) {
        return Err(TauError::Domain(format!("t = {t} too close to 0 or 1")));
    }
    Ok(())
}

/// `max_t |t(t-1)u'' + (2t-1)u' + u/4|` for `u = c₁K(√t) + c₂K(√(1-t))`.
pub fn legendre_picard_check(c1: f64, c2: f64, t_grid: &[f64]) -> Result<f64> {
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        check_t(t)?;
        let u = |s: f64| picard_u(c1, c2, s).unwrap_or(f64::NAN);
        let d1 = (-u(t + 2.0 * h) + 8.0 * u(t + h) - 8.0 * u(t - h) + u(t - 2.0 * h)) / (12.0 * h);
        let d2 = (-u(t + 2.0 * h) + 16.0 * u(t + h) - 30.0 * u(t) + 16.0 * u(t - h) - u(t - 2.0 * h)) / (12.0 * h * h);
        let r = t * (t - 1.0) * d2 + (2.0 * t - 1.0) * d1 + u(t) / 4.0;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// `λ(t) = ℘(u(t)/2)` on the curve `w² = 4λ(λ-1)(λ-t)`.
pub fn picard_lambda(c1: f64, c2: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    let u = picard_u(c1, c2, t)?;
    Ok(wp_real_roots(Complex64::new(u / 2.0, 0.0), [1.0, t, 0.0])?.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PviConstants {
    pub k0: f64,
    pub k1: f64,
    pub kt: f64,
    pub kinf: f64,
}

/// Which constant multiplies the `(λ - t)⁻²` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PviForm {
    /// `(k_t - 1)`
    ShiftedKt,
    /// `k_t`
    PlainKt,
}

/// Residual of the sixth Painlevé equation for `λ` sampled through a
/// closure, with five-point derivatives.
pub fn pvi_residual<F: Fn(f64) -> f64>(lambda: F, t: f64, k: PviConstants, form: PviForm) -> f64 {
    let h = 1e-3;
    let l = lambda(t);
    let d1 = (-lambda(t + 2.0 * h) + 8.0 * lambda(t + h) - 8.0 * lambda(t - h) + lambda(t - 2.0 * h)) / (12.0 * h);
    let d2 = (-lambda(t + 2.0 * h) + 16.0 * lambda(t + h) - 30.0 * l + 16.0 * lambda(t - h) - lambda(t - 2.0 * h))
        / (12.0 * h * h);
    let lhs = d2 + (1.0 / t + 1.0 / (t - 1.0) + 1.0 / (l - t)) * d1
        - 0.5 * (1.0 / l + 1.0 / (l - 1.0) + 1.0 / (l - t)) * d1 * d1;
    let last = match form {
        PviForm::ShiftedKt => k.kt - 1.0,
        PviForm::PlainKt => k.kt,
    };
    let bracket = k.kinf - k.k0 * t / (l * l) + k.k1 * (t - 1.0) / ((l - 1.0) * (l - 1.0))
        - last * t * (t - 1.0) / ((l - t) * (l - t));
    let rhs = 0.5 * l * (l - 1.0) * (l - t) / (t * t * (t - 1.0) * (t - 1.0)) * bracket;
    (lhs - rhs).abs()
}
