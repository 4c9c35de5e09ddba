//! Jacobi `θ₁` and Weierstrass `℘`.

use crate::error::{invalid, Result};
use crate::Complex64;
use std::f64::consts::PI;

/// Nome `q = e^{iπω}` with a truncation order for products and series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nome {
    q: Complex64,
    order: usize,
}

impl Nome {
    pub fn new(q: Complex64, order: usize) -> Result<Self> {
        if !(q.norm() < 1.0) {
            return invalid(format!("nome must satisfy |q| < 1, got {}", q.norm()));
        }
        if order == 0 {
            return invalid("truncation order must be positive");
        }
        Ok(Self { q, order })
    }

    pub fn real(q: f64, order: usize) -> Result<Self> {
        Self::new(Complex64::new(q, 0.0), order)
    }

    /// `q = e^{iπω}` for `Im ω > 0`, truncated where `|q|^{2T}` drops below 1e-17.
    pub fn from_ratio(omega: Complex64) -> Result<Self> {
        if !(omega.im > 0.0) {
            return invalid("period ratio needs positive imaginary part");
        }
        let q = (Complex64::i() * PI * omega).exp();
        let order = (17.0 * 10f64.ln() / (-2.0 * q.norm().ln())).ceil().max(1.0) as usize + 1;
        Self::new(q, order)
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `|q|^{2T}`, the size of the first dropped factor.
    pub fn truncation_bound(&self) -> f64 {
        self.q.norm().powi(2 * self.order as i32)
    }

    /// `ω` with `q = e^{iπω}` (principal logarithm).
    pub fn ratio(&self) -> Complex64 {
        self.q.ln() / (Complex64::i() * PI)
    }

    pub(crate) fn quarter_power(&self) -> Complex64 {
        self.q.powf(0.25)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMethod {
    Product,
    Series,
}

pub fn theta1(x: Complex64, nome: &Nome, method: ThetaMethod) -> Complex64 {
    let q = nome.q;
    let q4 = nome.quarter_power();
    match method {
        ThetaMethod::Product => {
            let c2 = (x * 2.0).cos();
            let mut acc = q4 * x.sin() * 2.0;
            let mut q2n = Complex64::new(1.0, 0.0);
            for _ in 1..=nome.order {
                q2n *= q * q;
                acc *= (Complex64::new(1.0, 0.0) - q2n * c2 * 2.0 + q2n * q2n) * (Complex64::new(1.0, 0.0) - q2n);
            }
            acc
        }
        ThetaMethod::Series => {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..=nome.order {
                let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
                acc += q4 * q.powu((n * (n + 1)) as u32) * (x * (2 * n + 1) as f64).sin() * sign;
            }
            acc
        }
    }
}

/// `(log θ₁)''` from the product: `-csc²x + Σ (log f_n)''` with
/// `f_n = 1 - 2q^{2n}cos 2x + q^{4n}`.
pub fn log_theta1_second(x: Complex64, nome: &Nome) -> Complex64 {
    let s = x.sin();
    let mut acc = -(s * s).inv();
    let (c2, s2) = ((x * 2.0).cos(), (x * 2.0).sin());
    let mut big_q = Complex64::new(1.0, 0.0);
    for _ in 1..=nome.order {
        big_q *= nome.q * nome.q;
        let f = Complex64::new(1.0, 0.0) - big_q * c2 * 2.0 + big_q * big_q;
        let fp = big_q * s2 * 4.0;
        let fpp = big_q * c2 * 8.0;
        acc += fpp / f - (fp / f) * (fp / f);
    }
    acc
}

/// Additive constant making `-(log θ₁)'' + c = x^{-2} + O(x²)`.
pub fn wp_constant(nome: &Nome) -> Complex64 {
    let mut c = Complex64::new(-1.0 / 3.0, 0.0);
    let mut big_q = Complex64::new(1.0, 0.0);
    for _ in 1..=nome.order {
        big_q *= nome.q * nome.q;
        let one_minus = Complex64::new(1.0, 0.0) - big_q;
        c += big_q * 8.0 / (one_minus * one_minus);
    }
    c
}

/// `℘` for the lattice `πℤ + πωℤ`, `q = e^{iπω}`.
pub fn wp(x: Complex64, nome: &Nome) -> Complex64 {
    let tau = nome.ratio();
    let dist = lattice_distance(x, Complex64::new(PI, 0.0), tau * PI);
    if dist < 1e-3 {
        log::warn!("wp: x = {x} lies within {dist:.1e} of a lattice point");
    }
    -log_theta1_second(x, nome) + wp_constant(nome)
}

/// `℘(z)` for the lattice `w1 ℤ + w2 ℤ` by rescaling.
pub fn wp_periods(z: Complex64, w1: Complex64, w2: Complex64) -> Result<Complex64> {
    let mut ratio = w2 / w1;
    if ratio.im.abs() < 1e-14 {
        return invalid("periods must be linearly independent over the reals");
    }
    if ratio.im < 0.0 {
        ratio = -ratio;
    }
    let nome = Nome::from_ratio(ratio)?;
    let scale = Complex64::new(PI, 0.0) / w1;
    Ok(wp(z * scale, &nome) * scale * scale)
}

/// `℘` with real roots `e₁ > e₂ > e₃` (not necessarily summing to zero),
/// normalized so `℘'² = 4∏(℘ - e_j)`.
pub fn wp_real_roots(z: Complex64, roots: [f64; 3]) -> Result<Complex64> {
    let mut e = roots;
    e.sort_by(|a, b| b.total_cmp(a));
    if !(e[0] > e[1] && e[1] > e[2]) {
        return invalid("roots must be distinct");
    }
    let span = e[0] - e[2];
    let k = ((e[1] - e[2]) / span).sqrt();
    let kp = ((e[0] - e[1]) / span).sqrt();
    let w1 = Complex64::new(2.0 * super::picard::elliptic_k(k)? / span.sqrt(), 0.0);
    let w2 = Complex64::new(0.0, 2.0 * super::picard::elliptic_k(kp)? / span.sqrt());
    let mean = (e[0] + e[1] + e[2]) / 3.0;
    Ok(wp_periods(z, w1, w2)? + mean)
}

fn lattice_distance(x: Complex64, w1: Complex64, w2: Complex64) -> f64 {
    // reduce x into the fundamental cell by solving x = s w1 + t w2
    let det = w1.re * w2.im - w1.im * w2.re;
    let s = (x.re * w2.im - x.im * w2.re) / det;
    let t = (w1.re * x.im - w1.im * x.re) / det;
    let mut best = f64::INFINITY;
    for ds in [0.0, 1.0] {
        for dt in [0.0, 1.0] {
            let p = w1 * (s.floor() + ds) + w2 * (t.floor() + dt);
            best = best.min((x - p).norm());
        }
    }
    best
}

/// Direct lattice sum `x⁻² + Σ'_{|ω| ≤ R} [(x - ω)⁻² - ω⁻²]`; returns the
/// value and the change from radius `R/2` as a tail estimate.
pub fn wp_lattice_sum(x: Complex64, w1: Complex64, w2: Complex64, radius: f64) -> (Complex64, f64) {
    let partial = |r: f64| -> Complex64 {
        let det = (w1.re * w2.im - w1.im * w2.re).abs();
        // |m w1 + n w2| ≤ r forces |m| ≤ r|w2|/det, |n| ≤ r|w1|/det
        let mmax = (r * w2.norm() / det).ceil() as i64 + 1;
        let nmax = (r * w1.norm() / det).ceil() as i64 + 1;
        let mut acc = (x * x).inv();
        for m in -mmax..=mmax {
            for n in -nmax..=nmax {
                if m == 0 && n == 0 {
                    continue;
                }
                let w = w1 * m as f64 + w2 * n as f64;
                if w.norm() > r {
                    continue;
                }
                let d = x - w;
                acc += (d * d).inv() - (w * w).inv();
            }
        }
        acc
    };
    let full = partial(radius);
    let half = partial(radius / 2.0);
    (full, (full - half).norm())
}
