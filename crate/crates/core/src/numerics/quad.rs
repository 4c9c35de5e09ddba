//! Fixed quadrature rules.
//!
//! Gauss–Legendre nodes come from Newton iteration on the three-term
//! recurrence for `P_n`. Weights that vanish like a square root at both ends
//! of an interval are handled by the cosine substitution
//! `x = c - r cos θ`, which turns `√((hi-x)(x-lo)) dx` into the smooth
//! `r² sin² θ dθ`.

use crate::error::{invalid, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Quadrature rule: `Σ weights[i] f(nodes[i]) ≈ ∫ f`.
///
/// For grids returned by [`gauss_legendre`] and [`cosine_grid`] the weights
/// are positive and sum to `hi - lo`. Measure-adapted grids built elsewhere
/// reuse this type with weights summing to the mass of the measure.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

impl QuadGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Sort nodes ascending, carrying weights along.
    pub(crate) fn sorted(mut self) -> Self {
        let mut idx: Vec<usize> = (0..self.nodes.len()).collect();
        idx.sort_by(|&i, &j| self.nodes[i].total_cmp(&self.nodes[j]));
        self.nodes = idx.iter().map(|&i| self.nodes[i]).collect();
        self.weights = idx.iter().map(|&i| self.weights[i]).collect();
        self
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
fn legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton.
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_eval(n, z);
        if d.is_finite() {
            dp = d;
        }
        let wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre_eval(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// `n`-point Gauss–Legendre rule on `[lo, hi]`, exact for polynomials of
/// degree `2n - 1`.
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Result<QuadGrid> {
    if n == 0 {
        return invalid("gauss_legendre needs n >= 1");
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return invalid(format!("gauss_legendre needs lo < hi, got [{lo}, {hi}]"));
    }
    let (x, w) = legendre_reference(n);
    let c = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    Ok(QuadGrid {
        nodes: x.iter().map(|t| c + r * t).collect(),
        weights: w.iter().map(|t| r * t).collect(),
        interval: (lo, hi),
    })
}

/// Plain rule for `∫_lo^hi f(x) dx` through `x = c - r cos θ`, Gauss–Legendre
/// in `θ ∈ [0, π]`. Spectrally accurate when `f` carries square-root
/// endpoint behaviour.
pub fn cosine_grid(n: usize, lo: f64, hi: f64) -> Result<QuadGrid> {
    cosine_grid_upto(n, lo, hi, hi)
}

/// Like [`cosine_grid`] but integrating only over `[lo, min(upto, hi)]`.
/// Returns an empty grid when `upto <= lo`.
pub fn cosine_grid_upto(n: usize, lo: f64, hi: f64, upto: f64) -> Result<QuadGrid> {
    let th = theta_nodes(n, lo, hi, upto)?;
    let r = 0.5 * (hi - lo);
    let weights = th.theta.iter().zip(&th.weights).map(|(t, w)| w * r * t.sin()).collect();
    Ok(QuadGrid { nodes: th.x, weights, interval: (lo, upto.min(hi)) })
}

/// Gauss–Legendre nodes in `θ` for the map `x = c - r cos θ`, truncated at
/// `x = upto`.
pub(crate) struct ThetaNodes {
    pub theta: Vec<f64>,
    pub weights: Vec<f64>,
    pub x: Vec<f64>,
}

pub(crate) fn theta_nodes(n: usize, lo: f64, hi: f64, upto: f64) -> Result<ThetaNodes> {
    if n == 0 {
        return invalid("cosine grid needs n >= 1");
    }
    if !(lo < hi) {
        return invalid(format!("cosine grid needs lo < hi, got [{lo}, {hi}]"));
    }
    let c = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    if upto <= lo {
        return Ok(ThetaNodes { theta: vec![], weights: vec![], x: vec![] });
    }
    let t_max = if upto >= hi { PI } else { ((c - upto) / r).clamp(-1.0, 1.0).acos() };
    let g = gauss_legendre(n, 0.0, t_max)?;
    let x = g.nodes.iter().map(|t| c - r * t.cos()).collect();
    Ok(ThetaNodes { theta: g.nodes, weights: g.weights, x })
}

/// Rule for `∫_{x0}^∞ f(s) ds` through `s = x0 - ln(u)/rate`, Gauss–Legendre
/// in `u ∈ (0, 1)`. Exact-in-the-limit for sums of `e^{-k·rate·s}`.
pub fn exp_map_grid(n: usize, x0: f64, rate: f64) -> Result<QuadGrid> {
    if !(rate > 0.0) {
        return invalid(format!("exp_map_grid needs rate > 0, got {rate}"));
    }
    let g = gauss_legendre(n, 0.0, 1.0)?;
    let nodes = g.nodes.iter().map(|u| x0 - u.ln() / rate).collect();
    let weights = g.nodes.iter().zip(&g.weights).map(|(u, w)| w / (rate * u)).collect();
    Ok(QuadGrid { nodes, weights, interval: (x0, f64::INFINITY) }.sorted())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_rule() {
        let g = gauss_legendre(1, -1.0, 1.0).unwrap();
        assert_eq!(g.nodes, vec![0.0]);
        assert!((g.weights[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn quartic_exact() {
        let g = gauss_legendre(5, -1.0, 1.0).unwrap();
        assert!((g.integrate(|x| x.powi(4)) - 0.4).abs() < 1e-14);
    }

    #[test]
    fn polynomial_exactness_up_to_degree() {
        for n in [3usize, 8, 20, 64] {
            let g = gauss_legendre(n, 0.5, 2.0).unwrap();
            for k in 0..(2 * n) as i32 {
                let exact = (2f64.powi(k + 1) - 0.5f64.powi(k + 1)) / (k as f64 + 1.0);
                let got = g.integrate(|x| x.powi(k));
                assert!(((got - exact) / exact).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn grid_invariants() {
        let g = gauss_legendre(33, -2.0, 5.0).unwrap();
        assert!(g.weights.iter().all(|&w| w > 0.0));
        assert!(g.nodes.windows(2).all(|p| p[0] < p[1]));
        assert!(g.nodes.iter().all(|&x| x > -2.0 && x < 5.0));
        assert!((g.total_weight() - 7.0).abs() < 1e-12 * 7.0);
    }

    #[test]
    fn quarter_disk_area() {
        let plain = gauss_legendre(64, -1.0, 1.0).unwrap();
        let err = (plain.integrate(|x| (1.0 - x * x).sqrt()) - PI / 2.0).abs();
        assert!(err < 1e-3);
        let cos = cosine_grid(64, -1.0, 1.0).unwrap();
        let err = (cos.integrate(|x| (1.0 - x * x).max(0.0).sqrt()) - PI / 2.0).abs();
        assert!(err < 1e-12, "{err}");
        assert!((cos.total_weight() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_cosine_grid() {
        let g = cosine_grid_upto(64, -1.0, 1.0, 0.0).unwrap();
        let half = g.integrate(|x| (1.0 - x * x).max(0.0).sqrt());
        assert!((half - PI / 4.0).abs() < 1e-12);
        assert!(cosine_grid_upto(8, -1.0, 1.0, -3.0).unwrap().is_empty());
    }

    #[test]
    fn exponential_tail() {
        let g = exp_map_grid(32, 0.5, 1.0).unwrap();
        let v = g.integrate(|s| (-2.0 * s).exp());
        assert!((v - (-1.0f64).exp() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(gauss_legendre(0, 0.0, 1.0).is_err());
        assert!(gauss_legendre(4, 1.0, 1.0).is_err());
        assert!(exp_map_grid(4, 0.0, 0.0).is_err());
    }
}
