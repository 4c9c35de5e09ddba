//! Equilibrium measures of polynomial potentials.
//!
//! A measure carries its support intervals, a density and the constant
//! prefactor of its weight. Two normalizations coexist: the probability
//! density `ρ` (mass one) and the weight `w = 2πρ`; deformation identities
//! freeze the prefactor `c = 2N·a_{2N}` while endpoints move, see
//! [`EquilibriumMeasure::prefactor`].

use crate::error::{invalid, Result, TauError};
use crate::numerics::quad::{cosine_grid_upto, gauss_legendre, theta_nodes, QuadGrid};
use crate::numerics::rational::{arcsine_moments, semicircle_moments};
use num_complex::Complex64;
use num_rational::BigRational;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Real polynomial `v(x) = Σ a_j x^j` of even degree with positive leading
/// coefficient, or the zero polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    coeffs: Vec<f64>,
}

impl Potential {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return invalid("potential coefficients must be finite");
        }
        if let Some(&lead) = coeffs.last() {
            let deg = coeffs.len() - 1;
            if !deg.is_multiple_of(2) || deg == 0 || lead <= 0.0 {
                return invalid(format!(
                    "potential needs even positive degree and positive leading coefficient (degree {deg}, leading {lead})"
                ));
            }
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    /// `v(x) = 8/(b-a)² (x - (a+b)/2)²`, whose equilibrium measure is the
    /// semicircle law on `[a, b]`.
    pub fn semicircle(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return invalid("semicircle potential needs a < b");
        }
        let k = 8.0 / ((b - a) * (b - a));
        let m = 0.5 * (a + b);
        Self::new(vec![k * m * m, -2.0 * k * m, k])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `N` with degree `2N`.
    pub fn half_degree(&self) -> usize {
        self.degree() / 2
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        horner(&derivative(&self.coeffs), x)
    }

    pub fn deriv2(&self, x: f64) -> f64 {
        horner(&derivative(&derivative(&self.coeffs)), x)
    }

    pub fn deriv_complex(&self, z: Complex64) -> Complex64 {
        horner_c(&derivative(&self.coeffs), z)
    }
}

pub(crate) fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

pub(crate) fn horner_c(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

pub(crate) fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(j, &a)| j as f64 * a).collect()
}

/// Which closed form (if any) a measure has.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureKind {
    Semicircle { a: f64, b: f64 },
    Arcsine { a: f64, b: f64 },
    Custom,
}

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Probability measure on a finite union of intervals.
#[derive(Clone)]
pub struct EquilibriumMeasure {
    kind: MeasureKind,
    intervals: Vec<(f64, f64)>,
    density: DensityFn,
    prefactor: f64,
    /// `(v, u)` when the weight is `√(4u - v'²)`; used to continue `w'/w`.
    source: Option<(Potential, Vec<f64>)>,
}

impl fmt::Debug for EquilibriumMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquilibriumMeasure")
            .field("kind", &self.kind)
            .field("intervals", &self.intervals)
            .field("prefactor", &self.prefactor)
            .finish()
    }
}

/// Default node count for measure quadrature.
pub const DEFAULT_NODES: usize = 256;

/// Semicircle law `8/(π(b-a)²)·√((b-x)(x-a))` on `[a, b]`.
pub fn make_semicircle(a: f64, b: f64) -> Result<EquilibriumMeasure> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return invalid(format!("semicircle needs a < b, got ({a}, {b})"));
    }
    let k = 8.0 / (PI * (b - a) * (b - a));
    Ok(EquilibriumMeasure {
        kind: MeasureKind::Semicircle { a, b },
        intervals: vec![(a, b)],
        density: Arc::new(move |x| if x <= a || x >= b { 0.0 } else { k * ((b - x) * (x - a)).sqrt() }),
        prefactor: 16.0 / ((b - a) * (b - a)),
        source: None,
    })
}

/// Arcsine (Chebyshev) law `(1/π)(1-x²)^{-1/2}` on `(-1, 1)`.
pub fn make_arcsine() -> EquilibriumMeasure {
    make_arcsine_on(-1.0, 1.0).expect("fixed interval is valid")
}

/// Arcsine law `1/(π√((b-x)(x-a)))` on `(a, b)`.
pub fn make_arcsine_on(a: f64, b: f64) -> Result<EquilibriumMeasure> {
    if !(a < b) {
        return invalid(format!("arcsine needs a < b, got ({a}, {b})"));
    }
    Ok(EquilibriumMeasure {
        kind: MeasureKind::Arcsine { a, b },
        intervals: vec![(a, b)],
        density: Arc::new(move |x| if x <= a || x >= b { 0.0 } else { 1.0 / (PI * ((b - x) * (x - a)).sqrt()) }),
        prefactor: 2.0,
        source: None,
    })
}

impl EquilibriumMeasure {
    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Endpoints `δ_j` in increasing order.
    pub fn endpoints(&self) -> Vec<f64> {
        self.intervals.iter().flat_map(|&(l, h)| [l, h]).collect()
    }

    pub fn min_support(&self) -> f64 {
        self.intervals.first().map(|i| i.0).unwrap_or(0.0)
    }

    pub fn max_support(&self) -> f64 {
        self.intervals.last().map(|i| i.1).unwrap_or(0.0)
    }

    /// The δ-independent constant in front of the weight (`2N·a_{2N}`).
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn density(&self, x: f64) -> f64 {
        (self.density)(x)
    }

    /// `w = 2π ρ` on the support.
    pub fn weight(&self, x: f64) -> f64 {
        2.0 * PI * self.density(x)
    }

    /// `w(z)` continued off the support as `c ∏ √(z - δ_j)` (principal roots,
    /// descending `δ`), times the remaining square root for custom weights.
    pub fn weight_continued(&self, z: Complex64) -> Complex64 {
        let mut ends = self.endpoints();
        ends.reverse();
        let g: Complex64 = ends.iter().map(|&d| (z - d).sqrt()).product();
        match self.kind {
            MeasureKind::Semicircle { .. } => self.prefactor * g,
            MeasureKind::Arcsine { .. } => self.prefactor / g,
            MeasureKind::Custom => match &self.source {
                Some((v, u)) => {
                    let vp = v.deriv_complex(z);
                    let f = 4.0 * horner_c(u, z) - vp * vp;
                    g * (f / (g * g)).sqrt()
                }
                None => self.prefactor * g,
            },
        }
    }

    /// `w'(z)/w(z)` continued off the support.
    pub fn log_weight_derivative(&self, z: Complex64) -> Complex64 {
        match self.kind {
            MeasureKind::Semicircle { a, b } => 0.5 * (1.0 / (z - a) + 1.0 / (z - b)),
            MeasureKind::Arcsine { a, b } => -0.5 * (1.0 / (z - a) + 1.0 / (z - b)),
            MeasureKind::Custom => match &self.source {
                Some((v, u)) => {
                    // w² = 4u - v'², so w'/w = (4u' - 2v'v'')/(2(4u - v'²)).
                    let dv = derivative(v.coeffs());
                    let d2v = derivative(&dv);
                    let du = derivative(u);
                    let vp = horner_c(&dv, z);
                    let f = 4.0 * horner_c(u, z) - vp * vp;
                    let fp = 4.0 * horner_c(&du, z) - 2.0 * vp * horner_c(&d2v, z);
                    fp / (2.0 * f)
                }
                None => {
                    // Square-root vanishing at every endpoint.
                    self.endpoints().iter().map(|&d| 0.5 / (z - d)).sum()
                }
            },
        }
    }

    /// Quadrature against `ρ` restricted to `(-∞, upto)`; weights sum to the
    /// mass below `upto`.
    pub fn grid(&self, n: usize, upto: Option<f64>) -> Result<QuadGrid> {
        let upto = upto.unwrap_or(f64::INFINITY);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for &(lo, hi) in &self.intervals {
            match self.kind {
                MeasureKind::Semicircle { .. } => {
                    let th = theta_nodes(n, lo, hi, upto)?;
                    for ((t, w), x) in th.theta.iter().zip(&th.weights).zip(&th.x) {
                        nodes.push(*x);
                        weights.push(w * 2.0 / PI * t.sin().powi(2));
                    }
                }
                MeasureKind::Arcsine { .. } => {
                    let th = theta_nodes(n, lo, hi, upto)?;
                    nodes.extend_from_slice(&th.x);
                    weights.extend(th.weights.iter().map(|w| w / PI));
                }
                MeasureKind::Custom => {
                    let g = cosine_grid_upto(n, lo, hi, upto)?;
                    for (x, w) in g.nodes.iter().zip(&g.weights) {
                        nodes.push(*x);
                        weights.push(w * self.density(*x));
                    }
                }
            }
        }
        Ok(QuadGrid { nodes, weights, interval: (self.min_support(), upto.min(self.max_support())) }.sorted())
    }

    /// Total mass (should be 1).
    pub fn mass(&self, n: usize) -> Result<f64> {
        Ok(self.grid(n, None)?.total_weight())
    }

    /// Exact moments when the endpoints are exactly representable (every
    /// finite double is a dyadic rational). `None` for custom measures.
    pub fn exact_moments(&self, count: usize) -> Option<Vec<BigRational>> {
        let q = |x: f64| BigRational::from_float(x);
        match self.kind {
            MeasureKind::Semicircle { a, b } => Some(semicircle_moments(&q(a)?, &q(b)?, count)),
            MeasureKind::Arcsine { a, b } => Some(arcsine_moments(&q(a)?, &q(b)?, count)),
            MeasureKind::Custom => None,
        }
    }
}

/// `μ_j(t) = ∫_{S∩(-∞,t)} x^j ρ(dx)`; `t = None` gives the full moment.
pub fn moment(measure: &EquilibriumMeasure, j: usize, t: Option<f64>) -> Result<f64> {
    let g = measure.grid(DEFAULT_NODES.max(j + 8), t)?;
    Ok(g.integrate(|x| x.powi(j as i32)))
}

/// Cauchy transform `R(z) = ∫ ρ(dx)/(x - z)`.
pub fn cauchy_transform(measure: &EquilibriumMeasure, z: Complex64) -> Result<Complex64> {
    cauchy_transform_with(measure, z, DEFAULT_NODES)
}

pub fn cauchy_transform_with(measure: &EquilibriumMeasure, z: Complex64, nodes: usize) -> Result<Complex64> {
    if z.im.abs() < 1e-14 && measure.intervals().iter().any(|&(lo, hi)| z.re >= lo && z.re <= hi) {
        return Err(TauError::OnSupport(z.re));
    }
    let g = measure.grid(nodes, None)?;
    Ok(g.integrate_complex(|x| 1.0 / (x - z)))
}

/// `u(z) = ∫ (v'(z) - v'(x))/(z - x) ρ(dx)`, assembled from the moments:
/// `u(z) = Σ_j j a_j Σ_{k=0}^{j-2} μ_k z^{j-2-k}`. Coefficients ascending,
/// length `2N - 1` (empty for `v = 0`).
pub fn u_from_potential(v: &Potential, measure: &EquilibriumMeasure) -> Result<Vec<f64>> {
    let a = v.coeffs();
    if a.len() < 3 {
        return Ok(if v.is_zero() { vec![] } else { vec![0.0] });
    }
    let deg = a.len() - 1;
    let mu: Vec<f64> = (0..=deg - 2).map(|k| moment(measure, k, None)).collect::<Result<_>>()?;
    let mut u = vec![0.0; deg - 1];
    for (j, &aj) in a.iter().enumerate().skip(2) {
        for (k, &muk) in mu.iter().enumerate().take(j - 1) {
            u[j - 2 - k] += j as f64 * aj * muk;
        }
    }
    Ok(u)
}

/// Support, weight and the quadratic-identity residual from `(v, u)`.
#[derive(Debug, Clone)]
pub struct SupportReport {
    pub intervals: Vec<(f64, f64)>,
    /// Probability measure with density `√(4u - v'²)/(2π)` on the support.
    pub measure: EquilibriumMeasure,
    /// `max |R(z)² + v'(z)R(z) + u(z)|` over sample points off the support.
    pub residual: f64,
}

/// Locate `{x : 4u(x) - v'(x)² ≥ 0}` inside `scan` by a 2048-point sign scan
/// and bisection, and check `R² + v'R + u = 0` off the support.
pub fn support_and_weight(v: &Potential, u: &[f64], scan: (f64, f64)) -> Result<SupportReport> {
    let (lo, hi) = scan;
    if !(lo < hi) {
        return invalid("scan range needs lo < hi");
    }
    let dv = derivative(v.coeffs());
    let f = |x: f64| {
        let p = horner(&dv, x);
        4.0 * horner(u, x) - p * p
    };
    let m = 2048;
    let xs: Vec<f64> = (0..=m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect();
    let bisect = |mut a: f64, mut b: f64| {
        // f(a) and f(b) have opposite signs.
        let fa_pos = f(a) >= 0.0;
        while b - a > 1e-12 * (1.0 + a.abs().max(b.abs())) {
            let mid = 0.5 * (a + b);
            if (f(mid) >= 0.0) == fa_pos {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };
    let mut intervals = Vec::new();
    let mut start: Option<f64> = if f(xs[0]) > 0.0 { Some(xs[0]) } else { None };
    for w in xs.windows(2) {
        let (p, q) = (f(w[0]) > 0.0, f(w[1]) > 0.0);
        if !p && q {
            start = Some(bisect(w[0], w[1]));
        } else if p && !q {
            if let Some(s) = start.take() {
                intervals.push((s, bisect(w[0], w[1])));
            }
        }
    }
    if let Some(s) = start {
        intervals.push((s, hi));
    }
    intervals.retain(|(a, b)| b > a);
    if intervals.is_empty() {
        return Err(TauError::EmptySupport);
    }
    let uu = u.to_vec();
    let dens_f = move |x: f64| {
        let p = horner(&dv, x);
        (4.0 * horner(&uu, x) - p * p).max(0.0).sqrt() / (2.0 * PI)
    };
    let ints = intervals.clone();
    let measure = EquilibriumMeasure {
        kind: MeasureKind::Custom,
        intervals: intervals.clone(),
        density: Arc::new(move |x| if ints.iter().any(|&(a, b)| x > a && x < b) { dens_f(x) } else { 0.0 }),
        prefactor: if v.is_zero() { 0.0 } else { v.degree() as f64 * v.coeffs()[v.degree()] },
        source: Some((v.clone(), u.to_vec())),
    };
    let lo_s = measure.min_support();
    let hi_s = measure.max_support();
    let width = hi_s - lo_s;
    let samples =
        [Complex64::new(hi_s + 1.0, 0.0), Complex64::new(lo_s - 1.0, 0.0), Complex64::new(0.5 * (lo_s + hi_s), width)];
    let mut residual: f64 = 0.0;
    for z in samples {
        let r = cauchy_transform(&measure, z)?;
        let val = r * r + v.deriv_complex(z) * r + horner_c(u, z);
        residual = residual.max(val.norm());
    }
    Ok(SupportReport { intervals, measure, residual })
}

/// `v(x) - 2∫ log|x - y| ρ(dy)`; constant on the support, larger off it.
pub fn log_potential_gap(v: &Potential, measure: &EquilibriumMeasure, x: f64) -> Result<f64> {
    let n = 160;
    let mut total = 0.0;
    for &(lo, hi) in measure.intervals() {
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        // ρ(dy) = g(θ) dθ with y = c - r cos θ.
        let g = |t: f64| -> f64 {
            match measure.kind() {
                MeasureKind::Semicircle { .. } => 2.0 / PI * t.sin().powi(2),
                MeasureKind::Arcsine { .. } => 1.0 / PI,
                MeasureKind::Custom => measure.density(c - r * t.cos()) * r * t.sin(),
            }
        };
        let integrand = |t: f64| (x - (c - r * t.cos())).abs().ln() * g(t);
        if x > lo && x < hi {
            let tx = ((c - x) / r).acos();
            total += graded(&integrand, 0.0, tx, n)? + graded(&integrand, tx, PI, n)?;
        } else {
            total += gauss_legendre(n, 0.0, PI)?.integrate(integrand);
        }
    }
    let gap = v.eval(x) - 2.0 * total;
    if !gap.is_finite() {
        return Err(TauError::Degenerate(format!("log-potential quadrature failed at x = {x}")));
    }
    Ok(gap)
}

/// Integral over `[α, β]` of a function with a log singularity at whichever
/// endpoint is the split point; grades nodes toward both ends.
fn graded<F: Fn(f64) -> f64>(f: &F, alpha: f64, beta: f64, n: usize) -> Result<f64> {
    if beta <= alpha {
        return Ok(0.0);
    }
    // θ = α + (β-α)·φ(s) with φ(s) = s³(10 - 15s + 6s²), φ' = 30 s²(1-s)².
    let g = gauss_legendre(n, 0.0, 1.0)?;
    Ok(g.integrate(|s| {
        let phi = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
        let dphi = 30.0 * s * s * (1.0 - s) * (1.0 - s);
        (beta - alpha) * dphi * f(alpha + (beta - alpha) * phi)
    }))
}
