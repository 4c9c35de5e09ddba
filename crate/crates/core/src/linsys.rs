//! Diagonal linear systems `(-A, B, C)` realizing exponential sums, their
//! Gramians, the Fredholm tau function `det(I - L_x Q_x^σ)` and the closed-form
//! solution of the Gelfand–Levitan equation.

use crate::error::{invalid, Result, TauError};
use crate::numerics::diff::{central_diff, SECOND_STEP};
use crate::numerics::quad::exp_map_grid;
use nalgebra::{DMatrix, DVector};

/// `ψ(t) = Σ_ℓ χ_ℓ e^{-(κ₁+ℓ+1/2)t}` with `χ_ℓ ∈ ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSymbol {
    kappa1: f64,
    terms: Vec<DVector<f64>>,
}

impl ExpSymbol {
    pub fn new(kappa1: f64, terms: Vec<DVector<f64>>) -> Result<Self> {
        if !(kappa1 + 0.5 > 0.0) {
            return invalid(format!("decay rate κ₁ + 1/2 must be positive, got {}", kappa1 + 0.5));
        }
        let d = terms.first().map(|t| t.len()).unwrap_or(0);
        if d == 0 || terms.iter().any(|t| t.len() != d) {
            return invalid("symbol terms must share a nonzero dimension");
        }
        Ok(Self { kappa1, terms })
    }

    pub fn scalar(kappa1: f64, coeffs: &[f64]) -> Result<Self> {
        Self::new(kappa1, coeffs.iter().map(|&c| DVector::from_element(1, c)).collect())
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }

    pub fn terms(&self) -> &[DVector<f64>] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.terms[0].len()
    }

    pub fn rate(&self, l: usize) -> f64 {
        self.kappa1 + l as f64 + 0.5
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        self.terms
            .iter()
            .enumerate()
            .fold(DVector::zeros(self.dim()), |acc, (l, c)| acc + c * (-self.rate(l) * t).exp())
    }
}

/// `A = diag(a_ℓ)`, `B_ℓ = ‖χ_ℓ‖^{1/2}`, column `ℓ` of `C` is `χ_ℓ/‖χ_ℓ‖^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalLinearSystem {
    pub a: Vec<f64>,
    pub b: DVector<f64>,
    pub c: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
}

pub fn realize(sym: &ExpSymbol, sigma: DMatrix<f64>) -> Result<DiagonalLinearSystem> {
    let d = sym.dim();
    if sigma.nrows() != d || sigma.ncols() != d {
        return invalid(format!("σ must be {d}×{d}"));
    }
    if (&sigma - sigma.transpose()).amax() > 1e-14 {
        return Err(TauError::NotHermitian((&sigma - sigma.transpose()).amax()));
    }
    let kept: Vec<(usize, &DVector<f64>)> = sym.terms().iter().enumerate().filter(|(_, c)| c.norm() > 0.0).collect();
    let a = kept.iter().map(|(l, _)| sym.rate(*l)).collect();
    let b = DVector::from_iterator(kept.len(), kept.iter().map(|(_, c)| c.norm().sqrt()));
    let mut c = DMatrix::zeros(d, kept.len());
    for (j, (_, chi)) in kept.iter().enumerate() {
        c.set_column(j, &(*chi / chi.norm().sqrt()));
    }
    Ok(DiagonalLinearSystem { a, b, c, sigma })
}

/// `a = 1/2`, `B = C = 1`, `σ = -1`: `τ(2x) = 1 + e^{-2x}`.
pub fn soliton_system() -> DiagonalLinearSystem {
    DiagonalLinearSystem {
        a: vec![0.5],
        b: DVector::from_element(1, 1.0),
        c: DMatrix::from_element(1, 1, 1.0),
        sigma: DMatrix::from_element(1, 1, -1.0),
    }
}

impl DiagonalLinearSystem {
    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn dim(&self) -> usize {
        self.c.nrows()
    }

    fn decay(&self, t: f64) -> DVector<f64> {
        DVector::from_iterator(self.order(), self.a.iter().map(|a| (-a * t).exp()))
    }

    /// `C e^{-tA} B`.
    pub fn psi(&self, t: f64) -> DVector<f64> {
        &self.c * self.decay(t).component_mul(&self.b)
    }

    fn min_rate(&self) -> f64 {
        self.a.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `∫₀^∞ x ‖ψ(x)‖² dx = Σ χ_iᵀχ_j/(a_i + a_j)²`.
    pub fn weighted_norm(&self) -> f64 {
        let n = self.order();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let ci = self.c.column(i) * self.b[i];
                let cj = self.c.column(j) * self.b[j];
                acc += ci.dot(&cj) / (self.a[i] + self.a[j]).powi(2);
            }
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramianPair {
    pub x: f64,
    pub l: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

/// Closed-form Gramians: `L_x = ∫ₓ^∞ e^{-sA}BBᵀe^{-sA}`, `Q_x^σ = ∫ₓ^∞ e^{-sA}Cᵀσ C e^{-sA}`.
pub fn gramians(sys: &DiagonalLinearSystem, x: f64) -> Result<GramianPair> {
    if !(x >= 0.0) {
        return invalid(format!("gramians need x ≥ 0, got {x}"));
    }
    let n = sys.order();
    let ctsc = sys.c.transpose() * &sys.sigma * &sys.c;
    let mut l = DMatrix::zeros(n, n);
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let s = sys.a[i] + sys.a[j];
            let e = (-s * x).exp() / s;
            l[(i, j)] = sys.b[i] * sys.b[j] * e;
            q[(i, j)] = ctsc[(i, j)] * e;
        }
    }
    Ok(GramianPair { x, l, q })
}

/// Gramians by `nodes`-point exponential-map quadrature of the defining integrals.
pub fn gramians_quadrature(sys: &DiagonalLinearSystem, x: f64, nodes: usize) -> Result<GramianPair> {
    let g = exp_map_grid(nodes, x, 2.0 * sys.min_rate())?;
    let n = sys.order();
    let ctsc = sys.c.transpose() * &sys.sigma * &sys.c;
    let mut l = DMatrix::zeros(n, n);
    let mut q = DMatrix::zeros(n, n);
    for (&s, &w) in g.nodes.iter().zip(&g.weights) {
        let e = sys.decay(s);
        let eb = e.component_mul(&sys.b);
        l += &eb * eb.transpose() * w;
        let ed = DMatrix::from_diagonal(&e);
        q += &ed * &ctsc * &ed * w;
    }
    Ok(GramianPair { x, l, q })
}

/// `τ(2x) = det(I - L_x Q_x^σ)`.
pub fn tau_from_gramians(sys: &DiagonalLinearSystem, x: f64) -> Result<f64> {
    let g = gramians(sys, x)?;
    let n = sys.order();
    Ok((DMatrix::identity(n, n) - g.l * g.q).determinant())
}

/// Independent route: `det(I - λ Γ†σΓ)` with `Γ` the Hankel operator of
/// `ψ(· + 2x)` on `L²(0, ∞)`, discretized on `nodes` exp-mapped Gauss points.
pub fn tau_nystrom_oracle(sys: &DiagonalLinearSystem, x: f64, lambda: f64, nodes: usize) -> Result<f64> {
    let g = exp_map_grid(nodes, 0.0, 2.0 * sys.min_rate())?;
    let d = sys.dim();
    let n = g.len();
    let mut gam = DMatrix::zeros(d * n, n);
    for i in 0..n {
        for j in 0..n {
            let p = sys.psi(g.nodes[i] + g.nodes[j] + 2.0 * x) * (g.weights[i] * g.weights[j]).sqrt();
            for al in 0..d {
                gam[(i * d + al, j)] = p[al];
            }
        }
    }
    let mut big_sigma = DMatrix::zeros(d * n, d * n);
    for i in 0..n {
        big_sigma.view_mut((i * d, i * d), (d, d)).copy_from(&sys.sigma);
    }
    let k = gam.transpose() * big_sigma * &gam;
    Ok((DMatrix::identity(n, n) - k * lambda).determinant())
}

/// Blocks of `W(x,y) = [[U, v], [wᵀ, z]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GLSolution {
    pub x: f64,
    pub y: f64,
    pub u: DMatrix<f64>,
    pub v: DVector<f64>,
    pub w: DVector<f64>,
    pub z: f64,
}

impl GLSolution {
    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.v.len();
        let mut m = DMatrix::zeros(d + 1, d + 1);
        m.view_mut((0, 0), (d, d)).copy_from(&self.u);
        m.view_mut((0, d), (d, 1)).copy_from(&self.v);
        m.view_mut((d, 0), (1, d)).copy_from(&self.w.transpose());
        m[(d, d)] = self.z;
        m
    }
}

fn resolvent(sys: &DiagonalLinearSystem, x: f64) -> Result<(GramianPair, DMatrix<f64>)> {
    let g = gramians(sys, x)?;
    let n = sys.order();
    let m = DMatrix::identity(n, n) - &g.l * &g.q;
    let r = m.try_inverse().ok_or_else(|| TauError::Pole(format!("τ vanishes at x = {x}")))?;
    Ok((g, r))
}

pub fn gl_blocks(sys: &DiagonalLinearSystem, x: f64, y: f64) -> Result<GLSolution> {
    let (g, r) = resolvent(sys, x)?;
    let ex = DMatrix::from_diagonal(&sys.decay(x));
    let ey = DMatrix::from_diagonal(&sys.decay(y));
    let c = &sys.c;
    let b = &sys.b;
    let v = -(c * &ex * &r * &ey * b);
    let w = -(c * &ey * &r * &ex * b);
    let u = c * &ex * &r * &g.l * &ey * c.transpose();
    let z = (b.transpose() * &ey * &g.q * &r * &ex * b)[(0, 0)];
    Ok(GLSolution { x, y, u, v, w, z })
}

/// `H(x) = [[U(x,x)σ, v(x,x)], [w(x,x)ᵀσ, z(x,x)]]`.
pub fn hamiltonian(sys: &DiagonalLinearSystem, x: f64) -> Result<DMatrix<f64>> {
    let s = gl_blocks(sys, x, x)?;
    let d = sys.dim();
    let mut h = DMatrix::zeros(d + 1, d + 1);
    h.view_mut((0, 0), (d, d)).copy_from(&(&s.u * &sys.sigma));
    h.view_mut((0, d), (d, 1)).copy_from(&s.v);
    h.view_mut((d, 0), (1, d)).copy_from(&(s.w.transpose() * &sys.sigma));
    h[(d, d)] = s.z;
    Ok(h)
}

pub fn trace_h(sys: &DiagonalLinearSystem, x: f64) -> Result<f64> {
    Ok(hamiltonian(sys, x)?.trace())
}

/// `Ψ(t) = [[0, ψ(t)], [ψ(t)ᵀ, 0]]`.
pub fn psi_block(psi: &DVector<f64>) -> DMatrix<f64> {
    let d = psi.len();
    let mut m = DMatrix::zeros(d + 1, d + 1);
    m.view_mut((0, d), (d, 1)).copy_from(psi);
    m.view_mut((d, 0), (1, d)).copy_from(&psi.transpose());
    m
}

/// `[[U, v], [wᵀ, z]] ∗ [[0, ψ], [ψᵀ, 0]] = [[vψᵀ, Uσψ], [zψᵀ, wᵀσψ]]`.
/// Not associative; only ever applied with the symbol on the right.
pub fn star(w: &DMatrix<f64>, psi: &DVector<f64>, sigma: &DMatrix<f64>) -> DMatrix<f64> {
    let d = psi.len();
    let u = w.view((0, 0), (d, d));
    let v = w.view((0, d), (d, 1));
    let wt = w.view((d, 0), (1, d));
    let z = w[(d, d)];
    let mut out = DMatrix::zeros(d + 1, d + 1);
    out.view_mut((0, 0), (d, d)).copy_from(&(v * psi.transpose()));
    out.view_mut((0, d), (d, 1)).copy_from(&(u * sigma * psi));
    out.view_mut((d, 0), (1, d)).copy_from(&(psi.transpose() * z));
    out[(d, d)] = (wt * sigma * psi)[(0, 0)];
    out
}

pub const GL_NODES: usize = 128;

/// `max_y ‖W(x,y) + Ψ(x+y) + ∫ₓ^∞ W(x,s)∗Ψ(s+y) ds‖`, with the closed-form
/// blocks for `W` and quadrature for the integral.
pub fn gl_residual(sys: &DiagonalLinearSystem, x: f64, y_grid: &[f64]) -> Result<f64> {
    if y_grid.iter().any(|&y| y <= x) || x <= 0.0 {
        return invalid("gl_residual needs 0 < x < y");
    }
    let g = exp_map_grid(GL_NODES, x, 2.0 * sys.min_rate())?;
    let ws: Vec<DMatrix<f64>> =
        g.nodes.iter().map(|&s| gl_blocks(sys, x, s).map(|b| b.matrix())).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for &y in y_grid {
        let mut acc = gl_blocks(sys, x, y)?.matrix() + psi_block(&sys.psi(x + y));
        for ((&s, &wt), wm) in g.nodes.iter().zip(&g.weights).zip(&ws) {
            acc += star(wm, &sys.psi(s + y), &sys.sigma) * wt;
        }
        worst = worst.max(acc.norm());
    }
    Ok(worst)
}

fn log_tau_checked(sys: &DiagonalLinearSystem, x: f64, h: f64) -> Result<impl Fn(f64) -> f64 + '_> {
    let centre = tau_from_gramians(sys, x)?;
    for k in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let t = tau_from_gramians(sys, x + k * h)?;
        if t.abs() < 1e-12 || t.signum() != centre.signum() {
            log::warn!("τ(2x) vanishes near x = {x}; q has a pole there");
            return Err(TauError::Pole(format!("τ vanishes near x = {x}")));
        }
    }
    Ok(move |s: f64| tau_from_gramians(sys, s).map(|t| t.abs().ln()).unwrap_or(f64::NAN))
}

/// `q(x) = -2 d²/dx² log τ(2x)` (five-point stencil).
pub fn potential_q(sys: &DiagonalLinearSystem, x: f64) -> Result<f64> {
    let f = log_tau_checked(sys, x, SECOND_STEP)?;
    Ok(-2.0 * central_diff(f, x, SECOND_STEP, 2)?)
}

/// `q(x) = -2 d/dx trace H(x)`.
pub fn potential_q_from_trace(sys: &DiagonalLinearSystem, x: f64) -> Result<f64> {
    let h = SECOND_STEP;
    let f = |s: f64| trace_h(sys, s).unwrap_or(f64::NAN);
    let d = (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
    Ok(-2.0 * d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeReport {
    /// `max |(∂ₓ² - ∂_y²)W + 2 H'(x) W|`.
    pub residual: f64,
    /// `∫₀^∞ x ‖Ψ(x)‖² dx`.
    pub weighted_norm: f64,
    /// The weighted norm is below one, so the residual is meaningful.
    pub asserted: bool,
}

pub fn pde_check(sys: &DiagonalLinearSystem, x: f64, y: f64) -> Result<PdeReport> {
    let h = SECOND_STEP;
    let w = |s: f64, t: f64| gl_blocks(sys, s, t).map(|b| b.matrix());
    let d2 = |f: &dyn Fn(f64) -> Result<DMatrix<f64>>| -> Result<DMatrix<f64>> {
        Ok((-f(2.0 * h)? + f(h)? * 16.0 - f(0.0)? * 30.0 + f(-h)? * 16.0 - f(-2.0 * h)?) / (12.0 * h * h))
    };
    let wxx = d2(&|e| w(x + e, y))?;
    let wyy = d2(&|e| w(x, y + e))?;
    let hp = (-hamiltonian(sys, x + 2.0 * h)? + hamiltonian(sys, x + h)? * 8.0 - hamiltonian(sys, x - h)? * 8.0
        + hamiltonian(sys, x - 2.0 * h)?)
        / (12.0 * h);
    let res = wxx - wyy + hp * w(x, y)? * 2.0;
    let weighted_norm = sys.weighted_norm();
    Ok(PdeReport { residual: res.amax(), weighted_norm, asserted: weighted_norm < 1.0 })
}

/// Zeros of `τ(2x)` located by sign change on `x_grid` and bisection.
pub fn tau_zeros(sys: &DiagonalLinearSystem, x_grid: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let vals: Vec<f64> = x_grid.iter().map(|&x| tau_from_gramians(sys, x)).collect::<Result<_>>()?;
    for i in 1..x_grid.len() {
        if vals[i - 1].signum() != vals[i].signum() {
            let (mut lo, mut hi) = (x_grid[i - 1], x_grid[i]);
            let flo = vals[i - 1];
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if tau_from_gramians(sys, mid)?.signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationRow {
    pub n: usize,
    pub n_next: usize,
    pub t: f64,
    pub difference: f64,
    pub envelope: f64,
}

impl TruncationRow {
    pub fn within(&self) -> bool {
        self.difference <= self.envelope
    }
}

/// Scalar geometric symbol `χ_ℓ = m ρ^ℓ` truncated to `ℓ ≤ n` for each `n` in
/// `n_list`; successive truncations are compared against
/// `m e^{-(κ₁+n+1)t}/(1 - e^{-t})`.
pub fn truncation_convergence(
    kappa1: f64,
    m: f64,
    rho: f64,
    sigma: f64,
    n_list: &[usize],
    t_list: &[f64],
) -> Result<Vec<TruncationRow>> {
    if !(rho.abs() < 1.0) {
        return invalid("geometric tail needs |ρ| < 1");
    }
    let tau_n = |n: usize, t: f64| -> Result<f64> {
        let coeffs: Vec<f64> = (0..=n).map(|l| m * rho.powi(l as i32)).collect();
        let sys = realize(&ExpSymbol::scalar(kappa1, &coeffs)?, DMatrix::from_element(1, 1, sigma))?;
        tau_from_gramians(&sys, t)
    };
    let mut rows = Vec::new();
    for win in n_list.windows(2) {
        for &t in t_list {
            let diff = (tau_n(win[0], t)? - tau_n(win[1], t)?).abs();
            let env = m.abs() * (-(kappa1 + win[0] as f64 + 1.0) * t).exp() / (1.0 - (-t).exp());
            rows.push(TruncationRow { n: win[0], n_next: win[1], t, difference: diff, envelope: env });
        }
    }
    Ok(rows)
}

/// Value and the derivatives that enter the algebro-geometric equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub f: f64,
    pub d1: f64,
    pub d3: f64,
}

/// `|-R''' + 4(q - λ)R' + 2q'R|`.
pub fn ag_residual(q: Jet, r: Jet, lambda: f64) -> f64 {
    (-r.d3 + 4.0 * (q.f - lambda) * r.d1 + 2.0 * q.d1 * r.f).abs()
}

/// Derivatives by central stencils (`O(h⁴)`; third derivative on seven points).
pub fn jet_by_stencil<F: Fn(f64) -> f64>(f: F, x: f64) -> Jet {
    let h1 = 1e-3;
    let d1 = (-f(x + 2.0 * h1) + 8.0 * f(x + h1) - 8.0 * f(x - h1) + f(x - 2.0 * h1)) / (12.0 * h1);
    let h = 5e-3;
    let d3 = (-f(x + 3.0 * h) + 8.0 * f(x + 2.0 * h) - 13.0 * f(x + h) + 13.0 * f(x - h) - 8.0 * f(x - 2.0 * h)
        + f(x - 3.0 * h))
        / (8.0 * h * h * h);
    Jet { f: f(x), d1, d3 }
}

/// `q = -2 sech²x` with its derivatives in closed form.
pub fn sech_potential_jet(x: f64) -> Jet {
    let s = 1.0 / x.cosh().powi(2);
    let t = x.tanh();
    Jet { f: -2.0 * s, d1: 4.0 * s * t, d3: -16.0 * s * t * (3.0 * s - 1.0) }
}

/// `R = λ + 1 + q/2` for `q = -2 sech²x`.
pub fn sech_companion_jet(x: f64, lambda: f64) -> Jet {
    let q = sech_potential_jet(x);
    Jet { f: lambda + 1.0 + q.f / 2.0, d1: q.d1 / 2.0, d3: q.d3 / 2.0 }
}
