//! Trace-free residues, signature classes, the vanishing solution `Z` of the
//! Fuchsian system, the integrable kernel it generates and the factorization
//! of that kernel through Hankel operators on `L²((0,1), dy/y)`.

use crate::error::{invalid, Result, TauError};
use crate::isomonodromy::{build_phi, to_c, ResidueFamily};
use crate::numerics::quad::{exp_map_grid, gauss_legendre};
use crate::orthopoly::{cd_kernel, RecurrenceData};
use crate::{unit_j, CMat2, Complex64, Mat2};
use nalgebra::{SymmetricEigen, Vector2};
use std::f64::consts::PI;

/// `β_j = α_j + ν_j I` with `ν_j = -trace(α_j)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTraceFamily {
    pub poles: Vec<f64>,
    pub betas: Vec<Mat2>,
    pub nus: Vec<f64>,
    /// `κ_j = √(-det β_j)` when `det β_j < 0`.
    pub kappas: Vec<Option<f64>>,
}

impl ZeroTraceFamily {
    pub fn from_betas(poles: Vec<f64>, betas: Vec<Mat2>) -> Result<Self> {
        if poles.len() != betas.len() || poles.len() < 2 {
            return invalid("need matching poles and residues (at least two)");
        }
        if betas.iter().any(|b| b.trace().abs() > 1e-12 * (1.0 + b.norm())) {
            return invalid("residues must be trace free");
        }
        let kappas = betas.iter().map(kappa_of).collect();
        Ok(Self { nus: vec![0.0; poles.len()], poles, betas, kappas })
    }

    /// `B(z) = Σ β_j/(z - δ_j)`.
    pub fn b_matrix(&self, x: f64) -> Mat2 {
        self.poles.iter().zip(&self.betas).map(|(&d, b)| b / (x - d)).sum()
    }
}

fn kappa_of(b: &Mat2) -> Option<f64> {
    let d = b.determinant();
    (d < 0.0).then(|| (-d).sqrt())
}

/// Trace-free family with the check `|Σν_j - (2N-1)/2|`.
pub fn nu_beta(fam: &ResidueFamily) -> (ZeroTraceFamily, f64) {
    let nus: Vec<f64> = fam.residues.iter().map(|a| -0.5 * a.trace()).collect();
    let betas: Vec<Mat2> = fam.residues.iter().zip(&nus).map(|(a, &nu)| a + Mat2::identity() * nu).collect();
    let kappas = betas.iter().map(kappa_of).collect();
    let sum: f64 = nus.iter().sum();
    let resid = (sum - (2.0 * fam.big_n as f64 - 1.0) / 2.0).abs();
    (ZeroTraceFamily { poles: fam.poles.clone(), betas, nus, kappas }, resid)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JBetaPair {
    pub at_a: Mat2,
    pub at_b: Mat2,
    /// `n(n+1)(b-a)²/16 - (2n+1)²/16`.
    pub det: f64,
}

/// The symmetric matrices `Jβ_a`, `Jβ_b` of the semicircle family in closed
/// form (the form built on the scaled lower-left residue entry).
pub fn jbeta_semicircle(a: f64, b: f64, n: usize, h_prev: f64) -> JBetaPair {
    let nf = n as f64;
    let s = b - a;
    let off = (2.0 * nf + 1.0) / 4.0;
    let p = nf * s / (2.0 * h_prev);
    let r = (nf + 1.0) * s * h_prev / 8.0;
    JBetaPair {
        at_a: Mat2::new(p, off, off, r),
        at_b: Mat2::new(-p, off, off, -r),
        det: nf * (nf + 1.0) * s * s / 16.0 - (2.0 * nf + 1.0).powi(2) / 16.0,
    }
}

/// Congruence classes of real symmetric 2×2 matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignatureClass {
    PlusIdentity,
    MinusIdentity,
    PlusRankOne,
    MinusRankOne,
    Indefinite,
    Zero,
}

/// `γᵀσγ = m` with `σ` the canonical diagonal representative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignatureEntry {
    pub class: SignatureClass,
    pub sigma: Mat2,
    pub gamma: Mat2,
}

impl SignatureEntry {
    pub fn reconstruction_residual(&self, m: &Mat2) -> f64 {
        (self.gamma.transpose() * self.sigma * self.gamma - m).abs().max()
    }
}

pub fn signature_classify(m: &Mat2) -> Result<SignatureEntry> {
    let scale = m.abs().max().max(1.0);
    if (m[(0, 1)] - m[(1, 0)]).abs() > 1e-12 * scale {
        return Err(TauError::NotHermitian((m[(0, 1)] - m[(1, 0)]).abs()));
    }
    let eig = SymmetricEigen::new(*m);
    let tol = 1e-12 * scale;
    let sign = |l: f64| {
        if l > tol {
            1.0
        } else if l < -tol {
            -1.0
        } else {
            0.0
        }
    };
    // positive first, then negative, then zero
    let rank = |l: f64| match sign(l) as i32 {
        1 => 0,
        -1 => 1,
        _ => 2,
    };
    let mut idx = [0usize, 1];
    idx.sort_by_key(|&i| rank(eig.eigenvalues[i]));
    let mut sigma = Mat2::zeros();
    let mut gamma = Mat2::zeros();
    for (row, &i) in idx.iter().enumerate() {
        let l = eig.eigenvalues[i];
        sigma[(row, row)] = sign(l);
        let v = eig.eigenvectors.column(i);
        let g = l.abs().sqrt();
        gamma[(row, 0)] = g * v[0];
        gamma[(row, 1)] = g * v[1];
    }
    let class = match (sigma[(0, 0)] as i32, sigma[(1, 1)] as i32) {
        (1, 1) => SignatureClass::PlusIdentity,
        (-1, -1) => SignatureClass::MinusIdentity,
        (1, 0) => SignatureClass::PlusRankOne,
        (-1, 0) => SignatureClass::MinusRankOne,
        (1, -1) => SignatureClass::Indefinite,
        _ => SignatureClass::Zero,
    };
    Ok(SignatureEntry { class, sigma, gamma })
}

/// Real 2×1 solution of `Z' = B(x)Z` on `(δ₁, δ₂)` with `Z ~ (x-δ₁)^κ₁ v₁`.
///
/// Near `δ₁` the Frobenius series is summed directly; further out the
/// solution is tabulated by RK4 and read back by cubic Hermite
/// interpolation (the derivative comes from the equation itself).
#[derive(Debug, Clone)]
pub struct VectorSolution {
    fam: ZeroTraceFamily,
    pub kappa: f64,
    pub v1: Vector2<f64>,
    coeffs: Vec<Vector2<f64>>,
    series_radius: f64,
    table_x: Vec<f64>,
    table_z: Vec<Vector2<f64>>,
    pub grid: Vec<f64>,
    pub samples: Vec<Vector2<f64>>,
}

const SERIES_TERMS: usize = 48;
const TABLE_STEP: f64 = 1e-3;

pub fn ode_solve_z(fam: &ZeroTraceFamily, x_grid: &[f64], scale: f64) -> Result<VectorSolution> {
    let d1 = fam.poles[0];
    let kappa = fam.kappas[0].ok_or_else(|| TauError::Degenerate("β₁ needs real nonzero eigenvalues ±κ₁".into()))?;
    if ((2.0 * kappa) - (2.0 * kappa).round()).abs() < 1e-12 {
        return Err(TauError::Resonance(kappa));
    }
    let others: Vec<(f64, Mat2)> = fam.poles.iter().zip(&fam.betas).skip(1).map(|(&d, b)| (d - d1, *b)).collect();
    let d_min = others.iter().map(|(d, _)| d.abs()).fold(f64::INFINITY, f64::min);
    let upper = others.iter().map(|(d, _)| *d).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
    let x_max = x_grid.iter().copied().fold(d1, f64::max);
    if x_grid.iter().any(|&x| x <= d1 || x - d1 >= upper) {
        return invalid("grid must lie inside (δ₁, δ₂)");
    }
    // eigenvector for +κ: (β - κ)v = 0
    let b1 = fam.betas[0];
    let v = {
        let r0 = Vector2::new(b1[(0, 0)] - kappa, b1[(0, 1)]);
        let r1 = Vector2::new(b1[(1, 0)], b1[(1, 1)] - kappa);
        let r = if r0.norm() >= r1.norm() { r0 } else { r1 };
        if r.norm() == 0.0 {
            return Err(TauError::Degenerate("β₁ is scalar".into()));
        }
        let v = Vector2::new(-r[1], r[0]);
        v / v.norm()
    };
    let v1 = v * scale;
    // ((κ+j)I - β₁)c_j = Σ_{m=1}^{j} G_m c_{j-m},  G_m = -Σ_k β_k/d_k^m
    let g: Vec<Mat2> = (0..=SERIES_TERMS)
        .map(|m| if m == 0 { Mat2::zeros() } else { others.iter().map(|(d, b)| -b / d.powi(m as i32)).sum() })
        .collect();
    let mut coeffs = vec![v1];
    for j in 1..=SERIES_TERMS {
        let rhs: Vector2<f64> = (1..=j).map(|m| g[m] * coeffs[j - m]).sum();
        let lhs = Mat2::identity() * (kappa + j as f64) - b1;
        let c = lhs.try_inverse().ok_or(TauError::Resonance(kappa))? * rhs;
        coeffs.push(c);
    }
    let series_radius = 0.25 * d_min;
    let mut sol = VectorSolution {
        fam: fam.clone(),
        kappa,
        v1,
        coeffs,
        series_radius,
        table_x: vec![],
        table_z: vec![],
        grid: x_grid.to_vec(),
        samples: vec![],
    };
    let start = d1 + series_radius;
    if x_max > start {
        let steps = ((x_max - start) / TABLE_STEP).ceil().max(1.0) as usize;
        let z0 = sol.series(series_radius);
        let traj = crate::numerics::ode::rk4_integrate(
            |x, y| {
                let z = fam.b_matrix(x) * Vector2::new(y[0], y[1]);
                vec![z[0], z[1]]
            },
            &[z0[0], z0[1]],
            start,
            x_max,
            steps,
        )?;
        sol.table_x = traj.times;
        sol.table_z = traj.states.iter().map(|s| Vector2::new(s[0], s[1])).collect();
    }
    sol.samples = x_grid.iter().map(|&x| sol.eval(x)).collect();
    Ok(sol)
}

impl VectorSolution {
    pub fn family(&self) -> &ZeroTraceFamily {
        &self.fam
    }

    fn series(&self, eps: f64) -> Vector2<f64> {
        let mut acc = Vector2::zeros();
        let mut pw = eps.powf(self.kappa);
        for c in &self.coeffs {
            acc += c * pw;
            pw *= eps;
        }
        acc
    }

    /// `Z(x)` for `x` in `(δ₁, max grid]`.
    pub fn eval(&self, x: f64) -> Vector2<f64> {
        let eps = x - self.fam.poles[0];
        if eps <= 0.0 {
            return Vector2::zeros();
        }
        if eps <= self.series_radius || self.table_x.is_empty() {
            return self.series(eps);
        }
        let tx = &self.table_x;
        let i = match tx.binary_search_by(|t| t.total_cmp(&x)) {
            Ok(i) => return self.table_z[i],
            Err(i) => i.clamp(1, tx.len() - 1),
        };
        let (x0, x1) = (tx[i - 1], tx[i]);
        let (z0, z1) = (self.table_z[i - 1], self.table_z[i]);
        let (d0, d1) = (self.fam.b_matrix(x0) * z0, self.fam.b_matrix(x1) * z1);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        z0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * (h * (t3 - 2.0 * t2 + t))
            + z1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * (h * (t3 - t2))
    }

    pub fn deriv(&self, x: f64) -> Vector2<f64> {
        self.fam.b_matrix(x) * self.eval(x)
    }
}

/// `K(x,y) = √(xy) Z(y)ᵀ J Z(x)/(x - y)`, with `x Z(x)ᵀ J Z'(x)` on the diagonal.
pub fn kernel_k(sol: &VectorSolution, x: f64, y: f64) -> f64 {
    let j = unit_j();
    if (x - y).abs() < 1e-12 * (1.0 + x.abs()) {
        let z = sol.eval(x);
        return x * (z.transpose() * j * sol.deriv(x))[(0, 0)];
    }
    let (zx, zy) = (sol.eval(x), sol.eval(y));
    (x * y).sqrt() * (zy.transpose() * j * zx)[(0, 0)] / (x - y)
}

/// Signature data of the block `β = diag[-δ_k Jβ_k]_{k≥2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureProfile {
    pub blocks: Vec<Mat2>,
    pub entries: Vec<SignatureEntry>,
}

pub fn signature_profile(fam: &ZeroTraceFamily) -> Result<SignatureProfile> {
    let j = unit_j();
    let d1 = fam.poles[0];
    let blocks: Vec<Mat2> = fam
        .poles
        .iter()
        .zip(&fam.betas)
        .skip(1)
        .map(|(&d, b)| {
            let m = (d1 - d) * j * b;
            0.5 * (m + m.transpose())
        })
        .collect();
    let entries = blocks.iter().map(signature_classify).collect::<Result<_>>()?;
    Ok(SignatureProfile { blocks, entries })
}

/// `ψ(x) = γ φ(x)`, `φ(x) = column[√x Z(x)/(x - δ_k)]_{k≥2}`.
pub fn psi(sol: &VectorSolution, prof: &SignatureProfile, x: f64) -> Vec<f64> {
    let z = sol.eval(x);
    let mut out = Vec::with_capacity(2 * prof.entries.len());
    for (&d, e) in sol.fam.poles.iter().skip(1).zip(&prof.entries) {
        let phi = z * (x.sqrt() / (x - d));
        let g = e.gamma * phi;
        out.extend_from_slice(&[g[0], g[1]]);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport {
    pub pairs: Vec<(f64, f64)>,
    pub direct: Vec<f64>,
    pub factored: Vec<f64>,
    pub residual: f64,
    /// `(x∂ₓ + y∂_y)K` against its closed form, max over the pairs.
    pub homogeneity_residual: f64,
    /// `∫₀¹ log(1/u) ‖ψ(u)‖² du/u`.
    pub hilbert_schmidt_weight: f64,
}

/// Compare `K(x,y)` with `∫₀¹ ψ(yz)ᵀ σ ψ(zx) dz/z` (substitution `z = e^{-t}`,
/// then `t = -log(u)/(2κ₁)` with `quad_n` Gauss nodes in `u`).
pub fn factorization_check(
    sol: &VectorSolution,
    prof: &SignatureProfile,
    pairs: &[(f64, f64)],
    quad_n: usize,
) -> Result<FactorizationReport> {
    let fam = &sol.fam;
    if fam.poles[0] != 0.0 || fam.poles[1] <= 1.0 {
        return invalid("factorization needs δ₁ = 0 and δ₂ > 1 (rescale first)");
    }
    let g = exp_map_grid(quad_n, 0.0, 2.0 * sol.kappa)?;
    let sig: Vec<f64> = prof.entries.iter().flat_map(|e| [e.sigma[(0, 0)], e.sigma[(1, 1)]]).collect();
    let quad = |x: f64, y: f64| -> f64 {
        g.integrate(|t| {
            let z = (-t).exp();
            let a = psi(sol, prof, y * z);
            let b = psi(sol, prof, z * x);
            a.iter().zip(&b).zip(&sig).map(|((p, q), s)| p * s * q).sum()
        })
    };
    let mut direct = Vec::new();
    let mut factored = Vec::new();
    let mut residual: f64 = 0.0;
    let mut homogeneity_residual: f64 = 0.0;
    let j = unit_j();
    for &(x, y) in pairs {
        let k = kernel_k(sol, x, y);
        let f = quad(x, y);
        residual = residual.max((k - f).abs());
        direct.push(k);
        factored.push(f);
        if (x - y).abs() > 1e-3 {
            // Euler derivative along (x, y) → (λx, λy) at λ = 1
            let h = 1e-5;
            let lhs =
                (kernel_k(sol, x * (1.0 + h), y * (1.0 + h)) - kernel_k(sol, x * (1.0 - h), y * (1.0 - h))) / (2.0 * h);
            let (zx, zy) = (sol.eval(x), sol.eval(y));
            let rhs: f64 = fam
                .poles
                .iter()
                .zip(&fam.betas)
                .skip(1)
                .map(|(&d, b)| -d * (x * y).sqrt() / ((x - d) * (y - d)) * (zy.transpose() * j * b * zx)[(0, 0)])
                .sum();
            homogeneity_residual = homogeneity_residual.max((lhs - rhs).abs());
        }
    }
    let hs = g.integrate(|t| {
        let p = psi(sol, prof, (-t).exp());
        t * p.iter().map(|v| v * v).sum::<f64>()
    });
    Ok(FactorizationReport {
        pairs: pairs.to_vec(),
        direct,
        factored,
        residual,
        homogeneity_residual,
        hilbert_schmidt_weight: hs,
    })
}

/// `(x∂ₓ + y∂_y)[√(xy)/(x - y)]` by central differences (vanishes by
/// homogeneity of degree zero).
pub fn homogeneity_building_block(x: f64, y: f64) -> f64 {
    let f = |l: f64| (l * l * x * y).sqrt() / (l * (x - y));
    let h = 1e-5;
    (f(1.0 + h) - f(1.0 - h)) / (2.0 * h)
}

/// Three-pole family with `β₁ = diag(κ, -κ)` at 0 and `β_k = -J S_k` (so
/// `Jβ_k = S_k`) at `d2`, `d3`.
pub fn positive_pair_family(kappa: f64, d2: f64, d3: f64, s2: Mat2, s3: Mat2) -> Result<ZeroTraceFamily> {
    let j = unit_j();
    ZeroTraceFamily::from_betas(vec![0.0, d2, d3], vec![Mat2::new(kappa, 0.0, 0.0, -kappa), -j * s2, -j * s3])
}

/// `S Sᵀ = m1`, `S D² Sᵀ = m2` with `D` diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Congruence {
    pub s: Mat2,
    pub d: Mat2,
    pub residual: f64,
}

pub fn simultaneous_congruence(m1: &Mat2, m2: &Mat2) -> Result<Congruence> {
    let chol =
        m1.cholesky().ok_or_else(|| TauError::InvalidArgument("first matrix must be positive definite".into()))?;
    let l = chol.l();
    let li = l.try_inverse().ok_or(TauError::SingularMatrix)?;
    let inner = li * m2 * li.transpose();
    let inner = 0.5 * (inner + inner.transpose());
    let eig = SymmetricEigen::new(inner);
    let mut q = eig.eigenvectors;
    for c in 0..2 {
        let col = q.column(c);
        let flip = if col[0].abs() >= col[1].abs() { col[0] < 0.0 } else { col[1] < 0.0 };
        if flip {
            q.column_mut(c).neg_mut();
        }
    }
    let s = l * q;
    let lam = eig.eigenvalues;
    if lam.iter().any(|&x| x < -1e-12 * (1.0 + lam.amax())) {
        return invalid("second matrix must be positive semidefinite");
    }
    let d = Mat2::new(lam[0].max(0.0).sqrt(), 0.0, 0.0, lam[1].max(0.0).sqrt());
    let r1 = (s * s.transpose() - m1).abs().max();
    let r2 = (s * d * d * s.transpose() - m2).abs().max();
    Ok(Congruence { s, d, residual: r1.max(r2) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MKernelReport {
    /// `M_n(z,ζ)₁₁` from `Ψᵀ J Ψ / (-2πi(z-ζ))`.
    pub m11: Complex64,
    /// `∏(z-δ)^ν ∏(ζ-δ)^ν E_n(z,ζ)`.
    pub cd_side: f64,
    pub residual: f64,
    /// `M₁₁` with the conjugate transpose divided by `M₁₁` (a pure phase).
    pub adjoint_ratio: Complex64,
}

/// Top-left entry of the kernel built from `Ψ_n = ∏(z-δ_j)^{ν_j}Φ_n` against
/// the Christoffel–Darboux kernel. Real `z, ζ > max δ`.
pub fn m_kernel_check(
    rec: &RecurrenceData,
    fam: &ZeroTraceFamily,
    n: usize,
    z: f64,
    zeta: f64,
) -> Result<MKernelReport> {
    let top = fam.poles.iter().copied().fold(f64::MIN, f64::max);
    if z <= top || zeta <= top {
        return invalid("m_kernel_check needs z, ζ beyond the last pole");
    }
    if z == zeta {
        return invalid("m_kernel_check needs z ≠ ζ");
    }
    let pref = |x: f64| -> f64 { fam.poles.iter().zip(&fam.nus).map(|(&d, &nu)| (x - d).powf(nu)).product() };
    let psi_at =
        |x: f64| -> Result<CMat2> { Ok(build_phi(rec, n, Complex64::new(x, 0.0))?.phi * Complex64::new(pref(x), 0.0)) };
    let (pz, pw) = (psi_at(z)?, psi_at(zeta)?);
    let j = to_c(&unit_j());
    let denom = Complex64::new(0.0, -2.0 * PI) * (z - zeta);
    let m11 = (pz.transpose() * j * pw)[(0, 0)] / denom;
    let m11_adj = (pz.adjoint() * j * pw)[(0, 0)] / denom;
    let cd_side = pref(z) * pref(zeta) * cd_kernel(rec, n, z, zeta)?;
    Ok(MKernelReport { m11, cd_side, residual: (m11 - cd_side).norm(), adjoint_ratio: m11_adj / m11 })
}

/// Gauss–Legendre helper reused by the sampled homogeneity test.
pub fn sample_pairs(count_per_axis: usize, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
    let g = gauss_legendre(count_per_axis, lo, hi)?;
    let mut out = Vec::new();
    for &x in &g.nodes {
        for &y in &g.nodes {
            out.push((x, y));
        }
    }
    Ok(out)
}
