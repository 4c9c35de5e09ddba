//! Periodic linear systems `(-A, B, C; E)` with 2×2 diagonal blocks, the
//! Lamé system and the theta-quotient builder.

use super::theta::{theta1, wp, Nome, ThetaMethod};
use crate::error::{invalid, Result, TauError};
use crate::numerics::quad::gauss_legendre;
use crate::{CMat2, Complex64, MaxNorm};
use std::f64::consts::PI;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn cj() -> CMat2 {
    CMat2::new(c(0.0), c(-1.0), c(1.0), c(0.0))
}

/// `e^M` for a complex 2×2 matrix.
pub fn expm2(m: &CMat2) -> CMat2 {
    let half = m.trace() / 2.0;
    let n = m - CMat2::identity() * half;
    // n² = -det(n) I
    let d2 = -n.determinant();
    let d = d2.sqrt();
    let (ch, shc) = if d.norm() < 1e-6 {
        (c(1.0) + d2 / 2.0 + d2 * d2 / 24.0, c(1.0) + d2 / 6.0 + d2 * d2 / 120.0)
    } else {
        (d.cosh(), d.sinh() / d)
    };
    (CMat2::identity() * ch + n * shc) * half.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Periodicity {
    /// `exp(2πA) = I`
    Periodic,
    /// `exp(2πA) = -I`
    Anti,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicBlock {
    pub a: CMat2,
    pub b: CMat2,
    pub c: CMat2,
    pub e: CMat2,
    pub eps: f64,
}

impl PeriodicBlock {
    fn decay(&self, x: f64) -> CMat2 {
        expm2(&(self.a * c(-x)))
    }

    pub fn phi(&self, x: f64) -> CMat2 {
        self.c * self.decay(x) * self.b
    }

    /// `I - e^{-xA} E e^{-xA}`.
    pub fn gap(&self, x: f64) -> CMat2 {
        let ex = self.decay(x);
        CMat2::identity() - ex * self.e * ex
    }

    pub fn det(&self, x: f64) -> Complex64 {
        self.gap(x).determinant()
    }

    /// `W(x,y) = Ce^{-xA}(I - e^{-xA}Ee^{-xA})⁻¹e^{-yA}B`.
    pub fn w(&self, x: f64, y: f64) -> Result<CMat2> {
        let r = self
            .gap(x)
            .try_inverse()
            .ok_or_else(|| TauError::Pole(format!("I - e^{{-xA}}Ee^{{-xA}} is singular at x = {x}")))?;
        Ok(self.c * self.decay(x) * r * self.decay(y) * self.b)
    }

    pub fn algebraic_residual(&self) -> f64 {
        let bc = self.b * self.c - (self.a * self.e + self.e * self.a) * c(self.eps);
        let be = self.b * self.e - self.e * self.b;
        let ea = self.e * self.a - self.a * self.e;
        bc.max_norm().max(be.max_norm()).max(ea.max_norm())
    }

    pub fn periodicity(&self) -> Periodicity {
        let p = expm2(&(self.a * c(2.0 * PI)));
        if (p - CMat2::identity()).max_norm() < 1e-12 {
            Periodicity::Periodic
        } else if (p + CMat2::identity()).max_norm() < 1e-12 {
            Periodicity::Anti
        } else {
            Periodicity::Neither
        }
    }

    /// `(-A, e^{sA}B, ±Ce^{sA}; e^{sA}Ee^{sA})`; the sign flip also flips `ε`.
    pub fn shifted(&self, s: Complex64, negate: bool) -> Self {
        let es = expm2(&(self.a * s));
        let sign = if negate { -1.0 } else { 1.0 };
        Self { a: self.a, b: es * self.b, c: self.c * es * c(sign), e: es * self.e * es, eps: self.eps * sign }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicLinearSystem {
    pub blocks: Vec<PeriodicBlock>,
}

impl PeriodicLinearSystem {
    /// `A = C = diag[J]`, `E = diag[q^{2|n|} I]`, `B = 2E` for `|n| ≤ T`.
    pub fn lame(nome: &Nome) -> Self {
        let t = nome.order() as i64;
        let j = cj();
        let blocks = (-t..=t)
            .map(|n| {
                let e = CMat2::identity() * nome.q().powu(2 * n.unsigned_abs() as u32);
                PeriodicBlock { a: j, b: e * c(2.0), c: j, e, eps: 1.0 }
            })
            .collect();
        Self { blocks }
    }

    /// `A₀ = J/2, E₀ = -iJ, B₀ = iI, C₀ = I` followed by the `n ≥ 1` blocks
    /// `A_n = C_n = J, E_n = q^{2n}I, B_n = 2E_n`; the determinant is
    /// `iθ₁(x)/(q^{1/4}∏(1 - q^{2n}))`.
    pub fn theta(nome: &Nome) -> Self {
        let i = Complex64::i();
        let j = cj();
        let mut blocks = vec![PeriodicBlock {
            a: j * c(0.5),
            b: CMat2::identity() * i,
            c: CMat2::identity(),
            e: j * (-i),
            eps: 1.0,
        }];
        let mut q2n = c(1.0);
        for _ in 1..=nome.order() {
            q2n *= nome.q() * nome.q();
            let e = CMat2::identity() * q2n;
            blocks.push(PeriodicBlock { a: j, b: e * c(2.0), c: j, e, eps: 1.0 });
        }
        Self { blocks }
    }

    pub fn trace_phi(&self, x: f64) -> Complex64 {
        self.blocks.iter().map(|b| b.phi(x).trace()).sum()
    }

    /// `det(I - e^{-xA}Ee^{-xA})` as the product of block determinants.
    pub fn tau(&self, x: f64) -> Complex64 {
        self.blocks.iter().map(|b| b.det(x)).product()
    }

    pub fn trace_w(&self, x: f64) -> Result<Complex64> {
        self.blocks.iter().map(|b| b.w(x, x).map(|w| w.trace())).sum()
    }

    /// `Σ ε_b trace W_b(x,x)`.
    pub fn signed_trace_w(&self, x: f64) -> Result<Complex64> {
        self.blocks.iter().map(|b| b.w(x, x).map(|w| w.trace() * b.eps)).sum()
    }

    pub fn constraints(&self) -> (f64, Vec<Periodicity>) {
        let res = self.blocks.iter().map(|b| b.algebraic_residual()).fold(0.0, f64::max);
        (res, self.blocks.iter().map(|b| b.periodicity()).collect())
    }

    /// `d/dx log τ` as `Σ det_b'/det_b` with central differences per block.
    pub fn log_tau_derivative(&self, x: f64) -> Complex64 {
        let h = 1e-5;
        self.blocks.iter().map(|b| (b.det(x + h) - b.det(x - h)) / (b.det(x) * 2.0 * h)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGlReport {
    /// `-φ(x+y) + W(x,y) - ε∫ₓ^{2π} W(x,z)φ(z+y)dz - W(x,y)E`.
    pub integral_equation: f64,
    /// `d/dx log det(I - e^{-xA}Ee^{-xA}) - ε trace W(x,x)`.
    pub log_det: f64,
    /// `∫ₓ^{2π} e^{-zA}BCe^{-zA} dz - ε(e^{-xA}Ee^{-xA} - E)`.
    pub gramian_identity: f64,
}

pub const PERIODIC_NODES: usize = 256;

pub fn periodic_gl(sys: &PeriodicLinearSystem, x: f64, y: f64) -> Result<PeriodicGlReport> {
    if !(0.0 < x && x < y && y < 2.0 * PI) {
        return invalid("periodic_gl needs 0 < x < y < 2π");
    }
    let g = gauss_legendre(PERIODIC_NODES, x, 2.0 * PI)?;
    let mut ie: f64 = 0.0;
    let mut gi: f64 = 0.0;
    for b in &sys.blocks {
        let wxy = b.w(x, y)?;
        let mut integral = CMat2::zeros();
        let mut gram = CMat2::zeros();
        for (&z, &wt) in g.nodes.iter().zip(&g.weights) {
            integral += b.w(x, z)? * b.phi(z + y) * c(wt);
            let ez = b.decay(z);
            gram += ez * b.b * b.c * ez * c(wt);
        }
        let r = -b.phi(x + y) + wxy - integral * c(b.eps) - wxy * b.e;
        ie = ie.max(r.max_norm());
        let ex = b.decay(x);
        let gr = gram - (ex * b.e * ex - b.e) * c(b.eps);
        gi = gi.max(gr.max_norm());
    }
    let ld = (sys.log_tau_derivative(x) - sys.signed_trace_w(x)?).norm();
    Ok(PeriodicGlReport { integral_equation: ie, log_det: ld, gramian_identity: gi })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LameReport {
    /// `|trace φ(x) + tail - 4(1+q²)/(1-q²) sin x|`, max over the grid.
    pub trace_phi: f64,
    /// Block `n = 1` determinant against `1 - 2q²cos2x + q⁴`, max over the grid.
    pub block_det: f64,
    /// `det(I - e^{-xA}Ee^{-xA})` against `4sin²x ∏(…)²`, relative.
    pub product_form: f64,
    /// The same determinant against `θ₁(x)²/(q^{1/2}∏(1-q^{2n})²)` (series θ₁), relative.
    pub theta_form: f64,
    /// `-(log τ)'' - 2℘` on the grid.
    pub offsets: Vec<f64>,
    pub offset_variance: f64,
    /// `|trace W(x+2π, x+2π) - trace W(x,x)|`, max over the grid.
    pub periodicity: f64,
}

pub fn lame_system_checks(nome: &Nome, x_grid: &[f64]) -> Result<LameReport> {
    if nome.order() < 20 {
        return invalid("Lamé checks need T ≥ 20");
    }
    let q = nome.q();
    if q.im != 0.0 {
        return invalid("Lamé checks use a real nome");
    }
    let q = q.re;
    let sys = PeriodicLinearSystem::lame(nome);
    let t = nome.order() as i32;
    let tail = 2.0 * q.powi(2 * t + 2) / (1.0 - q * q);
    let mut rep = LameReport {
        trace_phi: 0.0,
        block_det: 0.0,
        product_form: 0.0,
        theta_form: 0.0,
        offsets: vec![],
        offset_variance: 0.0,
        periodicity: 0.0,
    };
    let prod_q: f64 = (1..=t).map(|n| 1.0 - q.powi(2 * n)).product();
    let n1 = &sys.blocks[(t + 1) as usize];
    for &x in x_grid {
        if (x / PI - (x / PI).round()).abs() < 1e-6 {
            return invalid(format!("x = {x} is a zero of τ"));
        }
        let tp = sys.trace_phi(x).re + 4.0 * tail * x.sin();
        rep.trace_phi = rep.trace_phi.max((tp - 4.0 * (1.0 + q * q) / (1.0 - q * q) * x.sin()).abs());
        let bd = n1.det(x).re;
        rep.block_det = rep.block_det.max((bd - (1.0 - 2.0 * q * q * (2.0 * x).cos() + q.powi(4))).abs());
        let tau = sys.tau(x).re;
        let prod: f64 = 4.0
            * x.sin().powi(2)
            * (1..=t).map(|n| (1.0 - 2.0 * q.powi(2 * n) * (2.0 * x).cos() + q.powi(4 * n)).powi(2)).product::<f64>();
        rep.product_form = rep.product_form.max(((tau - prod) / prod).abs());
        let th = theta1(Complex64::new(x, 0.0), nome, ThetaMethod::Series).re;
        let rhs = th * th / (q.sqrt() * prod_q * prod_q);
        rep.theta_form = rep.theta_form.max(((tau - rhs) / rhs).abs());
        let h = crate::numerics::diff::SECOND_STEP;
        let lt = |s: f64| sys.tau(s).re.abs().ln();
        let d2 = crate::numerics::diff::central_diff(lt, x, h, 2)?;
        rep.offsets.push(-d2 - 2.0 * wp(Complex64::new(x, 0.0), nome).re);
        let tw = sys.trace_w(x)?;
        let tw2 = sys.trace_w(x + 2.0 * PI)?;
        rep.periodicity = rep.periodicity.max((tw - tw2).norm());
    }
    let n = rep.offsets.len() as f64;
    if n > 0.0 {
        let mean = rep.offsets.iter().sum::<f64>() / n;
        rep.offset_variance = rep.offsets.iter().map(|o| (o - mean).powi(2)).sum::<f64>() / n;
    }
    Ok(rep)
}

/// Zeros `a_j` and poles `b_j` of `∏θ(x - a_j)/θ(x - b_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaQuotientSpec {
    pub zeros: Vec<Complex64>,
    pub poles: Vec<Complex64>,
}

impl ThetaQuotientSpec {
    pub fn new(zeros: Vec<Complex64>, poles: Vec<Complex64>) -> Result<Self> {
        if zeros.len() != poles.len() || zeros.is_empty() {
            return invalid("need equally many zeros and poles");
        }
        let s: Complex64 = zeros.iter().sum::<Complex64>() - poles.iter().sum::<Complex64>();
        if s.norm() > 1e-12 {
            return invalid(format!("zeros and poles must balance (Σa - Σb = {s})"));
        }
        Ok(Self { zeros, poles })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuilderReport {
    pub grid: Vec<f64>,
    /// `|trace W(x,x) - d/dx Σ[log θ(x-a_j) - log θ(x-b_j)]|`, max over the grid.
    pub residual: f64,
    /// `|det(I - e^{-xA₀}E₀e^{-xA₀}) - 2i sin x|`, max over the grid.
    pub base_block: f64,
    pub constraint_residual: f64,
    pub periodicity: Vec<Periodicity>,
}

pub fn elliptic_tau_builder(
    spec: &ThetaQuotientSpec,
    nome: &Nome,
    x_grid: &[f64],
) -> Result<(PeriodicLinearSystem, BuilderReport)> {
    let base = PeriodicLinearSystem::theta(nome);
    let mut blocks = Vec::new();
    for (a, b) in spec.zeros.iter().zip(&spec.poles) {
        blocks.extend(base.blocks.iter().map(|blk| blk.shifted(*a, false)));
        blocks.extend(base.blocks.iter().map(|blk| blk.shifted(*b, true)));
    }
    let sys = PeriodicLinearSystem { blocks };
    let (constraint_residual, periodicity) = sys.constraints();
    let dlog_theta = |z: Complex64| -> Complex64 {
        let h = 1e-5;
        let f = |s: Complex64| theta1(s, nome, ThetaMethod::Product);
        (f(z + h) - f(z - h)) / (f(z) * 2.0 * h)
    };
    let mut residual: f64 = 0.0;
    let mut base_block: f64 = 0.0;
    for &x in x_grid {
        let xc = c(x);
        let rhs: Complex64 =
            spec.zeros.iter().zip(&spec.poles).map(|(a, b)| dlog_theta(xc - a) - dlog_theta(xc - b)).sum();
        residual = residual.max((sys.trace_w(x)? - rhs).norm());
        base_block = base_block.max((base.blocks[0].det(x) - Complex64::new(0.0, 2.0 * x.sin())).norm());
    }
    Ok((sys, BuilderReport { grid: x_grid.to_vec(), residual, base_block, constraint_residual, periodicity }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_exponential() {
        let j = cj();
        let e = expm2(&(j * c(PI / 2.0)));
        assert!((e - j).max_norm() < 1e-15);
        let z = expm2(&CMat2::zeros());
        assert_eq!(z, CMat2::identity());
        let d = CMat2::new(c(1.0), c(0.0), c(0.0), c(2.0));
        let ed = expm2(&d);
        assert!((ed[(1, 1)] - c(2f64.exp())).norm() < 1e-13 && ed[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn lame_identities() {
        let nome = Nome::real(0.3, 40).unwrap();
        let grid: Vec<f64> = (0..15).map(|i| 0.3 + 0.17 * i as f64).collect();
        let r = lame_system_checks(&nome, &grid).unwrap();
        assert!(r.trace_phi < 1e-10, "{r:?}");
        assert!(r.block_det < 1e-12);
        assert!(r.product_form < 1e-10 && r.theta_form < 1e-10);
        assert!(r.offset_variance < 1e-6);
        assert!(r.periodicity < 1e-8);
        let one = PeriodicLinearSystem::lame(&nome).blocks[41].det(1.0).re;
        assert!((one - (1.0 - 0.18 * 2f64.cos() + 0.0081)).abs() < 1e-14);
        let (res, per) = PeriodicLinearSystem::lame(&nome).constraints();
        assert!(res < 1e-12 && per.iter().all(|p| *p == Periodicity::Periodic));
    }

    #[test]
    fn gelfand_levitan_periodic() {
        let nome = Nome::real(0.3, 40).unwrap();
        let sys = PeriodicLinearSystem::lame(&nome);
        let r = periodic_gl(&sys, 0.7, 1.1).unwrap();
        assert!(r.integral_equation < 1e-7 && r.gramian_identity < 1e-10);
        let r = periodic_gl(&sys, 0.9, 1.1).unwrap();
        assert!(r.log_det < 1e-7);
    }

    #[test]
    fn builder() {
        let nome = Nome::real(0.3, 40).unwrap();
        let th = PeriodicLinearSystem::theta(&nome);
        assert_eq!(th.blocks[0].periodicity(), Periodicity::Anti);
        let grid = [0.5, 1.0, 1.7, 2.4];
        let spec =
            ThetaQuotientSpec::new(vec![Complex64::new(0.4, 0.1), c(-0.2)], vec![c(0.9), Complex64::new(-0.7, 0.1)])
                .unwrap();
        let (_, r) = elliptic_tau_builder(&spec, &nome, &grid).unwrap();
        assert!(r.residual < 1e-6 && r.base_block < 1e-12, "{r:?}");
        assert!(r.constraint_residual < 1e-12);
        let same = ThetaQuotientSpec::new(vec![c(0.4)], vec![c(0.4)]).unwrap();
        let (sys, r) = elliptic_tau_builder(&same, &nome, &grid).unwrap();
        assert!(r.residual < 1e-10 && sys.trace_w(1.3).unwrap().norm() < 1e-10);
        assert!(ThetaQuotientSpec::new(vec![c(0.4)], vec![c(0.5)]).is_err());
    }
}
