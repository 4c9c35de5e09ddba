//! The Fuchsian connection `A_n(z)`, its residues, the one-form `Ω_n` and the
//! associated Schlesinger and Hamiltonian flows.

use crate::equilibrium::{make_semicircle, EquilibriumMeasure};
use crate::error::{invalid, Result, TauError};
use crate::numerics::diff::{central_diff, FIRST_STEP};
use crate::numerics::ode::rk4_integrate;
use crate::orthopoly::{stieltjes_recurrence, v_matrix, y_matrix, y_matrix_deriv, RecurrenceData};
use crate::{CMat2, Complex64, Mat2};
use std::f64::consts::PI;

/// Poles and residues of `A_n(z) = Σ α_j/(z - δ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueFamily {
    pub poles: Vec<f64>,
    pub residues: Vec<Mat2>,
    pub n: usize,
    /// Half-degree of the potential.
    pub big_n: usize,
    pub h_n: f64,
    pub h_prev: f64,
}

impl ResidueFamily {
    pub fn connection(&self, z: Complex64) -> CMat2 {
        self.poles.iter().zip(&self.residues).fold(CMat2::zeros(), |acc, (&d, a)| acc + to_c(a) / (z - d))
    }

    fn check_distinct(&self) -> Result<()> {
        for (i, a) in self.poles.iter().enumerate() {
            for b in &self.poles[i + 1..] {
                if a == b {
                    return invalid(format!("coincident poles at {a}"));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn to_c(m: &Mat2) -> CMat2 {
    m.map(|x| Complex64::new(x, 0.0))
}

fn max_abs_c(m: &CMat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn max_abs(m: &Mat2) -> f64 {
    m.iter().map(|z| z.abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionSample {
    pub z: Complex64,
    pub a: CMat2,
}

/// `A_n(z) = Y'Y⁻¹ + Y diag(0, -w'/w) Y⁻¹` with quadrature Cauchy integrals.
pub fn connection_numeric(rec: &RecurrenceData, n: usize, z: Complex64) -> Result<ConnectionSample> {
    let m = rec.measure();
    let dist = m
        .intervals()
        .iter()
        .map(|&(lo, hi)| {
            let x = z.re.clamp(lo, hi);
            (z - x).norm()
        })
        .fold(f64::INFINITY, f64::min);
    if dist == 0.0 {
        return Err(TauError::OnSupport(z.re));
    }
    if dist < 1e-3 {
        log::warn!("connection_numeric: z = {z} is within {dist:.1e} of the support");
    }
    let y = y_matrix(rec, n, z)?;
    let dy = y_matrix_deriv(rec, n, z)?;
    let yi = y.try_inverse().ok_or(TauError::SingularMatrix)?;
    let zero = Complex64::new(0.0, 0.0);
    let d = CMat2::new(zero, zero, zero, -m.log_weight_derivative(z));
    Ok(ConnectionSample { z, a: dy * yi + y * d * yi })
}

fn semicircle_numerator(a: f64, b: f64, n: usize, h_prev: f64, printed: bool) -> (Mat2, Mat2) {
    let nf = n as f64;
    let s = b - a;
    let m = 0.5 * (a + b);
    let lower = if printed { nf * s * s / (2.0 * h_prev) } else { 2.0 * nf / h_prev };
    // M(z) = M0 + z·M1
    let m1 = Mat2::new(nf, 0.0, 0.0, -(nf + 1.0));
    let m0 = Mat2::new(-nf * m, -(nf + 1.0) * s * s * h_prev / 8.0, lower, (nf + 1.0) * m);
    (m0, m1)
}

fn semicircle_connection_impl(
    a: f64,
    b: f64,
    n: usize,
    h_prev: f64,
    z: Complex64,
    printed: bool,
) -> Result<ConnectionSample> {
    if !(a < b) || !(h_prev > 0.0) {
        return invalid("semicircle connection needs a < b and h_prev > 0");
    }
    if z == Complex64::new(a, 0.0) || z == Complex64::new(b, 0.0) {
        return Err(TauError::Pole(format!("z = {z} is a pole of the connection")));
    }
    let (m0, m1) = semicircle_numerator(a, b, n, h_prev, printed);
    Ok(ConnectionSample { z, a: (to_c(&m0) + to_c(&m1) * z) / ((z - a) * (z - b)) })
}

/// Closed-form connection for the semicircle law on `[a, b]`:
/// `[[n(z-m), -(n+1)s²h_{n-1}/8], [2n/h_{n-1}, -(n+1)(z-m)]] / ((z-a)(z-b))`
/// with `s = b - a`, `m = (a+b)/2`.
pub fn connection_semicircle(a: f64, b: f64, n: usize, h_prev: f64, z: Complex64) -> Result<ConnectionSample> {
    semicircle_connection_impl(a, b, n, h_prev, z, false)
}

/// Variant with lower-left entry `n s²/(2h_{n-1})`; coincides with
/// [`connection_semicircle`] only when `b - a = 2`. Kept for comparison.
pub fn connection_semicircle_scaled_variant(
    a: f64,
    b: f64,
    n: usize,
    h_prev: f64,
    z: Complex64,
) -> Result<ConnectionSample> {
    semicircle_connection_impl(a, b, n, h_prev, z, true)
}

fn semicircle_family_impl(a: f64, b: f64, n: usize, h_prev: f64, printed: bool) -> Result<ResidueFamily> {
    if !(a < b) || !(h_prev > 0.0) {
        return invalid("semicircle residues need a < b and h_prev > 0");
    }
    let (m0, m1) = semicircle_numerator(a, b, n, h_prev, printed);
    let s = b - a;
    Ok(ResidueFamily {
        poles: vec![a, b],
        residues: vec![(m0 + m1 * a) / (a - b), (m0 + m1 * b) / (b - a)],
        n,
        big_n: 1,
        h_n: h_prev * s * s / 16.0,
        h_prev,
    })
}

/// Residues of [`connection_semicircle`] at `a` and `b`.
pub fn semicircle_residues(a: f64, b: f64, n: usize, h_prev: f64) -> Result<ResidueFamily> {
    semicircle_family_impl(a, b, n, h_prev, false)
}

pub fn semicircle_residues_scaled_variant(a: f64, b: f64, n: usize, h_prev: f64) -> Result<ResidueFamily> {
    semicircle_family_impl(a, b, n, h_prev, true)
}

/// `h_{n-1}` of the semicircle law on `[a, b]`; `1` at `n = 0` by convention
/// (the family does not depend on it then).
pub fn semicircle_h_prev(a: f64, b: f64, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        ((b - a) / 4.0).powi(2 * (n as i32 - 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRuleReport {
    /// `|Σ α₁₂|`.
    pub off_diagonal: f64,
    /// `|Σ (α₁₁ - α₂₂) - (2(n+N) - 1)|`.
    pub diagonal_difference: f64,
    /// `|Σ δ α₁₂ + 2h_n(n+N)|`.
    pub first_moment: f64,
    /// `max |Σ α - diag(n, 1-n-2N)|`.
    pub total: f64,
}

impl SumRuleReport {
    pub fn max(&self) -> f64 {
        self.off_diagonal.max(self.diagonal_difference).max(self.first_moment).max(self.total)
    }
}

pub fn sum_rules(fam: &ResidueFamily) -> SumRuleReport {
    let n = fam.n as f64;
    let big = fam.big_n as f64;
    let sum: Mat2 = fam.residues.iter().sum();
    let first: f64 = fam.poles.iter().zip(&fam.residues).map(|(d, a)| d * a[(0, 1)]).sum();
    SumRuleReport {
        off_diagonal: sum[(0, 1)].abs(),
        diagonal_difference: (sum[(0, 0)] - sum[(1, 1)] - (2.0 * (n + big) - 1.0)).abs(),
        first_moment: (first + 2.0 * fam.h_n * (n + big)).abs(),
        total: max_abs(&(sum - Mat2::new(n, 0.0, 0.0, 1.0 - n - 2.0 * big))),
    }
}

/// Inputs of the recurrence step `V_n` and of `A_n`, `A_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaxInputs {
    pub h_prev: f64,
    pub h_n: f64,
    /// `b_{n+1}`.
    pub b_next: f64,
}

impl LaxInputs {
    pub fn from_recurrence(rec: &RecurrenceData, n: usize) -> Result<Self> {
        if n == 0 || n > rec.n_max() {
            return invalid("Lax inputs need 1 ≤ n ≤ n_max");
        }
        Ok(Self { h_prev: rec.h(n - 1), h_n: rec.h(n), b_next: rec.b(n + 1) })
    }
}

/// `max_z ‖A_{n+1}V_n - V_nA_n - diag(1,0)‖` for the semicircle connections.
pub fn lax_consistency(a: f64, b: f64, n: usize, inp: &LaxInputs, zs: &[Complex64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let zero = Complex64::new(0.0, 0.0);
    for &z in zs {
        let an = connection_semicircle(a, b, n, inp.h_prev, z)?.a;
        let an1 = connection_semicircle(a, b, n + 1, inp.h_n, z)?.a;
        let v = CMat2::new(z - inp.b_next, Complex64::new(-inp.h_n, 0.0), Complex64::new(1.0 / inp.h_n, 0.0), zero);
        let e = CMat2::new(Complex64::new(1.0, 0.0), zero, zero, zero);
        worst = worst.max(max_abs_c(&(an1 * v - v * an - e)));
    }
    Ok(worst)
}

/// Norm `h̃_n` of the semicircle weight on `[a, b]` with its prefactor frozen
/// at the base interval: `h̃_n = h_n (b-a)²/(b₀-a₀)²`.
pub fn fixed_prefactor_norm(a: f64, b: f64, n: usize, base: (f64, f64)) -> Result<f64> {
    let rec = stieltjes_recurrence(&make_semicircle(a, b)?, n)?;
    let s0 = base.1 - base.0;
    Ok(rec.h(n) * (b - a).powi(2) / (s0 * s0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationReport {
    /// `∂ log h̃_n/∂a` by central difference.
    pub dlog_fixed: f64,
    /// `-(α_a)₁₂ / h̃_n`.
    pub residue_side: f64,
    pub residual: f64,
    /// `∂ log h_n/∂a` in the probability normalization (compare only).
    pub dlog_probability: f64,
    /// `∂/∂a + ∂/∂b` of `log h̃_n` (translation invariance).
    pub translation_sum: f64,
    /// `max ‖∂Φ_n/∂a + α_a/(z-a) Φ_n‖` at sample points (compare only).
    pub phi_deformation: f64,
}

/// Deformation identity `∂ log h̃_n/∂a = -(α_a)₁₂/h̃_n` for the semicircle.
pub fn deformation_checks(a: f64, b: f64, n: usize) -> Result<DeformationReport> {
    let base = (a, b);
    let h = FIRST_STEP;
    let log_fixed_a = |x: f64| fixed_prefactor_norm(x, b, n, base).map(f64::ln).unwrap_or(f64::NAN);
    let log_fixed_b = |x: f64| fixed_prefactor_norm(a, x, n, base).map(f64::ln).unwrap_or(f64::NAN);
    let dlog_fixed = central_diff(log_fixed_a, a, h, 1)?;
    let dlog_b = central_diff(log_fixed_b, b, h, 1)?;
    let log_prob = |x: f64| {
        make_semicircle(x, b).and_then(|m| stieltjes_recurrence(&m, n)).map(|r| r.h(n).ln()).unwrap_or(f64::NAN)
    };
    let dlog_probability = central_diff(log_prob, a, h, 1)?;
    let rec = stieltjes_recurrence(&make_semicircle(a, b)?, n + 1)?;
    let h_prev = if n == 0 { 1.0 } else { rec.h(n - 1) };
    let fam = semicircle_residues(a, b, n, h_prev)?;
    let residue_side = -fam.residues[0][(0, 1)] / rec.h(n);

    let phi_deformation = if n >= 1 {
        let c0 = 16.0 / ((b - a) * (b - a));
        let phi_at = |x: f64, z: Complex64| -> Result<CMat2> {
            let m = make_semicircle(x, b)?;
            let r = stieltjes_recurrence(&m, n)?;
            let lambda = c0 / m.prefactor();
            Ok(build_phi_scaled(&r, n, z, lambda)?.phi)
        };
        let mut worst: f64 = 0.0;
        for z in [3.0, 4.5] {
            let z = Complex64::new(z + b, 0.0);
            let hh = 1e-5;
            let dphi = (phi_at(a + hh, z)? - phi_at(a - hh, z)?) / Complex64::new(2.0 * hh, 0.0);
            let rhs = -to_c(&fam.residues[0]) / (z - a) * phi_at(a, z)?;
            worst = worst.max(max_abs_c(&(dphi - rhs)));
        }
        worst
    } else {
        0.0
    };
    Ok(DeformationReport {
        dlog_fixed,
        residue_side,
        residual: (dlog_fixed - residue_side).abs(),
        dlog_probability,
        translation_sum: dlog_fixed + dlog_b,
        phi_deformation,
    })
}

/// Coefficients of `dδ_j` in a one-form.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    pub poles: Vec<f64>,
    pub coeffs: Vec<f64>,
}

/// `Ω_n = Σ_j Σ_{k≠j} trace(α_jα_k)/(δ_j - δ_k) dδ_j`.
pub fn omega_form(fam: &ResidueFamily) -> Result<OneForm> {
    fam.check_distinct()?;
    Ok(OneForm { poles: fam.poles.clone(), coeffs: hamiltonians(&fam.poles, &fam.residues) })
}

/// `H_j = Σ_{k≠j} trace(α_jα_k)/(δ_j - δ_k)`.
pub fn hamiltonians(poles: &[f64], residues: &[Mat2]) -> Vec<f64> {
    (0..poles.len())
        .map(|j| {
            (0..poles.len())
                .filter(|&k| k != j)
                .map(|k| (residues[j] * residues[k]).trace() / (poles[j] - poles[k]))
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelescopingReport {
    /// `Ω_{n+1}(da) - Ω_n(da)`.
    pub lhs: f64,
    /// `∂ log h̃_n/∂a`.
    pub rhs: f64,
    pub residual: f64,
}

/// `Ω_{n+1} - Ω_n = d log h̃_n` (coefficient of `da`).
pub fn telescoping_check(a: f64, b: f64, n: usize) -> Result<TelescopingReport> {
    let rec = stieltjes_recurrence(&make_semicircle(a, b)?, n + 1)?;
    let h_prev = if n == 0 { 1.0 } else { rec.h(n - 1) };
    let om_n = omega_form(&semicircle_residues(a, b, n, h_prev)?)?;
    let om_n1 = omega_form(&semicircle_residues(a, b, n + 1, rec.h(n))?)?;
    let lhs = om_n1.coeffs[0] - om_n.coeffs[0];
    let rhs = deformation_checks(a, b, n)?.dlog_fixed;
    Ok(TelescopingReport { lhs, rhs, residual: (lhs - rhs).abs() })
}

/// Comparison of the closed-form `Ω_n` and `d log τ` for the semicircle with
/// the direct evaluation of `Ω_n` from the residues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormReport {
    /// Direct `Ω_n(da)` from the residues.
    pub direct: f64,
    /// `(n²+(n+1)²)/(4(a-b)) + n(n+2)(a-b)/16`.
    pub closed_form: f64,
    /// `∂/∂a log[|a-b|^{(2n²+2n+1)/4} e^{n(n+2)(a-b)²/32}]` by central difference.
    pub tau_derivative: f64,
    /// Logarithmic part of the direct value (diagonal entries).
    pub direct_log_part: f64,
    /// `(n²+(n+1)²)/(4(a-b))`.
    pub closed_log_part: f64,
    /// `direct - direct_log_part`.
    pub direct_second: f64,
    /// `n(n+2)(a-b)/16`.
    pub closed_second: f64,
    /// `2n(n+1)(a-b)/16`, the direct second term written on `[-1, 1]`.
    pub unit_interval_second: f64,
    /// `closed_form - direct`.
    pub discrepancy: f64,
}

pub fn semicircle_closed_forms(a: f64, b: f64, n: usize) -> Result<ClosedFormReport> {
    let h_prev = semicircle_h_prev(a, b, n);
    let fam = semicircle_residues(a, b, n, h_prev)?;
    let direct = omega_form(&fam)?.coeffs[0];
    let (aa, bb) = (&fam.residues[0], &fam.residues[1]);
    let direct_log_part = (aa[(0, 0)] * bb[(0, 0)] + aa[(1, 1)] * bb[(1, 1)]) / (a - b);
    let nf = n as f64;
    let closed_log_part = (nf * nf + (nf + 1.0).powi(2)) / (4.0 * (a - b));
    let closed_second = nf * (nf + 2.0) * (a - b) / 16.0;
    let closed_form = closed_log_part + closed_second;
    let log_tau =
        |x: f64| (2.0 * nf * nf + 2.0 * nf + 1.0) / 4.0 * (x - b).abs().ln() + nf * (nf + 2.0) * (x - b).powi(2) / 32.0;
    let tau_derivative = central_diff(log_tau, a, FIRST_STEP, 1)?;
    Ok(ClosedFormReport {
        direct,
        closed_form,
        tau_derivative,
        direct_log_part,
        closed_log_part,
        direct_second: direct - direct_log_part,
        closed_second,
        unit_interval_second: 2.0 * nf * (nf + 1.0) * (a - b) / 16.0,
        discrepancy: closed_form - direct,
    })
}

/// `∂α_k/∂δ_j`, indexed `[k][j]`.
pub fn schlesinger_rhs(fam: &ResidueFamily) -> Result<Vec<Vec<Mat2>>> {
    fam.check_distinct()?;
    let (d, al) = (&fam.poles, &fam.residues);
    let m = d.len();
    let comm = |x: &Mat2, y: &Mat2| x * y - y * x;
    let mut out = vec![vec![Mat2::zeros(); m]; m];
    for k in 0..m {
        for j in 0..m {
            out[k][j] = if j != k {
                comm(&al[j], &al[k]) / (d[j] - d[k])
            } else {
                (0..m).filter(|&i| i != j).map(|i| -comm(&al[j], &al[i]) / (d[j] - d[i])).sum()
            };
        }
    }
    Ok(out)
}

/// Drift report of the isospectral flow generated by `H_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    pub times: Vec<f64>,
    pub residues: Vec<Vec<Mat2>>,
    /// `max |trace A(z)^m(t) - trace A(z)^m(0)|` over `m ∈ {1,2}` and the
    /// sample points.
    pub spectral_drift: f64,
    /// Per-Hamiltonian `max_t |H_k(t) - H_k(0)|`.
    pub hamiltonian_drift: Vec<f64>,
    /// Drift of the characteristic-polynomial coefficients of `A(z)`.
    pub char_poly_drift: f64,
}

fn flatten(al: &[Mat2]) -> Vec<f64> {
    al.iter().flat_map(|m| [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]).collect()
}

fn unflatten(y: &[f64]) -> Vec<Mat2> {
    y.chunks(4).map(|c| Mat2::new(c[0], c[1], c[2], c[3])).collect()
}

/// Integrate `α̇_k = [X^{(k)}, α_k]` with `X^{(k)} = α_j/(δ_j - δ_k)` for
/// `k ≠ j` and `X^{(j)} = Σ_{k≠j} α_k/(δ_j - δ_k)`; poles stay fixed.
pub fn hamiltonian_flow(fam: &ResidueFamily, j: usize, t_span: f64, steps: usize) -> Result<FlowReport> {
    fam.check_distinct()?;
    if steps < 10 {
        return invalid("hamiltonian_flow needs at least 10 steps");
    }
    if j >= fam.poles.len() {
        return invalid(format!("no pole with index {j}"));
    }
    let d = fam.poles.clone();
    let field = |_t: f64, y: &[f64]| -> Vec<f64> {
        let al = unflatten(y);
        let m = al.len();
        let mut out = Vec::with_capacity(4 * m);
        for k in 0..m {
            let x = if k != j {
                al[j] / (d[j] - d[k])
            } else {
                (0..m).filter(|&i| i != j).map(|i| al[i] / (d[j] - d[i])).sum()
            };
            let c = x * al[k] - al[k] * x;
            out.extend_from_slice(&[c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)]]);
        }
        out
    };
    let traj = rk4_integrate(field, &flatten(&fam.residues), 0.0, t_span, steps)?;
    let residues: Vec<Vec<Mat2>> = traj.states.iter().map(|s| unflatten(s)).collect();
    let hi = d.iter().copied().fold(f64::MIN, f64::max);
    let lo = d.iter().copied().fold(f64::MAX, f64::min);
    let zs = [Complex64::new(hi + 1.0, 0.0), Complex64::new(lo - 1.5, 0.0), Complex64::new(0.5 * (lo + hi), 2.0)];
    let conn = |al: &[Mat2], z: Complex64| -> CMat2 {
        d.iter().zip(al).fold(CMat2::zeros(), |acc, (&p, a)| acc + to_c(a) / (z - p))
    };
    let invariants = |al: &[Mat2]| -> (Vec<Complex64>, Vec<Complex64>) {
        let mut tr = Vec::new();
        let mut cp = Vec::new();
        for &z in &zs {
            let a = conn(al, z);
            tr.push(a.trace());
            tr.push((a * a).trace());
            cp.push(a.determinant());
        }
        (tr, cp)
    };
    let (tr0, cp0) = invariants(&residues[0]);
    let h0 = hamiltonians(&d, &residues[0]);
    let mut spectral_drift: f64 = 0.0;
    let mut char_poly_drift: f64 = 0.0;
    let mut hamiltonian_drift = vec![0.0f64; d.len()];
    for al in &residues {
        let (tr, cp) = invariants(al);
        for (x, y) in tr.iter().zip(&tr0) {
            spectral_drift = spectral_drift.max((x - y).norm());
        }
        for ((x, y), (u, v)) in cp.iter().zip(&cp0).zip(tr.iter().step_by(2).zip(tr0.iter().step_by(2))) {
            char_poly_drift = char_poly_drift.max((x - y).norm()).max((u - v).norm());
        }
        for (k, (hk, h0k)) in hamiltonians(&d, al).iter().zip(&h0).enumerate() {
            hamiltonian_drift[k] = hamiltonian_drift[k].max((hk - h0k).abs());
        }
    }
    Ok(FlowReport { times: traj.times, residues, spectral_drift, hamiltonian_drift, char_poly_drift })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiReport {
    pub phi: CMat2,
    /// `|det Φ_n(z) - 1/w(z)|`.
    pub det_residual: f64,
    /// `‖Φ_{n+1} - V_nΦ_n‖`.
    pub recurrence_residual: f64,
}

/// `Φ_n(z)` assembled from `p`, `q` and the weight continued off the support.
pub fn build_phi(rec: &RecurrenceData, n: usize, z: Complex64) -> Result<PhiReport> {
    build_phi_scaled(rec, n, z, 1.0)
}

/// As [`build_phi`] for the weight `λw` (so `q → λq`, `h → λh`).
pub(crate) fn build_phi_scaled(rec: &RecurrenceData, n: usize, z: Complex64, lambda: f64) -> Result<PhiReport> {
    if n == 0 || n > rec.n_max() {
        return invalid("build_phi needs 1 ≤ n ≤ n_max");
    }
    let w = rec.measure().weight_continued(z) * lambda;
    if w.norm() == 0.0 {
        return Err(TauError::Pole(format!("weight vanishes at z = {z}")));
    }
    let p = rec.p_all(n + 1, z);
    let q: Vec<Complex64> = rec.q_all(n + 1, z).iter().map(|x| x * lambda).collect();
    let r = (Complex64::new(0.0, 2.0 * PI)).sqrt();
    let ipi = Complex64::new(0.0, PI);
    let phi_at = |k: usize| -> CMat2 {
        let hp = rec.h(k - 1) * lambda;
        CMat2::new(
            r * p[k],
            -(ipi * w * p[k] + q[k]) / (w * r),
            r * p[k - 1] / hp,
            -(ipi * w * p[k - 1] + q[k - 1]) / (w * hp * r),
        )
    };
    let phi = phi_at(n);
    let phi1 = phi_at(n + 1);
    let mut v = v_matrix(rec, n, z);
    v[(0, 1)] *= lambda;
    v[(1, 0)] /= lambda;
    Ok(PhiReport {
        phi,
        det_residual: (phi.determinant() - 1.0 / w).norm(),
        recurrence_residual: max_abs_c(&(phi1 - v * phi)),
    })
}

/// Measure used throughout the semicircle checks.
pub fn semicircle_recurrence(a: f64, b: f64, n_max: usize) -> Result<(EquilibriumMeasure, RecurrenceData)> {
    let m = make_semicircle(a, b)?;
    let r = stieltjes_recurrence(&m, n_max)?;
    Ok((m, r))
}
