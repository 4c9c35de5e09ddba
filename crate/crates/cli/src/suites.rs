//! Verification checks grouped by module.

use crate::config::{Suite, SuiteConfig};
use crate::record::{errors, passes, CheckRecord, Status};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use std::f64::consts::PI;
use std::time::Instant;
use taulab::elliptic::{genus2, periodic, picard, theta};
use taulab::{equilibrium as eq, hankelfact as hf, isomonodromy as iso, linsys as ls, orthopoly as op};
use taulab::{CMat2, Mat2, MaxNorm, Result};

/// Truncation knobs shared by the checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub quad_nodes: Option<usize>,
    pub trunc: Option<usize>,
    pub terms: Option<usize>,
}

impl Settings {
    fn nodes(&self, default: usize) -> usize {
        self.quad_nodes.unwrap_or(default)
    }

    fn nome(&self) -> Result<theta::Nome> {
        theta::Nome::real(0.3, self.trunc.unwrap_or(40))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eval {
    pub lhs: f64,
    pub rhs: f64,
    pub abs: Option<f64>,
}

fn equal(lhs: f64, rhs: f64) -> Result<Eval> {
    Ok(Eval { lhs, rhs, abs: None })
}

fn residual(r: f64) -> Result<Eval> {
    equal(r, 0.0)
}

fn close(lhs: Complex64, rhs: Complex64) -> Result<Eval> {
    Ok(Eval { lhs: lhs.norm(), rhs: rhs.norm(), abs: Some((lhs - rhs).norm()) })
}

pub struct Check {
    pub id: &'static str,
    pub description: &'static str,
    pub identity: &'static str,
    pub tol: f64,
    pub report_only: bool,
    pub run: fn(&Settings) -> Result<Eval>,
}

const fn check(
    id: &'static str,
    description: &'static str,
    identity: &'static str,
    tol: f64,
    run: fn(&Settings) -> Result<Eval>,
) -> Check {
    Check { id, description, identity, tol, report_only: false, run }
}

const fn report(
    id: &'static str,
    description: &'static str,
    identity: &'static str,
    tol: f64,
    run: fn(&Settings) -> Result<Eval>,
) -> Check {
    Check { report_only: true, ..check(id, description, identity, tol, run) }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn one() -> DMatrix<f64> {
    DMatrix::from_element(1, 1, 1.0)
}

fn three_term() -> Result<ls::DiagonalLinearSystem> {
    ls::realize(&ls::ExpSymbol::scalar(0.0, &[1.0, 0.5, 0.25])?, one())
}

fn synthetic_family() -> Result<hf::ZeroTraceFamily> {
    hf::positive_pair_family(0.25, 2.0, 3.0, Mat2::new(1.0, 0.2, 0.2, 0.5), Mat2::new(0.3, 0.1, 0.1, 0.2))
}

fn max_over<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |m, r| r.map(|v| m.max(v)))
}

fn equilibrium_checks() -> Vec<Check> {
    vec![
        check(
            "equilibrium.semicircle-density",
            "semicircle density at the midpoint of [-1,1] is 2/π",
            "semicircle density",
            1e-14,
            |_| equal(eq::make_semicircle(-1.0, 1.0)?.density(0.0), 2.0 / PI),
        ),
        check(
            "equilibrium.semicircle-mass",
            "semicircle law on [0,3] has unit mass",
            "semicircle normalization",
            1e-10,
            |s| equal(eq::make_semicircle(0.0, 3.0)?.mass(s.nodes(128))?, 1.0),
        ),
        check(
            "equilibrium.arcsine-moment",
            "second moment of the arcsine law is 1/2",
            "arcsine moments",
            1e-12,
            |_| equal(eq::moment(&eq::make_arcsine(), 2, None)?, 0.5),
        ),
        check("equilibrium.half-mass", "semicircle mass below 0 is 1/2", "truncated moments", 1e-8, |_| {
            equal(eq::moment(&eq::make_semicircle(-1.0, 1.0)?, 0, Some(0.0))?, 0.5)
        }),
        check(
            "equilibrium.cauchy-semicircle",
            "Cauchy transform of the semicircle at z = 2",
            "Stieltjes transform of the semicircle",
            1e-12,
            |_| close(eq::cauchy_transform(&eq::make_semicircle(-1.0, 1.0)?, c(2.0))?, c(-2.0 * (2.0 - 3f64.sqrt()))),
        ),
        check(
            "equilibrium.cauchy-arcsine",
            "Cauchy transform of the arcsine law at z = 2",
            "Stieltjes transform of the arcsine law",
            1e-10,
            |_| close(eq::cauchy_transform(&eq::make_arcsine(), c(2.0))?, c(-1.0 / 3f64.sqrt())),
        ),
        check(
            "equilibrium.u-quadratic",
            "u ≡ 4 for v = 2x² on [-1,1]",
            "u from the potential and moments",
            1e-12,
            |_| {
                let v = eq::Potential::new(vec![0.0, 0.0, 2.0])?;
                equal(eq::u_from_potential(&v, &eq::make_semicircle(-1.0, 1.0)?)?[0], 4.0)
            },
        ),
        check(
            "equilibrium.support-residual",
            "support of 4u - v'² and the Cauchy-transform equation at z = 2",
            "support and weight",
            1e-8,
            |_| {
                let v = eq::Potential::new(vec![0.0, 0.0, 2.0])?;
                residual(eq::support_and_weight(&v, &[4.0], (-3.0, 3.0))?.residual)
            },
        ),
        check(
            "equilibrium.gap-constancy",
            "logarithmic potential gap is constant on the support",
            "Euler-Lagrange equality on the support",
            1e-4,
            |_| {
                let v = eq::Potential::new(vec![0.0, 0.0, 2.0])?;
                let m = eq::make_semicircle(-1.0, 1.0)?;
                equal(eq::log_potential_gap(&v, &m, 0.5)?, eq::log_potential_gap(&v, &m, 0.0)?)
            },
        ),
    ]
}

fn orthopoly_checks() -> Vec<Check> {
    vec![
        check(
            "orthopoly.semicircle-norms",
            "max rel error of h_n = 2^{-4n}(b-a)^{2n}, n ≤ 12, two intervals",
            "semicircle norms",
            1e-10,
            |_| {
                residual(max_over([(-1.0, 1.0), (0.0, 3.0)].iter().flat_map(|&(a, b)| {
                    let rec = iso::semicircle_recurrence(a, b, 12).map(|r| r.1);
                    (0..=12).map(move |n| {
                        let want = 2f64.powi(-4 * n as i32) * (b - a).powi(2 * n as i32);
                        rec.as_ref().map(|r| ((r.h(n) - want) / want).abs()).map_err(Clone::clone)
                    })
                }))?)
            },
        ),
        check(
            "orthopoly.hankel-exact",
            "D_6 = h_0⋯h_5 against the exact rational Hankel determinant on [0,3]",
            "Hankel determinant as a product of norms",
            1e-6,
            |_| {
                let (m, rec) = iso::semicircle_recurrence(0.0, 3.0, 6)?;
                let mu = m.exact_moments(11).ok_or_else(|| taulab::TauError::Degenerate("no exact moments".into()))?;
                let exact = num_traits::ToPrimitive::to_f64(&op::hankel_d_exact(&mu, 6)?).unwrap_or(f64::NAN);
                equal(op::hankel_d(&rec, 6)?, exact)
            },
        ),
        check(
            "orthopoly.projection-tau",
            "Gram determinant on (-∞,t) against D_{n+1}(t)/D_{n+1}, n ≤ 5, 5 cutoffs",
            "projection determinant",
            1e-6,
            |_| {
                let (_, rec) = iso::semicircle_recurrence(-1.0, 1.0, 8)?;
                residual(max_over((0..=5).flat_map(|n| {
                    let rec = &rec;
                    [-0.6, -0.2, 0.1, 0.45, 0.9]
                        .into_iter()
                        .map(move |t| op::projection_tau(rec, n, t).map(|(l, r)| (l - r).abs()))
                }))?)
            },
        ),
        check(
            "orthopoly.christoffel-darboux",
            "Christoffel-Darboux quotient against the direct sum on [0,3], n = 4",
            "Christoffel-Darboux formula",
            1e-9,
            |_| {
                let (_, rec) = iso::semicircle_recurrence(0.0, 3.0, 6)?;
                equal(op::cd_kernel(&rec, 4, 0.3, 2.1)?, op::cd_kernel_sum(&rec, 4, 0.3, 2.1))
            },
        ),
        check(
            "orthopoly.y-recurrence",
            "Y_{n+1} = V_n Y_n at z = 2, n = 1",
            "recurrence for the Riemann-Hilbert matrix",
            1e-7,
            |_| {
                let (_, rec) = iso::semicircle_recurrence(-1.0, 1.0, 4)?;
                residual(op::yv_check(&rec, 1, c(2.0))?.recurrence)
            },
        ),
    ]
}

fn isomonodromy_checks() -> Vec<Check> {
    vec![
        check(
            "isomonodromy.sample-connection",
            "A_1(2) = (1/3)[[2,-1],[2,-4]] on [-1,1]",
            "semicircle connection",
            1e-12,
            |_| {
                let a = iso::connection_semicircle(-1.0, 1.0, 1, 1.0, c(2.0))?.a;
                let want = CMat2::new(c(2.0), c(-1.0), c(2.0), c(-4.0)) / c(3.0);
                Ok(Eval { lhs: a.max_norm(), rhs: want.max_norm(), abs: Some((a - want).max_norm()) })
            },
        ),
        check(
            "isomonodromy.numeric-connection",
            "closed-form A_n(z) against the Y'Y⁻¹ connection, n ≤ 3",
            "semicircle connection",
            1e-6,
            |_| {
                let zs = [c(2.0), c(-1.7), Complex64::new(0.3, 0.8), Complex64::new(0.0, 1.5), c(3.5)];
                let mut worst: f64 = 0.0;
                for &(a, b) in &[(-1.0, 1.0), (0.0, 3.0)] {
                    let (_, rec) = iso::semicircle_recurrence(a, b, 5)?;
                    for n in 1..=3 {
                        for &z in &zs {
                            let z = z + c(0.5 * (a + b));
                            let d = iso::connection_numeric(&rec, n, z)?.a
                                - iso::connection_semicircle(a, b, n, rec.h(n - 1), z)?.a;
                            worst = worst.max(d.max_norm());
                        }
                    }
                }
                residual(worst)
            },
        ),
        check(
            "isomonodromy.sum-rules",
            "residue sum rules for the semicircle family, n ≤ 5",
            "residue sum rules",
            1e-9,
            |_| {
                residual(max_over([(-1.0, 1.0), (0.0, 3.0)].iter().flat_map(|&(a, b)| {
                    (0..=5).map(move |n| {
                        iso::semicircle_residues(a, b, n, iso::semicircle_h_prev(a, b, n))
                            .map(|f| iso::sum_rules(&f).max())
                    })
                }))?)
            },
        ),
        check(
            "isomonodromy.lax",
            "A_{n+1}V_n - V_nA_n = diag(1,0) at 3 points, n ≤ 4",
            "Lax consistency",
            1e-10,
            |_| {
                let (_, rec) = iso::semicircle_recurrence(-1.0, 1.0, 6)?;
                let zs = [c(2.0), Complex64::new(0.4, 1.1), c(-3.0)];
                residual(max_over((1..=4).map(|n| {
                    iso::LaxInputs::from_recurrence(&rec, n).and_then(|i| iso::lax_consistency(-1.0, 1.0, n, &i, &zs))
                }))?)
            },
        ),
        check(
            "isomonodromy.telescoping",
            "Ω_{n+1} - Ω_n = d log h̃_n, n ≤ 5, two intervals",
            "telescoping one-form",
            1e-8,
            |_| {
                residual(max_over(
                    [(-1.0, 1.0), (0.0, 3.0)]
                        .iter()
                        .flat_map(|&(a, b)| (0..=5).map(move |n| iso::telescoping_check(a, b, n).map(|r| r.residual))),
                )?)
            },
        ),
        check(
            "isomonodromy.omega-closed-form",
            "Ω_3(da) = -49/8 on [-1,1]",
            "one-form of the semicircle family",
            1e-10,
            |_| {
                let f = iso::semicircle_residues(-1.0, 1.0, 3, iso::semicircle_h_prev(-1.0, 1.0, 3))?;
                equal(iso::omega_form(&f)?.coeffs[0], -49.0 / 8.0)
            },
        ),
        report(
            "isomonodromy.omega-reconciliation",
            "direct Ω_1(da) against the printed closed form on [-1,1]",
            "closed-form tau of the semicircle family",
            1e-10,
            |_| {
                let r = iso::semicircle_closed_forms(-1.0, 1.0, 1)?;
                equal(r.direct, r.closed_form)
            },
        ),
        check(
            "isomonodromy.omega-log-part",
            "shared logarithmic part of Ω_n(da), n = 1..3",
            "one-form of the semicircle family",
            1e-10,
            |_| {
                residual(max_over((1..=3).map(|n| {
                    iso::semicircle_closed_forms(-1.0, 1.0, n).map(|r| (r.direct_log_part - r.closed_log_part).abs())
                }))?)
            },
        ),
        check(
            "isomonodromy.isospectral-flow",
            "spectral and Hamiltonian drift along every H_j flow",
            "isospectral Hamiltonian flows",
            1e-7,
            |_| {
                let fam = iso::ResidueFamily {
                    poles: vec![-1.0, 0.5, 2.0],
                    residues: vec![
                        Mat2::new(0.3, 0.2, -0.1, 0.4),
                        Mat2::new(-0.2, 0.5, 0.3, 0.1),
                        Mat2::new(0.1, -0.3, 0.2, -0.6),
                    ],
                    n: 1,
                    big_n: 1,
                    h_n: 1.0,
                    h_prev: 1.0,
                };
                residual(max_over((0..3).map(|j| {
                    iso::hamiltonian_flow(&fam, j, 0.1, 200)
                        .map(|r| r.hamiltonian_drift.iter().fold(r.spectral_drift, |m, &d| m.max(d)))
                }))?)
            },
        ),
        check(
            "isomonodromy.phi-determinant",
            "det Φ_n(z) = 1/w(z) at z = 2",
            "determinant of the fundamental solution",
            1e-7,
            |_| {
                let (_, rec) = iso::semicircle_recurrence(-1.0, 1.0, 4)?;
                residual(iso::build_phi(&rec, 2, c(2.0))?.det_residual)
            },
        ),
    ]
}

fn hankelfact_checks() -> Vec<Check> {
    vec![
        check(
            "hankelfact.jbeta",
            "Jβ from the residues equals the closed form, 3 intervals",
            "J-beta matrices of the semicircle family",
            1e-12,
            |_| {
                let j = taulab::unit_j();
                residual(max_over([(-1.0, 1.0, 1usize), (0.0, 3.0, 2), (-0.5, 2.0, 3)].iter().map(|&(a, b, n)| {
                    let hp = ((b - a) / 4.0f64).powi(2 * (n as i32 - 1));
                    iso::semicircle_residues_scaled_variant(a, b, n, hp).map(|f| {
                        let (z, _) = hf::nu_beta(&f);
                        let cf = hf::jbeta_semicircle(a, b, n, hp);
                        (j * z.betas[0] - cf.at_a).abs().max().max((j * z.betas[1] - cf.at_b).abs().max())
                    })
                }))?)
            },
        ),
        check(
            "hankelfact.jbeta-det",
            "det Jβ_a = (n(n+1)(b-a)² - (2n+1)²)/16 on [-1,1], n = 2",
            "J-beta determinant",
            1e-12,
            |_| {
                let m = hf::jbeta_semicircle(-1.0, 1.0, 2, iso::semicircle_h_prev(-1.0, 1.0, 2)).at_a;
                equal(m.determinant(), -1.0 / 16.0)
            },
        ),
        check(
            "hankelfact.factorization",
            "K(x,y) against ∫ψᵀσψ at 9 pairs",
            "Hankel factorization of the kernel",
            1e-6,
            |s| {
                let fam = synthetic_family()?;
                let sol = hf::ode_solve_z(&fam, &[0.999], 1.0)?;
                let prof = hf::signature_profile(&fam)?;
                let pairs = hf::sample_pairs(3, 0.15, 0.9)?;
                residual(hf::factorization_check(&sol, &prof, &pairs, s.nodes(32))?.residual)
            },
        ),
        check(
            "hankelfact.homogeneity",
            "Euler derivative of K against its closed form",
            "homogeneity of the kernel",
            1e-6,
            |s| {
                let fam = synthetic_family()?;
                let sol = hf::ode_solve_z(&fam, &[0.999], 1.0)?;
                let prof = hf::signature_profile(&fam)?;
                let pairs = hf::sample_pairs(3, 0.15, 0.9)?;
                residual(hf::factorization_check(&sol, &prof, &pairs, s.nodes(32))?.homogeneity_residual)
            },
        ),
        check(
            "hankelfact.m-kernel",
            "top-left entry of M_n against the Christoffel-Darboux side, n = 2",
            "M kernel and Christoffel-Darboux",
            1e-6,
            |_| {
                let (_, rec) = iso::semicircle_recurrence(-1.0, 1.0, 4)?;
                let fam = iso::semicircle_residues(-1.0, 1.0, 2, rec.h(1))?;
                let (z, _) = hf::nu_beta(&fam);
                residual(hf::m_kernel_check(&rec, &z, 2, 2.0, 3.0)?.residual)
            },
        ),
        check(
            "hankelfact.congruence",
            "simultaneous congruence SᵀM₁S = I, SᵀM₂S = D²",
            "simultaneous diagonalization",
            1e-12,
            |_| {
                residual(
                    hf::simultaneous_congruence(&Mat2::new(2.0, 1.0, 1.0, 2.0), &Mat2::new(1.0, 0.3, 0.3, 0.5))?
                        .residual,
                )
            },
        ),
    ]
}

fn linsys_checks() -> Vec<Check> {
    vec![
        check(
            "linsys.gramian-quadrature",
            "closed-form Gramians against quadrature, x = 0.3",
            "Gramians of a diagonal system",
            1e-10,
            |s| {
                let sys = three_term()?;
                let a = ls::gramians(&sys, 0.3)?;
                let b = ls::gramians_quadrature(&sys, 0.3, s.nodes(32))?;
                residual((&a.l - &b.l).amax().max((&a.q - &b.q).amax()))
            },
        ),
        check(
            "linsys.fredholm-nystrom",
            "det(I - LQ) against the Nyström Fredholm determinant",
            "Fredholm determinant from Gramians",
            1e-6,
            |s| {
                let mut worst: f64 = 0.0;
                for sys in [three_term()?, ls::soliton_system()] {
                    for &x in &[0.25, 0.5, 1.0] {
                        let a = ls::tau_from_gramians(&sys, x)?;
                        let b = ls::tau_nystrom_oracle(&sys, x, 1.0, s.nodes(48))?;
                        worst = worst.max(((a - b) / a).abs());
                    }
                }
                residual(worst)
            },
        ),
        check("linsys.soliton-tau", "τ(2x) = 1 + e^{-2x} at x = 0.7", "soliton tau function", 1e-14, |_| {
            equal(ls::tau_from_gramians(&ls::soliton_system(), 0.7)?, 1.0 + (-1.4f64).exp())
        }),
        check(
            "linsys.soliton-trace-h",
            "trace H(x) = d/dx log τ(2x) at x = 0.7",
            "trace of the Hamiltonian",
            1e-10,
            |_| equal(ls::trace_h(&ls::soliton_system(), 0.7)?, -2.0 / (1.0 + 1.4f64.exp())),
        ),
        check("linsys.soliton-q", "q = -2sech²x on [0.1, 3]", "soliton potential", 1e-8, |_| {
            let sys = ls::soliton_system();
            residual(max_over((1..=30).map(|k| {
                let x = 0.1 * k as f64;
                ls::potential_q(&sys, x).map(|q| (q + 2.0 / x.cosh().powi(2)).abs())
            }))?)
        }),
        check(
            "linsys.gelfand-levitan",
            "block Gelfand-Levitan equation at x = 0.5, 13 values of y",
            "Gelfand-Levitan equation",
            1e-7,
            |_| {
                let ys: Vec<f64> = (0..=12).map(|k| 0.6 + 0.2 * k as f64).collect();
                residual(ls::gl_residual(&three_term()?, 0.5, &ys)?.max(ls::gl_residual(
                    &ls::soliton_system(),
                    0.5,
                    &ys,
                )?))
            },
        ),
        check(
            "linsys.wave-equation",
            "(∂x² - ∂y²)W = -2H'W for a small σ = +1 system",
            "wave equation for W",
            1e-4,
            |_| {
                let sys = ls::realize(&ls::ExpSymbol::scalar(0.0, &[0.5])?, one())?;
                residual(ls::pde_check(&sys, 0.5, 1.3)?.residual)
            },
        ),
        report(
            "linsys.wave-equation-soliton",
            "(∂x² - ∂y²)W = -2H'W for the soliton (weighted norm 1)",
            "wave equation for W",
            1e-6,
            |_| residual(ls::pde_check(&ls::soliton_system(), 0.5, 1.3)?.residual),
        ),
        check(
            "linsys.truncation",
            "|τ_L - τ_2L| in excess of the geometric envelope at t = 0.5, 1, 2 (L = 8)",
            "truncation convergence",
            0.0,
            |s| {
                let l = s.terms.unwrap_or(8);
                let rows = ls::truncation_convergence(0.0, 1.0, 0.5, 1.0, &[l, 2 * l], &[0.5, 1.0, 2.0])?;
                residual(rows.iter().map(|r| (r.difference - r.envelope).max(0.0)).fold(0.0, f64::max))
            },
        ),
        check(
            "linsys.algebro-geometric",
            "-R''' + 4(q - λ)R' + 2q'R for q = -2sech²x, R = λ + 1 + q/2",
            "algebro-geometric pair",
            1e-8,
            |_| {
                let mut worst: f64 = 0.0;
                for &lam in &[-1.0, 0.5, 2.0] {
                    for k in 0..5 {
                        let x = 0.3 + 0.4 * k as f64;
                        worst =
                            worst.max(ls::ag_residual(ls::sech_potential_jet(x), ls::sech_companion_jet(x, lam), lam));
                    }
                }
                residual(worst)
            },
        ),
    ]
}

fn lame_grid() -> Vec<f64> {
    (0..15).map(|i| 0.3 + 2.5 * i as f64 / 14.0).collect()
}

fn elliptic_checks() -> Vec<Check> {
    vec![
        check(
            "elliptic.theta-dual",
            "θ₁ product against series at q = 0.3, x = 1",
            "Jacobi theta product formula",
            1e-12,
            |s| {
                let n = s.nome()?;
                let x = c(1.0);
                close(
                    theta::theta1(x, &n, theta::ThetaMethod::Product),
                    theta::theta1(x, &n, theta::ThetaMethod::Series),
                )
            },
        ),
        check(
            "elliptic.wp-lattice-sum",
            "℘ from θ₁ against the direct lattice sum at 1 + 0.5i",
            "Weierstrass function from theta",
            1e-6,
            |s| {
                let n = s.nome()?;
                let x = Complex64::new(1.0, 0.5);
                let (sum, _) = theta::wp_lattice_sum(x, c(PI), n.ratio() * PI, 200.0);
                close(theta::wp(x, &n), sum)
            },
        ),
        check(
            "elliptic.lame-trace",
            "trace φ plus tail against 4(1+q²)/(1-q²) sin x",
            "trace of the Lamé symbol",
            1e-10,
            |s| residual(periodic::lame_system_checks(&s.nome()?, &lame_grid())?.trace_phi),
        ),
        check(
            "elliptic.lame-block-det",
            "block determinant 1 - 2q^{2n}cos 2x + q^{4n}",
            "Lamé block determinant",
            1e-12,
            |s| residual(periodic::lame_system_checks(&s.nome()?, &lame_grid())?.block_det),
        ),
        check(
            "elliptic.lame-theta",
            "τ against θ₁(x)²/(q^{1/2}∏(1-q^{2n})²), relative",
            "Lamé tau as a theta function",
            1e-10,
            |s| residual(periodic::lame_system_checks(&s.nome()?, &lame_grid())?.theta_form),
        ),
        check(
            "elliptic.lame-constancy",
            "variance of -(log τ)'' - 2℘ over 15 points",
            "Lamé potential",
            1e-6,
            |s| residual(periodic::lame_system_checks(&s.nome()?, &lame_grid())?.offset_variance),
        ),
        check("elliptic.lame-periodicity", "trace W(x,x) is 2π-periodic", "periodicity of W", 1e-8, |s| {
            residual(periodic::lame_system_checks(&s.nome()?, &lame_grid())?.periodicity)
        }),
        check(
            "elliptic.periodic-gelfand-levitan",
            "periodic Gelfand-Levitan equation at (0.7, 1.1)",
            "periodic Gelfand-Levitan equation",
            1e-7,
            |s| {
                residual(
                    periodic::periodic_gl(&periodic::PeriodicLinearSystem::lame(&s.nome()?), 0.7, 1.1)?
                        .integral_equation,
                )
            },
        ),
        check(
            "elliptic.periodic-log-det",
            "d/dx log τ = trace W(x,x) at x = 0.9",
            "periodic log-determinant derivative",
            1e-7,
            |s| residual(periodic::periodic_gl(&periodic::PeriodicLinearSystem::lame(&s.nome()?), 0.9, 1.1)?.log_det),
        ),
        check(
            "elliptic.builder",
            "trace W against the logarithmic derivative of the theta quotient",
            "elliptic tau builder",
            1e-6,
            |s| {
                let spec = periodic::ThetaQuotientSpec::new(
                    vec![Complex64::new(0.4, 0.1), c(-0.2)],
                    vec![c(0.9), Complex64::new(-0.7, 0.1)],
                )?;
                let grid: Vec<f64> = (0..9).map(|i| 0.35 + 0.3 * i as f64).collect();
                residual(periodic::elliptic_tau_builder(&spec, &s.nome()?, &grid)?.1.residual)
            },
        ),
        check(
            "elliptic.builder-base-block",
            "base block determinant equals 2i sin x",
            "elliptic tau builder",
            1e-12,
            |s| {
                let spec = periodic::ThetaQuotientSpec::new(vec![c(0.3)], vec![c(0.3)])?;
                residual(periodic::elliptic_tau_builder(&spec, &s.nome()?, &[0.5, 1.5, 2.5])?.1.base_block)
            },
        ),
        check(
            "elliptic.legendre",
            "Legendre equation for u = K(√t) on [0.2, 0.8]",
            "Legendre equation for complete elliptic integrals",
            1e-6,
            |_| {
                let grid: Vec<f64> = (0..=12).map(|i| 0.2 + 0.05 * i as f64).collect();
                residual(picard::legendre_picard_check(1.0, 0.0, &grid)?)
            },
        ),
        report(
            "elliptic.picard-pvi",
            "Painlevé VI residual of the Picard solution at t = 0.5",
            "Picard solution of Painlevé VI",
            1e-3,
            |_| {
                let k = picard::PviConstants { k0: 0.0, k1: 0.0, kt: 0.0, kinf: 0.0 };
                residual(picard::pvi_residual(
                    |t| picard::picard_lambda(1.0, 0.0, t).unwrap_or(f64::NAN),
                    0.5,
                    k,
                    picard::PviForm::ShiftedKt,
                ))
            },
        ),
        check(
            "elliptic.genus2-reduction",
            "rational-b reduction against the double sum, Ω = [[2i,1/2],[1/2,2i]]",
            "genus-2 theta reduction",
            1e-8,
            |_| {
                let m = genus2::RiemannMatrix2::new(
                    Complex64::new(0.0, 2.0),
                    Rational64::new(1, 2),
                    Complex64::new(0.0, 2.0),
                )?;
                let r = genus2::reduction_check([c(0.1), c(0.2)], &m)?;
                close(r.reduced, r.direct)
            },
        ),
        report(
            "elliptic.genus2-real-phase",
            "reduction with real exponentials against the double sum",
            "genus-2 theta reduction",
            1e-8,
            |_| {
                let m = genus2::RiemannMatrix2::new(
                    Complex64::new(0.0, 2.0),
                    Rational64::new(1, 2),
                    Complex64::new(0.0, 2.0),
                )?;
                let r = genus2::reduction_check([c(0.1), c(0.2)], &m)?;
                residual(r.real_phase_residual)
            },
        ),
        check(
            "elliptic.symplectic-siegel",
            "image of Ω under X = J stays in the Siegel half-space",
            "symplectic action",
            1e-10,
            |_| {
                let m = genus2::RiemannMatrix2::new(
                    Complex64::new(0.0, 2.0),
                    Rational64::new(1, 2),
                    Complex64::new(0.0, 2.0),
                )?;
                let out = genus2::symplectic_act(&genus2::symplectic_unit(), &m.matrix())?;
                let (asym, min_eig) = genus2::siegel_defect(&out);
                residual(if min_eig > 0.0 { asym } else { f64::INFINITY })
            },
        ),
    ]
}

pub fn checks_for(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Equilibrium => equilibrium_checks(),
        Suite::Orthopoly => orthopoly_checks(),
        Suite::Isomonodromy => isomonodromy_checks(),
        Suite::Hankelfact => hankelfact_checks(),
        Suite::Linsys => linsys_checks(),
        Suite::Elliptic => elliptic_checks(),
        Suite::All => Suite::All.expand().into_iter().flat_map(checks_for).collect(),
    }
}

pub fn run_check(check: &Check, settings: &Settings, tol_scale: f64, timings: bool) -> CheckRecord {
    let start = Instant::now();
    let out = (check.run)(settings);
    let runtime_ms = if timings { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
    let tol = check.tol * tol_scale;
    let (lhs, rhs, abs_err, rel_err, ok) = match out {
        Ok(e) => {
            let (abs_err, rel_err) = errors(e.lhs, e.rhs, e.abs);
            (e.lhs, e.rhs, abs_err, rel_err, passes(abs_err, rel_err, tol))
        }
        Err(err) => {
            log::error!("{}: {err}", check.id);
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN, false)
        }
    };
    let status = match (check.report_only, ok) {
        (true, _) => Status::ReportOnly,
        (false, true) => Status::Pass,
        (false, false) => Status::Fail,
    };
    log::debug!("{} {} abs {abs_err:.3e} tol {tol:.1e}", check.id, status.as_str());
    CheckRecord {
        id: check.id.to_string(),
        description: check.description.to_string(),
        paper_ref: check.identity.to_string(),
        lhs,
        rhs,
        abs_err,
        rel_err,
        tol,
        status,
        runtime_ms,
    }
}

/// Every check of the selected suites, ordered by id.
pub fn run_suite(config: &SuiteConfig) -> Vec<CheckRecord> {
    let settings = Settings { quad_nodes: config.quad_nodes, trunc: config.trunc, terms: config.terms };
    let mut out: Vec<CheckRecord> =
        checks_for(config.suite).iter().map(|ch| run_check(ch, &settings, config.tol_scale, config.timings)).collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}
