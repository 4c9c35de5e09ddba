//! Numerics for tau functions.
//!
//! The crate computes, and cross-checks against independent routes, the
//! objects that tie random-matrix Hankel determinants to integrable systems:
//!
//! * [`equilibrium`]: equilibrium measures of polynomial potentials.
//! * [`orthopoly`]: monic orthogonal polynomials, norms, Hankel determinants.
//! * [`isomonodromy`]: the Fuchsian connection `A_n(z)`, residues, the 1-form
//!   `Ω_n`, Schlesinger and Hamiltonian flows.
//! * [`hankelfact`]: trace-free residues, the integrable kernel `K_n` and its
//!   factorization through Hankel operators.
//! * [`linsys`]: Gramian and Fredholm tau functions of diagonal linear
//!   systems, the Gelfand–Levitan solution and its potential.
//! * [`elliptic`]: Jacobi and Weierstrass functions, periodic linear systems,
//!   Lamé tau functions, Picard solutions and genus-2 theta functions.
//!
//! [`numerics`] holds the shared plumbing (quadrature, dense and exact linear
//! algebra, finite differences, RK4).

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod equilibrium;
pub mod error;
pub mod hankelfact;
pub mod isomonodromy;
pub mod linsys;
pub mod numerics;
pub mod orthopoly;

pub use error::{Result, TauError};
pub use num_complex::Complex64;

/// 2x2 real matrix used for residues and connection samples.
pub type Mat2 = nalgebra::Matrix2<f64>;
/// 2x2 complex matrix.
pub type CMat2 = nalgebra::Matrix2<Complex64>;

/// The symplectic unit `[[0,-1],[1,0]]`.
pub fn unit_j() -> Mat2 {
    Mat2::new(0.0, -1.0, 1.0, 0.0)
}

/// Largest entry modulus of a complex 2×2 matrix.
pub trait MaxNorm {
    fn max_norm(&self) -> f64;
}

impl MaxNorm for CMat2 {
    fn max_norm(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
