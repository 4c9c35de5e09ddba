//! Theta functions, Weierstrass `℘`, periodic linear systems, complete
//! elliptic integrals and genus-2 theta functions.

pub mod genus2;
pub mod periodic;
pub mod picard;
pub mod theta;

pub use genus2::{reduction_check, riemann_theta2, symplectic_act, RiemannMatrix2};
pub use periodic::{elliptic_tau_builder, lame_system_checks, PeriodicLinearSystem, ThetaQuotientSpec};
pub use picard::{elliptic_k, legendre_picard_check, pvi_residual};
pub use theta::{theta1, wp, Nome, ThetaMethod};
