//! Shared numerical plumbing: quadrature, dense and exact linear algebra,
//! finite differences and a fixed-step RK4 integrator.

pub mod dense;
pub mod diff;
pub mod ode;
pub mod quad;
pub mod rational;

pub use dense::{dense_linalg, DenseMatrix, LinalgOp, LinalgOutput};
pub use diff::{central_diff, central_diff_complex, third_diff, FIRST_STEP, SECOND_STEP};
pub use ode::{rk4_integrate, Trajectory};
pub use quad::{cosine_grid, cosine_grid_upto, exp_map_grid, gauss_legendre, QuadGrid};
pub use rational::{rational_hankel_det, RationalMatrix};
