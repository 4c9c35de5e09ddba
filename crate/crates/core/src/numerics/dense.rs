//! Small dense linear algebra over the complex numbers.
//!
//! Storage and factorizations are delegated to `nalgebra`; this module adds
//! the finiteness and singularity policy used throughout the crate.

use crate::error::{invalid, Result, TauError};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    data: DMatrix<Complex64>,
}

/// Relative pivot size below which a factorization is treated as singular.
const PIVOT_TOL: f64 = 1e-14;

impl DenseMatrix {
    /// Build from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid("matrix dimensions must be positive");
        }
        if entries.len() != rows * cols {
            return invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            ));
        }
        Self::from_nalgebra(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_nalgebra(data: DMatrix<Complex64>) -> Result<Self> {
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("matrix has non-finite entries");
        }
        Ok(Self { data })
    }

    pub fn identity(n: usize) -> Self {
        Self { data: DMatrix::identity(n, n) }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols() != other.rows() {
            return invalid("dimension mismatch in product");
        }
        Ok(Self { data: &self.data * &other.data })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if self.rows() != self.cols() {
            return invalid(format!("{what} needs a square matrix"));
        }
        Ok(())
    }

    /// Determinant by partially pivoted LU. Singular input yields 0.
    pub fn det(&self) -> Result<Complex64> {
        self.require_square("det")?;
        Ok(self.data.clone().lu().determinant())
    }

    /// Solve `self · X = rhs`.
    pub fn solve(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        self.require_square("solve")?;
        if rhs.rows() != self.rows() {
            return invalid("right-hand side has the wrong number of rows");
        }
        let lu = self.data.clone().lu();
        check_pivots(lu.u().diagonal().iter().map(|z| z.norm()))?;
        let x = lu.solve(&rhs.data).ok_or(TauError::SingularMatrix)?;
        Self::from_nalgebra(x)
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        self.solve(&Self::identity(self.rows()))
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn sym_eigen(&self) -> Result<Vec<f64>> {
        self.require_square("sym-eigen")?;
        let scale = self.max_abs().max(1.0);
        let asym = (&self.data - self.data.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > 1e-12 * scale {
            return Err(TauError::NotHermitian(asym));
        }
        let herm = (&self.data + self.data.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

fn check_pivots(pivots: impl Iterator<Item = f64>) -> Result<()> {
    let p: Vec<f64> = pivots.collect();
    let max = p.iter().copied().fold(0.0, f64::max);
    let min = p.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min <= PIVOT_TOL * max {
        return Err(TauError::SingularMatrix);
    }
    Ok(())
}

/// Operation selector for [`dense_linalg`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinalgOp {
    Det,
    Solve,
    Inverse,
    SymEigen,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgOutput {
    Scalar(Complex64),
    Matrix(DenseMatrix),
    Eigenvalues(Vec<f64>),
}

/// Single entry point over the dense operations.
pub fn dense_linalg(op: LinalgOp, m: &DenseMatrix, rhs: Option<&DenseMatrix>) -> Result<LinalgOutput> {
    match op {
        LinalgOp::Det => m.det().map(LinalgOutput::Scalar),
        LinalgOp::Solve => {
            let rhs = rhs.ok_or_else(|| TauError::InvalidArgument("solve needs a rhs".into()))?;
            m.solve(rhs).map(LinalgOutput::Matrix)
        }
        LinalgOp::Inverse => m.inverse().map(LinalgOutput::Matrix),
        LinalgOp::SymEigen => m.sym_eigen().map(LinalgOutput::Eigenvalues),
    }
}

/// Real LU solve with the same singularity policy.
pub fn solve_real(m: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let lu = m.clone().lu();
    check_pivots(lu.u().diagonal().iter().map(|x| x.abs()))?;
    lu.solve(rhs).ok_or(TauError::SingularMatrix)
}

/// Complex LU solve with the same singularity policy.
pub fn solve_complex(m: &DMatrix<Complex64>, rhs: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let lu = m.clone().lu();
    check_pivots(lu.u().diagonal().iter().map(|x| x.norm()))?;
    lu.solve(rhs).ok_or(TauError::SingularMatrix)
}
