//! Exact rational matrices and fraction-free determinants.

use crate::error::{invalid, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Row-major matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return invalid(format!("expected {} entries, got {}", rows * cols, entries.len()));
        }
        Ok(Self { rows, cols, entries })
    }

    /// Build from integer numerator/denominator pairs.
    pub fn from_ratios(rows: usize, cols: usize, ratios: &[(i64, i64)]) -> Result<Self> {
        if ratios.iter().any(|&(_, d)| d == 0) {
            return invalid("zero denominator");
        }
        Self::new(rows, cols, ratios.iter().map(|&(p, q)| BigRational::new(p.into(), q.into())).collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigRational::one();
        }
        Self { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, entries }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return invalid("dimension mismatch in rational product");
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigRational::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                entries.push(acc);
            }
        }
        Ok(Self { rows: self.rows, cols: other.cols, entries })
    }

    /// Exact determinant: clear denominators, then Bareiss elimination on
    /// integers.
    pub fn det(&self) -> Result<BigRational> {
        if self.rows != self.cols {
            return invalid("determinant needs a square matrix");
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigRational::one());
        }
        let l = self.entries.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| (self.get(i, j) * BigRational::from(l.clone())).to_integer()).collect())
            .collect();
        let d = bareiss(&mut a);
        let scale = num_traits::pow(l, n);
        Ok(BigRational::new(d, scale))
    }
}

/// Fraction-free Gaussian elimination; consumes `a`, returns `det a`.
fn bareiss(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Exact determinant of the Hankel matrix `[μ_{j+k}]_{j,k<n}`.
pub fn rational_hankel_det(moments: &[BigRational], n: usize) -> Result<BigRational> {
    if n == 0 {
        return Ok(BigRational::one());
    }
    if moments.len() < 2 * n - 1 {
        return invalid(format!("Hankel determinant of order {n} needs {} moments, got {}", 2 * n - 1, moments.len()));
    }
    let entries = (0..n * n).map(|k| moments[k / n + k % n].clone()).collect();
    RationalMatrix::new(n, n, entries)?.det()
}

/// Moments of the semicircle law on rational `[a, b]`:
/// `μ_j = Σ_k C(j,2k) m^{j-2k} r^{2k} Cat(k)/4^k` with `m = (a+b)/2`,
/// `r = (b-a)/2`.
pub fn semicircle_moments(a: &BigRational, b: &BigRational, count: usize) -> Vec<BigRational> {
    let two = BigRational::from_integer(2.into());
    let m = (a + b) / &two;
    let r = (b - a) / &two;
    (0..count)
        .map(|j| {
            let mut acc = BigRational::zero();
            for k in 0..=j / 2 {
                let cat = catalan(k);
                let term = BigRational::from_integer(binom(j, 2 * k) * cat)
                    * num_traits::pow(m.clone(), j - 2 * k)
                    * num_traits::pow(r.clone(), 2 * k)
                    / BigRational::from_integer(num_traits::pow(BigInt::from(4), k));
                acc += term;
            }
            acc
        })
        .collect()
}

/// Moments of the arcsine law on rational `[a, b]`:
/// `μ_j = Σ_k C(j,2k) m^{j-2k} r^{2k} C(2k,k)/4^k`.
pub fn arcsine_moments(a: &BigRational, b: &BigRational, count: usize) -> Vec<BigRational> {
    let two = BigRational::from_integer(2.into());
    let m = (a + b) / &two;
    let r = (b - a) / &two;
    (0..count)
        .map(|j| {
            let mut acc = BigRational::zero();
            for k in 0..=j / 2 {
                let term = BigRational::from_integer(binom(j, 2 * k) * binom(2 * k, k))
                    * num_traits::pow(m.clone(), j - 2 * k)
                    * num_traits::pow(r.clone(), 2 * k)
                    / BigRational::from_integer(num_traits::pow(BigInt::from(4), k));
                acc += term;
            }
            acc
        })
        .collect()
}

fn binom(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn catalan(k: usize) -> BigInt {
    binom(2 * k, k) / BigInt::from(k + 1)
}

/// `true` when the rational is non-negative.
pub fn is_nonneg(q: &BigRational) -> bool {
    !q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn semicircle_hankel_values() {
        let mu = vec![q(1, 1), q(0, 1), q(1, 4), q(0, 1), q(1, 8)];
        assert_eq!(rational_hankel_det(&mu, 2).unwrap(), q(1, 4));
        assert_eq!(rational_hankel_det(&mu, 1).unwrap(), q(1, 1));
        let mu = semicircle_moments(&q(-1, 1), &q(1, 1), 5);
        assert_eq!(mu[4], q(1, 8));
        assert_eq!(rational_hankel_det(&mu, 3).unwrap(), q(1, 64));
    }

    #[test]
    fn arcsine_moments_values() {
        let mu = arcsine_moments(&q(-1, 1), &q(1, 1), 5);
        assert_eq!(mu[2], q(1, 2));
        assert_eq!(mu[4], q(3, 8));
    }

    #[test]
    fn insufficient_moments() {
        assert!(rational_hankel_det(&[q(1, 1), q(0, 1)], 2).is_err());
    }

    #[test]
    fn pivoting_on_zero_leading_entry() {
        let m = RationalMatrix::from_ratios(2, 2, &[(0, 1), (1, 1), (1, 1), (0, 1)]).unwrap();
        assert_eq!(m.det().unwrap(), q(-1, 1));
        let s = RationalMatrix::from_ratios(2, 2, &[(0, 1), (1, 3), (0, 1), (2, 5)]).unwrap();
        assert_eq!(s.det().unwrap(), q(0, 1));
    }

    #[test]
    fn agrees_with_float_det() {
        let mu = semicircle_moments(&q(0, 1), &q(3, 1), 7);
        for n in 1..=4 {
            let exact = rational_hankel_det(&mu, n).unwrap().to_f64().unwrap();
            let fl: Vec<f64> = (0..n * n).map(|k| mu[k / n + k % n].to_f64().unwrap()).collect();
            let m = nalgebra::DMatrix::from_row_slice(n, n, &fl);
            let d = m.determinant();
            assert!(((d - exact) / exact).abs() < 1e-10, "n={n}");
        }
    }
}
