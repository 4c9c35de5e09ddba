//! Central finite differences.

use crate::error::{invalid, Result};
use num_complex::Complex64;

/// Default step for first derivatives.
pub const FIRST_STEP: f64 = 1e-5;
/// Default step for second derivatives with the 5-point stencil; at 1e-5 the
/// stencil's roundoff (`~ε/h²`) would dominate.
pub const SECOND_STEP: f64 = 1e-3;

/// Central difference of order 1 (`O(h²)` two-point) or order 2 (`O(h⁴)`
/// five-point). Non-finite samples propagate as NaN with a warning.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64, order: usize) -> Result<f64> {
    if !(h > 0.0) {
        return invalid(format!("step must be positive, got {h}"));
    }
    let v = match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h),
        _ => return invalid(format!("order must be 1 or 2, got {order}")),
    };
    if !v.is_finite() {
        log::warn!("central_diff: non-finite samples near x = {x} (h = {h})");
        return Ok(f64::NAN);
    }
    Ok(v)
}

/// Third derivative, `O(h²)` five-point stencil.
pub fn third_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h)
}

/// Complex-valued version of [`central_diff`] for functions of a real
/// variable.
pub fn central_diff_complex<F: Fn(f64) -> Complex64>(f: F, x: f64, h: f64, order: usize) -> Result<Complex64> {
    let re = central_diff(|t| f(t).re, x, h, order)?;
    let im = central_diff(|t| f(t).im, x, h, order)?;
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_slope() {
        let d = central_diff(|x| x * x, 3.0, 1e-5, 1).unwrap();
        assert!((d - 6.0).abs() < 1e-8);
    }

    #[test]
    fn exp_second() {
        let d = central_diff(f64::exp, 0.0, SECOND_STEP, 2).unwrap();
        assert!((d - 1.0).abs() < 1e-6);
    }

    #[test]
    fn log_slope() {
        let d = central_diff(f64::ln, 2.0, 1e-5, 1).unwrap();
        assert!((d - 0.5).abs() < 1e-8);
    }

    #[test]
    fn third_of_cube() {
        assert!((third_diff(|x| x.powi(3), 0.7, 1e-3) - 6.0).abs() < 1e-6);
    }

    #[test]
    fn bad_arguments() {
        assert!(central_diff(f64::exp, 0.0, 0.0, 1).is_err());
        assert!(central_diff(f64::exp, 0.0, 1e-3, 3).is_err());
        assert!(central_diff(f64::ln, 0.0, 1e-3, 1).unwrap().is_nan());
    }
}
