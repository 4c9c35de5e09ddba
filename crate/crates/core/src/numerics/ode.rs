//! Classical fixed-step Runge–Kutta.

use crate::error::{invalid, Result, TauError};

/// Sampled solution including both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Integrate `y' = field(t, y)` from `t0` to `t1` in `steps` RK4 steps.
pub fn rk4_integrate<F>(field: F, state0: &[f64], t0: f64, t1: f64, steps: usize) -> Result<Trajectory>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    if steps == 0 {
        return invalid("rk4_integrate needs at least one step");
    }
    let h = (t1 - t0) / steps as f64;
    let n = state0.len();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = state0.to_vec();
    times.push(t0);
    states.push(y.clone());
    let axpy = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    for step in 0..steps {
        let t = t0 + step as f64 * h;
        let k1 = field(t, &y);
        let k2 = field(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
        let k3 = field(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
        let k4 = field(t + h, &axpy(&y, &k3, h));
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(TauError::NonFinite { step: step + 1, t: t + h });
        }
        times.push(if step + 1 == steps { t1 } else { t + h });
        states.push(y.clone());
    }
    Ok(Trajectory { times, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn exponential_growth() {
        let tr = rk4_integrate(|_, y| vec![y[0]], &[1.0], 0.0, 1.0, 100).unwrap();
        assert!((tr.last()[0] - E).abs() < 1e-8);
        assert_eq!(tr.times.len(), 101);
        assert_eq!(tr.times[100], 1.0);
    }

    #[test]
    fn constant_field() {
        let tr = rk4_integrate(|_, _| vec![0.0, 0.0], &[2.0, -1.0], 0.0, 3.0, 7).unwrap();
        assert!(tr.states.iter().all(|s| s == &vec![2.0, -1.0]));
    }

    #[test]
    fn rotation_by_pi() {
        // y' = J y with J = [[0,-1],[1,0]]
        let tr = rk4_integrate(|_, y| vec![-y[1], y[0]], &[0.3, 0.7], 0.0, PI, 200).unwrap();
        let y = tr.last();
        assert!((y[0] + 0.3).abs() < 1e-7 && (y[1] + 0.7).abs() < 1e-7);
    }

    #[test]
    fn blow_up_reports_step() {
        let err = rk4_integrate(|_, y| vec![y[0] * y[0]], &[1.0], 0.0, 2.0, 50).unwrap_err();
        assert!(matches!(err, TauError::NonFinite { .. }));
    }
}
