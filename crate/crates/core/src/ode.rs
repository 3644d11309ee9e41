//! Adaptive Dormand–Prince 5(4) integrator.

use alloc::vec::Vec;
use num_traits::Float;

use crate::{GeomError, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h0: 1e-2, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    /// Set when the right-hand side reported an error before `t1`.
    pub truncated: bool,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.y.last().expect("trajectory has at least the initial state")
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `t0` to `t1`.
///
/// A right-hand side error ends the integration early with
/// `truncated = true`; the states reached so far are kept.
pub fn integrate<F>(mut f: F, t0: f64, y0: &[f64], t1: f64, opts: &OdeOptions) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let n = y0.len();
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut traj = Trajectory { t: alloc::vec![t0], y: alloc::vec![y0.to_vec()], truncated: false, rejected_steps: 0 };
    if t1 == t0 {
        return Ok(traj);
    }
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = opts.h0.min((t1 - t0).abs()) * dir;
    let mut k: Vec<Vec<f64>> = alloc::vec![alloc::vec![0.0; n]; 7];
    k[0] = match f(t, &y) {
        Ok(v) => v,
        Err(_) => {
            traj.truncated = true;
            return Ok(traj);
        }
    };
    let mut steps = 0;
    while (t1 - t) * dir > 0.0 {
        if steps >= opts.max_steps {
            return Err(GeomError::Integration(alloc::format!("step limit reached at t = {t}")));
        }
        steps += 1;
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let mut failed = false;
        for s in 1..7 {
            let ys: Vec<f64> = (0..n)
                .map(|i| y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>())
                .collect();
            match f(t + C[s] * h, &ys) {
                Ok(v) => k[s] = v,
                Err(_) => {
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            // shrink and retry; give up once the step is negligible
            h *= 0.25;
            traj.rejected_steps += 1;
            if h.abs() < 1e-12 * (1.0 + t.abs()) {
                traj.truncated = true;
                return Ok(traj);
            }
            continue;
        }
        let y5: Vec<f64> = (0..n).map(|i| y[i] + h * (0..7).map(|j| B5[j] * k[j][i]).sum::<f64>()).collect();
        let y4: Vec<f64> = (0..n).map(|i| y[i] + h * (0..7).map(|j| B4[j] * k[j][i]).sum::<f64>()).collect();
        let err = (0..n)
            .map(|i| {
                let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
                let e = (y5[i] - y4[i]) / sc;
                e * e
            })
            .sum::<f64>()
            / n as f64;
        let err = err.sqrt();
        if err <= 1.0 {
            t += h;
            y = y5;
            // FSAL: the last stage is f(t + h, y5)
            k[0] = k[6].clone();
            traj.t.push(t);
            traj.y.push(y.clone());
        } else {
            traj.rejected_steps += 1;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let traj = integrate(
            |_, y| Ok(alloc::vec![y[1], -y[0]]),
            0.0,
            &[1.0, 0.0],
            2.0 * core::f64::consts::PI,
            &OdeOptions::default(),
        )
        .unwrap();
        let y = traj.last();
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9);
    }

    #[test]
    fn rhs_failure_truncates() {
        let traj = integrate(
            |t, y| if t > 0.5 { Err(GeomError::Domain("stop".into())) } else { Ok(alloc::vec![y[0]]) },
            0.0,
            &[1.0],
            1.0,
            &OdeOptions::default(),
        )
        .unwrap();
        assert!(traj.truncated);
        assert!(*traj.t.last().unwrap() <= 0.5 + 1e-9);
    }
}
