//! Limits of sequences sampled at increasing radii.

use alloc::vec::Vec;
use num_traits::Float;

use crate::{GeomError, Result};

/// Qualitative verdict on a sampled sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    Finite,
    Diverging,
    Noisy,
}

impl Convergence {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convergence::Finite => "finite",
            Convergence::Diverging => "diverging",
            Convergence::Noisy => "noisy",
        }
    }
}

/// Result of fitting `v(R) = v∞ + c·e^{−κR}`.
#[derive(Debug, Clone)]
pub struct ExpFit {
    pub limit: f64,
    pub amplitude: f64,
    pub kappa: f64,
    /// RMS of the fit residuals divided by `max(|v∞|, scale)`.
    pub rel_residual: f64,
    /// `|v∞ − v_last|`, the size of the extrapolation step.
    pub correction: f64,
    /// The fit was ill-conditioned and the last value was used instead.
    pub fallback: bool,
    pub flag: Convergence,
}

const KAPPA_MIN: f64 = 1e-2;
const KAPPA_MAX: f64 = 40.0;

fn linear_fit(r: &[f64], v: &[f64], kappa: f64) -> Option<(f64, f64, f64)> {
    // least squares for v ≈ a + c·e^{−κ(R − R₀)}
    let r0 = r[0];
    let n = r.len() as f64;
    let (mut se, mut see, mut sv, mut sev) = (0.0, 0.0, 0.0, 0.0);
    for (ri, vi) in r.iter().zip(v) {
        let e = (-kappa * (ri - r0)).exp();
        se += e;
        see += e * e;
        sv += vi;
        sev += e * vi;
    }
    let det = n * see - se * se;
    if det.abs() < 1e-14 * n * see.max(1e-300) {
        return None;
    }
    let c = (n * sev - se * sv) / det;
    let a = (sv - c * se) / n;
    let ss: f64 = r
        .iter()
        .zip(v)
        .map(|(ri, vi)| {
            let d = vi - a - c * (-kappa * (ri - r0)).exp();
            d * d
        })
        .sum();
    Some((a, c * (kappa * r0).exp(), ss))
}

/// Non-decreasing same-sign increments mean the sequence is not settling.
pub fn is_diverging(v: &[f64], scale: f64) -> bool {
    if v.len() < 3 {
        return false;
    }
    let d: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let sign = d[0].signum();
    let tiny = 1e-9 * scale.max(1e-300);
    d.iter().all(|x| x.signum() == sign && x.abs() > tiny) && d.windows(2).all(|w| w[1].abs() >= w[0].abs())
}

/// Fit `v∞ + c e^{−κR}` with `κ` found by a log-grid scan and golden-section
/// refinement; falls back to the last value when the data cannot pin `κ`.
///
/// `scale` sets the absolute size below which values count as zero.
pub fn fit_exponential(r: &[f64], v: &[f64], scale: f64, noise_tol: f64) -> Result<ExpFit> {
    if r.len() != v.len() || r.len() < 2 {
        return Err(GeomError::InvalidInput("need at least two samples of equal length".into()));
    }
    if r.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GeomError::InvalidInput("radii must be strictly increasing".into()));
    }
    let last = *v.last().unwrap();
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = scale.max(1e-300);
    if vmax <= floor * 1e-12 || r.len() < 3 {
        let flag = if is_diverging(v, floor) { Convergence::Diverging } else { Convergence::Finite };
        return Ok(ExpFit {
            limit: last,
            amplitude: 0.0,
            kappa: f64::NAN,
            rel_residual: 0.0,
            correction: 0.0,
            fallback: true,
            flag,
        });
    }
    let ss_at = |k: f64| linear_fit(r, v, k).map(|f| f.2).unwrap_or(f64::INFINITY);
    let grid: Vec<f64> = (0..=120)
        .map(|i| KAPPA_MIN * (KAPPA_MAX / KAPPA_MIN).powf(i as f64 / 120.0))
        .collect();
    let mut best = 0;
    for i in 1..grid.len() {
        if ss_at(grid[i]) < ss_at(grid[best]) {
            best = i;
        }
    }
    let (mut lo, mut hi) = (grid[best.saturating_sub(1)].ln(), grid[(best + 1).min(grid.len() - 1)].ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if ss_at(a.exp()) < ss_at(b.exp()) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let kappa = (0.5 * (lo + hi)).exp();
    let diverging = is_diverging(v, floor);
    match linear_fit(r, v, kappa) {
        Some((a, c, ss)) if a.is_finite() && kappa > KAPPA_MIN * 1.01 && !diverging => {
            let denom = a.abs().max(floor);
            let rel = (ss / r.len() as f64).sqrt() / denom;
            let flag = if rel > noise_tol { Convergence::Noisy } else { Convergence::Finite };
            Ok(ExpFit {
                limit: a,
                amplitude: c,
                kappa,
                rel_residual: rel,
                correction: (a - last).abs(),
                fallback: false,
                flag,
            })
        }
        _ => {
            let d = (v[v.len() - 1] - v[v.len() - 2]).abs();
            let flag = if diverging { Convergence::Diverging } else { Convergence::Noisy };
            Ok(ExpFit {
                limit: last,
                amplitude: 0.0,
                kappa,
                rel_residual: d / last.abs().max(floor),
                correction: d,
                fallback: true,
                flag,
            })
        }
    }
}

/// One Richardson step for an `O(h^p)` method: combine `f(h)` and `f(h/2)`.
pub fn richardson(f_h: f64, f_h2: f64, p: i32) -> f64 {
    let q = 2f64.powi(p);
    (q * f_h2 - f_h) / (q - 1.0)
}

/// Observed order from three successive halvings.
pub fn observed_order(f_h: f64, f_h2: f64, f_h4: f64) -> f64 {
    ((f_h - f_h2) / (f_h2 - f_h4)).abs().log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exponential_limit() {
        let r: Vec<f64> = (0..6).map(|i| 2.0 + 0.5 * i as f64).collect();
        let v: Vec<f64> = r.iter().map(|x| 1.7 - 3.0 * (-1.3 * x).exp()).collect();
        let fit = fit_exponential(&r, &v, 1.0, 1e-3).unwrap();
        assert!((fit.limit - 1.7).abs() < 1e-9, "{fit:?}");
        assert!((fit.kappa - 1.3).abs() < 1e-5);
        assert_eq!(fit.flag, Convergence::Finite);
    }

    #[test]
    fn growth_is_flagged() {
        let r: Vec<f64> = (0..6).map(|i| 2.0 + 0.5 * i as f64).collect();
        let v: Vec<f64> = r.iter().map(|x| (0.7 * x).exp()).collect();
        let fit = fit_exponential(&r, &v, 1.0, 1e-3).unwrap();
        assert_eq!(fit.flag, Convergence::Diverging);
    }

    #[test]
    fn richardson_removes_leading_term() {
        let f = |h: f64| 2.0 + 0.3 * h * h + 0.1 * h * h * h * h;
        let e = (richardson(f(0.1), f(0.05), 2) - 2.0).abs();
        assert!(e < 1e-5);
        assert!((observed_order(f(0.1), f(0.05), f(0.025)) - 2.0).abs() < 0.05);
    }
}
