//! One-dimensional rules and the product rule on `S^{2m−1}`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::{GeomError, Result};

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            x[0] = mid;
            w[0] = 2.0 * half;
            break;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = mid - half * z;
        x[n - 1 - i] = mid + half * z;
        w[i] = half * wi;
        w[n - 1 - i] = half * wi;
    }
    (x, w)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Adaptive Gauss–Kronrod (7, 15) quadrature on a finite interval.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut stack: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = gk15(&mut f, a, b);
    stack.push((a, b, v, e));
    let mut total = v;
    let mut err = e;
    let mut iters = 0;
    // roundoff floor: GK error estimates cannot go below a few ulps
    while err > abs_tol.max(rel_tol * total.abs()).max(64.0 * f64::EPSILON * total.abs()) {
        iters += 1;
        if iters > 5000 {
            return Err(GeomError::Integration("adaptive quadrature did not converge".into()));
        }
        // split the interval with the largest error estimate
        let (idx, _) = stack
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, s)| if s.3 > best.1 { (i, s.3) } else { best });
        let (l, r, v0, e0) = stack.swap_remove(idx);
        let m = 0.5 * (l + r);
        let (v1, e1) = gk15(&mut f, l, m);
        let (v2, e2) = gk15(&mut f, m, r);
        total += v1 + v2 - v0;
        err += e1 + e2 - e0;
        stack.push((l, m, v1, e1));
        stack.push((m, r, v2, e2));
        if (r - l).abs() < 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if iters % 64 == 0 {
            err = stack.iter().map(|s| s.3).sum();
        }
    }
    Ok(total)
}

/// Volume of the unit sphere `S^{d−1} ⊂ ℝ^d`.
pub fn unit_sphere_volume(d: usize) -> f64 {
    // |S^{d-1}| = 2 π^{d/2} / Γ(d/2)
    let mut v = if d % 2 == 0 { 2.0 } else { 2.0 * PI.sqrt() };
    // Γ(d/2) by recursion from Γ(1) or Γ(1/2)
    let mut g = if d % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if d % 2 == 0 { 1.0 } else { 0.5 };
    while x + 1e-9 < d as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    v *= PI.powi((d / 2) as i32);
    v / g
}

/// Product rule on the unit sphere `S^{2m−1} ⊂ ℂ^m`.
///
/// Points are written `w_k = ρ_k e^{iφ_k}` with `ρ` on the positive orthant
/// of `S^{m−1}` in hyperspherical angles (Gauss–Legendre on `[0, π/2]`) and
/// the torus angles `φ_k` sampled with the periodic trapezoid rule.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub m: usize,
    pub polar_nodes: usize,
    pub torus_nodes: usize,
    /// Unit vectors in real coordinates `(x₁, y₁, …)`.
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(m: usize, polar_nodes: usize, torus_nodes: usize) -> Self {
        assert!(m >= 1 && polar_nodes >= 1 && torus_nodes >= 1);
        let (gx, gw) = gauss_legendre(polar_nodes, 0.0, PI / 2.0);
        // moduli on the orthant with their S^{m-1} weights
        let mut moduli: Vec<(Vec<f64>, f64)> = Vec::new();
        let n_ang = m - 1;
        let total = polar_nodes.pow(n_ang as u32);
        for idx in 0..total {
            let mut rem = idx;
            let mut rho = alloc::vec![0.0; m];
            let mut w = 1.0;
            let mut sin_prod = 1.0;
            for j in 0..n_ang {
                let q = rem % polar_nodes;
                rem /= polar_nodes;
                let th = gx[q];
                rho[j] = sin_prod * th.cos();
                w *= gw[q] * th.sin().powi((n_ang - 1 - j) as i32);
                sin_prod *= th.sin();
            }
            rho[m - 1] = sin_prod;
            let jac: f64 = rho.iter().product();
            moduli.push((rho, w * jac));
        }
        let dphi = 2.0 * PI / torus_nodes as f64;
        let n_torus = torus_nodes.pow(m as u32);
        let mut points = Vec::with_capacity(moduli.len() * n_torus);
        let mut weights = Vec::with_capacity(moduli.len() * n_torus);
        let tw = dphi.powi(m as i32);
        for (rho, w) in &moduli {
            for idx in 0..n_torus {
                let mut rem = idx;
                let mut p = alloc::vec![0.0; 2 * m];
                for k in 0..m {
                    let q = rem % torus_nodes;
                    rem /= torus_nodes;
                    let phi = q as f64 * dphi;
                    p[2 * k] = rho[k] * phi.cos();
                    p[2 * k + 1] = rho[k] * phi.sin();
                }
                points.push(p);
                weights.push(w * tw);
            }
        }
        Self { m, polar_nodes, torus_nodes, points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}
