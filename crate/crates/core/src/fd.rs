//! Centered finite-difference stencils.

use alloc::vec::Vec;

use crate::Result;

/// Stencil order for first derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// `(f(h) − f(−h)) / 2h`
    Second,
    /// five-point `(−f(2h) + 8f(h) − 8f(−h) + f(−2h)) / 12h`
    Fourth,
}

fn shifted(p: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
    p.iter().zip(dir).map(|(a, b)| a + t * b).collect()
}

/// Directional derivative of a vector-valued function `f` at `p` along `dir`.
pub fn directional<F>(f: &mut F, p: &[f64], dir: &[f64], h: f64, stencil: Stencil) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    match stencil {
        Stencil::Second => {
            let fp = f(&shifted(p, dir, h))?;
            let fm = f(&shifted(p, dir, -h))?;
            Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        }
        Stencil::Fourth => {
            let f2 = f(&shifted(p, dir, 2.0 * h))?;
            let f1 = f(&shifted(p, dir, h))?;
            let m1 = f(&shifted(p, dir, -h))?;
            let m2 = f(&shifted(p, dir, -2.0 * h))?;
            Ok((0..f1.len())
                .map(|i| (-f2[i] + 8.0 * f1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h))
                .collect())
        }
    }
}

/// All coordinate partial derivatives, `out[k] = ∂_k f`.
pub fn gradient<F>(f: &mut F, p: &[f64], h: f64, stencil: Stencil) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = p.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut e = alloc::vec![0.0; n];
        e[k] = 1.0;
        out.push(directional(f, p, &e, h, stencil)?);
    }
    Ok(out)
}

/// Scalar convenience wrapper.
pub fn scalar_gradient<F>(f: &mut F, p: &[f64], h: f64, stencil: Stencil) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut g = |q: &[f64]| f(q).map(|v| alloc::vec![v]);
    Ok(gradient(&mut g, p, h, stencil)?.into_iter().map(|v| v[0]).collect())
}
