//! Clifford algebra on `⊕_k Λ^{0,k}`.
//!
//! A spinor is a complex vector over subsets `L ⊂ {0, …, m−1}` (bitmasks),
//! `ε_L` standing for `θ̄_L` of a unitary coframe. With `a_k†` the
//! creation operator and `a_k` its adjoint,
//! `c(e_k) = a_k† − a_k` and `c(Je_k) = i(a_k† + a_k)`.

use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Float;

use crate::linalg::{complex_structure, Mat, Vector};
use crate::{GeomError, Result};

pub type CMat = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct Spinor {
    pub m: usize,
    pub coeffs: Vec<Complex64>,
    /// Norm of the line-bundle factor; `|ψ|² = weight² Σ|coeffs|²`.
    pub weight: f64,
}

impl Spinor {
    pub fn zero(m: usize) -> Self {
        Self { m, coeffs: alloc::vec![ZERO; 1 << m], weight: 1.0 }
    }

    pub fn basis(m: usize, mask: usize) -> Self {
        let mut s = Self::zero(m);
        s.coeffs[mask] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_coeffs(m: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 1 << m {
            return Err(GeomError::InvalidInput("spinor needs 2^m coefficients".into()));
        }
        Ok(Self { m, coeffs, weight: 1.0 })
    }

    /// Fold the weight into the coefficients.
    pub fn normalized_weight(&self) -> Self {
        Self { m: self.m, coeffs: self.coeffs.iter().map(|c| c * self.weight).collect(), weight: 1.0 }
    }

    /// Hermitian product, antilinear in the second slot.
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        let w = self.weight * other.weight;
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum::<Complex64>() * w
    }

    pub fn norm2(&self) -> f64 {
        self.inner(self).re
    }

    pub fn add(&self, o: &Spinor) -> Spinor {
        let a = self.normalized_weight();
        let b = o.normalized_weight();
        Spinor { m: self.m, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(), weight: 1.0 }
    }

    pub fn sub(&self, o: &Spinor) -> Spinor {
        self.add(&o.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Spinor {
        Spinor { m: self.m, coeffs: self.coeffs.iter().map(|c| c * s).collect(), weight: self.weight }
    }

    pub fn apply(&self, a: &CMat) -> Spinor {
        let v = a * nalgebra::DVector::from_column_slice(&self.coeffs);
        Spinor { m: self.m, coeffs: v.as_slice().to_vec(), weight: self.weight }
    }

    /// Lowest and highest grade with a nonzero coefficient.
    pub fn grade_support(&self, tol: f64) -> Option<(usize, usize)> {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let mut out: Option<(usize, usize)> = None;
        for (mask, c) in self.coeffs.iter().enumerate() {
            if c.norm() > tol * scale.max(1e-300) {
                let k = grade(mask);
                out = Some(match out {
                    None => (k, k),
                    Some((lo, hi)) => (lo.min(k), hi.max(k)),
                });
            }
        }
        out
    }

    /// Interleaved real/imaginary parts, weight folded in.
    pub fn to_real_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.coeffs.len());
        for c in &self.coeffs {
            v.push(c.re * self.weight);
            v.push(c.im * self.weight);
        }
        v
    }

    pub fn from_real_vec(m: usize, v: &[f64]) -> Self {
        Self { m, coeffs: v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect(), weight: 1.0 }
    }
}

pub fn grade(mask: usize) -> usize {
    mask.count_ones() as usize
}

/// `a_k†` as a matrix on `2^m` coefficients.
pub fn creation(m: usize, k: usize) -> CMat {
    let d = 1 << m;
    let mut a = CMat::from_element(d, d, ZERO);
    for mask in 0..d {
        if mask & (1 << k) == 0 {
            let sign = if (mask & ((1 << k) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            a[(mask | (1 << k), mask)] = Complex64::new(sign, 0.0);
        }
    }
    a
}

pub fn annihilation(m: usize, k: usize) -> CMat {
    creation(m, k).adjoint()
}

/// Clifford matrices of the frame `(e₁, Je₁, …, e_m, Je_m)`.
pub fn frame_clifford(m: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(2 * m);
    for k in 0..m {
        let ad = creation(m, k);
        let a = annihilation(m, k);
        out.push(&ad - &a);
        out.push((&ad + &a) * I);
    }
    out
}

/// `c(X)` for `X` given by its frame components `(g(X,e₁), g(X,Je₁), …)`.
pub fn clifford_components(cl: &[CMat], x: &[f64]) -> CMat {
    let d = cl[0].nrows();
    let mut out = CMat::from_element(d, d, ZERO);
    for (c, xi) in cl.iter().zip(x) {
        if *xi != 0.0 {
            out += c * Complex64::new(*xi, 0.0);
        }
    }
    out
}

/// An orthonormal frame of the form `(e₁, Je₁, …)` at a point.
#[derive(Debug, Clone)]
pub struct UnitaryFrame {
    /// Columns are `e₁, Je₁, e₂, Je₂, …` in coordinates.
    pub f: Mat,
    pub g: Mat,
}

impl UnitaryFrame {
    /// Complex Gram–Schmidt of the coordinate vectors `∂x_k`.
    pub fn gram_schmidt(g: &Mat) -> Result<Self> {
        let n = g.nrows();
        let m = n / 2;
        let j = complex_structure(n);
        let ip = |a: &Vector, b: &Vector| a.dot(&(g * b));
        let mut cols: Vec<Vector> = Vec::with_capacity(n);
        for k in 0..m {
            let mut v = Vector::from_fn(n, |i, _| if i == 2 * k { 1.0 } else { 0.0 });
            for c in &cols {
                let p = ip(&v, c);
                v -= c * p;
            }
            let nv = ip(&v, &v).sqrt();
            if !(nv > 1e-14) {
                return Err(GeomError::SingularMetric);
            }
            v /= nv;
            let jv = &j * &v;
            cols.push(v);
            cols.push(jv);
        }
        Ok(Self { f: Mat::from_columns(&cols), g: g.clone() })
    }

    /// Frame components `g(X, f_i)`.
    pub fn components(&self, x: &Vector) -> Vec<f64> {
        (self.f.transpose() * (&self.g * x)).as_slice().to_vec()
    }

    pub fn gram_defect(&self) -> f64 {
        let n = self.f.ncols();
        (self.f.transpose() * &self.g * &self.f - Mat::identity(n, n)).amax()
    }
}

pub fn clifford(x: &Vector, frame: &UnitaryFrame, psi: &Spinor) -> Spinor {
    let cl = frame_clifford(psi.m);
    psi.apply(&clifford_components(&cl, &frame.components(x)))
}

/// `Ω·ψ` from grades: `i(m − 2k)` on `Σ_k`.
pub fn omega_action(psi: &Spinor) -> Spinor {
    let m = psi.m as f64;
    let coeffs = psi.coeffs.iter().enumerate().map(|(mask, c)| c * Complex64::new(0.0, m - 2.0 * grade(mask) as f64)).collect();
    Spinor { m: psi.m, coeffs, weight: psi.weight }
}

/// `Σ_k c(Je_k) c(e_k) ψ`.
pub fn omega_action_clifford(psi: &Spinor) -> Spinor {
    let cl = frame_clifford(psi.m);
    let d = 1 << psi.m;
    let mut a = CMat::from_element(d, d, ZERO);
    for k in 0..psi.m {
        a += &cl[2 * k + 1] * &cl[2 * k];
    }
    psi.apply(&a)
}

/// Component in `Σ_k`.
pub fn projector_k(psi: &Spinor, k: usize) -> Spinor {
    let coeffs = psi.coeffs.iter().enumerate().map(|(mask, c)| if grade(mask) == k { *c } else { ZERO }).collect();
    Spinor { m: psi.m, coeffs, weight: psi.weight }
}

/// `ψ_{l−1} − ψ_l` for `ψ` supported in grades `l−1, l`.
pub fn tilde(psi: &Spinor, l: usize) -> Result<Spinor> {
    if l == 0 {
        return Err(GeomError::InvalidInput("tilde needs l ≥ 1".into()));
    }
    let scale = psi.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let mut coeffs = psi.coeffs.clone();
    for (mask, c) in coeffs.iter_mut().enumerate() {
        let k = grade(mask);
        if k == l {
            *c = -*c;
        } else if k != l - 1 && c.norm() > 1e-14 * scale.max(1e-300) {
            return Err(GeomError::InvalidInput("spinor has components outside grades l−1, l".into()));
        }
    }
    Ok(Spinor { m: psi.m, coeffs, weight: psi.weight })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(m: usize, seed: f64) -> Spinor {
        let coeffs = (0..1 << m).map(|i| Complex64::new((seed + i as f64).sin(), (2.0 * seed - i as f64).cos())).collect();
        Spinor::from_coeffs(m, coeffs).unwrap()
    }

    #[test]
    fn clifford_relations() {
        for m in 1..=4 {
            let cl = frame_clifford(m);
            let d = 1 << m;
            for (a, ca) in cl.iter().enumerate() {
                for (b, cb) in cl.iter().enumerate() {
                    let ac = ca * cb + cb * ca;
                    let expect = if a == b { -2.0 } else { 0.0 };
                    let id = CMat::identity(d, d) * Complex64::new(expect, 0.0);
                    assert!((ac - id).iter().all(|z| z.norm() < 1e-15));
                }
                // skew-adjoint
                assert!((ca.adjoint() + ca).iter().all(|z| z.norm() < 1e-15));
            }
        }
    }

    #[test]
    fn grades_and_omega() {
        let psi = sample(3, 0.3);
        let a = omega_action(&psi);
        let b = omega_action_clifford(&psi);
        assert!(a.sub(&b).norm2() < 1e-24);
        let mut total = Spinor::zero(3);
        for k in 0..=3 {
            total = total.add(&projector_k(&psi, k));
        }
        assert!(total.sub(&psi).norm2() < 1e-28);
    }

    #[test]
    fn creation_raises_grade() {
        let m = 3;
        let cl = frame_clifford(m);
        // c(X^{1,0}) for X = e_1 is ½(c(e) − i c(Je))
        let x10 = (&cl[0] - &cl[1] * I) * Complex64::new(0.5, 0.0);
        let psi = projector_k(&sample(m, 1.1), 1);
        let out = psi.apply(&x10);
        assert!(out.sub(&projector_k(&out, 2)).norm2() < 1e-28);
    }

    #[test]
    fn tilde_is_an_involution() {
        let psi = projector_k(&sample(3, 0.2), 1).add(&projector_k(&sample(3, 0.7), 2));
        let t = tilde(&psi, 2).unwrap();
        assert!(tilde(&t, 2).unwrap().sub(&psi).norm2() < 1e-28);
        assert!(tilde(&sample(3, 0.1), 2).is_err());
    }

    #[test]
    fn unitary_frame_is_orthonormal() {
        let g = Mat::from_fn(4, 4, |i, j| if i == j { 2.0 } else { 0.0 }) + crate::model::hermitian_radial(&[0.3, 0.1, -0.2, 0.4], 0.0, 0.7);
        let f = UnitaryFrame::gram_schmidt(&g).unwrap();
        assert!(f.gram_defect() < 1e-12);
    }
}
