//! Dense linear algebra helpers shared by every module.
//!
//! Real coordinates on `ℂ^k` are ordered `(x₁, y₁, x₂, y₂, …)` with
//! `w_j = x_j + i y_j`. Two-forms are stored as antisymmetric matrices of
//! their values on coordinate vectors, one-forms as coordinate covectors.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Float;

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// The standard complex structure on `ℝ^{2k}`: `J ∂x = ∂y`, `J ∂y = −∂x`.
pub fn complex_structure(n: usize) -> Mat {
    assert!(n % 2 == 0, "complex structure needs an even dimension");
    let mut j = Mat::zeros(n, n);
    for k in 0..n / 2 {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

/// `(a ∧ b)(X, Y) = a(X) b(Y) − a(Y) b(X)`.
pub fn wedge(a: &Vector, b: &Vector) -> Mat {
    let n = a.len();
    Mat::from_fn(n, n, |i, j| a[i] * b[j] - a[j] * b[i])
}

/// Action of `J` on a covector, `(Jα)(X) = −α(JX)`.
pub fn j_covector(j: &Mat, alpha: &Vector) -> Vector {
    -(j.transpose() * alpha)
}

/// Pairing of two 2-forms with `|e¹∧e²|² = 1` for an orthonormal coframe.
pub fn form2_inner(a: &Mat, b: &Mat, ginv: &Mat) -> f64 {
    0.5 * ((a.transpose() * ginv * b) * ginv).trace()
}

pub fn covector_inner(a: &Vector, b: &Vector, ginv: &Mat) -> f64 {
    (a.transpose() * ginv * b)[(0, 0)]
}

/// Contraction `ι_X ξ = ξ(X, ·)`.
pub fn interior(x: &Vector, xi: &Mat) -> Vector {
    xi.transpose() * x
}

/// Antisymmetric part.
pub fn antisym(a: &Mat) -> Mat {
    (a - a.transpose()) * 0.5
}

pub fn sym(a: &Mat) -> Mat {
    (a + a.transpose()) * 0.5
}

/// Orthonormal (for the Euclidean 2-form pairing) basis of `J`-invariant
/// 2-forms on `ℝ^{2k}`: `dy_j∧dx_j`, then for `j < l` the real and imaginary
/// parts of `dz_j ∧ dz̄_l`, normalized. The dimension is `k²`.
pub fn j_invariant_basis(n: usize) -> Vec<Mat> {
    let k = n / 2;
    let mut out = Vec::with_capacity(k * k);
    let dx = |j: usize| Vector::from_fn(n, |i, _| if i == 2 * j { 1.0 } else { 0.0 });
    let dy = |j: usize| Vector::from_fn(n, |i, _| if i == 2 * j + 1 { 1.0 } else { 0.0 });
    for j in 0..k {
        out.push(wedge(&dy(j), &dx(j)));
    }
    let r = core::f64::consts::FRAC_1_SQRT_2;
    for j in 0..k {
        for l in j + 1..k {
            out.push((wedge(&dx(j), &dx(l)) + wedge(&dy(j), &dy(l))) * r);
            out.push((wedge(&dy(j), &dx(l)) + wedge(&dy(l), &dx(j))) * r);
        }
    }
    out
}

/// Euclidean 2-form pairing used to take coordinates in [`j_invariant_basis`].
pub fn frobenius_half(a: &Mat, b: &Mat) -> f64 {
    0.5 * a.component_mul(b).sum()
}

/// Real `2k × 2k` matrix of the ℂ-linear map with complex matrix `a`.
pub fn complex_to_real(a: &[Complex64], k: usize) -> Mat {
    let mut out = Mat::zeros(2 * k, 2 * k);
    for r in 0..k {
        for c in 0..k {
            let z = a[r * k + c];
            out[(2 * r, 2 * c)] = z.re;
            out[(2 * r, 2 * c + 1)] = -z.im;
            out[(2 * r + 1, 2 * c)] = z.im;
            out[(2 * r + 1, 2 * c + 1)] = z.re;
        }
    }
    out
}

pub fn to_complex(p: &[f64]) -> Vec<Complex64> {
    p.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

pub fn from_complex(z: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * z.len());
    for c in z {
        out.push(c.re);
        out.push(c.im);
    }
    out
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Number of (positive, negative, near-zero) eigenvalues of a symmetric matrix.
pub fn inertia(a: &Mat, zero_tol: f64) -> (usize, usize, usize) {
    let eig = a.clone().symmetric_eigen();
    let mut out = (0, 0, 0);
    for &e in eig.eigenvalues.iter() {
        if e > zero_tol {
            out.0 += 1;
        } else if e < -zero_tol {
            out.1 += 1;
        } else {
            out.2 += 1;
        }
    }
    out
}

/// Frobenius norm of the largest block difference, used in reports.
pub fn max_abs(a: &Mat) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_squares_to_minus_identity() {
        for n in [2, 4, 6, 8] {
            let j = complex_structure(n);
            assert_eq!(&j * &j, -Mat::identity(n, n));
        }
    }

    #[test]
    fn j_invariant_basis_is_orthonormal_and_invariant() {
        for n in [4, 6, 8] {
            let j = complex_structure(n);
            let basis = j_invariant_basis(n);
            assert_eq!(basis.len(), (n / 2) * (n / 2));
            for (a, ba) in basis.iter().enumerate() {
                assert!((j.transpose() * ba * &j - ba).norm() < 1e-15);
                for (b, bb) in basis.iter().enumerate() {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((frobenius_half(ba, bb) - expect).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn complex_multiplication_commutes_with_j() {
        let a = [
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.3),
            Complex64::new(0.0, 1.0),
            Complex64::new(2.0, 0.0),
        ];
        let r = complex_to_real(&a, 2);
        let j = complex_structure(4);
        assert!((&r * &j - &j * &r).norm() < 1e-15);
    }

    #[test]
    fn unit_wedge_has_unit_norm() {
        let e1 = Vector::from_vec(alloc::vec![1.0, 0.0, 0.0, 0.0]);
        let e2 = Vector::from_vec(alloc::vec![0.0, 1.0, 0.0, 0.0]);
        let w = wedge(&e1, &e2);
        assert!((form2_inner(&w, &w, &Mat::identity(4, 4)) - 1.0).abs() < 1e-15);
    }
}
