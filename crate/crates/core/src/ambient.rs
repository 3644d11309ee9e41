//! The ambient picture: `ℝ^{2m,2} = ℂ^{m,1}`, the anti-de Sitter lift of the
//! ball, the maps `θ_z` between `E` and `Λ²_J ℝ^{2m,2}`, and the `U(m,1)`
//! action.
//!
//! Ambient coordinates are `(x₁, y₁, …, x_{m+1}, y_{m+1})` with Gram matrix
//! `diag(1, …, 1, −1, −1)`.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use crate::connection::SectionE;
use crate::linalg::{complex_structure, complex_to_real, form2_inner, j_covector, j_invariant_basis, wedge, Mat, Vector};
use crate::model::BallPoint;
use crate::{GeomError, Result};

/// Signature Gram matrix of `ℝ^{2m,2}`.
pub fn ambient_gram(m: usize) -> Mat {
    let n = 2 * m + 2;
    Mat::from_fn(n, n, |i, j| if i != j { 0.0 } else if i < 2 * m { 1.0 } else { -1.0 })
}

/// `D_k = dy_k ∧ dx_k` on `ℝ^{2m,2}` (`k` is 0-based, `k = m` is the last plane).
pub fn d_form(m: usize, k: usize) -> Mat {
    let n = 2 * m + 2;
    let mut b = Mat::zeros(n, n);
    b[(2 * k + 1, 2 * k)] = 1.0;
    b[(2 * k, 2 * k + 1)] = -1.0;
    b
}

/// A `J`-invariant 2-form on `ℝ^{2m,2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientForm {
    pub b: Mat,
}

impl AmbientForm {
    pub fn new(b: Mat) -> Result<Self> {
        let n = b.nrows();
        if n < 4 || n % 2 != 0 || b.ncols() != n {
            return Err(GeomError::InvalidInput("ambient form must be (2m+2)×(2m+2)".into()));
        }
        let j = complex_structure(n);
        let scale = 1.0 + b.amax();
        if (&b + b.transpose()).amax() > 1e-12 * scale || (j.transpose() * &b * &j - &b).amax() > 1e-12 * scale {
            return Err(GeomError::InvalidInput("ambient form is not antisymmetric and J-invariant".into()));
        }
        Ok(Self { b })
    }

    pub fn m(&self) -> usize {
        self.b.nrows() / 2 - 1
    }

    /// Signature pairing `⟨B, B'⟩`.
    pub fn pair(&self, other: &AmbientForm) -> f64 {
        let g = ambient_gram(self.m());
        form2_inner(&self.b, &other.b, &g)
    }

    pub fn is_primitive(&self, tol: f64) -> bool {
        self.pair(&omega(self.m())).abs() <= tol
    }

    /// Coordinates in the orthonormal basis [`ambient_basis`].
    pub fn coords(&self) -> Vec<f64> {
        ambient_basis(self.m()).iter().map(|e| crate::linalg::frobenius_half(e, &self.b)).collect()
    }

    pub fn from_coords(m: usize, c: &[f64]) -> Self {
        let mut b = Mat::zeros(2 * m + 2, 2 * m + 2);
        for (e, x) in ambient_basis(m).iter().zip(c) {
            b += e * *x;
        }
        Self { b }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { b: &self.b * s }
    }

    pub fn add(&self, o: &AmbientForm) -> Self {
        Self { b: &self.b + &o.b }
    }
}

/// Basis of `Λ²_J ℝ^{2m,2}`, of dimension `(m+1)²`.
pub fn ambient_basis(m: usize) -> Vec<Mat> {
    j_invariant_basis(2 * m + 2)
}

/// The ambient Kähler form `ω = Σ_{k≤m} D_k − D_{m+1}`.
pub fn omega(m: usize) -> AmbientForm {
    let mut b = Mat::zeros(2 * m + 2, 2 * m + 2);
    for k in 0..m {
        b += d_form(m, k);
    }
    b -= d_form(m, m);
    AmbientForm { b }
}

/// `Σ_k ε_k D_k` for signs (or weights) `ε` of length `m + 1`.
pub fn diagonal_form(eps: &[f64]) -> AmbientForm {
    let m = eps.len() - 1;
    let mut b = Mat::zeros(2 * m + 2, 2 * m + 2);
    for (k, e) in eps.iter().enumerate() {
        b += d_form(m, k) * *e;
    }
    AmbientForm { b }
}

/// Lift of a ball point to `⟨z, z⟩ = −1` in the gauge `z = (w, 1)/√(1−|w|²)`.
#[derive(Debug, Clone)]
pub struct AdSLift {
    pub z: Vector,
    /// `ν♭ = ⟨z, ·⟩`.
    pub nu: Vector,
    /// `(Jν)♭ = ⟨Jz, ·⟩`.
    pub jnu: Vector,
}

impl AdSLift {
    pub fn of(p: &[f64]) -> Result<Self> {
        let s2: f64 = p.iter().map(|x| x * x).sum();
        if !(s2 < 1.0) {
            return Err(GeomError::Domain(format!("|w|² = {s2} is not inside the ball")));
        }
        let m = p.len() / 2;
        let lam = 1.0 / (1.0 - s2).sqrt();
        let mut z = Vector::zeros(2 * m + 2);
        for i in 0..2 * m {
            z[i] = lam * p[i];
        }
        z[2 * m] = lam;
        let g = ambient_gram(m);
        let j = complex_structure(2 * m + 2);
        let nu = &g * &z;
        let jnu = &g * (&j * &z);
        Ok(Self { z, nu, jnu })
    }

    pub fn norm2(&self) -> f64 {
        self.z.dot(&self.nu)
    }
}

/// Real Jacobian of the projection `π(z) = z'/z_{m+1}` at `z`.
fn dpi(z: &Vector) -> Mat {
    let m = z.len() / 2 - 1;
    let zc: Vec<Complex64> = (0..=m).map(|k| Complex64::new(z[2 * k], z[2 * k + 1])).collect();
    let zl = zc[m];
    let mut out = Mat::zeros(2 * m, 2 * m + 2);
    for k in 0..m {
        for c in 0..=m {
            let coef = if c == m { -zc[k] / (zl * zl) } else if c == k { Complex64::new(1.0, 0.0) / zl } else { Complex64::new(0.0, 0.0) };
            out[(2 * k, 2 * c)] = coef.re;
            out[(2 * k, 2 * c + 1)] = -coef.im;
            out[(2 * k + 1, 2 * c)] = coef.im;
            out[(2 * k + 1, 2 * c + 1)] = coef.re;
        }
    }
    out
}

/// Linear maps relating `T_w B` and the horizontal space at `z`.
#[derive(Debug, Clone)]
pub struct LiftFrame {
    pub lift: AdSLift,
    /// `P = dπ ∘ (horizontal projection)`, `2m × (2m+2)`.
    pub p: Mat,
    /// Horizontal lift, `(2m+2) × 2m`, with `P L = I`.
    pub l: Mat,
}

impl LiftFrame {
    pub fn at(w: &[f64]) -> Result<Self> {
        let lift = AdSLift::of(w)?;
        let m = w.len() / 2;
        let n = 2 * m + 2;
        let j = complex_structure(n);
        let jz = &j * &lift.z;
        // V ↦ V + ⟨V,ν⟩ν + ⟨V,Jν⟩Jν
        let proj = Mat::identity(n, n) + &lift.z * lift.nu.transpose() + &jz * lift.jnu.transpose();
        let p = dpi(&lift.z) * &proj;
        // Jacobian of the gauge w ↦ z(w)
        let s2: f64 = w.iter().map(|x| x * x).sum();
        let lam = 1.0 / (1.0 - s2).sqrt();
        let mut dz = Mat::zeros(n, 2 * m);
        for i in 0..2 * m {
            dz[(i, i)] += lam;
        }
        let lam3 = lam * lam * lam;
        for c in 0..2 * m {
            for r in 0..n {
                dz[(r, c)] += lift.z[r] / lam * lam3 * w[c];
            }
        }
        let l = proj * dz;
        Ok(Self { lift, p, l })
    }
}

/// `θ_z(ξ, α, u) = P*ξ + u (Jν)♭∧ν♭ + ½(ν♭∧P*α + (Jν)♭∧J P*α)`.
pub fn theta_z(p: &BallPoint, sigma: &SectionE) -> Result<AmbientForm> {
    let f = LiftFrame::at(p.coords())?;
    let n = f.p.ncols();
    let j = complex_structure(n);
    let pa = f.p.transpose() * &sigma.alpha;
    let b = f.p.transpose() * &sigma.xi * &f.p
        + wedge(&f.lift.jnu, &f.lift.nu) * sigma.u
        + (wedge(&f.lift.nu, &pa) + wedge(&f.lift.jnu, &j_covector(&j, &pa))) * 0.5;
    Ok(AmbientForm { b })
}

/// Inverse of [`theta_z`]: `u = B(Jz, z)`, `ξ = L*B`, `α = −2 B(z, L·)`.
pub fn theta_z_inv_at(w: &[f64], b: &AmbientForm) -> Result<SectionE> {
    let f = LiftFrame::at(w)?;
    let n = b.b.nrows();
    let j = complex_structure(n);
    let z = &f.lift.z;
    let u = (&j * z).dot(&(&b.b * z));
    let xi = f.l.transpose() * &b.b * &f.l;
    let alpha = (f.l.transpose() * (b.b.transpose() * z)) * -2.0;
    Ok(SectionE { xi, alpha, u })
}

pub fn theta_z_inv(p: &BallPoint, b: &AmbientForm) -> Result<SectionE> {
    theta_z_inv_at(p.coords(), b)
}

/// The scalar field `u_B(w) = B(Jz, z)`.
pub fn u_of_beta(b: &AmbientForm, w: &[f64]) -> Result<f64> {
    let lift = AdSLift::of(w)?;
    let j = complex_structure(b.b.nrows());
    Ok((&j * &lift.z).dot(&(&b.b * &lift.z)))
}

/// `w ↦ u_B(w)` as a closure.
pub fn u_field_of_beta(b: &AmbientForm) -> impl Fn(&[f64]) -> Result<f64> + Sync + '_ {
    move |w| u_of_beta(b, w)
}

/// An element of `U(m,1)` as a complex `(m+1)×(m+1)` row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoUnitary {
    pub m: usize,
    pub u: Vec<Complex64>,
}

impl PseudoUnitary {
    pub fn identity(m: usize) -> Self {
        let k = m + 1;
        Self { m, u: (0..k * k).map(|i| if i % (k + 1) == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).collect() }
    }

    /// Boost of rapidity `t` in the `(z_{k}, z_{m+1})` plane.
    pub fn boost(m: usize, k: usize, t: f64) -> Self {
        let mut s = Self::identity(m);
        let n = m + 1;
        let (c, sh) = (t.cosh(), t.sinh());
        s.u[k * n + k] = Complex64::new(c, 0.0);
        s.u[m * n + m] = Complex64::new(c, 0.0);
        s.u[k * n + m] = Complex64::new(sh, 0.0);
        s.u[m * n + k] = Complex64::new(sh, 0.0);
        s
    }

    /// `diag(e^{iθ_0}, …, e^{iθ_m})`.
    pub fn phases(theta: &[f64]) -> Self {
        let m = theta.len() - 1;
        let mut s = Self::identity(m);
        for (k, th) in theta.iter().enumerate() {
            s.u[k * (m + 1) + k] = Complex64::from_polar(1.0, *th);
        }
        s
    }

    pub fn compose(&self, other: &Self) -> Self {
        let n = self.m + 1;
        let mut u = alloc::vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                u[i * n + j] = (0..n).map(|k| self.u[i * n + k] * other.u[k * n + j]).sum();
            }
        }
        Self { m: self.m, u }
    }

    pub fn real(&self) -> Mat {
        complex_to_real(&self.u, self.m + 1)
    }

    /// `‖Rᵀ G R − G‖_max`.
    pub fn isometry_defect(&self) -> f64 {
        let r = self.real();
        let g = ambient_gram(self.m);
        (r.transpose() * &g * &r - g).amax()
    }

    /// The induced ball automorphism `w ↦ π(U z(w))`.
    pub fn ball_map(&self, w: &[f64]) -> Result<Vec<f64>> {
        let lift = AdSLift::of(w)?;
        let y = self.real() * &lift.z;
        let m = self.m;
        let last = Complex64::new(y[2 * m], y[2 * m + 1]);
        let mut out = Vec::with_capacity(2 * m);
        for k in 0..m {
            let q = Complex64::new(y[2 * k], y[2 * k + 1]) / last;
            out.push(q.re);
            out.push(q.im);
        }
        Ok(out)
    }
}

/// Real Jacobian of the ball automorphism induced by `U`.
pub fn ball_map_jacobian(u: &PseudoUnitary, w: &[f64]) -> Result<Mat> {
    let m = u.m;
    let n = m + 1;
    if w.len() != 2 * m {
        return Err(GeomError::InvalidInput("point dimension mismatch".into()));
    }
    let mut hat: Vec<Complex64> = w.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    hat.push(Complex64::new(1.0, 0.0));
    let row = |j: usize| (0..n).map(|k| u.u[j * n + k] * hat[k]).sum::<Complex64>();
    let d = row(m);
    let mut jac = Mat::zeros(2 * m, 2 * m);
    for j in 0..m {
        let nj = row(j);
        for k in 0..m {
            let c = (u.u[j * n + k] * d - nj * u.u[m * n + k]) / (d * d);
            jac[(2 * j, 2 * k)] = c.re;
            jac[(2 * j, 2 * k + 1)] = -c.im;
            jac[(2 * j + 1, 2 * k)] = c.im;
            jac[(2 * j + 1, 2 * k + 1)] = c.re;
        }
    }
    Ok(jac)
}

/// `f*σ = (Dfᵀ ξ Df, Dfᵀ α, u)` for the ball automorphism `f` of `U`,
/// given `σ` at `f(p)`.
pub fn pullback_section(u: &PseudoUnitary, p: &[f64], sigma_at_fp: &SectionE) -> Result<SectionE> {
    let jac = ball_map_jacobian(u, p)?;
    Ok(SectionE {
        xi: jac.transpose() * &sigma_at_fp.xi * &jac,
        alpha: jac.transpose() * &sigma_at_fp.alpha,
        u: sigma_at_fp.u,
    })
}

/// Pullback `U*B = Rᵀ B R`.
pub fn pu_action(u: &PseudoUnitary, b: &AmbientForm) -> Result<AmbientForm> {
    if u.m != b.m() {
        return Err(GeomError::InvalidInput("dimension mismatch".into()));
    }
    let defect = u.isometry_defect();
    if defect > 1e-10 {
        return Err(GeomError::InvalidInput(format!("matrix is not in U(m,1): defect {defect:e}")));
    }
    let r = u.real();
    Ok(AmbientForm { b: r.transpose() * &b.b * r })
}

/// Sorted complement of a 0-based multi-index in `{0, …, m−1}`.
pub fn complement(m: usize, a: &[usize]) -> Vec<usize> {
    (0..m).filter(|k| !a.contains(k)).collect()
}

/// `−Σ_{k∈a} D_k + Σ_{k∉a} D_k + D_{m+1}`: the explicit `β` of a family with
/// negative index set `a`.
pub fn beta_explicit(m: usize, negative: &[usize]) -> AmbientForm {
    let mut eps = alloc::vec![1.0; m + 1];
    for &k in negative {
        eps[k] = -1.0;
    }
    diagonal_form(&eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_is_on_ads() {
        let l = AdSLift::of(&[0.3, -0.2, 0.1, 0.5]).unwrap();
        assert!((l.norm2() + 1.0).abs() < 1e-12);
        let f = LiftFrame::at(&[0.3, -0.2, 0.1, 0.5]).unwrap();
        assert!((&f.p * &f.l - Mat::identity(4, 4)).amax() < 1e-12);
    }

    #[test]
    fn u_term_at_origin() {
        let s = SectionE { xi: Mat::zeros(4, 4), alpha: Vector::zeros(4), u: 1.0 };
        let b = theta_z(&BallPoint::origin(2), &s).unwrap();
        assert!((b.b - d_form(2, 2)).amax() < 1e-15);
    }

    #[test]
    fn omega_has_constant_u() {
        let om = omega(2);
        for w in [[0.0; 4], [0.3, 0.1, -0.5, 0.2]] {
            assert!((u_of_beta(&om, &w).unwrap() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn explicit_pairings() {
        // m = 2: β_∅ pairs to +1 with ω, the breve ones to −1
        let b0 = beta_explicit(2, &[]);
        let b1 = beta_explicit(2, &[0]);
        assert!((b0.pair(&b0) - 3.0).abs() < 1e-14);
        assert!((b0.pair(&omega(2)) - 1.0).abs() < 1e-14);
        assert!((b1.pair(&omega(2)) + 1.0).abs() < 1e-14);
        // m = 3: primitive
        let b = beta_explicit(3, &[1]);
        assert!(b.is_primitive(1e-14));
        assert!((b.pair(&b) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn non_isometry_rejected() {
        let mut u = PseudoUnitary::identity(2);
        u.u[0] = Complex64::new(2.0, 0.0);
        assert!(pu_action(&u, &omega(2)).is_err());
    }
}
