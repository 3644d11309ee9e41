//! Model metrics in the ball chart and finite-difference tensor calculus.
//!
//! Curvature convention: `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]}` and
//! `K(X,Y) = g(R(X,Y)Y, X) / (|X|²|Y|² − g(X,Y)²)`.

use alloc::format;
use alloc::vec::Vec;
use num_traits::Float;

use crate::fd::{self, Stencil};
use crate::linalg::{complex_structure, norm, Mat, Vector};
use crate::ode::{self, OdeOptions};
use crate::{GeomError, Result};

/// Default distance to the unit sphere below which ball points are rejected.
pub const EPS_BOUNDARY: f64 = 1e-9;
/// Default finite-difference step before boundary scaling.
pub const H_FD: f64 = 1e-4;

/// A point of the open unit ball in `ℂ^m`, in real coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    w: Vec<f64>,
}

impl BallPoint {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        Self::with_eps(w, EPS_BOUNDARY)
    }

    pub fn with_eps(w: Vec<f64>, eps: f64) -> Result<Self> {
        if w.is_empty() || w.len() % 2 != 0 {
            return Err(GeomError::InvalidInput(format!("ball point needs 2m coordinates, got {}", w.len())));
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::InvalidInput("non-finite coordinate".into()));
        }
        let s = norm(&w);
        if s >= 1.0 - eps {
            return Err(GeomError::Domain(format!("|w| = {s} is within {eps} of the boundary")));
        }
        Ok(Self { w })
    }

    pub fn origin(m: usize) -> Self {
        Self { w: alloc::vec![0.0; 2 * m] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.w
    }

    pub fn m(&self) -> usize {
        self.w.len() / 2
    }

    pub fn radius(&self) -> f64 {
        norm(&self.w)
    }
}

/// Metric coefficients at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub g: Mat,
}

impl MetricValue {
    pub fn is_positive_definite(&self) -> bool {
        self.g.clone().cholesky().is_some()
    }

    pub fn symmetry_defect(&self) -> f64 {
        (&self.g - self.g.transpose()).amax()
    }

    /// `‖Jᵀ G J − G‖_max`.
    pub fn kahler_defect(&self) -> f64 {
        let j = complex_structure(self.g.nrows());
        (j.transpose() * &self.g * &j - &self.g).amax()
    }
}

/// A Riemannian metric sampled in a single chart.
pub trait MetricField: Sync {
    fn dim(&self) -> usize;

    fn metric(&self, p: &[f64]) -> Result<Mat>;

    /// Radius of the chart ball, `None` for all of `ℝ^n`.
    fn chart_radius(&self) -> Option<f64> {
        Some(1.0)
    }

    /// Finite-difference step at `p`.
    fn fd_step(&self, p: &[f64]) -> f64 {
        match self.chart_radius() {
            Some(r) => H_FD * (1.0 - norm(p) / r).clamp(1e-3, 1.0),
            None => H_FD,
        }
    }
}

impl<T: MetricField + ?Sized> MetricField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn metric(&self, p: &[f64]) -> Result<Mat> {
        (**self).metric(p)
    }
    fn chart_radius(&self) -> Option<f64> {
        (**self).chart_radius()
    }
    fn fd_step(&self, p: &[f64]) -> f64 {
        (**self).fd_step(p)
    }
}

fn check_ball(p: &[f64], radius: f64) -> Result<f64> {
    let s = norm(p);
    if !(s < radius * (1.0 - EPS_BOUNDARY)) {
        return Err(GeomError::Domain(format!("|p| = {s} outside the chart")));
    }
    Ok(s)
}

/// `a·I + D·(w wᵀ + Jw (Jw)ᵀ)`: the general U(m)-invariant Hermitian form.
pub fn hermitian_radial(p: &[f64], a: f64, d: f64) -> Mat {
    let n = p.len();
    let w = Vector::from_column_slice(p);
    let j = complex_structure(n);
    let jw = &j * &w;
    Mat::identity(n, n) * a + (&w * w.transpose() + &jw * jw.transpose()) * d
}

/// Flat metric on `ℝ^n`.
#[derive(Debug, Clone, Copy)]
pub struct Euclidean {
    pub n: usize,
}

impl MetricField for Euclidean {
    fn dim(&self) -> usize {
        self.n
    }
    fn metric(&self, _p: &[f64]) -> Result<Mat> {
        Ok(Mat::identity(self.n, self.n))
    }
    fn chart_radius(&self) -> Option<f64> {
        None
    }
}

/// Complex hyperbolic space in the ball, holomorphic sectional curvature −4.
#[derive(Debug, Clone, Copy)]
pub struct ComplexHyperbolic {
    pub m: usize,
}

impl MetricField for ComplexHyperbolic {
    fn dim(&self) -> usize {
        2 * self.m
    }
    fn metric(&self, p: &[f64]) -> Result<Mat> {
        let s = check_ball(p, 1.0)?;
        let q = 1.0 / ((1.0 - s) * (1.0 + s));
        Ok(hermitian_radial(p, q, q * q))
    }
}

/// `g₀` at a ball point.
pub fn metric_ch(p: &BallPoint) -> Result<MetricValue> {
    ComplexHyperbolic { m: p.m() }.metric(p.coords()).map(|g| MetricValue { g })
}

/// Fubini–Study metric in an affine chart, holomorphic sectional curvature +4.
#[derive(Debug, Clone, Copy)]
pub struct FubiniStudy {
    pub m: usize,
}

impl MetricField for FubiniStudy {
    fn dim(&self) -> usize {
        2 * self.m
    }
    fn metric(&self, p: &[f64]) -> Result<Mat> {
        let s2: f64 = p.iter().map(|x| x * x).sum();
        let q = 1.0 / (1.0 + s2);
        Ok(hermitian_radial(p, q, -q * q))
    }
    fn chart_radius(&self) -> Option<f64> {
        None
    }
}

/// Real hyperbolic space in the Poincaré ball, `4δ/(1−|x|²)²`.
#[derive(Debug, Clone, Copy)]
pub struct RealHyperbolic {
    pub n: usize,
}

impl MetricField for RealHyperbolic {
    fn dim(&self) -> usize {
        self.n
    }
    fn metric(&self, p: &[f64]) -> Result<Mat> {
        let s = check_ball(p, 1.0)?;
        let c = 2.0 / ((1.0 - s) * (1.0 + s));
        Ok(Mat::identity(self.n, self.n) * (c * c))
    }
}

/// Christoffel symbols, `gamma[k][(i, j)] = Γ^k_{ij}`.
pub type Christoffel = Vec<Mat>;

/// Coordinate derivatives of the metric, `dg[l] = ∂_l G`.
pub fn metric_derivatives<F: MetricField + ?Sized>(field: &F, p: &[f64], h: f64) -> Result<Vec<Mat>> {
    let n = field.dim();
    let mut f = |q: &[f64]| field.metric(q).map(|g| g.as_slice().to_vec());
    let grads = fd::gradient(&mut f, p, h, Stencil::Fourth)?;
    Ok(grads.into_iter().map(|v| Mat::from_vec(n, n, v)).collect())
}

fn christoffel_from(ginv: &Mat, dg: &[Mat]) -> Christoffel {
    let n = ginv.nrows();
    // lowered symbols Γ_{l,ij} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let mut low = alloc::vec![Mat::zeros(n, n); n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                low[l][(i, j)] = 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
            }
        }
    }
    let mut out = alloc::vec![Mat::zeros(n, n); n];
    for k in 0..n {
        for l in 0..n {
            let c = ginv[(k, l)];
            if c != 0.0 {
                out[k] += &low[l] * c;
            }
        }
    }
    out
}

/// Γ^k_{ij} at `p` with step `h`.
pub fn christoffel_with_step<F: MetricField + ?Sized>(field: &F, p: &[f64], h: f64) -> Result<Christoffel> {
    let g = field.metric(p)?;
    let ginv = g.try_inverse().ok_or(GeomError::SingularMetric)?;
    let dg = metric_derivatives(field, p, h)?;
    Ok(christoffel_from(&ginv, &dg))
}

/// Γ^k_{ij} at `p` with the field's default step.
pub fn christoffel<F: MetricField + ?Sized>(field: &F, p: &[f64]) -> Result<Christoffel> {
    christoffel_with_step(field, p, field.fd_step(p))
}

/// Covariant derivative `∇_X Y` of a vector field at `p`.
pub fn covariant_vector(gamma: &Christoffel, x: &Vector, y: &Vector, dy_x: &Vector) -> Vector {
    let n = x.len();
    Vector::from_fn(n, |k, _| dy_x[k] + (x.transpose() * &gamma[k] * y)[(0, 0)])
}

/// Full Riemann tensor, `r[l][(i·n + j, k)] = R^l_{ijk}` with
/// `R(∂_i, ∂_j)∂_k = R^l_{ijk} ∂_l`.
#[derive(Debug, Clone)]
pub struct RiemannTensor {
    pub n: usize,
    data: Vec<f64>,
    pub g: Mat,
}

impl RiemannTensor {
    pub fn get(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        let n = self.n;
        self.data[((l * n + i) * n + j) * n + k]
    }

    /// The endomorphism `R(X, Y)` as a matrix acting on vectors.
    pub fn operator(&self, x: &Vector, y: &Vector) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n, n);
        for l in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    if x[i] == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        acc += x[i] * y[j] * self.get(l, i, j, k);
                    }
                }
                out[(l, k)] = acc;
            }
        }
        out
    }

    pub fn ricci(&self) -> Mat {
        let n = self.n;
        Mat::from_fn(n, n, |j, k| (0..n).map(|i| self.get(i, i, j, k)).sum())
    }

    pub fn scalar(&self) -> Result<f64> {
        let ginv = self.g.clone().try_inverse().ok_or(GeomError::SingularMetric)?;
        Ok(ginv.component_mul(&self.ricci()).sum())
    }
}

/// Riemann tensor by differencing Christoffel symbols.
///
/// `h_outer` is the step for the derivative of Γ; each Γ uses the field's
/// default step.
pub fn riemann_tensor_with_step<F: MetricField + ?Sized>(field: &F, p: &[f64], h_outer: f64) -> Result<RiemannTensor> {
    let n = field.dim();
    let g = field.metric(p)?;
    let gam = christoffel(field, p)?;
    let mut f = |q: &[f64]| {
        let c = christoffel(field, q)?;
        let mut v = Vec::with_capacity(n * n * n);
        for m in &c {
            v.extend_from_slice(m.as_slice());
        }
        Ok(v)
    };
    // dgam[i][k*n*n + col-major(a,b)] = ∂_i Γ^k_{ab}
    let dgam = fd::gradient(&mut f, p, h_outer, Stencil::Fourth)?;
    let d = |i: usize, k: usize, a: usize, b: usize| dgam[i][k * n * n + b * n + a];
    let mut data = alloc::vec![0.0; n * n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = d(i, l, j, k) - d(j, l, i, k);
                    for q in 0..n {
                        v += gam[l][(i, q)] * gam[q][(j, k)] - gam[l][(j, q)] * gam[q][(i, k)];
                    }
                    data[((l * n + i) * n + j) * n + k] = v;
                }
            }
        }
    }
    Ok(RiemannTensor { n, data, g })
}

pub fn riemann_tensor<F: MetricField + ?Sized>(field: &F, p: &[f64]) -> Result<RiemannTensor> {
    riemann_tensor_with_step(field, p, 10.0 * field.fd_step(p))
}

/// Curvature on the plane spanned by `X, Y`.
#[derive(Debug, Clone)]
pub struct CurvatureSample {
    pub x: Vector,
    pub y: Vector,
    /// `R(X, Y)` acting on tangent vectors.
    pub r_xy: Mat,
    pub sectional: f64,
    /// `K(X, JX)`.
    pub holomorphic: f64,
}

fn sectional_of(t: &RiemannTensor, x: &Vector, y: &Vector) -> Result<f64> {
    let g = &t.g;
    let gxx = (x.transpose() * g * x)[(0, 0)];
    let gyy = (y.transpose() * g * y)[(0, 0)];
    let gxy = (x.transpose() * g * y)[(0, 0)];
    let area2 = gxx * gyy - gxy * gxy;
    if area2 <= 1e-14 * gxx * gyy {
        return Err(GeomError::DegeneratePlane);
    }
    let r = t.operator(x, y);
    Ok(((r * y).transpose() * g * x)[(0, 0)] / area2)
}

pub fn riemann<F: MetricField + ?Sized>(field: &F, p: &[f64], x: &Vector, y: &Vector) -> Result<CurvatureSample> {
    let t = riemann_tensor(field, p)?;
    curvature_sample(&t, x, y)
}

pub fn curvature_sample(t: &RiemannTensor, x: &Vector, y: &Vector) -> Result<CurvatureSample> {
    let sectional = sectional_of(t, x, y)?;
    let jx = complex_structure(t.n) * x;
    let holomorphic = sectional_of(t, x, &jx)?;
    Ok(CurvatureSample { x: x.clone(), y: y.clone(), r_xy: t.operator(x, y), sectional, holomorphic })
}

pub fn scal<F: MetricField + ?Sized>(field: &F, p: &[f64]) -> Result<f64> {
    riemann_tensor(field, p)?.scalar()
}

/// Samples of a unit-speed geodesic.
#[derive(Debug, Clone)]
pub struct GeodesicCurve {
    pub t: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    /// The curve left the chart (or hit a metric failure) before `length`.
    pub truncated: bool,
    /// `max |(|γ'|_g − 1)|` over the samples.
    pub speed_drift: f64,
}

pub fn geodesic<F: MetricField + ?Sized>(field: &F, p: &[f64], v: &[f64], length: f64) -> Result<GeodesicCurve> {
    let n = field.dim();
    let g = field.metric(p)?;
    let vv = Vector::from_column_slice(v);
    let speed = (vv.transpose() * &g * &vv)[(0, 0)].sqrt();
    if !(speed > 0.0) {
        return Err(GeomError::InvalidInput("zero initial velocity".into()));
    }
    let mut y0 = p.to_vec();
    y0.extend(v.iter().map(|x| x / speed));
    let rhs = |_t: f64, y: &[f64]| {
        let (x, u) = y.split_at(n);
        let gam = christoffel(field, x)?;
        let u = Vector::from_column_slice(u);
        let mut out = u.as_slice().to_vec();
        for k in 0..n {
            out.push(-(u.transpose() * &gam[k] * &u)[(0, 0)]);
        }
        Ok(out)
    };
    let opts = OdeOptions { rtol: 1e-11, atol: 1e-12, ..Default::default() };
    let traj = ode::integrate(rhs, 0.0, &y0, length, &opts)?;
    let mut drift = 0.0f64;
    let mut points = Vec::with_capacity(traj.y.len());
    let mut velocities = Vec::with_capacity(traj.y.len());
    for y in &traj.y {
        let (x, u) = y.split_at(n);
        if let Ok(g) = field.metric(x) {
            let u = Vector::from_column_slice(u);
            drift = drift.max(((u.transpose() * g * &u)[(0, 0)].sqrt() - 1.0).abs());
        }
        points.push(x.to_vec());
        velocities.push(u.to_vec());
    }
    Ok(GeodesicCurve { t: traj.t, points, velocities, truncated: traj.truncated, speed_drift: drift })
}

/// The radial variables of the model, all mutually consistent:
/// `s = tanh r`, `t = ln s`, `x = s²/(1−s²) = sinh² r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCoords {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub x: f64,
}

/// Which radial variable is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialInput {
    R(f64),
    S(f64),
    T(f64),
    X(f64),
}

pub fn coord_maps(input: RadialInput) -> Result<RadialCoords> {
    let bad = |name: &str, v: f64| Err(GeomError::Domain(format!("{name} = {v} out of range")));
    match input {
        RadialInput::R(r) => {
            if !(r > 0.0 && r.is_finite()) {
                return bad("r", r);
            }
            let e = (-2.0 * r).exp();
            let t = (-e).ln_1p() - e.ln_1p();
            let sh = r.sinh();
            Ok(RadialCoords { r, s: r.tanh(), t, x: sh * sh })
        }
        RadialInput::S(s) => {
            if !(s > 0.0 && s < 1.0) {
                return bad("s", s);
            }
            Ok(RadialCoords { r: s.atanh(), s, t: s.ln(), x: s * s / ((1.0 - s) * (1.0 + s)) })
        }
        RadialInput::T(t) => {
            if !(t < 0.0 && t.is_finite()) {
                return bad("t", t);
            }
            let s = t.exp();
            // atanh(s) = ½ ln((1+s)/(1−s)) with 1 − s = −expm1(t)
            let r = 0.5 * (s.ln_1p() - (-t.exp_m1()).ln());
            let x = (2.0 * t).exp() / -(2.0 * t).exp_m1();
            Ok(RadialCoords { r, s, t, x })
        }
        RadialInput::X(x) => {
            if !(x > 0.0 && x.is_finite()) {
                return bad("x", x);
            }
            let r = x.sqrt().asinh();
            Ok(RadialCoords { r, s: (x / (1.0 + x)).sqrt(), t: -0.5 * (1.0 / x).ln_1p(), x })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ch_metric_at_origin_is_identity() {
        let g = metric_ch(&BallPoint::origin(2)).unwrap();
        assert_eq!(g.g, Mat::identity(4, 4));
        assert_eq!(g.kahler_defect(), 0.0);
    }

    #[test]
    fn ch_radial_coefficient() {
        let s = 1f64.tanh();
        let g = metric_ch(&BallPoint::new(alloc::vec![s, 0.0, 0.0, 0.0]).unwrap()).unwrap();
        assert!((g.g[(0, 0)] - 1f64.cosh().powi(4)).abs() < 1e-12);
    }

    #[test]
    fn boundary_points_rejected() {
        assert!(BallPoint::new(alloc::vec![1.0 - 1e-10, 0.0]).is_err());
        assert!(ComplexHyperbolic { m: 1 }.metric(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn flat_christoffels_vanish() {
        let c = christoffel(&Euclidean { n: 4 }, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(c.iter().all(|m| m.amax() == 0.0));
        let c0 = christoffel(&ComplexHyperbolic { m: 2 }, &[0.0; 4]).unwrap();
        assert!(c0.iter().all(|m| m.amax() < 1e-12));
    }

    #[test]
    fn real_hyperbolic_curvature_is_minus_one() {
        let f = RealHyperbolic { n: 3 };
        let t = riemann_tensor(&f, &[0.2, -0.1, 0.3]).unwrap();
        let x = Vector::from_vec(alloc::vec![1.0, 0.0, 0.5]);
        let y = Vector::from_vec(alloc::vec![0.0, 1.0, 0.2]);
        assert!((sectional_of(&t, &x, &y).unwrap() + 1.0).abs() < 1e-6);
        assert!((t.scalar().unwrap() + 6.0).abs() < 1e-5);
    }

    #[test]
    fn fubini_study_holomorphic_curvature() {
        let f = FubiniStudy { m: 2 };
        let x = Vector::from_vec(alloc::vec![0.3, 1.0, -0.2, 0.5]);
        let y = Vector::from_vec(alloc::vec![0.0, 0.0, 1.0, 0.0]);
        let c = riemann(&f, &[0.4, -0.3, 0.2, 0.7], &x, &y).unwrap();
        assert!((c.holomorphic - 4.0).abs() < 1e-6);
    }

    #[test]
    fn degenerate_plane_rejected() {
        let x = Vector::from_vec(alloc::vec![1.0, 0.0, 0.0, 0.0]);
        let r = riemann(&ComplexHyperbolic { m: 2 }, &[0.1; 4], &x, &(x.clone() * 2.0));
        assert_eq!(r.unwrap_err(), GeomError::DegeneratePlane);
    }

    #[test]
    fn coord_maps_examples() {
        let c = coord_maps(RadialInput::R(1.0)).unwrap();
        assert!((c.s - 1f64.tanh()).abs() < 1e-15);
        assert!((c.x - 1f64.sinh().powi(2)).abs() < 1e-14);
        let big = coord_maps(RadialInput::X(1e12)).unwrap();
        assert!((big.t * 2.0 * 1e12 + 1.0).abs() < 1e-6);
        let far = coord_maps(RadialInput::R(15.0)).unwrap();
        assert!((far.x / ((30f64).exp() / 4.0) - 1.0).abs() < 1e-12);
        assert!(coord_maps(RadialInput::S(1.0)).is_err());
        assert!(coord_maps(RadialInput::T(0.0)).is_err());
    }
}
