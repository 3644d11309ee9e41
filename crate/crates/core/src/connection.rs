//! The bundles `E = Λ²_J ⊕ T* ⊕ ℝ` and `T* ⊕ ℝ` with their hyperbolic
//! connections, curvature, parallel transport and holonomy.
//!
//! Both bundles are trivialized by constant coordinate tensors: `Λ²_J` is a
//! fixed subspace of 2-forms in the ball chart because `J` is constant. A
//! connection is then a matrix-valued 1-form `A`, `∇_X σ = X(σ) + A(X)σ`.

use alloc::vec::Vec;
use num_traits::Float;

use crate::fd::{self, Stencil};
use crate::linalg::{
    complex_structure, covector_inner, form2_inner, frobenius_half, interior, j_covector, j_invariant_basis, wedge, Mat,
    Vector,
};
use crate::model::{christoffel, riemann_tensor, Christoffel, MetricField};
use crate::ode::{self, OdeOptions};
use crate::{GeomError, Result};

/// A value `(ξ, α, u)` of `Λ²_J ⊕ T* ⊕ ℝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionE {
    pub xi: Mat,
    pub alpha: Vector,
    pub u: f64,
}

impl SectionE {
    pub fn zero(n: usize) -> Self {
        Self { xi: Mat::zeros(n, n), alpha: Vector::zeros(n), u: 0.0 }
    }

    pub fn new(xi: Mat, alpha: Vector, u: f64) -> Result<Self> {
        let n = alpha.len();
        if xi.nrows() != n || xi.ncols() != n || n % 2 != 0 {
            return Err(GeomError::InvalidInput("section components have mismatched sizes".into()));
        }
        let s = Self { xi, alpha, u };
        if s.xi_defect() > 1e-12 * (1.0 + s.xi.amax()) {
            return Err(GeomError::InvalidInput("ξ is not an antisymmetric J-invariant form".into()));
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// Largest violation of antisymmetry or `J`-invariance of `ξ`.
    pub fn xi_defect(&self) -> f64 {
        let j = complex_structure(self.dim());
        let a = (&self.xi + self.xi.transpose()).amax();
        let b = (j.transpose() * &self.xi * &j - &self.xi).amax();
        a.max(b)
    }

    /// Coordinates in the fixed fiber basis (ξ basis, then `dx₁, dy₁, …`, then `u`).
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out: Vec<f64> = j_invariant_basis(self.dim()).iter().map(|b| frobenius_half(b, &self.xi)).collect();
        out.extend(self.alpha.iter());
        out.push(self.u);
        out
    }

    pub fn from_vec(n: usize, v: &[f64]) -> Self {
        let basis = j_invariant_basis(n);
        let k = basis.len();
        let mut xi = Mat::zeros(n, n);
        for (b, c) in basis.iter().zip(v) {
            xi += b * *c;
        }
        Self { xi, alpha: Vector::from_column_slice(&v[k..k + n]), u: v[k + n] }
    }

    /// `h(σ, σ) = |ξ|² + u² − ½|α|²`.
    pub fn h(&self, g: &Mat) -> Result<f64> {
        let ginv = g.clone().try_inverse().ok_or(GeomError::SingularMetric)?;
        Ok(h_pair(self, self, &ginv))
    }
}

/// Fiber dimension `m² + 2m + 1` of `E` over a `2m`-manifold.
pub fn fiber_dim(n: usize) -> usize {
    let m = n / 2;
    m * m + n + 1
}

pub fn h_pair(a: &SectionE, b: &SectionE, ginv: &Mat) -> f64 {
    form2_inner(&a.xi, &b.xi, ginv) + a.u * b.u - 0.5 * covector_inner(&a.alpha, &b.alpha, ginv)
}

/// Gram matrix of `h` in the fixed fiber basis at a point with metric `g`.
pub fn h_gram(g: &Mat) -> Result<Mat> {
    let n = g.nrows();
    let ginv = g.clone().try_inverse().ok_or(GeomError::SingularMetric)?;
    let d = fiber_dim(n);
    let basis: Vec<SectionE> = (0..d)
        .map(|i| {
            let mut v = alloc::vec![0.0; d];
            v[i] = 1.0;
            SectionE::from_vec(n, &v)
        })
        .collect();
    Ok(Mat::from_fn(d, d, |i, j| h_pair(&basis[i], &basis[j], &ginv)))
}

/// The Kähler form `Ω(X, Y) = g(X, JY)` as a matrix.
pub fn kahler_form(g: &Mat) -> Mat {
    g * complex_structure(g.nrows())
}

/// `C_{X,Y}` on 2-forms, with `X, Y` turned into 1-forms by `g`.
pub fn c_operator_form(g: &Mat, x: &Vector, y: &Vector, gamma: &Mat) -> Mat {
    let j = complex_structure(x.len());
    let (jx, jy) = (&j * x, &j * y);
    let fl = |v: &Vector| g * v;
    wedge(&fl(x), &interior(y, gamma)) - wedge(&fl(y), &interior(x, gamma)) + wedge(&fl(&jx), &interior(&jy, gamma))
        - wedge(&fl(&jy), &interior(&jx, gamma))
}

/// `C_{X,Y}` on 1-forms.
pub fn c_operator_covector(g: &Mat, x: &Vector, y: &Vector, gamma: &Vector) -> Vector {
    let j = complex_structure(x.len());
    let (jx, jy) = (&j * x, &j * y);
    let ev = |v: &Vector| gamma.dot(v);
    g * x * ev(y) - g * y * ev(x) + g * &jx * ev(&jy) - g * &jy * ev(&jx)
}

/// Argument of [`c_operator`].
#[derive(Debug, Clone, PartialEq)]
pub enum FormArg {
    One(Vector),
    Two(Mat),
}

pub fn c_operator(g: &Mat, x: &Vector, y: &Vector, gamma: &FormArg) -> FormArg {
    match gamma {
        FormArg::One(a) => FormArg::One(c_operator_covector(g, x, y, a)),
        FormArg::Two(b) => FormArg::Two(c_operator_form(g, x, y, b)),
    }
}

/// A linear connection on a trivial bundle over a chart.
pub trait LinearConnection: Sync {
    fn base_dim(&self) -> usize;
    fn fiber_dim(&self) -> usize;
    fn metric(&self, p: &[f64]) -> Result<Mat>;
    /// The connection matrix `A(X)` at `p`.
    fn matrix(&self, p: &[f64], x: &[f64]) -> Result<Mat>;
    /// Finite-difference step near `p`.
    fn fd_step(&self, p: &[f64]) -> f64;
}

fn gamma_x(gam: &Christoffel, x: &[f64]) -> Mat {
    // (Γ_X)^k_i = X^a Γ^k_{ai}
    let n = x.len();
    Mat::from_fn(n, n, |k, i| (0..n).map(|a| x[a] * gam[k][(a, i)]).sum())
}

/// `∇^{CH}(c)` on `E` for a Kähler metric (with the standard `J`).
#[derive(Debug, Clone, Copy)]
pub struct ChConnection<F> {
    pub field: F,
    pub c: f64,
}

impl<F: MetricField> ChConnection<F> {
    pub fn new(field: F, c: f64) -> Self {
        Self { field, c }
    }

    /// `A(X)` from precomputed metric and Christoffel symbols.
    pub fn matrix_from(&self, g: &Mat, gam: &Christoffel, x: &[f64]) -> Mat {
        let n = x.len();
        let d = fiber_dim(n);
        let basis = j_invariant_basis(n);
        let k = basis.len();
        let j = complex_structure(n);
        let xv = Vector::from_column_slice(x);
        let xf = g * &xv;
        let jxf = g * (&j * &xv);
        let gx = gamma_x(gam, x);
        let omega = kahler_form(g);
        let mut a = Mat::zeros(d, d);
        let set_col = |a: &mut Mat, col: usize, s: &SectionE| {
            for (i, b) in basis.iter().enumerate() {
                a[(i, col)] = frobenius_half(b, &s.xi);
            }
            for i in 0..n {
                a[(k + i, col)] = s.alpha[i];
            }
            a[(k + n, col)] = s.u;
        };
        for (c_idx, b) in basis.iter().enumerate() {
            let xi = -(gx.transpose() * b + b * &gx);
            let alpha = interior(&xv, b) * (-2.0 * self.c);
            set_col(&mut a, c_idx, &SectionE { xi, alpha, u: 0.0 });
        }
        for i in 0..n {
            let e = Vector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
            let je = j_covector(&j, &e);
            let xi = (wedge(&xf, &e) + wedge(&jxf, &je)) * 0.5;
            let alpha = -(gx.transpose() * &e);
            let u = -(&j * &xv)[i];
            set_col(&mut a, k + i, &SectionE { xi, alpha, u });
        }
        let alpha = interior(&xv, &omega) * (-2.0 * self.c);
        set_col(&mut a, k + n, &SectionE { xi: Mat::zeros(n, n), alpha, u: 0.0 });
        a
    }
}

impl<F: MetricField> LinearConnection for ChConnection<F> {
    fn base_dim(&self) -> usize {
        self.field.dim()
    }
    fn fiber_dim(&self) -> usize {
        fiber_dim(self.field.dim())
    }
    fn metric(&self, p: &[f64]) -> Result<Mat> {
        self.field.metric(p)
    }
    fn matrix(&self, p: &[f64], x: &[f64]) -> Result<Mat> {
        let g = self.field.metric(p)?;
        let gam = christoffel(&self.field, p)?;
        Ok(self.matrix_from(&g, &gam, x))
    }
    fn fd_step(&self, p: &[f64]) -> f64 {
        self.field.fd_step(p)
    }
}

/// A value `(α, u)` of `T* ⊕ ℝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RHSection {
    pub alpha: Vector,
    pub u: f64,
}

impl RHSection {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.alpha.as_slice().to_vec();
        v.push(self.u);
        v
    }

    pub fn from_vec(v: &[f64]) -> Self {
        let n = v.len() - 1;
        Self { alpha: Vector::from_column_slice(&v[..n]), u: v[n] }
    }

    /// `h(α, u) = |α|² − u²`.
    pub fn h(&self, g: &Mat) -> Result<f64> {
        let ginv = g.clone().try_inverse().ok_or(GeomError::SingularMetric)?;
        Ok(covector_inner(&self.alpha, &self.alpha, &ginv) - self.u * self.u)
    }

    pub fn is_future_lightlike(&self, g: &Mat, tol: f64) -> Result<bool> {
        Ok(self.u > 0.0 && self.h(g)?.abs() <= tol * self.u * self.u)
    }
}

/// `∇^{RH}(α, u) = (∇α − u g(X,·), du(X) − α(X))`.
#[derive(Debug, Clone, Copy)]
pub struct RhConnection<F> {
    pub field: F,
}

impl<F: MetricField> LinearConnection for RhConnection<F> {
    fn base_dim(&self) -> usize {
        self.field.dim()
    }
    fn fiber_dim(&self) -> usize {
        self.field.dim() + 1
    }
    fn metric(&self, p: &[f64]) -> Result<Mat> {
        self.field.metric(p)
    }
    fn matrix(&self, p: &[f64], x: &[f64]) -> Result<Mat> {
        let n = self.field.dim();
        let g = self.field.metric(p)?;
        let gam = christoffel(&self.field, p)?;
        let gx = gamma_x(&gam, x);
        let xf = &g * Vector::from_column_slice(x);
        let mut a = Mat::zeros(n + 1, n + 1);
        a.view_mut((0, 0), (n, n)).copy_from(&(-gx.transpose()));
        for i in 0..n {
            a[(i, n)] = -xf[i];
            a[(n, i)] = -x[i];
        }
        Ok(a)
    }
    fn fd_step(&self, p: &[f64]) -> f64 {
        self.field.fd_step(p)
    }
}

/// `∇_X σ` for a section given as a function of the point (fiber coordinates).
pub fn covariant_derivative<C, S>(conn: &C, section: &mut S, p: &[f64], x: &[f64]) -> Result<Vec<f64>>
where
    C: LinearConnection + ?Sized,
    S: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let h = conn.fd_step(p);
    let dx = fd::directional(section, p, x, h, Stencil::Fourth)?;
    let s = section(p)?;
    let a = conn.matrix(p, x)?;
    let as_ = &a * Vector::from_column_slice(&s);
    Ok(dx.iter().zip(as_.iter()).map(|(a, b)| a + b).collect())
}

/// `∇^{CH}_X σ` for `c` and a section field on the ball.
pub fn nabla_ch<F, S>(c: f64, field: &F, section: &mut S, x: &[f64], p: &[f64]) -> Result<SectionE>
where
    F: MetricField,
    S: FnMut(&[f64]) -> Result<SectionE>,
{
    let conn = ChConnection::new(field, c);
    let mut f = |q: &[f64]| section(q).map(|s| s.to_vec());
    let v = covariant_derivative(&conn, &mut f, p, x)?;
    Ok(SectionE::from_vec(field.dim(), &v))
}

/// `∇^{RH}_X (α, u)`.
pub fn nabla_rh<F, S>(field: &F, section: &mut S, x: &[f64], p: &[f64]) -> Result<RHSection>
where
    F: MetricField,
    S: FnMut(&[f64]) -> Result<RHSection>,
{
    let conn = RhConnection { field };
    let mut f = |q: &[f64]| section(q).map(|s| s.to_vec());
    Ok(RHSection::from_vec(&covariant_derivative(&conn, &mut f, p, x)?))
}

/// Curvature `F(X,Y) = X(A(Y)) − Y(A(X)) + [A(X), A(Y)]` for constant `X, Y`.
pub fn connection_curvature<C: LinearConnection + ?Sized>(conn: &C, p: &[f64], x: &[f64], y: &[f64]) -> Result<Mat> {
    let d = conn.fiber_dim();
    let h = 10.0 * conn.fd_step(p);
    let mut ay = |q: &[f64]| conn.matrix(q, y).map(|m| m.as_slice().to_vec());
    let day = fd::directional(&mut ay, p, x, h, Stencil::Fourth)?;
    let mut ax = |q: &[f64]| conn.matrix(q, x).map(|m| m.as_slice().to_vec());
    let dax = fd::directional(&mut ax, p, y, h, Stencil::Fourth)?;
    let a_x = conn.matrix(p, x)?;
    let a_y = conn.matrix(p, y)?;
    let f = Mat::from_vec(d, d, day) - Mat::from_vec(d, d, dax);
    Ok(f + &a_x * &a_y - &a_y * &a_x)
}

/// The two curvature estimates of `∇^{CH}(c)`.
#[derive(Debug, Clone)]
pub struct ECurvature {
    /// From differencing the connection matrix.
    pub fd: Mat,
    /// From the Riemann tensor and the `C_{X,Y}` block formula.
    pub predicted: Mat,
}

impl ECurvature {
    pub fn max_abs(&self) -> f64 {
        self.fd.amax()
    }

    /// `‖fd − predicted‖ / max(‖predicted‖, floor)` in the max norm.
    pub fn relative_gap(&self, floor: f64) -> f64 {
        (&self.fd - &self.predicted).amax() / self.predicted.amax().max(floor)
    }
}

/// Block formula: the Riemann action minus `c·C` on `ξ`, minus
/// `c(2Ω(X,Y)J + C)` on `α`, zero on `u`.
pub fn predicted_curvature(c: f64, g: &Mat, r_xy: &Mat, x: &Vector, y: &Vector) -> Mat {
    let n = x.len();
    let basis = j_invariant_basis(n);
    let k = basis.len();
    let d = fiber_dim(n);
    let j = complex_structure(n);
    let om_xy = (x.transpose() * kahler_form(g) * y)[(0, 0)];
    let mut out = Mat::zeros(d, d);
    for (col, b) in basis.iter().enumerate() {
        let img = -(r_xy.transpose() * b + b * r_xy) - c_operator_form(g, x, y, b) * c;
        for (i, bi) in basis.iter().enumerate() {
            out[(i, col)] = frobenius_half(bi, &img);
        }
    }
    for col in 0..n {
        let e = Vector::from_fn(n, |r, _| if r == col { 1.0 } else { 0.0 });
        let img = -(r_xy.transpose() * &e) - (j_covector(&j, &e) * (2.0 * om_xy) + c_operator_covector(g, x, y, &e)) * c;
        for i in 0..n {
            out[(k + i, k + col)] = img[i];
        }
    }
    out
}

pub fn curvature_e<F: MetricField>(c: f64, field: &F, p: &[f64], x: &[f64], y: &[f64]) -> Result<ECurvature> {
    let xv = Vector::from_column_slice(x);
    let yv = Vector::from_column_slice(y);
    let g = field.metric(p)?;
    let gxx = xv.dot(&(&g * &xv));
    let gyy = yv.dot(&(&g * &yv));
    let gxy = xv.dot(&(&g * &yv));
    if gxx * gyy - gxy * gxy <= 1e-14 * gxx * gyy {
        return Err(GeomError::DegeneratePlane);
    }
    let conn = ChConnection::new(field, c);
    let fd = connection_curvature(&conn, p, x, y)?;
    let t = riemann_tensor(field, p)?;
    let predicted = predicted_curvature(c, &g, &t.operator(&xv, &yv), &xv, &yv);
    Ok(ECurvature { fd, predicted })
}

/// A parametrized curve `t ↦ (γ(t), γ'(t))` on `[0, 1]`.
pub type Curve<'a> = &'a (dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Sync);

/// Straight segment from `a` to `b`.
pub fn segment(a: &[f64], b: &[f64]) -> impl Fn(f64) -> (Vec<f64>, Vec<f64>) + Sync {
    let a = a.to_vec();
    let v: Vec<f64> = b.iter().zip(&a).map(|(b, a)| b - a).collect();
    move |t| (a.iter().zip(&v).map(|(a, v)| a + t * v).collect(), v.clone())
}

/// Circle through `p` in the plane of `x, y` (radius = `|x|`, `|y|`).
pub fn circle(p: &[f64], x: &[f64], y: &[f64]) -> impl Fn(f64) -> (Vec<f64>, Vec<f64>) + Sync {
    let (p, x, y) = (p.to_vec(), x.to_vec(), y.to_vec());
    move |t| {
        let th = 2.0 * core::f64::consts::PI * t;
        let (s, c) = th.sin_cos();
        let w = 2.0 * core::f64::consts::PI;
        let pt = (0..p.len()).map(|i| p[i] + (c - 1.0) * x[i] + s * y[i]).collect();
        let vel = (0..p.len()).map(|i| w * (-s * x[i] + c * y[i])).collect();
        (pt, vel)
    }
}

/// Transport of a full frame: the matrix `T` with `σ(1) = T σ(0)`.
#[derive(Debug, Clone)]
pub struct TransportMatrix {
    pub t: Mat,
    pub truncated: bool,
}

fn transport_opts() -> OdeOptions {
    OdeOptions { rtol: 1e-11, atol: 1e-13, h0: 1e-2, max_steps: 100_000 }
}

/// Solve `σ' = −A(γ') σ` for all fiber basis vectors at once.
pub fn transport_matrix<C: LinearConnection + ?Sized>(conn: &C, curve: Curve<'_>) -> Result<TransportMatrix> {
    let d = conn.fiber_dim();
    let y0 = Mat::identity(d, d).as_slice().to_vec();
    let rhs = |t: f64, y: &[f64]| {
        let (p, v) = curve(t);
        let a = conn.matrix(&p, &v)?;
        let s = Mat::from_column_slice(d, d, y);
        Ok((-(a * s)).as_slice().to_vec())
    };
    let traj = ode::integrate(rhs, 0.0, &y0, 1.0, &transport_opts())?;
    Ok(TransportMatrix { t: Mat::from_column_slice(d, d, traj.last()), truncated: traj.truncated })
}

/// Parallel transport of a single section along `curve`.
pub fn transport_e<F: MetricField>(c: f64, field: &F, sigma0: &SectionE, curve: Curve<'_>) -> Result<SectionE> {
    let conn = ChConnection::new(field, c);
    let n = field.dim();
    let rhs = |t: f64, y: &[f64]| {
        let (p, v) = curve(t);
        let a = conn.matrix(&p, &v)?;
        Ok((-(a * Vector::from_column_slice(y))).as_slice().to_vec())
    };
    let traj = ode::integrate(rhs, 0.0, &sigma0.to_vec(), 1.0, &transport_opts())?;
    if traj.truncated {
        return Err(GeomError::Integration("transport left the chart".into()));
    }
    Ok(SectionE::from_vec(n, traj.last()))
}

/// Values of `h(σ_t)` along a transported section, for conservation checks.
pub fn transport_h_drift<F: MetricField>(c: f64, field: &F, sigma0: &SectionE, curve: Curve<'_>) -> Result<f64> {
    let conn = ChConnection::new(field, c);
    let n = field.dim();
    let rhs = |t: f64, y: &[f64]| {
        let (p, v) = curve(t);
        let a = conn.matrix(&p, &v)?;
        Ok((-(a * Vector::from_column_slice(y))).as_slice().to_vec())
    };
    let traj = ode::integrate(rhs, 0.0, &sigma0.to_vec(), 1.0, &transport_opts())?;
    let mut h0 = None;
    let mut drift = 0.0f64;
    for (t, y) in traj.t.iter().zip(&traj.y) {
        let (p, _) = curve(*t);
        let h = SectionE::from_vec(n, y).h(&field.metric(&p)?)?;
        let h0 = *h0.get_or_insert(h);
        drift = drift.max((h - h0).abs());
    }
    Ok(drift)
}

/// Loops used to probe holonomy: a segment out from the base point, a small
/// circle, and the segment back.
#[derive(Debug, Clone)]
pub struct Lasso {
    pub base: Vec<f64>,
    pub center: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

pub fn lasso_holonomy<C: LinearConnection + ?Sized>(conn: &C, l: &Lasso) -> Result<TransportMatrix> {
    let out = segment(&l.base, &l.center);
    let back = segment(&l.center, &l.base);
    let lp = circle(&l.center, &l.x, &l.y);
    let a = transport_matrix(conn, &out)?;
    let b = transport_matrix(conn, &lp)?;
    let c = transport_matrix(conn, &back)?;
    Ok(TransportMatrix { t: c.t * b.t * a.t, truncated: a.truncated || b.truncated || c.truncated })
}

/// Joint fixed space of a family of holonomies.
#[derive(Debug, Clone)]
pub struct ParallelSpace {
    pub dim: usize,
    /// Orthonormal basis (columns) of the fixed subspace at the base point.
    pub basis: Mat,
    pub singular_values: Vec<f64>,
    /// Some transport left the chart.
    pub flagged: bool,
}

pub const SIGMA_RANK: f64 = 1e-6;

pub fn fixed_space(hols: &[Mat], sigma_rank: f64) -> ParallelSpace {
    let d = hols[0].nrows();
    let mut stacked = Mat::zeros(d * hols.len().max(1), d);
    for (i, h) in hols.iter().enumerate() {
        stacked.view_mut((i * d, 0), (d, d)).copy_from(&(h - Mat::identity(d, d)));
    }
    // the fixed space is the null space of the stacked matrix
    let gram = stacked.transpose() * &stacked;
    let eig = gram.symmetric_eigen();
    let mut sv: Vec<(f64, usize)> =
        eig.eigenvalues.iter().enumerate().map(|(i, e)| (e.max(0.0).sqrt(), i)).collect();
    sv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let null: Vec<usize> = sv.iter().filter(|s| s.0 < sigma_rank).map(|s| s.1).collect();
    let mut basis = Mat::zeros(d, null.len());
    for (c, &i) in null.iter().enumerate() {
        basis.set_column(c, &eig.eigenvectors.column(i));
    }
    ParallelSpace { dim: null.len(), basis, singular_values: sv.into_iter().map(|s| s.0).collect(), flagged: false }
}

pub fn parallel_space_dim<C: LinearConnection + ?Sized>(conn: &C, loops: &[Lasso], sigma_rank: f64) -> Result<ParallelSpace> {
    if loops.is_empty() {
        return Err(GeomError::InvalidInput("no loops".into()));
    }
    let mut hols = Vec::with_capacity(loops.len());
    let mut flagged = false;
    for l in loops {
        let h = lasso_holonomy(conn, l)?;
        flagged |= h.truncated;
        hols.push(h.t);
    }
    let mut out = fixed_space(&hols, sigma_rank);
    out.flagged = flagged;
    Ok(out)
}

/// FD Hessian `∇du` of a scalar.
pub fn hessian<F, U>(field: &F, u: &mut U, p: &[f64], h: f64) -> Result<Mat>
where
    F: MetricField + ?Sized,
    U: FnMut(&[f64]) -> Result<f64>,
{
    let n = p.len();
    let mut grad = |q: &[f64]| fd::scalar_gradient(u, q, h, Stencil::Fourth);
    let second = fd::gradient(&mut grad, p, h, Stencil::Fourth)?;
    let du = grad(p)?;
    let gam = christoffel(field, p)?;
    let mut hs = Mat::from_fn(n, n, |i, j| second[i][j]);
    for k in 0..n {
        hs -= &gam[k] * du[k];
    }
    Ok(crate::linalg::sym(&hs))
}

/// `a ⊙ b = a⊗b + b⊗a`.
pub fn sym_product(a: &Vector, b: &Vector) -> Mat {
    a * b.transpose() + b * a.transpose()
}

/// `∇_X Hess u − (2du(X) g + X♭⊙du + (JX)♭⊙Jdu)`.
///
/// The returned `noise` is the difference between the residuals at steps
/// `h` and `2h`.
#[derive(Debug, Clone)]
pub struct ThirdOrderResidual {
    pub residual: Mat,
    pub noise: f64,
}

pub fn third_order_residual<F, U>(field: &F, u: &mut U, p: &[f64], x: &[f64]) -> Result<ThirdOrderResidual>
where
    F: MetricField + ?Sized,
    U: FnMut(&[f64]) -> Result<f64>,
{
    let h = 20.0 * field.fd_step(p);
    let r1 = third_order_with_step(field, u, p, x, h)?;
    let r2 = third_order_with_step(field, u, p, x, 2.0 * h)?;
    let noise = (&r1 - &r2).amax();
    Ok(ThirdOrderResidual { residual: r1, noise })
}

fn third_order_with_step<F, U>(field: &F, u: &mut U, p: &[f64], x: &[f64], h: f64) -> Result<Mat>
where
    F: MetricField + ?Sized,
    U: FnMut(&[f64]) -> Result<f64>,
{
    let n = p.len();
    let mut hess_vec = |q: &[f64]| hessian(field, u, q, h).map(|m| m.as_slice().to_vec());
    let dh = fd::directional(&mut hess_vec, p, x, h, Stencil::Fourth)?;
    let hs = hessian(field, u, p, h)?;
    let gam = christoffel(field, p)?;
    let gx = gamma_x(&gam, x);
    let nabla = Mat::from_vec(n, n, dh) - gx.transpose() * &hs - &hs * &gx;
    let g = field.metric(p)?;
    let du = Vector::from_column_slice(&fd::scalar_gradient(u, p, h, Stencil::Fourth)?);
    let j = complex_structure(n);
    let xv = Vector::from_column_slice(x);
    let rhs = &g * (2.0 * du.dot(&xv)) + sym_product(&(&g * &xv), &du) + sym_product(&(&g * (&j * &xv)), &j_covector(&j, &du));
    Ok(nabla - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ComplexHyperbolic, Euclidean};

    fn naive_c_form(g: &Mat, x: &Vector, y: &Vector, gamma: &Mat) -> Mat {
        // direct index evaluation of each wedge term
        let n = x.len();
        let j = complex_structure(n);
        let pairs = [(x.clone(), y.clone(), 1.0), (y.clone(), x.clone(), -1.0), (&j * x, &j * y, 1.0), (&j * y, &j * x, -1.0)];
        let mut out = Mat::zeros(n, n);
        for (a, b, sgn) in pairs.iter() {
            for p in 0..n {
                for q in 0..n {
                    let mut af_p = 0.0;
                    let mut af_q = 0.0;
                    let mut ib_p = 0.0;
                    let mut ib_q = 0.0;
                    for r in 0..n {
                        af_p += g[(p, r)] * a[r];
                        af_q += g[(q, r)] * a[r];
                        ib_p += b[r] * gamma[(r, p)];
                        ib_q += b[r] * gamma[(r, q)];
                    }
                    out[(p, q)] += sgn * (af_p * ib_q - af_q * ib_p);
                }
            }
        }
        out
    }

    #[test]
    fn c_operator_matches_naive_loop() {
        let g = Mat::identity(4, 4);
        let e1 = Vector::from_vec(alloc::vec![1.0, 0.0, 0.0, 0.0]);
        let je1 = complex_structure(4) * &e1;
        let om = kahler_form(&g);
        let a = c_operator_form(&g, &e1, &je1, &om);
        assert!((a - naive_c_form(&g, &e1, &je1, &om)).amax() < 1e-15);
        let x = Vector::from_vec(alloc::vec![0.3, -1.0, 0.2, 0.7]);
        let y = Vector::from_vec(alloc::vec![1.1, 0.4, -0.5, 0.1]);
        let gg = Mat::from_fn(4, 4, |i, j| if i == j { 2.0 } else { 0.1 });
        let b = j_invariant_basis(4)[3].clone() + om * 0.3;
        let c1 = c_operator_form(&gg, &x, &y, &b);
        assert!((&c1 - naive_c_form(&gg, &x, &y, &b)).amax() < 1e-13);
        assert!((c1 + c_operator_form(&gg, &y, &x, &b)).amax() < 1e-14);
        assert_eq!(c_operator_form(&gg, &x, &y, &Mat::zeros(4, 4)), Mat::zeros(4, 4));
    }

    #[test]
    fn signature_of_h() {
        for m in 2..=4 {
            let g = ComplexHyperbolic { m }.metric(&alloc::vec![0.1; 2 * m]).unwrap();
            let (pos, neg, zero) = crate::linalg::inertia(&h_gram(&g).unwrap(), 1e-12);
            assert_eq!((pos, neg, zero), (m * m + 1, 2 * m, 0));
        }
    }

    #[test]
    fn section_round_trip() {
        let n = 6;
        let v: Vec<f64> = (0..fiber_dim(n)).map(|i| (i as f64 * 0.37).sin()).collect();
        let s = SectionE::from_vec(n, &v);
        assert!(s.xi_defect() < 1e-15);
        let w = s.to_vec();
        assert!(v.iter().zip(&w).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn rh_euclidean_constant_section() {
        let e = Euclidean { n: 3 };
        let x = [0.5, -1.0, 2.0];
        let r = nabla_rh(&e, &mut |_q: &[f64]| Ok(RHSection { alpha: Vector::zeros(3), u: 1.0 }), &x, &[0.1, 0.2, 0.3]).unwrap();
        assert!((r.alpha + Vector::from_column_slice(&x)).amax() < 1e-12);
        assert!(r.u.abs() < 1e-12);
    }

    #[test]
    fn constant_u_section_on_model() {
        let f = ComplexHyperbolic { m: 2 };
        let p = [0.2, -0.1, 0.3, 0.05];
        let x = [1.0, 0.5, -0.3, 0.2];
        let out = nabla_ch(-1.0, &f, &mut |_q: &[f64]| Ok(SectionE { xi: Mat::zeros(4, 4), alpha: Vector::zeros(4), u: 1.0 }), &x, &p)
            .unwrap();
        let g = f.metric(&p).unwrap();
        let expect = interior(&Vector::from_column_slice(&x), &kahler_form(&g)) * 2.0;
        assert!(out.xi.amax() < 1e-12);
        assert!((out.alpha - expect).amax() < 1e-12);
        assert!(out.u.abs() < 1e-12);
    }
}
