//! Boundary-integral mass of metrics asymptotic to `ℂH^m` (and `ℝH^n`).
//!
//! Everything on the spheres is computed with the model metric: `S_R` is the
//! model geodesic sphere, `*λ` integrates as `λ(ν)·dA` with `ν` the outward
//! model unit normal, and `Div = δ` is minus the model divergence, so the
//! flat analogue is the usual ADM expression.

use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

pub use crate::ambient::ball_map_jacobian;
use crate::ambient::{theta_z_inv_at, AdSLift, AmbientForm, PseudoUnitary};
use crate::extrapolate::{fit_exponential, Convergence, ExpFit};
use crate::fd::{self, Stencil};
use crate::linalg::{complex_structure, j_covector, Mat, Vector};
use crate::model::{christoffel, ComplexHyperbolic, MetricField, RealHyperbolic};
use crate::profile::ProfileMetric;
use crate::quadrature::{unit_sphere_volume, SphereRule};
use crate::{GeomError, Result};

/// A metric given through its deviation `g − g₀` from the model in the
/// model's ball chart.
pub trait Deviation: Sync {
    fn dim(&self) -> usize;
    fn deviation(&self, p: &[f64]) -> Result<Mat>;
    /// Step for differentiating the deviation.
    fn fd_step(&self, p: &[f64]) -> f64 {
        let s = crate::linalg::norm(p);
        crate::model::H_FD * (1.0 - s).clamp(1e-3, 1.0)
    }
}

impl<T: Deviation + ?Sized> Deviation for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn deviation(&self, p: &[f64]) -> Result<Mat> {
        (**self).deviation(p)
    }
    fn fd_step(&self, p: &[f64]) -> f64 {
        (**self).fd_step(p)
    }
}

impl Deviation for ProfileMetric {
    fn dim(&self) -> usize {
        2 * self.profile.m
    }
    fn deviation(&self, p: &[f64]) -> Result<Mat> {
        ProfileMetric::deviation(self, p)
    }
}

/// The model itself: zero deviation.
#[derive(Debug, Clone, Copy)]
pub struct ModelMetric {
    pub dim: usize,
}

impl Deviation for ModelMetric {
    fn dim(&self) -> usize {
        self.dim
    }
    fn deviation(&self, _p: &[f64]) -> Result<Mat> {
        Ok(Mat::zeros(self.dim, self.dim))
    }
}

/// `g − g₀` by direct subtraction for an arbitrary metric field.
#[derive(Debug, Clone)]
pub struct Subtracted<F, M> {
    pub field: F,
    pub model: M,
}

impl<F: MetricField, M: MetricField> Deviation for Subtracted<F, M> {
    fn dim(&self) -> usize {
        self.field.dim()
    }
    fn deviation(&self, p: &[f64]) -> Result<Mat> {
        Ok(self.field.metric(p)? - self.model.metric(p)?)
    }
}

/// `f*g` for the model isometry `f` induced by `U`; since `f*g₀ = g₀` the
/// deviation is `Dfᵀ (g − g₀)(f(p)) Df`.
#[derive(Debug, Clone)]
pub struct Pullback<D> {
    pub inner: D,
    pub map: PseudoUnitary,
}

impl<D: Deviation> Deviation for Pullback<D> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn deviation(&self, p: &[f64]) -> Result<Mat> {
        let q = self.map.ball_map(p)?;
        let jac = ball_map_jacobian(&self.map, p)?;
        Ok(jac.transpose() * self.inner.deviation(&q)? * jac)
    }
}

/// `ε e^{−a r} dr²` on the real hyperbolic ball (`s = tanh(r/2)`).
#[derive(Debug, Clone, Copy)]
pub struct RadialPerturbationRh {
    pub n: usize,
    pub eps: f64,
    pub rate: f64,
}

impl Deviation for RadialPerturbationRh {
    fn dim(&self) -> usize {
        self.n
    }
    fn deviation(&self, p: &[f64]) -> Result<Mat> {
        let s = crate::linalg::norm(p);
        if !(s > 0.0 && s < 1.0) {
            return Err(GeomError::Domain("radial perturbation is defined on the punctured ball".into()));
        }
        let r = 2.0 * s.atanh();
        let dr = Vector::from_iterator(self.n, p.iter().map(|x| 2.0 * x / (s * (1.0 - s * s))));
        Ok(&dr * dr.transpose() * (self.eps * (-self.rate * r).exp()))
    }
}

/// Maps an index range to values; implementations may run in parallel but
/// must return results in index order.
pub trait Executor: Sync {
    fn map<T: Send, F: Fn(usize) -> T + Sync>(&self, n: usize, f: F) -> Vec<T>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map<T: Send, F: Fn(usize) -> T + Sync>(&self, n: usize, f: F) -> Vec<T> {
        (0..n).map(f).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Complex { m: usize },
    Real { n: usize },
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Complex { m } => 2 * m,
            Model::Real { n } => *n,
        }
    }

    fn metric(&self, p: &[f64]) -> Result<Mat> {
        match self {
            Model::Complex { m } => ComplexHyperbolic { m: *m }.metric(p),
            Model::Real { n } => RealHyperbolic { n: *n }.metric(p),
        }
    }

    fn christoffel(&self, p: &[f64]) -> Result<crate::model::Christoffel> {
        match self {
            Model::Complex { m } => christoffel(&ComplexHyperbolic { m: *m }, p),
            Model::Real { n } => christoffel(&RealHyperbolic { n: *n }, p),
        }
    }

    /// Euclidean radius of the geodesic sphere of radius `r`.
    pub fn chart_radius_of(&self, r: f64) -> f64 {
        match self {
            Model::Complex { .. } => r.tanh(),
            Model::Real { .. } => (0.5 * r).tanh(),
        }
    }

    /// `ds/dr` at geodesic radius `r`.
    fn ds_dr(&self, r: f64) -> f64 {
        let s = self.chart_radius_of(r);
        match self {
            Model::Complex { .. } => 1.0 - s * s,
            Model::Real { .. } => 0.5 * (1.0 - s * s),
        }
    }

    /// Area of the geodesic sphere per unit round measure.
    fn area_density(&self, r: f64) -> f64 {
        match self {
            Model::Complex { m } => r.sinh().powi(2 * *m as i32 - 1) * r.cosh(),
            Model::Real { n } => r.sinh().powi(*n as i32 - 1),
        }
    }

    pub fn sphere_volume(&self, r: f64) -> f64 {
        self.area_density(r) * unit_sphere_volume(self.dim())
    }
}

/// Nodes on a model geodesic sphere with outward unit normals and weights
/// that include the induced area density.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub model: Model,
    pub radius: f64,
    pub points: Vec<Vec<f64>>,
    pub normals: Vec<Vector>,
    pub weights: Vec<f64>,
    pub polar_nodes: usize,
    pub torus_nodes: usize,
}

impl SphereQuadrature {
    /// Product rule with `nodes` per angular dimension.
    pub fn new(model: Model, radius: f64, nodes: usize) -> Result<Self> {
        Self::with_nodes(model, radius, nodes, nodes)
    }

    pub fn with_nodes(model: Model, radius: f64, polar_nodes: usize, torus_nodes: usize) -> Result<Self> {
        let d = model.dim();
        if d % 2 != 0 {
            return Err(GeomError::InvalidInput("sphere rule needs an even ambient dimension".into()));
        }
        if !(radius > 0.0) || polar_nodes == 0 || torus_nodes == 0 {
            return Err(GeomError::InvalidInput("radius and node counts must be positive".into()));
        }
        let rule = SphereRule::new(d / 2, polar_nodes, torus_nodes);
        let s = model.chart_radius_of(radius);
        if !(s < 1.0) {
            return Err(GeomError::Domain(alloc::format!("radius {radius} is too large for double precision")));
        }
        let dens = model.area_density(radius);
        let vs = model.ds_dr(radius);
        let points: Vec<Vec<f64>> = rule.points.iter().map(|th| th.iter().map(|x| s * x).collect()).collect();
        let normals = rule.points.iter().map(|th| Vector::from_iterator(d, th.iter().map(|x| vs * x))).collect();
        let weights = rule.weights.iter().map(|w| w * dens).collect();
        Ok(Self { model, radius, points, normals, weights, polar_nodes, torus_nodes })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Metric data at one boundary node.
#[derive(Debug, Clone)]
pub struct NodeData {
    /// `d tr_{g₀}(g−g₀) + Div_{g₀} g` as a covector.
    pub div_trace: Vector,
    pub trace: f64,
    /// `(g − g₀)` applied to the normal, as a covector.
    pub e_normal: Vector,
    pub g0_inv: Mat,
}

/// `d tr_{g₀} g + Div_{g₀} g` at `p`, together with the trace and `g₀⁻¹`.
pub fn div_trace_data<D: Deviation + ?Sized>(model: Model, dev: &D, p: &[f64]) -> Result<(Vector, f64, Mat, Mat)> {
    let n = model.dim();
    if dev.dim() != n || p.len() != n {
        return Err(GeomError::InvalidInput("dimension mismatch".into()));
    }
    let h = dev.fd_step(p);
    let mut f = |q: &[f64]| -> Result<Vec<f64>> {
        let e = dev.deviation(q)?;
        let ginv = model.metric(q)?.try_inverse().ok_or(GeomError::SingularMetric)?;
        let mut v = e.as_slice().to_vec();
        v.push((ginv * &e).trace());
        Ok(v)
    };
    let grads = fd::gradient(&mut f, p, h, Stencil::Fourth)?;
    let e = dev.deviation(p)?;
    let g0 = model.metric(p)?;
    let ginv = g0.try_inverse().ok_or(GeomError::SingularMetric)?;
    let gam = model.christoffel(p)?;
    let de: Vec<Mat> = grads.iter().map(|g| Mat::from_column_slice(n, n, &g[..n * n])).collect();
    let dtr = Vector::from_iterator(n, grads.iter().map(|g| g[n * n]));
    // ∇_i e_kj = ∂_i e_kj − Γ^l_ik e_lj − Γ^l_ij e_kl
    let nabla = |i: usize, k: usize, j: usize| -> f64 {
        let mut v = de[i][(k, j)];
        for l in 0..n {
            v -= gam[l][(i, k)] * e[(l, j)] + gam[l][(i, j)] * e[(k, l)];
        }
        v
    };
    let mut delta = Vector::zeros(n);
    for j in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            for k in 0..n {
                if ginv[(i, k)] != 0.0 {
                    s += ginv[(i, k)] * nabla(i, k, j);
                }
            }
        }
        delta[j] = -s;
    }
    let trace = (&ginv * &e).trace();
    Ok((dtr + delta, trace, ginv, e))
}

/// `d tr_{g₀}(g−g₀) + Div_{g₀} g` at `p` for a metric asymptotic to `ℂH^m`.
pub fn div_trace_oneform<D: Deviation + ?Sized>(dev: &D, p: &[f64]) -> Result<Vector> {
    Ok(div_trace_data(Model::Complex { m: dev.dim() / 2 }, dev, p)?.0)
}

fn node_data<D: Deviation + ?Sized>(model: Model, dev: &D, p: &[f64], nu: &Vector) -> Result<NodeData> {
    let (div_trace, trace, g0_inv, e) = div_trace_data(model, dev, p)?;
    Ok(NodeData { div_trace, trace, e_normal: e * nu, g0_inv })
}

/// `du_B` in closed form, `u_B = B(Jẑ, ẑ)/(1−|w|²)` with `ẑ = (w, 1)`.
pub fn du_of_beta(b: &AmbientForm, w: &[f64]) -> Result<Vector> {
    let lift = AdSLift::of(w)?;
    let n = w.len();
    let s2: f64 = w.iter().map(|x| x * x).sum();
    let j = complex_structure(n + 2);
    let z = &lift.z;
    let u = (&j * z).dot(&(&b.b * z));
    let lam = 1.0 / (1.0 - s2).sqrt();
    // dz/dw_i = λ e_i + z w_i/(1−s²)
    let jz = &j * z;
    let bz = &b.b * z;
    let btz = b.b.transpose() * &jz;
    let mut du = Vector::zeros(n);
    for i in 0..n {
        // B(J dz, z) + B(Jz, dz) with the two pieces of dz
        let lin = lam * ((j.column(i)).dot(&bz) + btz[i]);
        du[i] = lin + 2.0 * u * w[i] / (1.0 - s2);
    }
    Ok(du)
}

/// `(‖Jα + du‖_max, ‖du‖_max)` at `w`: the two displays of the mass differ
/// only by replacing `Jα` with `−du`.
pub fn display_gap_at(b: &AmbientForm, w: &[f64]) -> Result<(f64, f64)> {
    let sec = theta_z_inv_at(w, b)?;
    let ja = j_covector(&complex_structure(w.len()), &sec.alpha);
    let du = du_of_beta(b, w)?;
    Ok(((ja + &du).amax(), du.amax()))
}

/// `λ(ν)` for `B` at `p`, without area density.
pub fn mass_integrand<D: Deviation + ?Sized>(dev: &D, b: &AmbientForm, p: &[f64], nu: &Vector) -> Result<f64> {
    let model = Model::Complex { m: b.m() };
    let d = node_data(model, dev, p, nu)?;
    Ok(ch_density(&d, nu, b, p)?.0)
}

/// Main form and the `−½ tr(g−g₀) du` form of the density at a node.
fn ch_density(d: &NodeData, nu: &Vector, b: &AmbientForm, p: &[f64]) -> Result<(f64, f64, f64)> {
    let n = p.len();
    let sec = theta_z_inv_at(p, b)?;
    let j = complex_structure(n);
    let ja = j_covector(&j, &sec.alpha);
    let a_nu = d.div_trace.dot(nu);
    let main = -0.25 * (a_nu * sec.u + 0.5 * d.trace * ja.dot(nu));
    let du = du_of_beta(b, p)?;
    let intro = -0.25 * (a_nu * sec.u - 0.5 * d.trace * du.dot(nu));
    let scale = 0.25 * ((a_nu * sec.u).abs() + 0.5 * (d.trace * ja.dot(nu)).abs());
    Ok((main, intro, scale))
}

/// One boundary integral for several forms at once.
#[derive(Debug, Clone)]
pub struct SphereIntegral {
    pub radius: f64,
    pub values: Vec<f64>,
    /// The same integrals with the `−½ tr(g−g₀) du` form of the last term.
    pub intro_values: Vec<f64>,
    /// `∫|·|` of the individual terms, the magnitude before cancellation.
    pub scales: Vec<f64>,
}

pub fn sphere_integral<D: Deviation + ?Sized, E: Executor>(dev: &D, betas: &[AmbientForm], quad: &SphereQuadrature, exec: &E) -> Result<SphereIntegral> {
    if !matches!(quad.model, Model::Complex { .. }) {
        return Err(GeomError::InvalidInput("complex hyperbolic quadrature expected".into()));
    }
    let k = betas.len();
    let per_node: Vec<Result<Vec<(f64, f64, f64)>>> = exec.map(quad.len(), |i| {
        let p = &quad.points[i];
        let nu = &quad.normals[i];
        let d = node_data(quad.model, dev, p, nu)?;
        betas.iter().map(|b| ch_density(&d, nu, b, p)).collect()
    });
    let mut values = alloc::vec![0.0; k];
    let mut intro_values = alloc::vec![0.0; k];
    let mut scales = alloc::vec![0.0; k];
    for (w, row) in quad.weights.iter().zip(per_node) {
        for (j, (a, b, c)) in row?.into_iter().enumerate() {
            values[j] += w * a;
            intro_values[j] += w * b;
            scales[j] += w * c;
        }
    }
    Ok(SphereIntegral { radius: quad.radius, values, intro_values, scales })
}

#[derive(Debug, Clone)]
pub struct MassOptions {
    pub radii: Vec<f64>,
    pub polar_nodes: usize,
    pub torus_nodes: usize,
    /// Relative fit residual above which a row is flagged noisy.
    pub noise_tol: f64,
}

impl MassOptions {
    /// Six radii in `[2, 4.5]`; 24 nodes per angular dimension for `m ≤ 2`,
    /// 8 for larger `m`.
    pub fn default_for(m: usize) -> Self {
        let nodes = if m <= 2 { 24 } else { 8 };
        MassOptions { radii: (0..6).map(|i| 2.0 + 0.5 * i as f64).collect(), polar_nodes: nodes, torus_nodes: nodes, noise_tol: 1e-2 }
    }
}

#[derive(Debug, Clone)]
pub struct MassReport {
    pub beta_id: String,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub intro_values: Vec<f64>,
    pub scales: Vec<f64>,
    pub fit: ExpFit,
}

impl MassReport {
    pub fn limit(&self) -> f64 {
        self.fit.limit
    }

    pub fn flag(&self) -> Convergence {
        self.fit.flag
    }

    /// Largest pre-cancellation magnitude over the schedule.
    pub fn scale(&self) -> f64 {
        self.scales.iter().fold(0.0f64, |m, s| m.max(*s))
    }

    /// `max |main − intro|` over the schedule.
    pub fn display_gap(&self) -> f64 {
        self.values.iter().zip(&self.intro_values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Mass rows for a list of forms.
pub fn mass_table<D: Deviation + ?Sized, E: Executor>(dev: &D, betas: &[(String, AmbientForm)], opts: &MassOptions, exec: &E) -> Result<Vec<MassReport>> {
    if opts.radii.len() < 2 || opts.radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GeomError::InvalidInput("radius schedule must be increasing with at least two entries".into()));
    }
    let m = dev.dim() / 2;
    let forms: Vec<AmbientForm> = betas.iter().map(|(_, b)| b.clone()).collect();
    if forms.iter().any(|b| b.m() != m) {
        return Err(GeomError::InvalidInput("form dimension does not match the metric".into()));
    }
    let mut ints = Vec::with_capacity(opts.radii.len());
    for &r in &opts.radii {
        let quad = SphereQuadrature::with_nodes(Model::Complex { m }, r, opts.polar_nodes, opts.torus_nodes)?;
        ints.push(sphere_integral(dev, &forms, &quad, exec)?);
    }
    let mut out = Vec::with_capacity(betas.len());
    for (j, (id, _)) in betas.iter().enumerate() {
        let values: Vec<f64> = ints.iter().map(|s| s.values[j]).collect();
        let intro_values: Vec<f64> = ints.iter().map(|s| s.intro_values[j]).collect();
        let scales: Vec<f64> = ints.iter().map(|s| s.scales[j]).collect();
        let scale = scales.iter().fold(0.0f64, |m, s| m.max(*s));
        let fit = fit_exponential(&opts.radii, &values, scale, opts.noise_tol)?;
        out.push(MassReport { beta_id: id.clone(), radii: opts.radii.clone(), values, intro_values, scales, fit });
    }
    Ok(out)
}

pub fn mass_of_beta<D: Deviation + ?Sized, E: Executor>(dev: &D, id: &str, b: &AmbientForm, opts: &MassOptions, exec: &E) -> Result<MassReport> {
    Ok(mass_table(dev, &[(String::from(id), b.clone())], opts, exec)?.remove(0))
}

/// The functional on a basis: one report per element and the vector of limits.
#[derive(Debug, Clone)]
pub struct MassFunctional {
    pub reports: Vec<MassReport>,
    pub vector: Vec<f64>,
}

pub fn mass_functional<D: Deviation + ?Sized, E: Executor>(dev: &D, basis: &[(String, AmbientForm)], opts: &MassOptions, exec: &E) -> Result<MassFunctional> {
    let reports = mass_table(dev, basis, opts, exec)?;
    let vector = reports.iter().map(|r| r.limit()).collect();
    Ok(MassFunctional { reports, vector })
}

/// Point of the Minkowski hyperboloid over the real hyperbolic ball and its
/// differential.
fn hyperboloid(p: &[f64]) -> Result<(Vector, Mat)> {
    let n = p.len();
    let s2: f64 = p.iter().map(|x| x * x).sum();
    if !(s2 < 1.0) {
        return Err(GeomError::Domain("outside the ball".into()));
    }
    let om = 1.0 - s2;
    let mut x = Vector::zeros(n + 1);
    let mut dx = Mat::zeros(n + 1, n);
    x[0] = (1.0 + s2) / om;
    for i in 0..n {
        x[i + 1] = 2.0 * p[i] / om;
        dx[(0, i)] = 4.0 * p[i] / (om * om);
        for j in 0..n {
            dx[(j + 1, i)] = 4.0 * p[i] * p[j] / (om * om) + if i == j { 2.0 / om } else { 0.0 };
        }
    }
    Ok((x, dx))
}

/// `u_V = V₀X₀ − Σ VᵢXᵢ` (positive for future timelike `V`), and `du_V`.
pub fn rh_u(v: &[f64], p: &[f64]) -> Result<(f64, Vector)> {
    if v.len() != p.len() + 1 {
        return Err(GeomError::InvalidInput("Minkowski vector has the wrong length".into()));
    }
    let (x, dx) = hyperboloid(p)?;
    let mut lv = -Vector::from_column_slice(v);
    lv[0] = -lv[0];
    Ok((lv.dot(&x), dx.transpose() * lv))
}

/// Real hyperbolic mass
/// `−¼ ∫ *[(Div g + d tr g) u − tr(g−g₀) du + (g−g₀)(grad u, ·)]`
/// for `u = u_V`, on spheres of `ℝHⁿ` (`n` even).
pub fn rh_mass<D: Deviation + ?Sized, E: Executor>(dev: &D, id: &str, v: &[f64], opts: &MassOptions, exec: &E) -> Result<MassReport> {
    let n = dev.dim();
    let model = Model::Real { n };
    let mut values = Vec::new();
    let mut scales = Vec::new();
    for &r in &opts.radii {
        let quad = SphereQuadrature::with_nodes(model, r, opts.polar_nodes, opts.torus_nodes)?;
        let rows: Vec<Result<(f64, f64)>> = exec.map(quad.len(), |i| {
            let p = &quad.points[i];
            let nu = &quad.normals[i];
            let d = node_data(model, dev, p, nu)?;
            let (u, du) = rh_u(v, p)?;
            let grad = &d.g0_inv * &du;
            let t1 = d.div_trace.dot(nu) * u;
            let t2 = -d.trace * du.dot(nu);
            let t3 = d.e_normal.dot(&grad);
            Ok((-0.25 * (t1 + t2 + t3), 0.25 * (t1.abs() + t2.abs() + t3.abs())))
        });
        let (mut acc, mut sc) = (0.0, 0.0);
        for (w, row) in quad.weights.iter().zip(rows) {
            let (a, b) = row?;
            acc += w * a;
            sc += w * b;
        }
        values.push(acc);
        scales.push(sc);
    }
    let scale = scales.iter().fold(0.0f64, |m, s| m.max(*s));
    let fit = fit_exponential(&opts.radii, &values, scale, opts.noise_tol)?;
    Ok(MassReport { beta_id: String::from(id), radii: opts.radii.clone(), intro_values: values.clone(), values, scales, fit })
}
