//! U(m)-invariant Kähler metrics from momentum profiles `Θ`.
//!
//! With `x` the moment map of the circle action, `ω = dx∧d^c x/Θ + x ω_FS`.
//! The ball chart uses `|w| = e^t` where `dt/dx = 1/Θ`; for complete
//! asymptotically hyperbolic profiles `t` is anchored at `x = ∞`, for the
//! flat and spherical profiles at the origin (`t − ½ ln x → 0`).
//! In this chart
//! `g = a·δ + D·(w wᵀ + Jw Jwᵀ)` with `a = x/|w|²` and `D = a²·(Θ/2x − 1)/x`.

use alloc::vec::Vec;
use num_traits::Float;

use crate::linalg::{norm, Mat};
use crate::model::{hermitian_radial, MetricField};
use crate::quadrature::integrate_adaptive;
use crate::{GeomError, Result};

const QUAD_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Flat,
    Ch,
    Fs,
    Custom,
}

impl ProfileKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProfileKind::Flat => "flat",
            ProfileKind::Ch => "ch",
            ProfileKind::Fs => "fs",
            ProfileKind::Custom => "custom",
        }
    }
}

/// Smooth bump `χ(z) ∝ exp(−λ/((z−z₀)(z₁−z)))` on `(z₀, z₁)`, unit integral.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSpec {
    pub z0: f64,
    pub z1: f64,
    pub sharpness: f64,
    /// Reciprocal of the raw integral.
    pub normalization: f64,
    /// `M₁ = ∫ z χ(z) dz`.
    pub first_moment: f64,
}

impl Default for BumpSpec {
    fn default() -> Self {
        BumpSpec::new(1.0, 2.0, 1.0).expect("default bump")
    }
}

impl BumpSpec {
    pub fn new(z0: f64, z1: f64, sharpness: f64) -> Result<Self> {
        if !(z0.is_finite() && z1.is_finite() && sharpness.is_finite()) || !(z1 > z0) || !(sharpness > 0.0) {
            return Err(GeomError::Profile("bump needs finite z0 < z1 and positive sharpness".into()));
        }
        if z0 < 1.0 {
            return Err(GeomError::Profile(alloc::format!("bump support [{z0}, {z1}] is not inside [1, inf)")));
        }
        let mut b = BumpSpec { z0, z1, sharpness, normalization: 1.0, first_moment: 0.0 };
        let raw = integrate_adaptive(|z| b.chi(z), z0, z1, 0.0, QUAD_TOL)?;
        if !(raw > 0.0) {
            return Err(GeomError::Profile("bump integral vanishes numerically".into()));
        }
        b.normalization = 1.0 / raw;
        b.first_moment = integrate_adaptive(|z| z * b.chi(z), z0, z1, 0.0, QUAD_TOL)?;
        Ok(b)
    }

    pub fn chi(&self, z: f64) -> f64 {
        if z <= self.z0 || z >= self.z1 {
            return 0.0;
        }
        self.normalization * (-self.sharpness / ((z - self.z0) * (self.z1 - z))).exp()
    }

    /// `∫₀^x χ`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.z0 {
            0.0
        } else if x >= self.z1 {
            1.0
        } else {
            integrate_adaptive(|z| self.chi(z), self.z0, x, 0.0, QUAD_TOL).unwrap_or(f64::NAN)
        }
    }

    /// `∫₀^x z χ`.
    pub fn moment_cdf(&self, x: f64) -> f64 {
        if x <= self.z0 {
            0.0
        } else if x >= self.z1 {
            self.first_moment
        } else {
            integrate_adaptive(|z| z * self.chi(z), self.z0, x, 0.0, QUAD_TOL).unwrap_or(f64::NAN)
        }
    }

    /// `∫₀^x ∫₀^y χ = xΦ(x) − Ψ(x)`; equals `x − M₁` beyond the support.
    pub fn double_integral(&self, x: f64) -> f64 {
        if x <= self.z0 {
            0.0
        } else if x >= self.z1 {
            x - self.first_moment
        } else {
            x * self.cdf(x) - self.moment_cdf(x)
        }
    }

    pub fn unit_integral_defect(&self) -> Result<f64> {
        Ok((integrate_adaptive(|z| self.chi(z), self.z0, self.z1, 0.0, QUAD_TOL)? - 1.0).abs())
    }
}

/// How `α = Θ₀ − Θ` is built.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaSpec {
    /// `α(x) = x^{1−m} ∫₀^x∫₀^y χ`.
    Bump(BumpSpec),
    /// `α(x) = ε x^{2−a/2} Φ(x)` with `Φ` the cumulative integral of a
    /// bump; the metric deviation then decays like `e^{−a r}`.
    PowerDecay { eps: f64, rate: f64, step: BumpSpec },
}

impl AlphaSpec {
    fn support_start(&self) -> f64 {
        match self {
            AlphaSpec::Bump(b) => b.z0,
            AlphaSpec::PowerDecay { step, .. } => step.z0,
        }
    }

    fn closed_from(&self) -> f64 {
        match self {
            AlphaSpec::Bump(b) => b.z1,
            AlphaSpec::PowerDecay { step, .. } => step.z1,
        }
    }

    /// `(α, α′, α″)`.
    pub fn eval(&self, m: usize, x: f64) -> [f64; 3] {
        if x <= self.support_start() {
            return [0.0; 3];
        }
        let mf = m as f64;
        match self {
            AlphaSpec::Bump(b) => {
                let f = b.double_integral(x);
                let phi = b.cdf(x);
                let chi = b.chi(x);
                let p = x.powf(1.0 - mf);
                [
                    p * f,
                    (1.0 - mf) * p / x * f + p * phi,
                    (1.0 - mf) * (-mf) * p / (x * x) * f + 2.0 * (1.0 - mf) * p / x * phi + p * chi,
                ]
            }
            AlphaSpec::PowerDecay { eps, rate, step } => {
                let k = 2.0 - rate / 2.0;
                let phi = step.cdf(x);
                let chi = step.chi(x);
                let dchi = if chi > 0.0 {
                    let (z0, z1) = (step.z0, step.z1);
                    chi * step.sharpness * ((z1 - x) - (x - z0)) / ((x - z0) * (z1 - x)).powi(2)
                } else {
                    0.0
                };
                let p = x.powf(k);
                [
                    eps * p * phi,
                    eps * (k * p / x * phi + p * chi),
                    eps * (k * (k - 1.0) * p / (x * x) * phi + 2.0 * k * p / x * chi + p * dchi),
                ]
            }
        }
    }

    pub fn value(&self, m: usize, x: f64) -> f64 {
        if x <= self.support_start() {
            return 0.0;
        }
        match self {
            AlphaSpec::Bump(b) => x.powf(1.0 - m as f64) * b.double_integral(x),
            _ => self.eval(m, x)[0],
        }
    }
}

/// A momentum profile `Θ` together with its chart gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumProfile {
    pub kind: ProfileKind,
    pub m: usize,
    pub alpha: Option<AlphaSpec>,
    /// `∫_{z₀}^∞ α/(ΘΘ₀)` and `∫_{z₁}^∞ α/(ΘΘ₀)` for custom profiles.
    delta_start: f64,
    delta_closed: f64,
}

pub fn theta_model(kind: ProfileKind, m: usize) -> Result<MomentumProfile> {
    if kind == ProfileKind::Custom {
        return Err(GeomError::Profile("use theta_custom for custom profiles".into()));
    }
    if m < 1 {
        return Err(GeomError::InvalidInput("m must be positive".into()));
    }
    Ok(MomentumProfile { kind, m, alpha: None, delta_start: 0.0, delta_closed: 0.0 })
}

/// `Θ = Θ₀ − α`; rejects specs for which `Θ` fails to stay positive or
/// (for bumps) `α ≤ x` fails on a log grid up to `10⁶`.
pub fn theta_custom(alpha: AlphaSpec, m: usize) -> Result<MomentumProfile> {
    if m < 2 {
        return Err(GeomError::Profile("custom profiles need m >= 2".into()));
    }
    match &alpha {
        AlphaSpec::Bump(b) => {
            // re-validate in case the struct was assembled by hand
            BumpSpec::new(b.z0, b.z1, b.sharpness)?;
        }
        AlphaSpec::PowerDecay { eps, rate, step } => {
            BumpSpec::new(step.z0, step.z1, step.sharpness)?;
            if !(eps.is_finite() && rate.is_finite() && *rate > 0.0) {
                return Err(GeomError::Profile("power decay needs finite eps and positive rate".into()));
            }
        }
    }
    let mut prof = MomentumProfile { kind: ProfileKind::Custom, m, alpha: Some(alpha), delta_start: 0.0, delta_closed: 0.0 };
    for i in 0..=240 {
        let x = 10f64.powf(-6.0 + 12.0 * i as f64 / 240.0);
        let a = prof.alpha.as_ref().unwrap().value(m, x);
        if !(prof.value(x) > 0.0) {
            return Err(GeomError::Profile(alloc::format!("profile is not positive at x = {x:e}")));
        }
        if matches!(prof.alpha, Some(AlphaSpec::Bump(_))) && a > x * (1.0 + 1e-12) {
            return Err(GeomError::Profile(alloc::format!("alpha exceeds x at x = {x:e}")));
        }
    }
    let al = prof.alpha.as_ref().unwrap();
    let (z0, z1) = (al.support_start(), al.closed_from());
    prof.delta_closed = prof.delta_tail(z1)?;
    prof.delta_start = prof.delta_closed + integrate_adaptive(|y| prof.gauge_integrand(y), z0, z1, 0.0, QUAD_TOL)?;
    Ok(prof)
}

impl MomentumProfile {
    /// Right end of the domain of `x`.
    pub fn x_max(&self) -> f64 {
        match self.kind {
            ProfileKind::Fs => 1.0,
            _ => f64::INFINITY,
        }
    }

    pub fn theta0(x: f64) -> f64 {
        2.0 * x + 2.0 * x * x
    }

    fn alpha3(&self, x: f64) -> [f64; 3] {
        self.alpha.as_ref().map(|a| a.eval(self.m, x)).unwrap_or([0.0; 3])
    }

    fn alpha_value(&self, x: f64) -> f64 {
        self.alpha.as_ref().map(|a| a.value(self.m, x)).unwrap_or(0.0)
    }

    /// `(Θ, Θ′, Θ″)`.
    pub fn derivs(&self, x: f64) -> [f64; 3] {
        match self.kind {
            ProfileKind::Flat => [2.0 * x, 2.0, 0.0],
            ProfileKind::Ch => [2.0 * x + 2.0 * x * x, 2.0 + 4.0 * x, 4.0],
            ProfileKind::Fs => [2.0 * x - 2.0 * x * x, 2.0 - 4.0 * x, -4.0],
            ProfileKind::Custom => {
                let a = self.alpha3(x);
                [2.0 * x + 2.0 * x * x - a[0], 2.0 + 4.0 * x - a[1], 4.0 - a[2]]
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.kind {
            ProfileKind::Custom => Self::theta0(x) - self.alpha_value(x),
            _ => self.derivs(x)[0],
        }
    }

    /// `(Θ(x)/2x − 1)/x`, finite at the origin.
    pub fn q(&self, x: f64) -> f64 {
        match self.kind {
            ProfileKind::Flat => 0.0,
            ProfileKind::Ch => 1.0,
            ProfileKind::Fs => -1.0,
            ProfileKind::Custom => 1.0 - self.alpha_value(x) / (2.0 * x * x),
        }
    }

    /// `Θ″(0)` and `Θ‴(0)`, used by the small-`x` branch of the scalar curvature.
    pub fn jet_at_zero(&self) -> (f64, f64) {
        match self.kind {
            ProfileKind::Flat => (0.0, 0.0),
            ProfileKind::Ch | ProfileKind::Custom => (4.0, 0.0),
            ProfileKind::Fs => (-4.0, 0.0),
        }
    }

    /// `α/(ΘΘ₀)` = `1/Θ − 1/Θ₀`.
    fn gauge_integrand(&self, y: f64) -> f64 {
        let a = self.alpha_value(y);
        if a == 0.0 {
            return 0.0;
        }
        let t0 = Self::theta0(y);
        a / ((t0 - a) * t0)
    }

    fn delta_tail(&self, x: f64) -> Result<f64> {
        // y = x/u
        integrate_adaptive(
            |u| {
                if u <= 0.0 {
                    0.0
                } else {
                    let y = x / u;
                    self.gauge_integrand(y) * x / (u * u)
                }
            },
            0.0,
            1.0,
            0.0,
            QUAD_TOL,
        )
    }

    /// `δ(x) = ∫_x^∞ (1/Θ − 1/Θ₀)`, the offset between the two gauges.
    pub fn gauge_offset(&self, x: f64) -> Result<f64> {
        let Some(al) = &self.alpha else { return Ok(0.0) };
        let (z0, z1) = (al.support_start(), al.closed_from());
        if x <= z0 {
            Ok(self.delta_start)
        } else if x < z1 {
            Ok(self.delta_closed + integrate_adaptive(|y| self.gauge_integrand(y), x, z1, 0.0, QUAD_TOL)?)
        } else {
            self.delta_tail(x)
        }
    }

    /// Moment `x` at Euclidean ball radius squared `s²`.
    pub fn moment_of_radius2(&self, s2: f64) -> Result<f64> {
        Ok(self.chart_coefficients(s2)?.x)
    }
}

/// Radial data at a chart radius.
#[derive(Debug, Clone, Copy)]
pub struct ChartCoefficients {
    pub x: f64,
    pub a: f64,
    pub d: f64,
    /// `a − a₀` and `D − D₀` against `ℂH^m`.
    pub da: f64,
    pub dd: f64,
}

impl MomentumProfile {
    pub fn chart_coefficients(&self, s2: f64) -> Result<ChartCoefficients> {
        if !(s2 >= 0.0) {
            return Err(GeomError::Domain("negative radius".into()));
        }
        let om = 1.0 - s2;
        let ch = |s2: f64| {
            let a0 = 1.0 / (1.0 - s2);
            (a0, a0 * a0)
        };
        match self.kind {
            ProfileKind::Ch => {
                if !(om > 0.0) {
                    return Err(GeomError::Domain("outside the ball".into()));
                }
                let (a, d) = ch(s2);
                Ok(ChartCoefficients { x: s2 / om, a, d, da: 0.0, dd: 0.0 })
            }
            ProfileKind::Flat | ProfileKind::Fs => {
                let (x, a, d) = if self.kind == ProfileKind::Flat {
                    (s2, 1.0, 0.0)
                } else {
                    let a = 1.0 / (1.0 + s2);
                    (s2 / (1.0 + s2), a, -a * a)
                };
                let (da, dd) = if om > 0.0 {
                    let (a0, d0) = ch(s2);
                    (a - a0, d - d0)
                } else {
                    (f64::NAN, f64::NAN)
                };
                Ok(ChartCoefficients { x, a, d, da, dd })
            }
            ProfileKind::Custom => {
                if !(om > 0.0) {
                    return Err(GeomError::Domain("outside the ball".into()));
                }
                let mut x = s2 / om;
                let mut delta = 0.0;
                let mut s2y = om;
                let mut converged = false;
                for _ in 0..80 {
                    delta = self.gauge_offset(x)?;
                    s2y = om + (-2.0 * delta).exp_m1();
                    if !(s2y > 0.0) {
                        return Err(GeomError::Integration("gauge offset exceeds the chart".into()));
                    }
                    let nx = s2 / s2y;
                    let done = (nx - x).abs() <= 1e-15 * nx.max(1e-300);
                    x = nx;
                    if done {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(GeomError::Integration("gauge iteration did not converge".into()));
                }
                let a = 1.0 / s2y;
                let a0 = 1.0 / om;
                let da = -(-2.0 * delta).exp_m1() / (s2y * om);
                let r = if x > 0.0 { self.alpha_value(x) / (2.0 * x * x) } else { 0.0 };
                let d = a * a * (1.0 - r);
                let dd = da * (a + a0) - a * a * r;
                Ok(ChartCoefficients { x, a, d, da, dd })
            }
        }
    }
}

/// The metric `g_Θ` in the shared ball chart.
#[derive(Debug, Clone)]
pub struct ProfileMetric {
    pub profile: MomentumProfile,
}

impl ProfileMetric {
    pub fn new(profile: MomentumProfile) -> Self {
        ProfileMetric { profile }
    }

    /// `g − g_{ℂH^m}` without cancellation.
    pub fn deviation(&self, p: &[f64]) -> Result<Mat> {
        let s2: f64 = p.iter().map(|v| v * v).sum();
        let c = self.profile.chart_coefficients(s2)?;
        Ok(hermitian_radial(p, c.da, c.dd))
    }
}

impl MetricField for ProfileMetric {
    fn dim(&self) -> usize {
        2 * self.profile.m
    }

    fn metric(&self, p: &[f64]) -> Result<Mat> {
        if p.len() != self.dim() {
            return Err(GeomError::InvalidInput("point dimension mismatch".into()));
        }
        let s2: f64 = p.iter().map(|v| v * v).sum();
        if let Some(r) = self.chart_radius() {
            if !(norm(p) < r * (1.0 - crate::model::EPS_BOUNDARY)) {
                return Err(GeomError::Domain("point outside the chart".into()));
            }
        }
        let c = self.profile.chart_coefficients(s2)?;
        Ok(hermitian_radial(p, c.a, c.d))
    }

    fn chart_radius(&self) -> Option<f64> {
        match self.profile.kind {
            ProfileKind::Ch | ProfileKind::Custom => Some(1.0),
            ProfileKind::Flat | ProfileKind::Fs => None,
        }
    }
}

pub fn metric_of_profile(profile: &MomentumProfile, p: &crate::model::BallPoint) -> Result<crate::model::MetricValue> {
    Ok(crate::model::MetricValue { g: ProfileMetric::new(profile.clone()).metric(p.coords())? })
}

/// `α(x)` for a bump spec.
pub fn alpha_of_x(spec: &BumpSpec, m: usize, x: f64) -> f64 {
    AlphaSpec::Bump(spec.clone()).value(m, x)
}

const SMALL_X: f64 = 1e-6;

/// The scalar curvature expression of the profile,
/// `2m(m−1)/x − ∂ₓₓ(x^{m−1}Θ)/x^{m−1}`, with its limit at the origin.
/// This is half the Riemannian scalar curvature.
pub fn scal_display(profile: &MomentumProfile, x: f64) -> Result<f64> {
    let m = profile.m as f64;
    if !(x >= 0.0) || x > profile.x_max() {
        return Err(GeomError::Domain("x outside the profile domain".into()));
    }
    if x < SMALL_X {
        let (t2, t3) = profile.jet_at_zero();
        return Ok(-m * (m + 1.0) * t2 / 2.0 - (m + 1.0) * (m + 2.0) * t3 * x / 6.0);
    }
    let [t, t1, t2] = profile.derivs(x);
    Ok(2.0 * m * (m - 1.0) / x - (m - 1.0) * (m - 2.0) * t / (x * x) - 2.0 * (m - 1.0) * t1 / x - t2)
}

/// Riemannian scalar curvature of `g_Θ` at moment `x`.
pub fn scal_profile(profile: &MomentumProfile, x: f64) -> Result<f64> {
    Ok(2.0 * scal_display(profile, x)?)
}

/// `s_Θ − s_{Θ₀}` in the display normalization, computed without
/// cancellation: `∂ₓₓ(x^{m−1}α)/x^{m−1}`.
pub fn scal_excess(profile: &MomentumProfile, x: f64) -> f64 {
    if profile.kind != ProfileKind::Custom || x <= 0.0 {
        return 0.0;
    }
    let m = profile.m as f64;
    let [a, a1, a2] = profile.alpha3(x);
    (m - 1.0) * (m - 2.0) * a / (x * x) + 2.0 * (m - 1.0) * a1 / x + a2
}

/// `n` points log-spaced on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n.max(2) - 1) as f64).exp()).collect()
}

/// Smallest sampled value of some quantity and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMin {
    pub min: f64,
    pub at: f64,
    /// Largest sampled value, to see that the inequality is strict somewhere.
    pub max: f64,
}

fn grid_min(grid: &[f64], mut f: impl FnMut(f64) -> f64) -> GridMin {
    let mut out = GridMin { min: f64::INFINITY, at: f64::NAN, max: f64::NEG_INFINITY };
    for &x in grid {
        let v = f(x);
        if v < out.min || v.is_nan() {
            out.min = v;
            out.at = x;
        }
        out.max = out.max.max(v);
    }
    out
}

/// `s_Θ − s_{Θ₀}` over a grid.
pub fn scal_excess_sweep(profile: &MomentumProfile, grid: &[f64]) -> GridMin {
    grid_min(grid, |x| scal_excess(profile, x))
}

/// Second differences of `x ↦ x^{m−1}α(x)` with step `x/100`, divided by
/// the step squared. Convexity makes every one of them non-negative.
pub fn convexity_sweep(profile: &MomentumProfile, grid: &[f64]) -> GridMin {
    let m = profile.m as f64;
    let f = |x: f64| match &profile.alpha {
        Some(a) => x.powf(m - 1.0) * a.value(profile.m, x),
        None => 0.0,
    };
    grid_min(grid, |x| {
        let h = 1e-2 * x;
        (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayQuantity {
    /// `tr_{g₀}(g − g₀)`.
    Trace,
    /// `|g − g₀|_{g₀}`.
    Norm,
}

#[derive(Debug, Clone)]
pub struct DecayFit {
    /// `a` in `|q| ≈ C e^{−a r}`.
    pub exponent: f64,
    pub log_prefactor: f64,
    /// RMS residual of the log-linear fit.
    pub residual: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Evaluates the chosen decay quantity at model distance `r` along `e₁`.
pub fn decay_quantity(metric: &ProfileMetric, q: DecayQuantity, r: f64) -> Result<f64> {
    let m = metric.profile.m;
    let s = r.tanh();
    let s2 = s * s;
    let c = metric.profile.chart_coefficients(s2)?;
    // in the radial complex line both g₀ and the deviation act by scalars
    let a0 = 1.0 / (1.0 - s2);
    let rad0 = a0 + a0 * a0 * s2;
    let drad = c.da + c.dd * s2;
    let (ta, tr) = (c.da / a0, drad / rad0);
    Ok(match q {
        DecayQuantity::Trace => (2 * m - 2) as f64 * ta + 2.0 * tr,
        DecayQuantity::Norm => ((2 * m - 2) as f64 * ta * ta + 2.0 * tr * tr).sqrt(),
    })
}

/// Least-squares fit of `ln|q(r)|` against `r`.
pub fn decay_fit(metric: &ProfileMetric, q: DecayQuantity, radii: &[f64]) -> Result<DecayFit> {
    if radii.len() < 2 {
        return Err(GeomError::InvalidInput("need at least two radii".into()));
    }
    let mut samples = Vec::with_capacity(radii.len());
    for &r in radii {
        samples.push((r, decay_quantity(metric, q, r)?));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|(r, v)| (*r, v.abs().ln())).collect();
    if pts.iter().any(|(_, l)| !l.is_finite()) {
        return Err(GeomError::Profile("decay quantity vanishes".into()));
    }
    let n = pts.len() as f64;
    let mr = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mr) * (p.0 - mr)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mr) * (p.1 - ml)).sum();
    let slope = sxy / sxx;
    let icpt = ml - slope * mr;
    let residual = (pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(DecayFit { exponent: -slope, log_prefactor: icpt, residual, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{metric_ch, BallPoint};

    #[test]
    fn model_values() {
        assert_eq!(theta_model(ProfileKind::Flat, 2).unwrap().value(3.0), 6.0);
        assert_eq!(theta_model(ProfileKind::Ch, 2).unwrap().value(1.0), 4.0);
        assert_eq!(theta_model(ProfileKind::Fs, 2).unwrap().value(1.0), 0.0);
    }

    #[test]
    fn bump_normalized() {
        let b = BumpSpec::default();
        assert!(b.unit_integral_defect().unwrap() < 1e-12);
        assert!((b.first_moment - 1.5).abs() < 1e-12, "symmetric bump");
        assert!(BumpSpec::new(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn alpha_tail_closed() {
        let b = BumpSpec::default();
        let v = alpha_of_x(&b, 2, 10.0);
        assert!((v - (10.0 - b.first_moment) / 10.0).abs() < 1e-14);
        assert_eq!(alpha_of_x(&b, 3, 0.7), 0.0);
    }

    #[test]
    fn ch_two_paths() {
        let prof = theta_model(ProfileKind::Ch, 2).unwrap();
        let pm = ProfileMetric::new(prof);
        let p = [0.3, -0.2, 0.5, 0.1];
        let g = pm.metric(&p).unwrap();
        let g0 = metric_ch(&BallPoint::new(p.to_vec()).unwrap()).unwrap().g;
        assert!((g - g0).amax() < 1e-14);
    }

    #[test]
    fn ch_scalar() {
        let prof = theta_model(ProfileKind::Ch, 2).unwrap();
        for x in [1e-8, 0.3, 5.0, 1e3] {
            assert!((scal_profile(&prof, x).unwrap() + 24.0).abs() < 1e-9);
        }
    }

    #[test]
    fn custom_gauge_consistent() {
        let prof = theta_custom(AlphaSpec::Bump(BumpSpec::default()), 2).unwrap();
        // x recovered from s must satisfy t(x) = ln s
        for s2 in [0.1, 0.5, 0.8, 0.99, 0.999999] {
            let c = prof.chart_coefficients(s2).unwrap();
            let t = -0.5 * (1.0 / c.x).ln_1p() - prof.gauge_offset(c.x).unwrap();
            assert!((t - 0.5 * s2.ln()).abs() < 1e-13, "{s2}");
        }
    }
}
