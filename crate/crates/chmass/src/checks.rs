//! Individual checks. Each one calls into the core and compares the result
//! with a tolerance from the config; nothing here computes geometry itself.

use chmass_core::ambient::{ambient_basis, omega, pu_action, theta_z, AmbientForm, PseudoUnitary};
use chmass_core::connection::{curvature_e, h_gram, parallel_space_dim, ChConnection, Lasso, RhConnection};
use chmass_core::extrapolate::Convergence;
use chmass_core::killing::{
    all_labels, beta_of_label, family_gram_rank, killing_family, killing_family_parts, killing_residual, killing_residual_field, lemma_checks, norm_closed_form,
    perturbed_family, q_map, KillingFamilyLabel, LemmaReport,
};
use chmass_core::linalg::inertia;
use chmass_core::mass::{display_gap_at, mass_functional, mass_table, rh_mass, Executor, MassOptions, MassReport, ModelMetric, Pullback, RadialPerturbationRh};
use chmass_core::model::{metric_ch, BallPoint, ComplexHyperbolic, FubiniStudy, MetricField, RealHyperbolic};
use chmass_core::profile::{
    convexity_sweep, decay_fit, log_grid, metric_of_profile, scal_excess_sweep, theta_custom, theta_model, AlphaSpec, DecayQuantity, MomentumProfile, ProfileKind,
    ProfileMetric,
};
use chmass_core::{GeomError, Result};

use crate::config::ExperimentConfig;
use crate::report::{Check, MassRow, Sample};
use crate::sampling::{ball_point, direction, stream};

// sweep identifiers, one random stream each
const S_FLAT: u64 = 1;
const S_WRONG: u64 = 2;
const S_FS: u64 = 3;
const S_BLOCK: u64 = 4;
const S_SIGNATURE: u64 = 5;
const S_LOOPS: u64 = 6;
const S_KILLING: u64 = 7;
const S_CONTROL: u64 = 8;
const S_NORM: u64 = 9;
const S_LEMMA: u64 = 10;
const S_Q: u64 = 11;
const S_RANK: u64 = 12;
const S_TWO_PATH: u64 = 13;
const S_DISPLAY: u64 = 14;

fn or_error(name: &str, r: Result<Check>) -> Check {
    r.unwrap_or_else(|e| Check::errored(name, e))
}

/// Running maximum with the input that produced it.
struct Worst {
    value: f64,
    at: Sample,
}

impl Worst {
    fn new() -> Self {
        Self { value: f64::NEG_INFINITY, at: Sample::default() }
    }

    fn offer(&mut self, v: f64, at: impl FnOnce() -> Sample) {
        if v > self.value || v.is_nan() {
            self.value = v;
            self.at = at();
        }
    }
}

fn point_sample(label: Option<String>, p: &[f64], x: Option<&[f64]>, y: Option<&[f64]>, value: f64) -> Sample {
    Sample { label, point: Some(p.to_vec()), direction: x.map(<[f64]>::to_vec), second_direction: y.map(<[f64]>::to_vec), value: Some(value) }
}

/// Largest curvature entry of `∇^CH(c)` over random (point, plane) samples.
fn curvature_max<F: MetricField>(field: &F, c: f64, cfg: &ExperimentConfig, samples: usize, sweep: u64) -> Result<Worst> {
    let n = field.dim();
    let mut rng = stream(cfg.seed, sweep);
    let mut w = Worst::new();
    let mut done = 0;
    let mut attempts = 0;
    while done < samples {
        attempts += 1;
        if attempts > 10 * samples {
            return Err(GeomError::DegeneratePlane);
        }
        let p = ball_point(&mut rng, n, cfg.sample_radius);
        let x = direction(&mut rng, n);
        let y = direction(&mut rng, n);
        match curvature_e(c, field, &p, &x, &y) {
            Ok(e) => {
                let v = e.max_abs();
                w.offer(v, || point_sample(None, &p, Some(&x), Some(&y), v));
                done += 1;
            }
            Err(GeomError::DegeneratePlane) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(w)
}

pub fn curvature_sweep(cfg: &ExperimentConfig) -> Check {
    let name = "curvature_sweep";
    or_error(name, (|| {
        let w = curvature_max(&ComplexHyperbolic { m: cfg.m }, cfg.connection.c, cfg, cfg.samples, S_FLAT)?;
        Ok(Check::at_most(name, w.value, cfg.tolerances.flat).detail(format!("c = {}, {} samples", cfg.connection.c, cfg.samples)).at(w.at))
    })())
}

/// The curved sign on the model must show up as curvature.
pub fn wrong_sign_control(cfg: &ExperimentConfig) -> Check {
    let name = "wrong_sign_control";
    or_error(name, (|| {
        let w = curvature_max(&ComplexHyperbolic { m: cfg.m }, 1.0, cfg, 5, S_WRONG)?;
        Ok(Check::at_least(name, w.value, cfg.tolerances.control).control().detail("c = +1 on the complex hyperbolic ball").at(w.at))
    })())
}

/// `c = +1` is the flat member of the family on Fubini–Study.
pub fn fubini_study_flat(cfg: &ExperimentConfig) -> Check {
    let name = "fubini_study_flat";
    or_error(name, (|| {
        let w = curvature_max(&FubiniStudy { m: cfg.m }, 1.0, cfg, 5, S_FS)?;
        Ok(Check::at_most(name, w.value, cfg.tolerances.flat).detail("c = +1").at(w.at))
    })())
}

/// Finite-difference curvature against the block formula built from the
/// Riemann tensor, on the curved sign where both are non-trivial.
pub fn block_formula(cfg: &ExperimentConfig) -> Check {
    let name = "block_formula";
    or_error(name, (|| {
        let n = 2 * cfg.m;
        let mut rng = stream(cfg.seed, S_BLOCK);
        let mut w = Worst::new();
        for _ in 0..3 {
            let p = ball_point(&mut rng, n, cfg.sample_radius);
            let x = direction(&mut rng, n);
            let y = direction(&mut rng, n);
            let v = curvature_e(1.0, &ComplexHyperbolic { m: cfg.m }, &p, &x, &y)?.relative_gap(1.0);
            w.offer(v, || point_sample(None, &p, Some(&x), Some(&y), v));
        }
        Ok(Check::at_most(name, w.value, cfg.tolerances.block_formula).at(w.at))
    })())
}

pub fn signature(cfg: &ExperimentConfig) -> Check {
    let name = "signature";
    or_error(name, (|| {
        let m = cfg.m;
        let p = ball_point(&mut stream(cfg.seed, S_SIGNATURE), 2 * m, cfg.sample_radius);
        let g = ComplexHyperbolic { m }.metric(&p)?;
        let (pos, neg, zero) = inertia(&h_gram(&g)?, 1e-10);
        let miss = pos.abs_diff(m * m + 1) + neg.abs_diff(2 * m) + zero;
        Ok(Check::equal(name, miss as f64, 0.0)
            .detail(format!("inertia ({pos}, {neg}, {zero}), expected ({}, {}, 0)", m * m + 1, 2 * m))
            .at(point_sample(None, &p, None, None, miss as f64)))
    })())
}

fn lassos(cfg: &ExperimentConfig, n: usize) -> Vec<Lasso> {
    let mut rng = stream(cfg.seed, S_LOOPS);
    let r = cfg.holonomy.loop_radius;
    (0..cfg.holonomy.loops)
        .map(|_| Lasso {
            base: vec![0.0; n],
            center: ball_point(&mut rng, n, 0.5),
            x: direction(&mut rng, n).into_iter().map(|v| v * r).collect(),
            y: direction(&mut rng, n).into_iter().map(|v| v * r).collect(),
        })
        .collect()
}

pub fn holonomy_dimension(cfg: &ExperimentConfig) -> Check {
    let name = "holonomy_dimension";
    or_error(name, (|| {
        let m = cfg.m;
        let conn = ChConnection::new(ComplexHyperbolic { m }, cfg.connection.c);
        let ps = parallel_space_dim(&conn, &lassos(cfg, 2 * m), cfg.tolerances.holonomy_rank)?;
        let mut c = Check::equal(name, ps.dim as f64, ((m + 1) * (m + 1)) as f64).detail(format!("{} loops, rank threshold {}", cfg.holonomy.loops, cfg.tolerances.holonomy_rank));
        if ps.flagged {
            c.passed = false;
            c.detail.push_str("; a transport left the chart");
        }
        Ok(c)
    })())
}

pub fn rh_holonomy_dimension(cfg: &ExperimentConfig) -> Check {
    let name = "rh_holonomy_dimension";
    or_error(name, (|| {
        let n = 2 * cfg.m;
        let conn = RhConnection { field: RealHyperbolic { n } };
        let ps = parallel_space_dim(&conn, &lassos(cfg, n), cfg.tolerances.holonomy_rank)?;
        Ok(Check::equal(name, ps.dim as f64, (n + 1) as f64).detail(format!("real hyperbolic, n = {n}")))
    })())
}

pub fn labels(cfg: &ExperimentConfig) -> Vec<KillingFamilyLabel> {
    all_labels(cfg.m)
}

pub fn killing_sweep(cfg: &ExperimentConfig) -> Check {
    let name = "killing_residual";
    or_error(name, (|| {
        let n = 2 * cfg.m;
        let mut rng = stream(cfg.seed, S_KILLING);
        let mut w = Worst::new();
        let labs = labels(cfg);
        for lab in &labs {
            for _ in 0..cfg.samples {
                let p = ball_point(&mut rng, n, cfg.sample_radius);
                let x = direction(&mut rng, n);
                let v = killing_residual(lab, &p, &x)?.relative;
                w.offer(v, || point_sample(Some(lab.id()), &p, Some(&x), None, v));
            }
        }
        Ok(Check::at_most(name, w.value, cfg.tolerances.killing).detail(format!("{} families x {} points", labs.len(), cfg.samples)).at(w.at))
    })())
}

/// A localized bump added to a family member must be caught.
pub fn perturbed_control(cfg: &ExperimentConfig) -> Check {
    let name = "perturbed_control";
    or_error(name, (|| {
        let n = 2 * cfg.m;
        let lab = &labels(cfg)[0];
        let mut rng = stream(cfg.seed, S_CONTROL);
        let p = ball_point(&mut rng, n, 0.5);
        let mut x = vec![0.0; n];
        x[0] = 1.0;
        let center: Vec<f64> = p.iter().zip(&x).map(|(a, b)| a + 0.1 * b).collect();
        let mut f = perturbed_family(lab, &center, 0.01, 0.2);
        let v = killing_residual_field(cfg.m, &mut f, &p, &x)?.relative;
        Ok(Check::at_least(name, v, cfg.tolerances.control).control().detail("bump of size 0.01, width 0.2").at(point_sample(Some(lab.id()), &p, Some(&x), None, v)))
    })())
}

pub fn norm_identities(cfg: &ExperimentConfig) -> Check {
    let name = "norm_identities";
    or_error(name, (|| {
        let n = 2 * cfg.m;
        let mut rng = stream(cfg.seed, S_NORM);
        let mut w = Worst::new();
        for _ in 0..cfg.norm_samples {
            let p = ball_point(&mut rng, n, 0.95);
            for lab in labels(cfg) {
                let (lo, hi) = killing_family_parts(&lab, &p)?;
                let (a, b) = norm_closed_form(&lab, &p);
                let v = ((lo.norm2() - a).abs() + (hi.norm2() - b).abs()) / (a + b).max(1.0);
                w.offer(v, || point_sample(Some(lab.id()), &p, None, None, v));
            }
        }
        Ok(Check::at_most(name, w.value, cfg.tolerances.norm).detail(format!("{} points, radius <= 0.95", cfg.norm_samples)).at(w.at))
    })())
}

/// Pairings of the explicit ambient forms.
pub fn beta_pairings(cfg: &ExperimentConfig) -> Vec<Check> {
    let m = cfg.m;
    let om = omega(m);
    let mut norm = Worst::new();
    let mut with_omega = Worst::new();
    for lab in labels(cfg) {
        let b = beta_of_label(&lab, m);
        let v = (b.pair(&b) - (m as f64 + 1.0)).abs();
        norm.offer(v, || Sample { label: Some(lab.id()), value: Some(b.pair(&b)), ..Default::default() });
        let w = b.pair(&om);
        let dev = if m % 2 == 0 { (w.abs() - 1.0).abs() } else { w.abs() };
        with_omega.offer(dev, || Sample { label: Some(lab.id()), value: Some(w), ..Default::default() });
    }
    let tol = cfg.tolerances.q_map;
    vec![
        Check::at_most("beta_norm", norm.value, tol).detail(format!("<beta, beta> = {}", m + 1)).at(norm.at),
        if m % 2 == 0 {
            Check::at_most("beta_omega", with_omega.value, tol).detail("|<beta, omega>| = 1").at(with_omega.at)
        } else {
            Check::at_most("beta_primitive", with_omega.value, tol).detail("<beta, omega> = 0").at(with_omega.at)
        },
    ]
}

fn sample_pairs(cfg: &ExperimentConfig, count: usize, sweep: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = 2 * cfg.m;
    let mut rng = stream(cfg.seed, sweep);
    (0..count).map(|_| (ball_point(&mut rng, n, cfg.sample_radius.min(0.7)), direction(&mut rng, n))).collect()
}

/// The identities behind the construction of `Q(φ)`, and the parallelism of
/// its output.
pub fn lemma(cfg: &ExperimentConfig) -> Vec<Check> {
    let labs = labels(cfg);
    let pts = sample_pairs(cfg, 3, S_LEMMA);
    match lemma_checks(&labs, &pts) {
        Ok(LemmaReport { der1, trucs_sum, trucs_j, algxi_trace, algxi_alpha, algxi_xi }) => {
            let t = &cfg.tolerances;
            let mut out = vec![
                Check::at_most("spinor_identities", der1.max(trucs_sum).max(trucs_j), t.third_order)
                    .detail(format!("d|phi|^2 {der1:.2e}, sum {trucs_sum:.2e}, J {trucs_j:.2e}")),
                Check::at_most("q_parallel", algxi_alpha.max(algxi_xi), t.third_order).detail(format!("alpha {algxi_alpha:.2e}, xi {algxi_xi:.2e}")),
            ];
            if cfg.m % 2 == 1 {
                out.push(Check::at_most("q_trace", algxi_trace, t.q_map).detail("(xi, Omega) - u"));
            }
            out
        }
        Err(e) => vec![Check::errored("spinor_identities", e)],
    }
}

/// `θ(Q(φ))` against the explicit form and the third-order equation for `|φ|²`.
pub fn q_outputs(cfg: &ExperimentConfig) -> Vec<Check> {
    let m = cfg.m;
    let pts = sample_pairs(cfg, 2, S_Q);
    let mut theta = Worst::new();
    let mut third = Worst::new();
    let field = ComplexHyperbolic { m };
    for lab in labels(cfg) {
        let b = beta_of_label(&lab, m);
        for (p, x) in &pts {
            let r: Result<(f64, f64)> = (|| {
                let got = theta_z(&BallPoint::new(p.clone())?, &q_map(&lab, p)?)?;
                let mut u = |q: &[f64]| killing_family(&lab, q).map(|s| s.norm2());
                let res = chmass_core::connection::third_order_residual(&field, &mut u, p, x)?;
                Ok(((got.b - &b.b).amax(), res.residual.amax()))
            })();
            match r {
                Ok((a, c)) => {
                    theta.offer(a, || point_sample(Some(lab.id()), p, None, None, a));
                    third.offer(c, || point_sample(Some(lab.id()), p, Some(x), None, c));
                }
                Err(e) => return vec![Check::errored("q_matches_beta", e)],
            }
        }
    }
    vec![
        Check::at_most("q_matches_beta", theta.value, cfg.tolerances.q_map).at(theta.at),
        Check::at_most("third_order", third.value, cfg.tolerances.third_order).detail("u = |phi|^2").at(third.at),
    ]
}

pub fn family_rank(cfg: &ExperimentConfig) -> Check {
    let name = "family_rank";
    or_error(name, (|| {
        let labs = labels(cfg);
        let mut rng = stream(cfg.seed, S_RANK);
        let pts: Vec<Vec<f64>> = (0..8).map(|_| ball_point(&mut rng, 2 * cfg.m, cfg.sample_radius)).collect();
        let r = family_gram_rank(&labs, &pts, 1e-10)?;
        Ok(Check::equal(name, r as f64, labs.len() as f64))
    })())
}

pub fn mass_options(cfg: &ExperimentConfig) -> MassOptions {
    let n = cfg.nodes();
    MassOptions { radii: cfg.mass.radii.clone(), polar_nodes: n, torus_nodes: n, noise_tol: cfg.tolerances.fit_residual }
}

fn equivariance_options(cfg: &ExperimentConfig) -> MassOptions {
    let n = cfg.equivariance_nodes();
    MassOptions { radii: cfg.mass.equivariance_radii.clone(), polar_nodes: n, torus_nodes: n, noise_tol: cfg.tolerances.fit_residual }
}

pub fn appendix_profile(cfg: &ExperimentConfig) -> Result<MomentumProfile> {
    let spec = cfg.bump_spec().map_err(|e| GeomError::Profile(e.0))?;
    theta_custom(AlphaSpec::Bump(spec), cfg.m)
}

/// The forms of the explicit Killing families.
pub fn family_forms(cfg: &ExperimentConfig) -> Vec<(String, AmbientForm)> {
    labels(cfg).iter().map(|l| (l.id(), beta_of_label(l, cfg.m))).collect()
}

pub fn basis_forms(m: usize) -> Vec<(String, AmbientForm)> {
    ambient_basis(m).into_iter().enumerate().map(|(i, b)| (format!("e{i}"), AmbientForm { b })).collect()
}

pub fn mass_rows(prefix: &str, reports: &[MassReport]) -> Vec<MassRow> {
    let mut out = Vec::new();
    for r in reports {
        for (radius, value) in r.radii.iter().zip(&r.values) {
            out.push(MassRow {
                beta_id: format!("{prefix}:{}", r.beta_id),
                r: *radius,
                value: *value,
                est_limit: r.limit(),
                kappa: r.fit.kappa,
                flag: r.flag().as_str().into(),
            });
        }
    }
    out
}

/// Output of the mass experiments: checks, CSV rows and the functional.
#[derive(Debug, Default)]
pub struct MassOutcome {
    pub checks: Vec<Check>,
    pub rows: Vec<MassRow>,
    pub functional: Vec<(String, f64)>,
}

pub fn model_mass<E: Executor>(cfg: &ExperimentConfig, exec: &E, out: &mut MassOutcome) {
    let name = "model_zero";
    let model = match theta_model(ProfileKind::Ch, cfg.m) {
        Ok(p) => ProfileMetric::new(p),
        Err(e) => return out.checks.push(Check::errored(name, e)),
    };
    let forms = basis_forms(cfg.m);
    let opts = mass_options(cfg);
    let r: Result<(Vec<MassReport>, Vec<MassReport>)> = (|| {
        let direct = mass_functional(&model, &forms, &opts, exec)?.reports;
        let pulled = mass_functional(&Pullback { inner: &model, map: pullback_isometry(cfg) }, &forms, &opts, exec)?.reports;
        Ok((direct, pulled))
    })();
    match r {
        Ok((direct, pulled)) => {
            let mut w = Worst::new();
            for r in direct.iter().chain(&pulled) {
                let v = r.limit().abs();
                w.offer(v, || Sample { label: Some(r.beta_id.clone()), value: Some(r.limit()), ..Default::default() });
            }
            out.checks.push(Check::at_most(name, w.value, cfg.tolerances.mass).detail(format!("{} basis forms, direct and pulled back", direct.len())).at(w.at));
            out.rows.extend(mass_rows("model", &direct));
            out.rows.extend(mass_rows("model-pullback", &pulled));
        }
        Err(e) => out.checks.push(Check::errored(name, e)),
    }
}

/// Finiteness, fit quality, sign and the two displays on the explicit forms.
pub fn appendix_mass<E: Executor>(cfg: &ExperimentConfig, exec: &E, out: &mut MassOutcome) {
    let r: Result<Vec<MassReport>> = appendix_profile(cfg).and_then(|p| mass_table(&ProfileMetric::new(p), &family_forms(cfg), &mass_options(cfg), exec));
    let reports = match r {
        Ok(r) => r,
        Err(e) => return out.checks.push(Check::errored("mass_finite", e)),
    };
    let t = &cfg.tolerances;
    let mut fit = Worst::new();
    let mut not_finite = Vec::new();
    let mut neg = Worst::new();
    let mut gap = Worst::new();
    for r in &reports {
        let v = r.fit.rel_residual;
        fit.offer(v, || Sample { label: Some(r.beta_id.clone()), value: Some(r.limit()), ..Default::default() });
        if r.flag() != Convergence::Finite || !r.limit().is_finite() {
            not_finite.push(format!("{} {}", r.beta_id, r.flag().as_str()));
        }
        // negative margin in units of the pre-cancellation scale
        let s = r.scale().max(f64::MIN_POSITIVE);
        let v = -r.limit() / s;
        neg.offer(v, || Sample { label: Some(r.beta_id.clone()), value: Some(r.limit()), ..Default::default() });
        let g = r.display_gap() / s.max(1.0);
        gap.offer(g, || Sample { label: Some(r.beta_id.clone()), value: Some(r.display_gap()), ..Default::default() });
        out.functional.push((r.beta_id.clone(), r.limit()));
    }
    let mut fc = Check::at_most("mass_finite", fit.value, t.fit_residual).at(fit.at);
    if !not_finite.is_empty() {
        fc.passed = false;
        fc.detail = format!("not finite: {}", not_finite.join(", "));
    } else {
        fc.detail = format!("{} forms, all finite; measured is the largest relative fit residual", reports.len());
    }
    out.checks.push(fc);
    out.checks.push(Check::at_most("mass_nonnegative", neg.value, t.mass).detail("largest -mu/scale").at(neg.at));
    out.checks.push(Check::at_most("mass_displays", gap.value, t.display).detail("main vs intro display, relative to scale").at(gap.at));
    out.rows.extend(mass_rows("appendix", &reports));
}

/// The element of `U(m,1)` used for the pullback experiment: a boost in the
/// first coordinate plane after a diagonal phase.
pub fn pullback_isometry(cfg: &ExperimentConfig) -> PseudoUnitary {
    let phases: Vec<f64> = (0..=cfg.m).map(|k| 0.1 * (k as f64 + 1.0) * if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
    PseudoUnitary::boost(cfg.m, 0, cfg.mass.boost).compose(&PseudoUnitary::phases(&phases))
}

pub fn equivariance<E: Executor>(cfg: &ExperimentConfig, exec: &E, out: &mut MassOutcome) {
    let name = "equivariance";
    let r: Result<(Vec<MassReport>, Vec<MassReport>)> = (|| {
        let g = ProfileMetric::new(appendix_profile(cfg)?);
        let u = pullback_isometry(cfg);
        let forms = family_forms(cfg);
        let moved: Vec<(String, AmbientForm)> = forms.iter().map(|(id, b)| Ok((id.clone(), pu_action(&u, b)?))).collect::<Result<_>>()?;
        let opts = equivariance_options(cfg);
        let base = mass_table(&g, &forms, &opts, exec)?;
        let pulled = mass_table(&Pullback { inner: &g, map: u }, &moved, &opts, exec)?;
        Ok((base, pulled))
    })();
    match r {
        Ok((base, pulled)) => {
            let top = base.iter().fold(0.0f64, |m, r| m.max(r.limit().abs())).max(f64::MIN_POSITIVE);
            let mut w = Worst::new();
            for (a, b) in base.iter().zip(&pulled) {
                let v = (a.limit() - b.limit()).abs() / top;
                w.offer(v, || Sample { label: Some(a.beta_id.clone()), value: Some(b.limit()), ..Default::default() });
            }
            out.checks.push(Check::at_most(name, w.value, cfg.tolerances.equivariance).detail(format!("boost {} with diagonal phases", cfg.mass.boost)).at(w.at));
            out.rows.extend(mass_rows("equivariance-base", &base));
            out.rows.extend(mass_rows("equivariance-pullback", &pulled));
        }
        Err(e) => out.checks.push(Check::errored(name, e)),
    }
}

/// A profile decaying like `e^{−a r}` with `a = m` must be flagged diverging.
pub fn slow_decay_control<E: Executor>(cfg: &ExperimentConfig, exec: &E, out: &mut MassOutcome) {
    let name = "slow_decay_control";
    let rate = cfg.mass.control_rate.unwrap_or(cfg.m as f64);
    let r: Result<MassReport> = (|| {
        let step = cfg.bump_spec().map_err(|e| GeomError::Profile(e.0))?;
        let g = ProfileMetric::new(theta_custom(AlphaSpec::PowerDecay { eps: cfg.mass.control_eps, rate, step }, cfg.m)?);
        let b = &family_forms(cfg)[0];
        Ok(mass_table(&g, std::slice::from_ref(b), &mass_options(cfg), exec)?.remove(0))
    })();
    match r {
        Ok(rep) => {
            let hit = (rep.flag() == Convergence::Diverging) as u8 as f64;
            out.checks.push(Check::equal(name, hit, 1.0).control().detail(format!("a = {rate}, flag {}", rep.flag().as_str())));
            out.rows.extend(mass_rows("slow-decay", std::slice::from_ref(&rep)));
        }
        Err(e) => out.checks.push(Check::errored(name, e)),
    }
}

/// Real hyperbolic path: zero on the model, sign of a radial perturbation.
pub fn rh_mass_checks<E: Executor>(cfg: &ExperimentConfig, exec: &E, out: &mut MassOutcome) {
    let n = 2 * cfg.m;
    let rate = cfg.mass.rh_rate.unwrap_or(n as f64);
    let mut v = vec![0.0; n + 1];
    v[0] = 1.0;
    let opts = MassOptions { polar_nodes: 8.min(cfg.nodes()), torus_nodes: 8.min(cfg.nodes()), ..mass_options(cfg) };
    match rh_mass(&ModelMetric { dim: n }, "V0", &v, &opts, exec) {
        Ok(r) => out.checks.push(Check::at_most("rh_model_zero", r.limit().abs(), cfg.tolerances.mass)),
        Err(e) => out.checks.push(Check::errored("rh_model_zero", e)),
    }
    let eps = cfg.mass.rh_eps;
    match rh_mass(&RadialPerturbationRh { n, eps, rate }, "V0", &v, &opts, exec) {
        Ok(r) => {
            out.checks.push(
                Check::at_least("rh_sign", r.limit() * eps.signum(), f64::MIN_POSITIVE)
                    .detail(format!("eps = {eps}, rate {rate}, limit {:.6e}", r.limit())),
            );
            out.rows.extend(mass_rows("rh", std::slice::from_ref(&r)));
        }
        Err(e) => out.checks.push(Check::errored("rh_sign", e)),
    }
}

pub fn origin_smoothness(cfg: &ExperimentConfig) -> Check {
    let name = "origin_smoothness";
    or_error(name, (|| {
        let [t, t1, _] = appendix_profile(cfg)?.derivs(0.0);
        Ok(Check::at_most(name, t.abs().max((t1 - 2.0).abs()), 1e-10).detail("Theta(0) = 0, Theta'(0) = 2"))
    })())
}

pub fn scal_grid() -> Vec<f64> {
    log_grid(1e-3, 1e5, 400)
}

pub fn scal_checks(cfg: &ExperimentConfig) -> Vec<Check> {
    let prof = match appendix_profile(cfg) {
        Ok(p) => p,
        Err(e) => return vec![Check::errored("scal_monotone", e)],
    };
    let grid = scal_grid();
    let s = scal_excess_sweep(&prof, &grid);
    let c = convexity_sweep(&prof, &grid);
    let at = |x: f64, v: f64| Sample { point: Some(vec![x]), value: Some(v), ..Default::default() };
    vec![
        Check::at_least("scal_monotone", s.min, -cfg.tolerances.scal).detail("min of s_Theta - s_Theta0 on [1e-3, 1e5]").at(at(s.at, s.min)),
        Check::at_least("scal_strict", s.max, f64::MIN_POSITIVE).detail("s_Theta > s_Theta0 somewhere"),
        Check::at_least("convexity", c.min, -cfg.tolerances.scal).detail("second differences of x^(m-1) alpha").at(at(c.at, c.min)),
    ]
}

/// Decay radii for the exponent fits.
pub fn decay_radii() -> Vec<f64> {
    (0..8).map(|i| 3.0 + 0.5 * i as f64).collect()
}

pub fn decay_checks(cfg: &ExperimentConfig) -> Vec<Check> {
    let r: Result<Vec<Check>> = (|| {
        let metric = ProfileMetric::new(appendix_profile(cfg)?);
        let want = (2 * cfg.m) as f64;
        let tr = decay_fit(&metric, DecayQuantity::Trace, &decay_radii())?;
        let nm = decay_fit(&metric, DecayQuantity::Norm, &decay_radii())?;
        Ok(vec![
            Check::at_most("decay_trace_fit", (tr.exponent / want - 1.0).abs(), cfg.tolerances.decay)
                .detail(format!("trace exponent {:.4} vs 2m = {want}", tr.exponent))
                .at(Sample { value: Some(tr.exponent), ..Default::default() }),
            Check::at_most("decay_norm_fit", (nm.exponent / want - 1.0).abs(), cfg.tolerances.decay)
                .detail(format!("norm exponent {:.4} vs 2m = {want}", nm.exponent))
                .at(Sample { value: Some(nm.exponent), ..Default::default() }),
        ])
    })();
    r.unwrap_or_else(|e| vec![Check::errored("decay_trace_fit", e)])
}

pub fn two_path(cfg: &ExperimentConfig) -> Check {
    let name = "two_path";
    or_error(name, (|| {
        let n = 2 * cfg.m;
        let prof = theta_model(ProfileKind::Ch, cfg.m)?;
        let mut rng = stream(cfg.seed, S_TWO_PATH);
        let mut w = Worst::new();
        for _ in 0..cfg.samples {
            let p = BallPoint::new(ball_point(&mut rng, n, 0.95))?;
            let a = metric_of_profile(&prof, &p)?.g;
            let b = metric_ch(&p)?.g;
            let v = (&a - &b).amax() / b.amax();
            w.offer(v, || point_sample(None, p.coords(), None, None, v));
        }
        Ok(Check::at_most(name, w.value, cfg.tolerances.two_path).detail("profile path vs closed form, relative").at(w.at))
    })())
}

/// `Jα = −du` on random forms and points.
pub fn display_identity(cfg: &ExperimentConfig) -> Check {
    let name = "display_identity";
    or_error(name, (|| {
        let n = 2 * cfg.m;
        let k = ambient_basis(cfg.m).len();
        let mut rng = stream(cfg.seed, S_DISPLAY);
        let mut w = Worst::new();
        for _ in 0..cfg.samples {
            let c = ball_point(&mut rng, k, 1.0);
            let b = AmbientForm::from_coords(cfg.m, &c);
            let p = ball_point(&mut rng, n, 0.95);
            let (gap, scale) = display_gap_at(&b, &p)?;
            let v = gap / scale.max(1.0);
            w.offer(v, || point_sample(None, &p, None, None, v));
        }
        Ok(Check::at_most(name, w.value, cfg.tolerances.display).at(w.at))
    })())
}
