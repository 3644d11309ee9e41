//! Kählerian Killing spinors of complex hyperbolic space and their image
//! in the parallel sections of `E`.
//!
//! A section `f ⊗ dw^p` with `f` a `(0,k)`-form is written in the unitary
//! frame obtained by Gram–Schmidt: the coefficient of `ε_L` is
//! `2^{|L|}` times the coefficient of `θ̄_L` in `f`, times
//! `(conj(det C)·2^{m/2})^p` where `dw̄_j = Σ_k C_{jk} θ̄_k`.
//! Here `p = ½` for odd `m` and `p = l/(2l+1)` for even `m = 2l`.

use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Float;

use crate::ambient::{beta_explicit, complement, AmbientForm};
use crate::connection::{nabla_ch, SectionE};
use crate::fd::{self, Stencil};
use crate::linalg::{complex_structure, j_covector, Mat, Vector};
use crate::model::{christoffel, ComplexHyperbolic, MetricField};
use crate::spinor::{clifford_components, frame_clifford, grade, tilde, CMat, Spinor, UnitaryFrame};
use crate::{GeomError, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(m: usize) -> Self {
        if m % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyKind {
    Plain,
    Breve,
}

/// Family, parity and 0-based multi-index of one Killing spinor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KillingFamilyLabel {
    pub parity: Parity,
    pub kind: FamilyKind,
    pub index: Vec<usize>,
}

/// `l` with `m = 2l − 1` (odd) or `m = 2l` (even).
pub fn half_index(m: usize) -> usize {
    match Parity::of(m) {
        Parity::Odd => (m + 1) / 2,
        Parity::Even => m / 2,
    }
}

impl KillingFamilyLabel {
    pub fn validate(&self, m: usize) -> Result<()> {
        if m < 1 {
            return Err(GeomError::InvalidInput("m must be positive".into()));
        }
        if Parity::of(m) != self.parity {
            return Err(GeomError::InvalidInput("label parity does not match m".into()));
        }
        let l = half_index(m);
        let want = match self.kind {
            FamilyKind::Plain => l - 1,
            FamilyKind::Breve => l,
        };
        if self.index.len() != want {
            return Err(GeomError::InvalidInput(alloc::format!("multi-index must have length {want}")));
        }
        if self.index.windows(2).any(|w| w[0] >= w[1]) || self.index.iter().any(|&k| k >= m) {
            return Err(GeomError::InvalidInput("multi-index must be strictly increasing and below m".into()));
        }
        Ok(())
    }

    pub fn mask(&self) -> usize {
        self.index.iter().fold(0, |acc, k| acc | (1 << k))
    }

    /// Short identifier such as `plain[0]` or `breve[0,2]` (1-based indices).
    pub fn id(&self) -> alloc::string::String {
        let kind = match self.kind {
            FamilyKind::Plain => "plain",
            FamilyKind::Breve => "breve",
        };
        let idx: Vec<alloc::string::String> = self.index.iter().map(|k| alloc::format!("{}", k + 1)).collect();
        alloc::format!("{kind}[{}]", idx.join(","))
    }
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0usize..(1 << m) {
        if grade(mask) == k {
            out.push((0..m).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>());
        }
    }
    out.sort();
    out
}

/// All labels for `m`, plain before breve, indices in lexicographic order.
pub fn all_labels(m: usize) -> Vec<KillingFamilyLabel> {
    let parity = Parity::of(m);
    let l = half_index(m);
    let mut out = Vec::new();
    for index in combinations(m, l - 1) {
        out.push(KillingFamilyLabel { parity, kind: FamilyKind::Plain, index });
    }
    for index in combinations(m, l) {
        out.push(KillingFamilyLabel { parity, kind: FamilyKind::Breve, index });
    }
    out
}

/// `c(l)`.
pub fn normalization(parity: Parity, l: usize) -> f64 {
    let l = l as f64;
    match parity {
        Parity::Odd => 2f64.sqrt().powf(2.5 - 3.0 * l),
        Parity::Even => 2f64.powf(1.0 - l - l * l / (2.0 * l + 1.0)),
    }
}

/// Exponent `p` of `dw` in the line factor.
pub fn weight_exponent(parity: Parity, l: usize) -> f64 {
    match parity {
        Parity::Odd => 0.5,
        Parity::Even => l as f64 / (2.0 * l as f64 + 1.0),
    }
}

/// An antiholomorphic form `Σ f_L dw̄_L`, indexed by bitmask.
pub type AntiForm = Vec<Complex64>;

fn mask_sign(mask: usize, k: usize) -> f64 {
    if (mask & ((1 << k) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(Σ a_k dw̄_k) ∧ f`.
pub fn wedge_one(a: &[Complex64], f: &AntiForm) -> AntiForm {
    let mut out = alloc::vec![ZERO; f.len()];
    for (mask, c) in f.iter().enumerate() {
        if *c == ZERO {
            continue;
        }
        for (k, ak) in a.iter().enumerate() {
            if mask & (1 << k) == 0 {
                out[mask | (1 << k)] += c * ak * mask_sign(mask, k);
            }
        }
    }
    out
}

/// `ι_{R̄} dw̄_b = Σ_j (−1)^{j−1} w̄_{b_j} dw̄_{b∖b_j}`.
pub fn interior_rbar(w: &[Complex64], b: usize, m: usize) -> AntiForm {
    let mut out = alloc::vec![ZERO; 1 << m];
    for k in 0..m {
        if b & (1 << k) != 0 {
            out[b & !(1 << k)] += w[k].conj() * mask_sign(b, k);
        }
    }
    out
}

/// The two graded pieces of a family member without the `dw^p` factor.
pub fn family_forms(label: &KillingFamilyLabel, w: &[f64]) -> Result<(AntiForm, AntiForm)> {
    let m = w.len() / 2;
    label.validate(m)?;
    let l = half_index(m);
    let c = normalization(label.parity, l);
    let wc: Vec<Complex64> = w.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
    let s2: f64 = w.iter().map(|x| x * x).sum();
    if !(s2 < 1.0) {
        return Err(GeomError::Domain("point outside the ball".into()));
    }
    let d = 1.0 - s2;
    let rbar: Vec<Complex64> = wc.clone(); // Σ w_k dw̄_k
    let lower_scale = c / d.powi(l as i32);
    let upper_scale = Complex64::new(0.0, -0.5) * c; // c/(2i)
    let base = match label.kind {
        FamilyKind::Plain => {
            let mut f = alloc::vec![ZERO; 1 << m];
            f[label.mask()] = ONE;
            f
        }
        FamilyKind::Breve => interior_rbar(&wc, label.mask(), m),
    };
    let lower: AntiForm = base.iter().map(|x| x * lower_scale).collect();
    let mut upper: AntiForm = wedge_one(&rbar, &base).iter().map(|x| x * upper_scale / d.powi(l as i32 + 1)).collect();
    if label.kind == FamilyKind::Breve {
        // second term of the breve upper part
        upper[label.mask()] += upper_scale / d.powi(l as i32);
    }
    Ok((lower, upper))
}

fn cdet(mut a: DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    let mut det = ONE;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[(i, col)].norm().partial_cmp(&a[(j, col)].norm()).unwrap()).unwrap();
        if a[(piv, col)].norm() == 0.0 {
            return ZERO;
        }
        if piv != col {
            a.swap_rows(piv, col);
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for r in col + 1..n {
            let f = a[(r, col)] / p;
            for c in col..n {
                let v = a[(col, c)];
                a[(r, c)] -= f * v;
            }
        }
    }
    det
}

/// `C_{jk} = dw̄_j(Z̄_k)` with `Z̄_k = ½(e_k + iJe_k)`.
pub fn coframe_matrix(frame: &UnitaryFrame) -> DMatrix<Complex64> {
    let m = frame.f.ncols() / 2;
    DMatrix::from_fn(m, m, |j, k| {
        let dwbar = |col: usize| Complex64::new(frame.f[(2 * j, col)], -frame.f[(2 * j + 1, col)]);
        (dwbar(2 * k) + I * dwbar(2 * k + 1)) * 0.5
    })
}

fn sub_det(c: &DMatrix<Complex64>, rows: usize, cols: usize) -> Complex64 {
    let r: Vec<usize> = (0..c.nrows()).filter(|i| rows & (1 << i) != 0).collect();
    let q: Vec<usize> = (0..c.ncols()).filter(|i| cols & (1 << i) != 0).collect();
    if r.is_empty() {
        return ONE;
    }
    cdet(DMatrix::from_fn(r.len(), r.len(), |i, j| c[(r[i], q[j])]))
}

/// Spinor coefficients of `f ⊗ dw^p` in the given frame.
pub fn form_to_spinor(f: &AntiForm, frame: &UnitaryFrame, p: f64) -> Spinor {
    let m = frame.f.ncols() / 2;
    let c = coframe_matrix(frame);
    let scalar = (cdet(c.clone()).conj() * 2f64.powf(m as f64 / 2.0)).powf(p);
    let mut coeffs = alloc::vec![ZERO; 1 << m];
    for (k_mask, fk) in f.iter().enumerate() {
        if *fk == ZERO {
            continue;
        }
        for (l_mask, out) in coeffs.iter_mut().enumerate() {
            if grade(l_mask) == grade(k_mask) {
                *out += fk * sub_det(&c, k_mask, l_mask);
            }
        }
    }
    for (mask, out) in coeffs.iter_mut().enumerate() {
        *out *= scalar * 2f64.powi(grade(mask) as i32);
    }
    Spinor { m, coeffs, weight: 1.0 }
}

/// Frame used for all spinor fields: Gram–Schmidt for `g` at `p`.
pub fn frame_at<F: MetricField + ?Sized>(field: &F, p: &[f64]) -> Result<UnitaryFrame> {
    UnitaryFrame::gram_schmidt(&field.metric(p)?)
}

/// `φ = φ_{l−1} + φ_l` at `p` in the Gram–Schmidt frame of `g_{ℂH^m}`.
pub fn killing_family(label: &KillingFamilyLabel, p: &[f64]) -> Result<Spinor> {
    let (lo, hi) = killing_family_parts(label, p)?;
    Ok(lo.add(&hi))
}

/// The two graded parts `(φ_{l−1}, φ_l)`.
pub fn killing_family_parts(label: &KillingFamilyLabel, p: &[f64]) -> Result<(Spinor, Spinor)> {
    let m = p.len() / 2;
    let frame = frame_at(&ComplexHyperbolic { m }, p)?;
    let (lo, hi) = family_forms(label, p)?;
    let e = weight_exponent(label.parity, half_index(m));
    Ok((form_to_spinor(&lo, &frame, e), form_to_spinor(&hi, &frame, e)))
}

/// Closed forms `(|φ_{l−1}|², |φ_l|²)`.
pub fn norm_closed_form(label: &KillingFamilyLabel, w: &[f64]) -> (f64, f64) {
    let m = w.len() / 2;
    let abs2 = |k: usize| w[2 * k] * w[2 * k] + w[2 * k + 1] * w[2 * k + 1];
    let sum = |idx: &[usize]| idx.iter().map(|&k| abs2(k)).sum::<f64>();
    let d = 1.0 - sum(&(0..m).collect::<Vec<_>>());
    let comp = complement(m, &label.index);
    match label.kind {
        FamilyKind::Plain => ((1.0 - sum(&label.index)) / d, sum(&comp) / d),
        FamilyKind::Breve => (sum(&label.index) / d, (1.0 - sum(&comp)) / d),
    }
}

/// The explicit ambient form predicted for a family member.
pub fn beta_of_label(label: &KillingFamilyLabel, m: usize) -> AmbientForm {
    match label.kind {
        FamilyKind::Plain => beta_explicit(m, &label.index),
        FamilyKind::Breve => beta_explicit(m, &complement(m, &label.index)),
    }
}

/// Frame-derivative data at a point: `g(∇_X f_i, f_j)`.
fn frame_connection<F: MetricField + ?Sized>(field: &F, p: &[f64], x: &[f64]) -> Result<Mat> {
    let n = p.len();
    let frame = frame_at(field, p)?;
    let h = field.fd_step(p);
    let mut ff = |q: &[f64]| frame_at(field, q).map(|f| f.f.as_slice().to_vec());
    let df = Mat::from_vec(n, n, fd::directional(&mut ff, p, x, h, Stencil::Fourth)?);
    let gam = christoffel(field, p)?;
    let gx = Mat::from_fn(n, n, |k, i| (0..n).map(|a| x[a] * gam[k][(a, i)]).sum());
    let nabla_f = df + gx * &frame.f;
    Ok(nabla_f.transpose() * &frame.g * &frame.f)
}

/// Connection matrix on spinor coefficients along `X`:
/// `¼ Σ g(∇_X f_i, f_j) c(f_i)c(f_j) + (p − ½) κ(X)` with
/// `κ(X) = −i Σ_k g(∇_X e_k, Je_k)` the connection form of the canonical frame.
pub fn spin_connection_matrix<F: MetricField + ?Sized>(field: &F, p: &[f64], x: &[f64], line_exponent: f64) -> Result<CMat> {
    let n = p.len();
    let m = n / 2;
    let om = frame_connection(field, p, x)?;
    let cl = frame_clifford(m);
    let d = 1 << m;
    let mut a = CMat::from_element(d, d, ZERO);
    for i in 0..n {
        for j in 0..n {
            if i != j && om[(i, j)] != 0.0 {
                a += &cl[i] * &cl[j] * Complex64::new(0.25 * om[(i, j)], 0.0);
            }
        }
    }
    let kappa = -I * (0..m).map(|k| om[(2 * k, 2 * k + 1)]).sum::<f64>();
    a += CMat::identity(d, d) * (kappa * (line_exponent - 0.5));
    Ok(a)
}

/// `κ(X)`.
pub fn canonical_connection_form<F: MetricField + ?Sized>(field: &F, p: &[f64], x: &[f64]) -> Result<Complex64> {
    let om = frame_connection(field, p, x)?;
    Ok(-I * (0..p.len() / 2).map(|k| om[(2 * k, 2 * k + 1)]).sum::<f64>())
}

/// `∇_X ψ` for a spinor field given in the Gram–Schmidt frame.
pub fn spinor_covariant<F, S>(field: &F, psi: &mut S, p: &[f64], x: &[f64], line_exponent: f64) -> Result<Spinor>
where
    F: MetricField + ?Sized,
    S: FnMut(&[f64]) -> Result<Spinor>,
{
    let m = p.len() / 2;
    let h = field.fd_step(p);
    let mut coeffs = |q: &[f64]| psi(q).map(|s| s.to_real_vec());
    let d = Spinor::from_real_vec(m, &fd::directional(&mut coeffs, p, x, h, Stencil::Fourth)?);
    let here = psi(p)?.normalized_weight();
    let a = spin_connection_matrix(field, p, x, line_exponent)?;
    Ok(d.add(&here.apply(&a)))
}

/// `c(X)` in the Gram–Schmidt frame of `g` at `p`.
pub fn clifford_at(g: &Mat, x: &Vector) -> Result<CMat> {
    let frame = UnitaryFrame::gram_schmidt(g)?;
    Ok(clifford_components(&frame_clifford(g.nrows() / 2), &frame.components(x)))
}

/// Residual of the Killing equation with a relative size.
#[derive(Debug, Clone)]
pub struct KillingResidual {
    pub residual: Spinor,
    pub norm: f64,
    /// `‖residual‖ / ‖φ‖`.
    pub relative: f64,
}

/// `∇_X φ + (i/2) X·φ + ½ (JX)·φ̃` for an arbitrary field supported in
/// grades `l−1, l` of `ℂH^m`.
pub fn killing_residual_field<S>(m: usize, psi: &mut S, p: &[f64], x: &[f64]) -> Result<KillingResidual>
where
    S: FnMut(&[f64]) -> Result<Spinor>,
{
    let l = half_index(m);
    let field = ComplexHyperbolic { m };
    let e = weight_exponent(Parity::of(m), l);
    let nabla = spinor_covariant(&field, psi, p, x, e)?;
    let phi = psi(p)?.normalized_weight();
    let g = field.metric(p)?;
    let xv = Vector::from_column_slice(x);
    let jx = complex_structure(p.len()) * &xv;
    let cx = clifford_at(&g, &xv)?;
    let cjx = clifford_at(&g, &jx)?;
    let r = nabla.add(&phi.apply(&cx).scale(I * 0.5)).add(&tilde(&phi, l)?.apply(&cjx).scale(Complex64::new(0.5, 0.0)));
    let norm = r.norm2().sqrt();
    Ok(KillingResidual { relative: norm / phi.norm2().sqrt(), norm, residual: r })
}

pub fn killing_residual(label: &KillingFamilyLabel, p: &[f64], x: &[f64]) -> Result<KillingResidual> {
    let m = p.len() / 2;
    label.validate(m)?;
    killing_residual_field(m, &mut |q: &[f64]| killing_family(label, q), p, x)
}

/// `φ + ε·b(q)·ε_{L}` with a Gaussian bump `b` centred at `center` and `L`
/// the grade-`(l−1)` mask of the first plain label.
pub fn perturbed_family<'a>(label: &'a KillingFamilyLabel, center: &[f64], eps: f64, width: f64) -> impl FnMut(&[f64]) -> Result<Spinor> + 'a {
    let center = center.to_vec();
    move |q: &[f64]| {
        let m = q.len() / 2;
        let mut phi = killing_family(label, q)?;
        let r2: f64 = q.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum();
        let mask = (1usize << (half_index(m) - 1)) - 1;
        phi.coeffs[mask] += Complex64::new(eps * (-r2 / (width * width)).exp(), 0.0);
        Ok(phi)
    }
}

/// `Q(φ) = (ξ_φ, α_φ, u_φ)` at `p` for a spinor field on `ℂH^m`:
/// `u = |φ|²`, `α = J du`, `ξ(X, Y) = Im(X·Y·φ̃, φ)`.
pub fn q_map_field<S>(m: usize, psi: &mut S, p: &[f64]) -> Result<SectionE>
where
    S: FnMut(&[f64]) -> Result<Spinor>,
{
    let n = 2 * m;
    let l = half_index(m);
    let field = ComplexHyperbolic { m };
    let g = field.metric(p)?;
    let phi = psi(p)?.normalized_weight();
    let pt = tilde(&phi, l)?;
    let h = field.fd_step(p);
    let mut u = |q: &[f64]| psi(q).map(|s| s.norm2());
    let du = Vector::from_vec(fd::scalar_gradient(&mut u, p, h, Stencil::Fourth)?);
    let alpha = j_covector(&complex_structure(n), &du);
    let frame = UnitaryFrame::gram_schmidt(&g)?;
    let cl = frame_clifford(m);
    let cs: Vec<CMat> = (0..n)
        .map(|i| clifford_components(&cl, &frame.components(&Vector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 }))))
        .collect();
    let mut xi = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                xi[(i, j)] = pt.apply(&cs[j]).apply(&cs[i]).inner(&phi).im;
            }
        }
    }
    Ok(SectionE { xi, alpha, u: phi.norm2() })
}

pub fn q_map(label: &KillingFamilyLabel, p: &[f64]) -> Result<SectionE> {
    q_map_field(p.len() / 2, &mut |q: &[f64]| killing_family(label, q), p)
}

/// Per-identity maximal violations over a set of points and directions.
#[derive(Debug, Clone, Default)]
pub struct LemmaReport {
    /// `|d|φ|²(X) + 2i(X·φ, φ)|`.
    pub der1: f64,
    /// `|(X·φ, φ) + (X·φ̃, φ̃)|`.
    pub trucs_sum: f64,
    /// `|((JX)·φ, φ) − i(X·φ̃, φ)|`.
    pub trucs_j: f64,
    /// `|(ξ_φ, Ω) − u_φ|` (odd `m` only; zero otherwise).
    pub algxi_trace: f64,
    /// `‖∇_Z α_φ + 2ι_Z(ξ_φ + u_φ Ω)‖`.
    pub algxi_alpha: f64,
    /// `‖∇_Z ξ_φ + ½(Z∧α_φ + JZ∧Jα_φ)‖`.
    pub algxi_xi: f64,
}

pub fn lemma_checks(labels: &[KillingFamilyLabel], samples: &[(Vec<f64>, Vec<f64>)]) -> Result<LemmaReport> {
    let mut rep = LemmaReport::default();
    for label in labels {
        for (p, x) in samples {
            let m = p.len() / 2;
            let l = half_index(m);
            let field = ComplexHyperbolic { m };
            let g = field.metric(p)?;
            let phi = killing_family(label, p)?;
            let pt = tilde(&phi, l)?;
            let xv = Vector::from_column_slice(x);
            let jx = complex_structure(2 * m) * &xv;
            let cx = clifford_at(&g, &xv)?;
            let cjx = clifford_at(&g, &jx)?;
            let h = field.fd_step(p);
            let mut u = |q: &[f64]| killing_family(label, q).map(|s| alloc::vec![s.norm2()]);
            let dux = fd::directional(&mut u, p, x, h, Stencil::Fourth)?[0];
            let xpp = phi.apply(&cx).inner(&phi);
            rep.der1 = rep.der1.max((Complex64::new(dux, 0.0) + I * 2.0 * xpp).norm());
            rep.trucs_sum = rep.trucs_sum.max((xpp + pt.apply(&cx).inner(&pt)).norm());
            rep.trucs_j = rep.trucs_j.max((phi.apply(&cjx).inner(&phi) - I * pt.apply(&cx).inner(&phi)).norm());
            let q = q_map(label, p)?;
            if label.parity == Parity::Odd {
                let ginv = g.clone().try_inverse().ok_or(GeomError::SingularMetric)?;
                let tr = crate::linalg::form2_inner(&q.xi, &crate::connection::kahler_form(&g), &ginv);
                rep.algxi_trace = rep.algxi_trace.max((tr - q.u).abs());
            }
            let nab = nabla_ch(-1.0, &field, &mut |y: &[f64]| q_map(label, y), x, p)?;
            rep.algxi_alpha = rep.algxi_alpha.max(nab.alpha.amax());
            rep.algxi_xi = rep.algxi_xi.max(nab.xi.amax());
        }
    }
    Ok(rep)
}

/// Numerical rank of the family evaluated on a point cloud.
pub fn family_gram_rank(labels: &[KillingFamilyLabel], points: &[Vec<f64>], rel_tol: f64) -> Result<usize> {
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(labels.len());
    for label in labels {
        let mut row = Vec::new();
        for p in points {
            row.extend(killing_family(label, p)?.normalized_weight().coeffs);
        }
        rows.push(row);
    }
    let k = rows.len();
    let gram = DMatrix::from_fn(k, k, |i, j| rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b.conj()).sum::<Complex64>());
    let sv = gram.singular_values();
    let top = sv.iter().fold(0.0f64, |m, s| m.max(*s));
    Ok(sv.iter().filter(|s| **s > rel_tol * top).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_count() {
        assert_eq!(all_labels(3).len(), 6);
        assert_eq!(all_labels(2).len(), 3);
        for lab in all_labels(4) {
            lab.validate(4).unwrap();
        }
        let bad = KillingFamilyLabel { parity: Parity::Odd, kind: FamilyKind::Plain, index: alloc::vec![1, 0] };
        assert!(bad.validate(3).is_err());
    }

    #[test]
    fn unit_norm_at_origin() {
        for m in [2, 3, 4] {
            for lab in all_labels(m) {
                let phi = killing_family(&lab, &alloc::vec![0.0; 2 * m]).unwrap();
                let (a, b) = norm_closed_form(&lab, &alloc::vec![0.0; 2 * m]);
                assert!((phi.norm2() - a - b).abs() < 1e-12, "{lab:?} {}", phi.norm2());
            }
        }
    }

    #[test]
    fn interior_then_dbar_gives_multiple() {
        // ∂̄ of ι_{R̄} dw̄_b in coefficients: Σ_k dw̄_k ∧ ∂_{w̄_k}
        let m = 3;
        let b = 0b101;
        let w = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4), Complex64::new(0.5, -0.3)];
        let f = interior_rbar(&w, b, m);
        // coefficient of dw̄_2 (mask 0b100) is −w̄_0 and of dw̄_0 is +w̄_2
        assert_eq!(f[0b001], w[2].conj() * -1.0);
        assert_eq!(f[0b100], w[0].conj());
    }
}
