//! Wedges in Minkowski space `ℝ^d`, their boosts and reflections, positive
//! inclusions, and wedge families covering localization regions.
//!
//! The metric is `⟨x,y⟩ = x⁰y⁰ − Σ xⁱyⁱ` and `W₁ = {x : x₁ > |x₀|}`. In `d = 2`
//! wedges are handled exactly through the lightlike coordinates
//! `u = x₀ + x₁`, `v = x₀ − x₁`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const METRIC_TOL: f64 = 1e-12;
/// Tolerance of the sampled inclusion test in `d ≥ 3`.
pub const INCLUSION_TOL: f64 = 1e-9;
/// Number of boundary rays sampled by the inclusion test in `d ≥ 3`.
pub const INCLUSION_SAMPLES: usize = 64;

pub fn metric(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |r, c| match (r, c) {
        (0, 0) => 1.0,
        (r, c) if r == c => -1.0,
        _ => 0.0,
    })
}

pub fn minkowski(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    x[0] * y[0] - x.rows(1, x.len() - 1).dot(&y.rows(1, y.len() - 1))
}

/// `(Λ, a)` acting by `x ↦ Λx + a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PoincareJson", try_from = "PoincareJson")]
pub struct PoincareElement {
    lin: DMatrix<f64>,
    trans: DVector<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareJson {
    pub dim: usize,
    /// Row-major linear part.
    pub linear: Vec<Vec<f64>>,
    pub translation: Vec<f64>,
    pub orthochronous: bool,
}

impl From<PoincareElement> for PoincareJson {
    fn from(g: PoincareElement) -> Self {
        let d = g.dim();
        PoincareJson {
            dim: d,
            linear: (0..d).map(|r| (0..d).map(|c| g.lin[(r, c)]).collect()).collect(),
            translation: g.trans.iter().copied().collect(),
            orthochronous: g.is_orthochronous(),
        }
    }
}

impl TryFrom<PoincareJson> for PoincareElement {
    type Error = Error;
    fn try_from(j: PoincareJson) -> Result<Self> {
        if j.linear.len() != j.dim || j.linear.iter().any(|r| r.len() != j.dim) {
            return Err(Error::DimensionMismatch { expected: j.dim, found: j.linear.len() });
        }
        let lin = DMatrix::from_fn(j.dim, j.dim, |r, c| j.linear[r][c]);
        let g = PoincareElement::new(lin, DVector::from_vec(j.translation))?;
        if g.is_orthochronous() != j.orthochronous {
            return Err(Error::InvalidArgument("orthochronous flag disagrees with linear part".into()));
        }
        Ok(g)
    }
}

impl PoincareElement {
    pub fn new(lin: DMatrix<f64>, trans: DVector<f64>) -> Result<Self> {
        let d = lin.nrows();
        if d < 2 || lin.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d.max(2), found: lin.ncols() });
        }
        if trans.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: trans.len() });
        }
        if lin.iter().chain(trans.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite Poincaré element".into()));
        }
        let eta = metric(d);
        let scale = lin.amax().powi(2).max(1.0);
        let residual = (lin.transpose() * &eta * &lin - &eta).amax() / scale;
        if residual > METRIC_TOL {
            return Err(Error::NotLorentz { residual });
        }
        let det = lin.clone().determinant();
        if det <= 0.0 {
            return Err(Error::Improper { det });
        }
        Ok(Self { lin, trans })
    }

    pub fn identity(d: usize) -> Self {
        Self { lin: DMatrix::identity(d, d), trans: DVector::zeros(d) }
    }

    pub fn translation(a: &[f64]) -> Self {
        Self { lin: DMatrix::identity(a.len(), a.len()), trans: DVector::from_column_slice(a) }
    }

    /// `Λ_{W₁}(t)`, the boosts fixing `W₁` in the `2π`-rescaled parametrization.
    pub fn boost(d: usize, t: f64) -> Self {
        let (c, s) = ((2.0 * std::f64::consts::PI * t).cosh(), (2.0 * std::f64::consts::PI * t).sinh());
        let mut lin = DMatrix::identity(d, d);
        lin[(0, 0)] = c;
        lin[(1, 1)] = c;
        lin[(0, 1)] = -s;
        lin[(1, 0)] = -s;
        Self { lin, trans: DVector::zeros(d) }
    }

    /// `R_{W₁}: (x₀, x₁, x₂, …) ↦ (−x₀, −x₁, x₂, …)`.
    pub fn reflection(d: usize) -> Self {
        let mut lin = DMatrix::identity(d, d);
        lin[(0, 0)] = -1.0;
        lin[(1, 1)] = -1.0;
        Self { lin, trans: DVector::zeros(d) }
    }

    /// Rotation by `angle` in the spatial plane `(i, j)`, `1 ≤ i, j < d`.
    pub fn rotation(d: usize, i: usize, j: usize, angle: f64) -> Result<Self> {
        if i == 0 || j == 0 || i >= d || j >= d || i == j {
            return Err(Error::InvalidArgument(format!("invalid rotation plane ({i}, {j}) in d={d}")));
        }
        let mut lin = DMatrix::identity(d, d);
        let (c, s) = (angle.cos(), angle.sin());
        lin[(i, i)] = c;
        lin[(j, j)] = c;
        lin[(i, j)] = -s;
        lin[(j, i)] = s;
        Ok(Self { lin, trans: DVector::zeros(d) })
    }

    /// Boost with rapidity `beta` along spatial axis `axis`.
    pub fn boost_along(d: usize, axis: usize, beta: f64) -> Result<Self> {
        if axis == 0 || axis >= d {
            return Err(Error::InvalidArgument(format!("invalid boost axis {axis} in d={d}")));
        }
        let mut lin = DMatrix::identity(d, d);
        lin[(0, 0)] = beta.cosh();
        lin[(axis, axis)] = beta.cosh();
        lin[(0, axis)] = beta.sinh();
        lin[(axis, 0)] = beta.sinh();
        Ok(Self { lin, trans: DVector::zeros(d) })
    }

    /// Spatial rotation taking `e₁` to the unit vector `n ∈ ℝ^{d−1}`.
    pub fn rotation_to(n: &[f64]) -> Result<Self> {
        let m = n.len();
        let d = m + 1;
        let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        if m == 0 || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("facet normal must be a unit vector".into()));
        }
        let nv = DVector::from_column_slice(n);
        let mut e1 = DVector::zeros(m);
        e1[0] = 1.0;
        let w = &e1 - &nv;
        let mut r = DMatrix::identity(m, m);
        if w.norm() > 1e-15 {
            let w = w.normalize();
            let householder = DMatrix::identity(m, m) - 2.0 * &w * w.transpose();
            if m == 1 {
                // n = −e₁ on a line: no proper spatial rotation exists.
                return Err(Error::Improper { det: -1.0 });
            }
            let mut flip = DMatrix::identity(m, m);
            flip[(1, 1)] = -1.0;
            r = householder * flip;
        }
        let mut lin = DMatrix::identity(d, d);
        lin.view_mut((1, 1), (m, m)).copy_from(&r);
        Ok(Self { lin, trans: DVector::zeros(d) })
    }

    pub fn dim(&self) -> usize {
        self.lin.nrows()
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.lin
    }

    pub fn translation_part(&self) -> &DVector<f64> {
        &self.trans
    }

    pub fn is_orthochronous(&self) -> bool {
        self.lin[(0, 0)] > 0.0
    }

    /// `(Λ,a)∘(Λ′,b) = (ΛΛ′, a + Λb)`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { lin: &self.lin * &other.lin, trans: &self.trans + &self.lin * &other.trans }
    }

    /// Uses `Λ⁻¹ = η Λᵀ η`.
    pub fn inverse(&self) -> Self {
        let eta = metric(self.dim());
        let inv = &eta * self.lin.transpose() * &eta;
        let trans = -(&inv * &self.trans);
        Self { lin: inv, trans }
    }

    /// `g h g⁻¹`.
    pub fn conjugate(&self, h: &Self) -> Self {
        self.compose(h).compose(&self.inverse())
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.lin * x + &self.trans
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.lin - &other.lin).amax().max((&self.trans - &other.trans).amax())
    }

    pub fn translated(&self, a: &DVector<f64>) -> Self {
        Self { lin: self.lin.clone(), trans: &self.trans + a }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Right,
    Left,
}

/// A `d = 2` wedge in lightlike coordinates of its apex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightconeWedge {
    pub orientation: Orientation,
    pub u: f64,
    pub v: f64,
}

/// `W = g W₁`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Wedge {
    g: PoincareElement,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inclusion {
    pub included: bool,
    /// `true` for the `d = 2` lightcone comparison, `false` for the sampled test.
    pub exact: bool,
    /// A point of the inner wedge outside the outer one.
    pub witness: Option<Vec<f64>>,
}

impl Wedge {
    pub fn standard(d: usize) -> Self {
        Self { g: PoincareElement::identity(d) }
    }

    pub fn from_element(g: PoincareElement) -> Self {
        Self { g }
    }

    pub fn element(&self) -> &PoincareElement {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn apex(&self) -> &DVector<f64> {
        &self.g.trans
    }

    pub fn translated(&self, a: &[f64]) -> Self {
        Self { g: self.g.translated(&DVector::from_column_slice(a)) }
    }

    pub fn contains_point(&self, x: &DVector<f64>) -> bool {
        let y = self.g.inverse().apply(x);
        y[1] > y[0].abs()
    }

    /// `Λ_W(t) = g Λ_{W₁}(±t) g⁻¹`, with the sign flipped for time-reversing `g`.
    pub fn boost(&self, t: f64) -> PoincareElement {
        let s = if self.g.is_orthochronous() { t } else { -t };
        self.g.conjugate(&PoincareElement::boost(self.dim(), s))
    }

    pub fn reflection(&self) -> PoincareElement {
        self.g.conjugate(&PoincareElement::reflection(self.dim()))
    }

    /// `W′ = g W₁′ = g R_{W₁} W₁`.
    pub fn complement(&self) -> Self {
        Self { g: self.g.compose(&PoincareElement::reflection(self.dim())) }
    }

    pub fn transform(&self, h: &PoincareElement) -> Result<Self> {
        if h.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: h.dim() });
        }
        Ok(Self { g: h.compose(&self.g) })
    }

    /// Null normals `(α, β)` with `W = {x : α·(x−a) > 0, β·(x−a) > 0}` (Euclidean dot).
    pub fn null_normals(&self) -> (DVector<f64>, DVector<f64>) {
        let d = self.dim();
        let inv_t = self.g.inverse().lin.transpose();
        let mut alpha = DVector::zeros(d);
        alpha[0] = -1.0;
        alpha[1] = 1.0;
        let mut beta = DVector::zeros(d);
        beta[0] = 1.0;
        beta[1] = 1.0;
        (&inv_t * alpha, &inv_t * beta)
    }

    /// Extreme rays `Λ(1,1,0,…)`, `Λ(−1,1,0,…)` and edge directions `Λe_k`.
    pub fn boundary_generators(&self) -> (DVector<f64>, DVector<f64>, Vec<DVector<f64>>) {
        let d = self.dim();
        let l = &self.g.lin;
        let mut lp = DVector::zeros(d);
        lp[0] = 1.0;
        lp[1] = 1.0;
        let mut lm = DVector::zeros(d);
        lm[0] = -1.0;
        lm[1] = 1.0;
        let edge = (2..d).map(|k| l.column(k).into_owned()).collect();
        (l * lp, l * lm, edge)
    }

    pub fn lightcone_form(&self) -> Option<LightconeWedge> {
        if self.dim() != 2 {
            return None;
        }
        let a = &self.g.trans;
        let orientation = if self.g.is_orthochronous() { Orientation::Right } else { Orientation::Left };
        Some(LightconeWedge { orientation, u: a[0] + a[1], v: a[0] - a[1] })
    }

    pub fn from_lightcone(w: LightconeWedge) -> Self {
        let apex = [(w.u + w.v) / 2.0, (w.u - w.v) / 2.0];
        let base = match w.orientation {
            Orientation::Right => Self::standard(2),
            Orientation::Left => Self::standard(2).complement(),
        };
        base.translated(&apex)
    }

    /// Whether `inner ⊆ self`.
    pub fn contains_wedge(&self, inner: &Wedge) -> Inclusion {
        if self.dim() == 2 && inner.dim() == 2 {
            return self.contains_wedge_2d(inner);
        }
        self.contains_wedge_sampled(inner)
    }

    fn contains_wedge_2d(&self, inner: &Wedge) -> Inclusion {
        let (o, i) = (self.lightcone_form().unwrap(), inner.lightcone_form().unwrap());
        let included = o.orientation == i.orientation
            && match o.orientation {
                Orientation::Right => i.u >= o.u && i.v <= o.v,
                Orientation::Left => i.u <= o.u && i.v >= o.v,
            };
        let witness = (!included).then(|| {
            // A point of the inner wedge beyond the outer boundary.
            let (u, v) = match (i.orientation, o.orientation) {
                (Orientation::Right, Orientation::Right) => {
                    if i.u < o.u { ((i.u + o.u) / 2.0, i.v - 1.0) } else { (i.u + 1.0, (i.v + o.v) / 2.0) }
                }
                (Orientation::Left, Orientation::Left) => {
                    if i.u > o.u { ((i.u + o.u) / 2.0, i.v + 1.0) } else { (i.u - 1.0, (i.v + o.v) / 2.0) }
                }
                (Orientation::Right, Orientation::Left) => (i.u.max(o.u) + 1.0, i.v - 1.0),
                (Orientation::Left, Orientation::Right) => (i.u.min(o.u) - 1.0, i.v + 1.0),
            };
            vec![(u + v) / 2.0, (u - v) / 2.0]
        });
        Inclusion { included, exact: true, witness }
    }

    /// Support-function test on a fixed sample of boundary rays of `inner`.
    fn contains_wedge_sampled(&self, inner: &Wedge) -> Inclusion {
        let (alpha, beta) = self.null_normals();
        let (rp, rm, edge) = inner.boundary_generators();
        let scale = alpha.norm().max(beta.norm());
        let ok = |x: &DVector<f64>| {
            let t = INCLUSION_TOL * scale * x.norm().max(1.0);
            alpha.dot(x) >= -t && beta.dot(x) >= -t
        };
        let interior = &rp + &rm;
        let offset = inner.apex() - self.apex();
        if !ok(&offset) {
            let w = inner.apex() + &interior * 1e-3;
            return Inclusion { included: false, exact: false, witness: Some(w.iter().copied().collect()) };
        }
        for ray in sample_rays(&rp, &rm, &edge) {
            if !ok(&ray) {
                let base = inner.apex() + &interior * 1e-3;
                let lo = alpha.dot(&ray).min(beta.dot(&ray));
                let reach = (alpha.dot(&(&base - self.apex())).abs() + beta.dot(&(&base - self.apex())).abs() + 1.0) / (-lo);
                let w = base + ray * (reach + 1.0);
                return Inclusion { included: false, exact: false, witness: Some(w.iter().copied().collect()) };
            }
        }
        Inclusion { included: true, exact: false, witness: None }
    }

    /// Equality: `g₂⁻¹g₁` stabilizes `W₁`.
    pub fn same_as(&self, other: &Wedge) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        stabilizes_w1(&other.g.inverse().compose(&self.g))
    }
}

/// Deterministic sample of [`INCLUSION_SAMPLES`] directions in the closed cone
/// generated by `rp`, `rm` and `±edge`.
fn sample_rays(rp: &DVector<f64>, rm: &DVector<f64>, edge: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut rays = vec![rp.clone(), rm.clone()];
    for e in edge {
        rays.push(e.clone());
        rays.push(-e.clone());
    }
    let golden = 0.618_033_988_749_894_9_f64;
    let mut k = 0usize;
    while rays.len() < INCLUSION_SAMPLES {
        k += 1;
        let phase = (k as f64 * golden).fract();
        let (a, b) = ((phase * std::f64::consts::FRAC_PI_2).cos(), (phase * std::f64::consts::FRAC_PI_2).sin());
        let mut r = rp * a + rm * b;
        for (j, e) in edge.iter().enumerate() {
            let c = ((k * (j + 2)) as f64 * golden).fract() * 4.0 - 2.0;
            r += e * c;
        }
        rays.push(r);
    }
    rays
}

fn stabilizes_w1(s: &PoincareElement) -> bool {
    let d = s.dim();
    let tol = 1e-10 * s.lin.amax().max(1.0);
    let y = &s.trans;
    if y[0].abs() > tol || y[1].abs() > tol {
        return false;
    }
    for k in 2..d {
        if [s.lin[(0, k)], s.lin[(1, k)], s.lin[(k, 0)], s.lin[(k, 1)]].iter().any(|x| x.abs() > tol) {
            return false;
        }
    }
    // The (0,1) block must map W₁'s cone to itself: Λℓ± = c ℓ± or c ℓ∓ with c > 0.
    let l = &s.lin;
    let (p0, p1) = (l[(0, 0)] + l[(0, 1)], l[(1, 0)] + l[(1, 1)]);
    let (m0, m1) = (-l[(0, 0)] + l[(0, 1)], -l[(1, 0)] + l[(1, 1)]);
    let ray_ok = |a: f64, b: f64| b > 0.0 && (a.abs() - b).abs() <= tol;
    ray_ok(p0, p1) && ray_ok(m0, m1)
}

/// One step `exp(a·h)` of a positive-inclusion chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionStep {
    pub generator: Vec<f64>,
    pub parameter: f64,
    /// Whether `h` (rather than `−h`) is future pointing.
    pub future_pointing: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PositiveInclusionCert {
    pub steps: Vec<InclusionStep>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub maps_outer_to_inner: bool,
    /// `max_t |Λ_W(t)h − e^{∓2πt}h|` over steps and sampled `t`.
    pub dilation_residual: f64,
    /// `max |R_W h + h|`.
    pub reflection_residual: f64,
    pub lightlike_generators: bool,
}

impl PositiveInclusionCert {
    pub fn total_translation(&self, d: usize) -> DVector<f64> {
        self.steps.iter().fold(DVector::zeros(d), |acc, s| acc + DVector::from_column_slice(&s.generator) * s.parameter)
    }

    pub fn apply(&self, outer: &Wedge) -> Wedge {
        let a = self.total_translation(outer.dim());
        outer.translated(a.as_slice())
    }

    pub fn verify(&self, inner: &Wedge, outer: &Wedge) -> CertificateCheck {
        let mut dil: f64 = 0.0;
        let mut refl: f64 = 0.0;
        let mut lightlike = true;
        let r = outer.reflection();
        for s in &self.steps {
            let h = DVector::from_column_slice(&s.generator);
            let hn = h.norm();
            lightlike &= minkowski(&h, &h).abs() <= 1e-12 * hn * hn && s.parameter >= 0.0;
            lightlike &= (h[0] > 0.0) == s.future_pointing;
            for t in [-0.3, -0.1, 0.05, 0.2] {
                let img = outer.boost(t).linear() * &h;
                let e = (2.0 * std::f64::consts::PI * t).exp();
                let best = (&img - &h * e).norm().min((&img - &h / e).norm());
                dil = dil.max(best / hn);
            }
            refl = refl.max((r.linear() * &h + &h).norm() / hn);
        }
        CertificateCheck {
            maps_outer_to_inner: self.apply(outer).same_as(inner),
            dilation_residual: dil,
            reflection_residual: refl,
            lightlike_generators: lightlike,
        }
    }
}

/// Chain of at most two lightlike translations taking `outer` onto `inner`.
pub fn positive_inclusion_chain(inner: &Wedge, outer: &Wedge) -> Result<PositiveInclusionCert> {
    if inner.dim() != outer.dim() {
        return Err(Error::DimensionMismatch { expected: outer.dim(), found: inner.dim() });
    }
    let inc = outer.contains_wedge(inner);
    if !inc.included {
        return Err(Error::NotIncluded { witness: inc.witness.unwrap_or_default() });
    }
    if inner.same_as(outer) {
        return Ok(PositiveInclusionCert::default());
    }
    let d = outer.dim();
    let linear_only = |w: &Wedge| PoincareElement { lin: w.g.lin.clone(), trans: DVector::zeros(d) };
    let s = linear_only(outer).inverse().compose(&linear_only(inner));
    if !stabilizes_w1(&s) {
        return Err(Error::Unsupported(
            "positive-inclusion chains in d ≥ 3 require wedges sharing their linear part".into(),
        ));
    }
    let out_inv = outer.g.inverse();
    let y = &out_inv.lin * (inner.apex() - outer.apex());
    let (cp, cm) = ((y[1] + y[0]) / 2.0, (y[1] - y[0]) / 2.0);
    let mut steps = Vec::new();
    let mut lp = DVector::zeros(d);
    lp[0] = 1.0;
    lp[1] = 1.0;
    let mut lm = DVector::zeros(d);
    lm[0] = -1.0;
    lm[1] = 1.0;
    for (c, l) in [(cp, lp), (cm, lm)] {
        if c.abs() <= 1e-15 * y.norm().max(1.0) {
            continue;
        }
        let h = &outer.g.lin * l;
        steps.push(InclusionStep { future_pointing: h[0] > 0.0, generator: h.iter().copied().collect(), parameter: c.max(0.0) });
    }
    Ok(PositiveInclusionCert { steps })
}

/// Box `u ∈ (u_lo, u_hi)`, `v ∈ (v_lo, v_hi)` in `d = 2` lightlike coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UvBox {
    pub u_lo: f64,
    pub u_hi: f64,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl UvBox {
    pub fn of_wedge(w: &LightconeWedge) -> Self {
        match w.orientation {
            Orientation::Right => UvBox { u_lo: w.u, u_hi: f64::INFINITY, v_lo: f64::NEG_INFINITY, v_hi: w.v },
            Orientation::Left => UvBox { u_lo: f64::NEG_INFINITY, u_hi: w.u, v_lo: w.v, v_hi: f64::INFINITY },
        }
    }

    pub fn intersect(&self, o: &Self) -> Self {
        UvBox { u_lo: self.u_lo.max(o.u_lo), u_hi: self.u_hi.min(o.u_hi), v_lo: self.v_lo.max(o.v_lo), v_hi: self.v_hi.min(o.v_hi) }
    }

    pub fn is_empty(&self) -> bool {
        self.u_lo >= self.u_hi || self.v_lo >= self.v_hi
    }

    pub fn contains_box(&self, o: &Self) -> bool {
        o.is_empty() || (self.u_lo <= o.u_lo && o.u_hi <= self.u_hi && self.v_lo <= o.v_lo && o.v_hi <= self.v_hi)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Region {
    Wedge { wedge: Wedge },
    /// Intersection of two wedges, e.g. `(W₁+a) ∩ (W₁′+b)` in `d = 2`.
    DoubleCone { first: Wedge, second: Wedge },
    /// `{x : n_k·(x⃗ − a⃗) > |x₀ − a₀| for all k}` for unit spatial normals `n_k`.
    SpacelikeCone { apex: Vec<f64>, normals: Vec<Vec<f64>> },
    /// `W̄ ∩ (W̄′ + a)` for lightlike `a` with `W + a ⊂ W`.
    LightlikeStrip { wedge: Wedge, shift: Vec<f64> },
    GeneralIntersection { wedges: Vec<Wedge> },
}

impl Region {
    pub fn wedge(w: Wedge) -> Self {
        Region::Wedge { wedge: w }
    }

    /// `(W₁ + a) ∩ (W₁′ + b)` in `d = 2`.
    pub fn double_cone_2d(a: [f64; 2], b: [f64; 2]) -> Self {
        Region::DoubleCone {
            first: Wedge::standard(2).translated(&a),
            second: Wedge::standard(2).complement().translated(&b),
        }
    }

    /// Double cone with lightlike-coordinate extent `u ∈ (u_lo, u_hi)`, `v ∈ (v_lo, v_hi)`.
    pub fn double_cone_uv(u_lo: f64, u_hi: f64, v_lo: f64, v_hi: f64) -> Self {
        let a = [(u_lo + v_hi) / 2.0, (u_lo - v_hi) / 2.0];
        let b = [(u_hi + v_lo) / 2.0, (u_hi - v_lo) / 2.0];
        Self::double_cone_2d(a, b)
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Wedge { wedge } => wedge.dim(),
            Region::DoubleCone { first, .. } => first.dim(),
            Region::SpacelikeCone { apex, .. } => apex.len(),
            Region::LightlikeStrip { wedge, .. } => wedge.dim(),
            Region::GeneralIntersection { wedges } => wedges.first().map_or(0, Wedge::dim),
        }
    }

    /// Lightlike-coordinate box of a `d = 2` region given by wedges.
    pub fn uv_box(&self) -> Option<UvBox> {
        let wedges = match self {
            Region::Wedge { wedge } => vec![wedge.clone()],
            Region::DoubleCone { first, second } => vec![first.clone(), second.clone()],
            Region::GeneralIntersection { wedges } => wedges.clone(),
            Region::LightlikeStrip { wedge, shift } => vec![wedge.clone(), wedge.complement().translated(shift)],
            Region::SpacelikeCone { .. } => return None,
        };
        let all = UvBox { u_lo: f64::NEG_INFINITY, u_hi: f64::INFINITY, v_lo: f64::NEG_INFINITY, v_hi: f64::INFINITY };
        wedges.iter().try_fold(all, |b, w| w.lightcone_form().map(|l| b.intersect(&UvBox::of_wedge(&l))))
    }

    pub fn contains_point(&self, x: &DVector<f64>) -> bool {
        match self {
            Region::SpacelikeCone { apex, normals } => {
                let y = x - DVector::from_column_slice(apex);
                let s = y.rows(1, y.len() - 1);
                normals.iter().all(|n| DVector::from_column_slice(n).dot(&s) > y[0].abs())
            }
            Region::LightlikeStrip { wedge, shift } => {
                // Closed strip: test on the closures of both wedges.
                let w2 = wedge.complement().translated(shift);
                let closed = |w: &Wedge| {
                    let y = w.element().inverse().apply(x);
                    y[1] >= y[0].abs() - 1e-12
                };
                closed(wedge) && closed(&w2)
            }
            _ => covering_family(self).map(|f| f.wedges.iter().all(|w| w.contains_point(x))).unwrap_or(false),
        }
    }

    /// Cache key: exact lightlike coordinates in `d = 2`, quantized entries otherwise.
    pub fn canonical_key(&self) -> String {
        fn wedge_key(w: &Wedge) -> String {
            if let Some(l) = w.lightcone_form() {
                return format!("{:?}:{:016x}:{:016x}", l.orientation, l.u.to_bits(), l.v.to_bits());
            }
            let q = |x: f64| (x * 1e12).round() as i64;
            let g = w.element();
            let lin: Vec<i64> = g.linear().iter().map(|&x| q(x)).collect();
            let tr: Vec<i64> = g.translation_part().iter().map(|&x| q(x)).collect();
            format!("{lin:?}+{tr:?}")
        }
        match self {
            Region::Wedge { wedge } => format!("W[{}]", wedge_key(wedge)),
            Region::DoubleCone { first, second } => format!("D[{}|{}]", wedge_key(first), wedge_key(second)),
            Region::SpacelikeCone { apex, normals } => {
                let q = |v: &[f64]| v.iter().map(|x| (x * 1e12).round() as i64).collect::<Vec<_>>();
                format!("S[{:?}|{:?}]", q(apex), normals.iter().map(|n| q(n)).collect::<Vec<_>>())
            }
            Region::LightlikeStrip { wedge, shift } => {
                format!("L[{}|{:?}]", wedge_key(wedge), shift.iter().map(|x| x.to_bits()).collect::<Vec<_>>())
            }
            Region::GeneralIntersection { wedges } => {
                format!("G[{}]", wedges.iter().map(wedge_key).collect::<Vec<_>>().join("|"))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveringFamily {
    pub wedges: Vec<Wedge>,
    /// Indices (into the defining list) of wedges dropped as redundant.
    pub redundant: Vec<usize>,
}

/// The minimal wedge family whose intersection is the region.
pub fn covering_family(region: &Region) -> Result<CoveringFamily> {
    match region {
        Region::Wedge { wedge } => Ok(CoveringFamily { wedges: vec![wedge.clone()], redundant: vec![] }),
        Region::DoubleCone { first, second } => Ok(prune(vec![first.clone(), second.clone()])),
        Region::LightlikeStrip { wedge, shift } => {
            let d = wedge.dim();
            if shift.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: shift.len() });
            }
            let a = DVector::from_column_slice(shift);
            if minkowski(&a, &a).abs() > 1e-12 * a.norm_squared() {
                return Err(Error::InvalidArgument("strip translation is not lightlike".into()));
            }
            if !wedge.contains_wedge(&wedge.translated(shift)).included {
                return Err(Error::InvalidArgument("strip translation does not satisfy W + a ⊂ W".into()));
            }
            Ok(CoveringFamily { wedges: vec![wedge.clone(), wedge.complement().translated(shift)], redundant: vec![] })
        }
        Region::SpacelikeCone { apex, normals } => {
            let d = apex.len();
            if d < 3 {
                return Err(Error::Unsupported("spacelike cones need d ≥ 3".into()));
            }
            let mut redundant = Vec::new();
            for k in 0..normals.len() {
                if normals[k].len() != d - 1 {
                    return Err(Error::DimensionMismatch { expected: d - 1, found: normals[k].len() });
                }
                let others: Vec<&Vec<f64>> = normals.iter().enumerate().filter(|(j, _)| *j != k && !redundant.contains(j)).map(|(_, n)| n).collect();
                if in_conic_hull(&normals[k], &others) {
                    redundant.push(k);
                }
            }
            let mut wedges = Vec::new();
            for (k, n) in normals.iter().enumerate() {
                if redundant.contains(&k) {
                    continue;
                }
                let r = PoincareElement::rotation_to(n)?;
                wedges.push(Wedge::from_element(r).translated(apex));
            }
            Ok(CoveringFamily { wedges, redundant })
        }
        Region::GeneralIntersection { .. } => {
            Err(Error::Unsupported("general intersections have no minimal covering family".into()))
        }
    }
}

fn prune(wedges: Vec<Wedge>) -> CoveringFamily {
    let mut redundant = Vec::new();
    for i in 0..wedges.len() {
        for j in 0..wedges.len() {
            if i != j && !redundant.contains(&j) && wedges[i].contains_wedge(&wedges[j]).included && !(wedges[j].same_as(&wedges[i]) && j > i) {
                redundant.push(i);
                break;
            }
        }
    }
    let kept = wedges.into_iter().enumerate().filter(|(i, _)| !redundant.contains(i)).map(|(_, w)| w).collect();
    CoveringFamily { wedges: kept, redundant }
}

/// Whether `n` is a nonnegative combination of `gens` (Carathéodory: subsets of size ≤ dim).
fn in_conic_hull(n: &[f64], gens: &[&Vec<f64>]) -> bool {
    let m = n.len();
    let target = DVector::from_column_slice(n);
    let k = gens.len();
    for mask in 1u32..(1u32 << k) {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        if idx.len() > m {
            continue;
        }
        let a = DMatrix::from_fn(m, idx.len(), |r, c| gens[idx[c]][r]);
        let svd = crate::linalg::svd_real(&a);
        let rank = svd.s.iter().filter(|&&s| s > 1e-12 * svd.s[0]).count();
        if rank < idx.len() {
            continue;
        }
        let ata = a.transpose() * &a;
        let Some(inv) = ata.try_inverse() else { continue };
        let c = inv * a.transpose() * &target;
        if c.iter().all(|&x| x >= -1e-12) && (&a * &c - &target).norm() <= 1e-10 {
            return true;
        }
    }
    false
}

/// Wedge `W` with `first ⊂ W′` and `second ⊂ W`, for spacelike separated `d = 2` regions.
pub fn separating_wedge(first: &Region, second: &Region) -> Option<Wedge> {
    let (b1, b2) = (first.uv_box()?, second.uv_box()?);
    let mid = |lo: f64, hi: f64| {
        if lo.is_finite() && hi.is_finite() {
            (lo + hi) / 2.0
        } else if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        }
    };
    // Right wedge: second ⊂ {u > u_w, v < v_w}, first ⊂ {u < u_w, v > v_w}.
    if b1.u_hi <= b2.u_lo && b2.v_hi <= b1.v_lo {
        let w = LightconeWedge { orientation: Orientation::Right, u: mid(b1.u_hi, b2.u_lo), v: mid(b2.v_hi, b1.v_lo) };
        return Some(Wedge::from_lightcone(w));
    }
    if b2.u_hi <= b1.u_lo && b1.v_hi <= b2.v_lo {
        let w = LightconeWedge { orientation: Orientation::Left, u: mid(b2.u_hi, b1.u_lo), v: mid(b1.v_hi, b2.v_lo) };
        return Some(Wedge::from_lightcone(w));
    }
    None
}

impl fmt::Display for Wedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lightcone_form() {
            Some(l) => write!(f, "{:?}(u={}, v={})", l.orientation, l.u, l.v),
            None => write!(f, "gW₁ with apex {:?}", self.apex().as_slice()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn reflection_maps_to_complement() {
        let w1 = Wedge::standard(2);
        let r = w1.transform(&PoincareElement::reflection(2)).unwrap();
        assert!(r.same_as(&w1.complement()));
        assert!(w1.transform(&PoincareElement::boost(2, 0.3)).unwrap().same_as(&w1));
        assert!(w1.complement().complement().same_as(&w1));
        assert!(w1.complement().contains_point(&v(&[0.0, -1.0])));
    }

    #[test]
    fn translation_commutes_with_complement() {
        let w = Wedge::standard(3).translated(&[0.2, -0.4, 1.0]);
        let lhs = w.complement();
        let rhs = Wedge::standard(3).complement().translated(&[0.2, -0.4, 1.0]);
        assert!(lhs.same_as(&rhs));
    }

    #[test]
    fn improper_rejected() {
        let mut l = DMatrix::identity(2, 2);
        l[(1, 1)] = -1.0;
        assert!(matches!(PoincareElement::new(l, DVector::zeros(2)), Err(Error::Improper { .. })));
    }

    #[test]
    fn chain_for_unit_shift() {
        let outer = Wedge::standard(2);
        let inner = outer.translated(&[0.0, 1.0]);
        let c = positive_inclusion_chain(&inner, &outer).unwrap();
        assert_eq!(c.steps.len(), 2);
        assert_eq!(c.steps[0].generator, vec![1.0, 1.0]);
        assert!((c.steps[0].parameter - 0.5).abs() < 1e-15);
        assert_eq!(c.steps[1].generator, vec![-1.0, 1.0]);
        assert!((c.steps[1].parameter - 0.5).abs() < 1e-15);
        let chk = c.verify(&inner, &outer);
        assert!(chk.maps_outer_to_inner && chk.lightlike_generators);
        assert!(chk.dilation_residual < 1e-12 && chk.reflection_residual < 1e-15);
    }

    #[test]
    fn chain_rejects_non_inclusion() {
        let outer = Wedge::standard(2);
        let inner = outer.translated(&[0.0, -1.0]);
        match positive_inclusion_chain(&inner, &outer) {
            Err(Error::NotIncluded { witness }) => {
                let x = v(&witness);
                assert!(inner.contains_point(&x) && !outer.contains_point(&x));
            }
            other => panic!("{other:?}"),
        }
        assert!(positive_inclusion_chain(&outer, &outer).unwrap().steps.is_empty());
    }

    #[test]
    fn strip_family() {
        let strip = Region::LightlikeStrip { wedge: Wedge::standard(2), shift: vec![-0.5, 0.5] };
        let f = covering_family(&strip).unwrap();
        assert_eq!(f.wedges.len(), 2);
        assert!(f.wedges[1].same_as(&Wedge::standard(2).complement().translated(&[-0.5, 0.5])));
        let bad = Region::LightlikeStrip { wedge: Wedge::standard(2), shift: vec![0.0, 0.5] };
        assert!(covering_family(&bad).is_err());
        assert!(covering_family(&Region::GeneralIntersection { wedges: vec![] }).is_err());
    }

    #[test]
    fn separating_wedge_for_spacelike_double_cones() {
        let left = Region::double_cone_uv(-3.0, -2.0, 2.0, 3.0);
        let right = Region::double_cone_uv(2.0, 3.0, -3.0, -2.0);
        let w = separating_wedge(&left, &right).unwrap();
        let (l, r) = (left.uv_box().unwrap(), right.uv_box().unwrap());
        assert!(UvBox::of_wedge(&w.lightcone_form().unwrap()).contains_box(&r));
        assert!(UvBox::of_wedge(&w.complement().lightcone_form().unwrap()).contains_box(&l));
        assert!(separating_wedge(&left, &left).is_none());
    }

    fn arb_element(d: usize) -> impl Strategy<Value = PoincareElement> {
        (proptest::collection::vec(-1.0f64..1.0, d + 3), any::<bool>()).prop_map(move |(p, flip)| {
            let mut g = PoincareElement::boost_along(d, 1, p[0]).unwrap();
            if d >= 3 {
                g = g.compose(&PoincareElement::rotation(d, 1, 2, p[1] * 3.0).unwrap());
                g = g.compose(&PoincareElement::boost_along(d, 2, p[2]).unwrap());
            }
            if flip {
                g = g.compose(&PoincareElement::reflection(d));
            }
            g.translated(&DVector::from_iterator(d, p[3..].iter().copied()))
        })
    }

    proptest! {
        #[test]
        fn group_axioms(a in arb_element(3), b in arb_element(3), c in arb_element(3)) {
            let l = a.compose(&b).compose(&c);
            let r = a.compose(&b.compose(&c));
            prop_assert!(l.max_abs_diff(&r) < 1e-12 * (1.0 + l.linear().amax()));
            prop_assert!(a.compose(&a.inverse()).max_abs_diff(&PoincareElement::identity(3)) < 1e-12 * a.linear().amax().powi(2));
        }

        #[test]
        fn reflection_commutes_with_boosts(g in arb_element(4), t in -0.5f64..0.5) {
            let w = Wedge::from_element(g);
            let (r, b) = (w.reflection(), w.boost(t));
            let scale = b.linear().amax() * r.linear().amax();
            prop_assert!(r.compose(&b).max_abs_diff(&b.compose(&r)) < 1e-10 * scale.max(1.0));
            prop_assert!(w.complement().boost(t).max_abs_diff(&w.boost(-t)) < 1e-10 * scale.max(1.0));
            prop_assert!(w.complement().reflection().max_abs_diff(&r) < 1e-10 * scale.max(1.0));
        }

        #[test]
        fn boosts_and_reflection_fix_wedge(g in arb_element(2), t in -0.5f64..0.5) {
            let w = Wedge::from_element(g);
            prop_assert!(w.transform(&w.boost(t)).unwrap().same_as(&w));
            prop_assert!(w.transform(&w.reflection()).unwrap().same_as(&w.complement()));
        }

        #[test]
        fn chain_2d_sound(a0 in -1.0f64..1.0, extra in 0.0f64..2.0, g in arb_element(2)) {
            let a1 = a0.abs() + extra;
            let outer = Wedge::from_element(g.clone());
            let inner = Wedge::from_element(g.compose(&PoincareElement::translation(&[a0, a1])));
            let c = positive_inclusion_chain(&inner, &outer).unwrap();
            prop_assert!(c.steps.len() <= 2);
            let chk = c.verify(&inner, &outer);
            prop_assert!(chk.maps_outer_to_inner);
            prop_assert!(chk.lightlike_generators);
            prop_assert!(chk.dilation_residual < 1e-9 && chk.reflection_residual < 1e-9);
        }
    }
}
