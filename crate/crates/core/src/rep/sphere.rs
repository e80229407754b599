//! The `S²×ℝ` toy model: spin-`j` rotations times a time phase.
//!
//! `U(r, t) = e^{iEt} D^j(r)` on `ℂ^{2j+1}`, with `D^j(R_n(φ)) = exp(−iφ n·L)`.
//! The reference wedge `W₀` is the diamond over the upper hemisphere at `t = 0`;
//! its boosts `Λ_{W₀}(θ)` are rotations about `z`, so `log Δ_{W₀} = L_z`, and
//! its reflection `(t,x,y,z) ↦ (−t,x,y,−z)` is represented by
//! `J = C∘exp(−iπL_x)`.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{ModelSpec, NetModel, ValidationReport};
use crate::kernel::{
    fro, spectral_map_complex, AntilinearOperator, CMatrix, DenseOperator, GroupOperator, Tolerances, C64,
};
use crate::subspace::ModularData;
use crate::{Error, Result};

const EXACT: f64 = 1e-12;

/// `ρ = diag(1, 1, −1)`.
fn rho() -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0))
}

/// `(r, t)` followed by the reflection `R_{W₀}` when `reversed`; acts as
/// `x ↦ (r, t)·R^ε x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereElement {
    pub rotation: [[f64; 3]; 3],
    pub time: f64,
    pub reversed: bool,
}

impl SphereElement {
    pub fn new(rotation: [[f64; 3]; 3], time: f64, reversed: bool) -> Result<Self> {
        let r = Matrix3::from_fn(|i, j| rotation[i][j]);
        let residual = (r.transpose() * r - Matrix3::identity()).amax();
        if residual > 1e-12 || !time.is_finite() {
            return Err(Error::InvalidArgument(format!("not a rotation (orthogonality residual {residual:.3e})")));
        }
        if r.determinant() < 0.0 {
            return Err(Error::Improper { det: r.determinant() });
        }
        Ok(Self { rotation, time, reversed })
    }

    pub fn identity() -> Self {
        Self::from_parts(Matrix3::identity(), 0.0, false)
    }

    /// Rotation by `angle` about `axis` (right-handed).
    pub fn rotation_about(axis: [f64; 3], angle: f64) -> Self {
        let n = Vector3::from(axis).normalize();
        let r = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_unchecked(n), angle);
        Self::from_parts(*r.matrix(), 0.0, false)
    }

    pub fn time_shift(t: f64) -> Self {
        Self::from_parts(Matrix3::identity(), t, false)
    }

    /// `R_{W₀}: (t,x,y,z) ↦ (−t,x,y,−z)`.
    pub fn reflection() -> Self {
        Self::from_parts(Matrix3::identity(), 0.0, true)
    }

    fn from_parts(r: Matrix3<f64>, time: f64, reversed: bool) -> Self {
        let rotation = [[r[(0, 0)], r[(0, 1)], r[(0, 2)]], [r[(1, 0)], r[(1, 1)], r[(1, 2)]], [
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
        ]];
        Self { rotation, time, reversed }
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.rotation[i][j])
    }

    /// `R g R = (ρrρ, −t, ε)`.
    pub fn reflect(&self) -> Self {
        let p = rho();
        Self::from_parts(p * self.rotation_matrix() * p, -self.time, self.reversed)
    }

    /// `(r₁,t₁,ε₁)(r₂,t₂,ε₂) = (r₁·ρ^{ε₁}r₂ρ^{ε₁}, t₁ + (−1)^{ε₁}t₂, ε₁ ⊕ ε₂)`.
    pub fn compose(&self, other: &Self) -> Self {
        let second = if self.reversed { other.reflect() } else { other.clone() };
        Self::from_parts(
            self.rotation_matrix() * second.rotation_matrix(),
            self.time + second.time,
            self.reversed ^ other.reversed,
        )
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation_matrix().transpose();
        if self.reversed {
            let p = rho();
            Self::from_parts(p * rt * p, self.time, true)
        } else {
            Self::from_parts(rt, -self.time, false)
        }
    }

    /// Image of the point `(t, x)` with `x ∈ S²`.
    pub fn apply(&self, t: f64, x: [f64; 3]) -> (f64, [f64; 3]) {
        let mut v = Vector3::from(x);
        let mut t = t;
        if self.reversed {
            v = rho() * v;
            t = -t;
        }
        let v = self.rotation_matrix() * v;
        (t + self.time, [v[0], v[1], v[2]])
    }
}

/// The diamond `g W₀`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereWedge {
    pub element: SphereElement,
}

impl std::fmt::Display for SphereWedge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ([x, y, z], t) = self.center();
        write!(f, "diamond(pole=({x:.3}, {y:.3}, {z:.3}), t={t:.3})")
    }
}

impl SphereWedge {
    pub fn reference() -> Self {
        Self { element: SphereElement::identity() }
    }

    /// Diamond over the hemisphere centred at `direction`, at time `time`.
    pub fn hemisphere(direction: [f64; 3], time: f64) -> Self {
        let target = Vector3::from(direction).normalize();
        let z = Vector3::z();
        let axis = z.cross(&target);
        let c = z.dot(&target);
        let rot = if axis.norm() < 1e-14 {
            if c > 0.0 {
                SphereElement::identity()
            } else {
                SphereElement::rotation_about([1.0, 0.0, 0.0], std::f64::consts::PI)
            }
        } else {
            SphereElement::rotation_about([axis[0], axis[1], axis[2]], axis.norm().atan2(c))
        };
        Self { element: SphereElement::time_shift(time).compose(&rot) }
    }

    /// The six coordinate hemispheres at `t = 0`.
    pub fn coordinate_hemispheres() -> Vec<Self> {
        let dirs = [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [
            0.0, 0.0, -1.0,
        ]];
        dirs.iter().map(|&d| Self::hemisphere(d, 0.0)).collect()
    }

    /// Pole of the base hemisphere and time of the base.
    pub fn center(&self) -> ([f64; 3], f64) {
        let (t, x) = self.element.apply(0.0, [0.0, 0.0, 1.0]);
        (x, t)
    }

    pub fn complement(&self) -> Self {
        Self { element: self.element.compose(&SphereElement::reflection()) }
    }

    /// Points whose geodesic distance to the base's boundary circle exceeds `|t − t₀|`.
    pub fn contains(&self, t: f64, x: [f64; 3]) -> bool {
        let (n, t0) = self.center();
        let dot = n[0] * x[0] + n[1] * x[1] + n[2] * x[2];
        dot.clamp(-1.0, 1.0).asin() > (t - t0).abs()
    }
}

#[derive(Clone, Debug)]
pub struct SphereToyModel {
    j: u32,
    energy: f64,
    lx: CMatrix,
    ly: CMatrix,
    lz: CMatrix,
    j_toy: AntilinearOperator,
    tol: Tolerances,
    validation: ValidationReport,
}

/// Standard spin-`j` matrices in the basis `m = j, j−1, …, −j`.
pub fn spin_matrices(j: u32) -> (CMatrix, CMatrix, CMatrix) {
    let n = 2 * j as usize + 1;
    let jf = j as f64;
    let mut lp = CMatrix::zeros(n, n);
    for k in 1..n {
        let m = jf - k as f64;
        lp[(k - 1, k)] = C64::new((jf * (jf + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let lm = lp.transpose();
    let half = C64::new(0.5, 0.0);
    let lx = (&lp + &lm) * half;
    let ly = (&lp - &lm) * C64::new(0.0, -0.5);
    let lz = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |k, _| C64::new(jf - k as f64, 0.0)));
    (lx, ly, lz)
}

impl SphereToyModel {
    pub fn new(j: u32, energy: f64, tol: Tolerances) -> Result<Self> {
        if !(energy.is_finite() && energy != 0.0) {
            return Err(Error::InvalidArgument(format!("energy must be finite and non-zero, got {energy}")));
        }
        let (lx, ly, lz) = spin_matrices(j);
        let x = spectral_map_complex(
            &DenseOperator::new(lx.clone())?,
            |l| C64::from_polar(1.0, -std::f64::consts::PI * l),
            &tol,
        )?;
        let j_toy = AntilinearOperator::new(x.into_matrix())?;
        let mut model = Self { j, energy, lx, ly, lz, j_toy, tol, validation: ValidationReport::default() };
        model.validation = model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<ValidationReport> {
        let mut r = ValidationReport::default();
        let n = self.dim();
        let id = CMatrix::identity(n, n);
        r.push("J² = 1", fro(&(self.j_toy.square().matrix() - &id)), EXACT);
        let lz = DenseOperator::new(self.lz.clone())?;
        let jlj = &(&self.j_toy * &lz) * &self.j_toy;
        r.push("J L_z J = −L_z", fro(&(jlj.matrix() + &self.lz)), EXACT);
        let comm = &self.lx * &self.ly - &self.ly * &self.lx - &self.lz * C64::new(0.0, 1.0);
        r.push("[L_x, L_y] = i L_z", fro(&comm), EXACT);

        let samples = self.sample_elements(8, 0x5eed);
        let (mut unitary, mut reflect, mut law) = (0.0_f64, 0.0_f64, 0.0_f64);
        let jop = GroupOperator::Antilinear(self.j_toy.clone());
        for (k, g) in samples.iter().enumerate() {
            let u = self.group_operator(g)?;
            unitary = unitary.max(fro(&(u.matrix() * u.matrix().adjoint() - &id)));
            let lhs = jop.compose(&u).compose(&jop);
            reflect = reflect.max(fro(&(lhs.matrix() - self.group_operator(&g.reflect())?.matrix())));
            let h = &samples[(k + 1) % samples.len()];
            let prod = u.compose(&self.group_operator(h)?);
            let direct = self.group_operator(&g.compose(h))?;
            law = law.max(if prod.is_antilinear() == direct.is_antilinear() {
                fro(&(prod.matrix() - direct.matrix()))
            } else {
                f64::INFINITY
            });
        }
        r.push("U(g) unitary", unitary, EXACT);
        r.push("J U(r,t) J = U(ρrρ, −t)", reflect, EXACT);
        r.push("U(g)U(h) = U(gh)", law, EXACT);
        r.check()
    }

    pub fn spin(&self) -> u32 {
        self.j
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn dim(&self) -> usize {
        2 * self.j as usize + 1
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.validation
    }

    pub fn angular_momentum(&self) -> (&CMatrix, &CMatrix, &CMatrix) {
        (&self.lx, &self.ly, &self.lz)
    }

    pub fn j_toy(&self) -> &AntilinearOperator {
        &self.j_toy
    }

    /// `D^j(r) = exp(−iφ n·L)` from the axis-angle form of `r`.
    pub fn rotation_operator(&self, r: &Matrix3<f64>) -> Result<DenseOperator> {
        let (axis, angle) = axis_angle(r);
        let gen = &self.lx * C64::new(axis[0], 0.0) + &self.ly * C64::new(axis[1], 0.0) + &self.lz * C64::new(axis[2], 0.0);
        let gen = DenseOperator::new((&gen + gen.adjoint()) * C64::new(0.5, 0.0))?;
        spectral_map_complex(&gen, |l| C64::from_polar(1.0, -angle * l), &self.tol)
    }

    pub fn group_operator(&self, g: &SphereElement) -> Result<GroupOperator> {
        let d = self.rotation_operator(&g.rotation_matrix())?;
        let u = d.into_matrix() * C64::from_polar(1.0, self.energy * g.time);
        Ok(if g.reversed {
            GroupOperator::Antilinear(AntilinearOperator::new(u * self.j_toy.matrix())?)
        } else {
            GroupOperator::Linear(DenseOperator::new(u)?)
        })
    }

    pub fn reference_modular_data(&self) -> Result<ModularData> {
        ModularData::from_j_log_delta(self.j_toy.clone(), DenseOperator::new(self.lz.clone())?, &self.tol)
    }

    pub fn wedge_modular_data(&self, w: &SphereWedge) -> Result<ModularData> {
        let u = self.group_operator(&w.element)?;
        let log_delta = u.conjugate_linear(&DenseOperator::new(self.lz.clone())?);
        let j = u.conjugate_antilinear(&self.j_toy);
        ModularData::from_j_log_delta(j, log_delta, &self.tol)
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec::Sphere { j: self.j, energy: self.energy }
    }
}

/// Unit axis and angle in `[0, π]` of a rotation matrix.
pub fn axis_angle(r: &Matrix3<f64>) -> ([f64; 3], f64) {
    let v = Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
    let c = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let s = v.norm() / 2.0;
    let angle = s.atan2(c);
    if angle < 1e-15 {
        return ([0.0, 0.0, 1.0], 0.0);
    }
    let n = if c > 0.0 {
        v / (2.0 * s)
    } else {
        // (r + rᵀ)/2 − cos φ = (1 − cos φ) n nᵀ; take its largest column.
        let b = (r + r.transpose()) * 0.5 - Matrix3::identity() * c;
        let k = (0..3).max_by(|&a, &b2| b[(a, a)].total_cmp(&b[(b2, b2)])).unwrap_or(0);
        let mut n = b.column(k).normalize();
        if n.dot(&v) < 0.0 {
            n = -n;
        }
        n
    };
    ([n[0], n[1], n[2]], angle)
}

fn key_number(x: f64) -> String {
    let q = (x * 1e12).round() / 1e12;
    format!("{:.12}", if q == 0.0 { 0.0 } else { q })
}

impl NetModel for SphereToyModel {
    type Wedge = SphereWedge;
    type Element = SphereElement;

    fn spec(&self) -> ModelSpec {
        SphereToyModel::spec(self)
    }

    fn dim(&self) -> usize {
        SphereToyModel::dim(self)
    }

    fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn reference_wedge(&self) -> SphereWedge {
        SphereWedge::reference()
    }

    fn complement(&self, w: &SphereWedge) -> SphereWedge {
        w.complement()
    }

    fn transform(&self, g: &SphereElement, w: &SphereWedge) -> Result<SphereWedge> {
        Ok(SphereWedge { element: g.compose(&w.element) })
    }

    fn wedge_key(&self, w: &SphereWedge) -> String {
        let (n, t) = w.center();
        format!("hemisphere({},{},{};t={})", key_number(n[0]), key_number(n[1]), key_number(n[2]), key_number(t))
    }

    fn group_operator(&self, g: &SphereElement) -> Result<GroupOperator> {
        SphereToyModel::group_operator(self, g)
    }

    fn wedge_modular_data(&self, w: &SphereWedge) -> Result<ModularData> {
        SphereToyModel::wedge_modular_data(self, w)
    }

    fn default_family(&self) -> Vec<SphereWedge> {
        SphereWedge::coordinate_hemispheres()
    }

    fn sample_elements(&self, count: usize, seed: u64) -> Vec<SphereElement> {
        let mut r = crate::sample::rng(seed);
        (0..count)
            .map(|_| {
                let axis: [f64; 3] = std::array::from_fn(|_| r.sample::<f64, _>(StandardNormal));
                let angle = r.random_range(0.0..std::f64::consts::PI);
                let rot = SphereElement::rotation_about(axis, angle);
                let g = SphereElement::time_shift(r.random_range(-1.0..1.0)).compose(&rot);
                if r.random_bool(0.5) {
                    g.compose(&SphereElement::reflection())
                } else {
                    g
                }
            })
            .collect()
    }
}
