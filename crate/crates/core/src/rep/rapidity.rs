//! The d=2 massive scalar in rapidity space, compressed to Hermite functions.
//!
//! One-particle states are functions `ψ(θ)` on the mass shell
//! `p = m(cosh θ, sinh θ)`. The basis is `φₙ(θ) = hₙ(θ/σ)/√σ`, so `d/dθ`
//! compresses to a real antisymmetric tridiagonal matrix `D` and real
//! multiplication operators compress to real symmetric matrices.
//!
//! Conventions: `U(a) = exp(i M_f)` with `f(θ) = a₀m cosh θ − a₁m sinh θ`,
//! `U(Λ_{W₁}(t)) = exp(2πt D)`, `log Δ_{W₁} = H = −2πi D`, `J_{W₁} = C`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hermite::Quadrature;
use super::{ModelSpec, NetModel, ValidationReport};
use crate::kernel::{
    conj_mat, expi_real_symmetric, fro, op_norm, to_complex, AntilinearOperator, CMatrix, CVector, DenseOperator,
    GroupOperator, SpectralDecomposition, Tolerances, C64,
};
use crate::subspace::ModularData;
use crate::wedge::{PoincareElement, Region, Wedge};
use crate::{Error, Result};

pub const DEFAULT_SIGMA: f64 = 0.5;
pub const DEFAULT_QUADRATURE_FACTOR: usize = 4;

/// `A·exp(−|x − c|²/(2w²))` on ℝ² (Euclidean norm).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub width: f64,
}

impl GaussianBump {
    /// `f̂(p) = ∫ f(x) e^{i p·x} d²x` on the mass shell, with `p·x = p₀x₀ − p₁x₁`.
    pub fn on_mass_shell(&self, mass: f64, theta: f64) -> C64 {
        let w2 = self.width * self.width;
        let phase = mass * (self.center[0] * theta.cosh() - self.center[1] * theta.sinh());
        let envelope = (-0.5 * w2 * mass * mass * (2.0 * theta).cosh()).exp();
        C64::from_polar(self.amplitude * 2.0 * PI * w2 * envelope, phase)
    }

    /// Euclidean distance from the centre to the boundary of `W₁`, in widths
    /// (negative when the centre lies outside).
    pub fn widths_inside_w1(&self) -> f64 {
        (self.center[1] - self.center[0].abs()) / (std::f64::consts::SQRT_2 * self.width)
    }

    pub fn translated(&self, a: [f64; 2]) -> Self {
        Self { center: [self.center[0] + a[0], self.center[1] + a[1]], ..*self }
    }
}

/// Seeded bumps lying at least six widths inside `W₁`.
pub fn random_w1_bumps(count: usize, seed: u64) -> Vec<GaussianBump> {
    let mut r = crate::sample::rng(seed);
    (0..count)
        .map(|_| {
            let width = r.random_range(0.4..0.6);
            let c0 = r.random_range(-0.5..0.5_f64);
            let c1 = c0.abs() + 6.0 * std::f64::consts::SQRT_2 * width + r.random_range(0.0..0.3);
            GaussianBump { amplitude: r.random_range(0.5..1.5), center: [c0, c1], width }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct RapidityModel {
    mass: f64,
    n: usize,
    sigma: f64,
    quadrature_factor: usize,
    quad: Quadrature,
    d: DMatrix<f64>,
    h: DenseOperator,
    h_spectrum: SpectralDecomposition,
    tol: Tolerances,
    validation: ValidationReport,
}

impl RapidityModel {
    pub fn new(mass: f64, n: usize) -> Result<Self> {
        Self::with_options(mass, n, DEFAULT_SIGMA, DEFAULT_QUADRATURE_FACTOR, Tolerances::default())
    }

    pub fn with_options(mass: f64, n: usize, sigma: f64, quadrature_factor: usize, tol: Tolerances) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!("basis size must be at least 2, got {n}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("Hermite scale must be positive, got {sigma}")));
        }
        if quadrature_factor < 2 {
            return Err(Error::InvalidArgument("quadrature factor must be at least 2".into()));
        }
        let mut d = DMatrix::zeros(n, n);
        for k in 1..n {
            let v = (k as f64 / 2.0).sqrt() / sigma;
            d[(k - 1, k)] = v;
            d[(k, k - 1)] = -v;
        }
        let h = DenseOperator::new(to_complex(&d) * C64::new(0.0, -2.0 * PI))?;
        let h_spectrum = SpectralDecomposition::of(&h, &tol)?;
        let quad = Quadrature::new(quadrature_factor * n);
        let mut model = Self {
            mass,
            n,
            sigma,
            quadrature_factor,
            quad,
            d,
            h,
            h_spectrum,
            tol,
            validation: ValidationReport::default(),
        };
        model.validation = model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<ValidationReport> {
        let mut r = ValidationReport::default();
        r.push("D = −Dᵀ", (&self.d + self.d.transpose()).amax(), 0.0);
        r.push("H = H†", self.h.hermitian_residual(), 0.0);
        let jhj = conj_mat(self.h.matrix()) + self.h.matrix();
        r.push("J H J = −H", fro(&jhj), 0.0);
        for (name, a) in [("M_f = M_fᵀ (f = m cosh θ)", [1.0, 0.0]), ("M_f = M_fᵀ (f = m sinh θ)", [0.0, -1.0])] {
            let m = self.translation_generator(a);
            r.push(name, (&m - m.transpose()).amax(), 0.0);
        }
        let a = [0.3, 0.2];
        let u = self.translation(a);
        let um = self.translation([-a[0], -a[1]]);
        let cuc = DenseOperator::from_matrix_unchecked(conj_mat(u.matrix()));
        r.push("J U(a) J = U(−a)", cuc.rel_distance(&um), self.tol.spec);
        let (plus, minus) = self.lightlike_generator_minima();
        r.push("ℓ₊ generator ≥ 0", (-plus).max(0.0), 1e-10);
        r.push("ℓ₋ generator ≥ 0", (-minus).max(0.0), 1e-10);
        r.check()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn quadrature_factor(&self) -> usize {
        self.quadrature_factor
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.validation
    }

    /// Galerkin matrix of `d/dθ`.
    pub fn derivative(&self) -> &DMatrix<f64> {
        &self.d
    }

    /// `H_{W₁} = −2πi D`.
    pub fn boost_generator(&self) -> &DenseOperator {
        &self.h
    }

    /// Galerkin matrix of multiplication by a real function of `θ`.
    pub fn multiplication(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let s = self.sigma;
        self.quad.galerkin(self.n, |x| f(s * x))
    }

    /// `M_f` for `f(θ) = a₀m cosh θ − a₁m sinh θ`.
    pub fn translation_generator(&self, a: [f64; 2]) -> DMatrix<f64> {
        let m = self.mass;
        self.multiplication(|t| m * (a[0] * t.cosh() - a[1] * t.sinh()))
    }

    /// `U(a) = exp(i M_f)`.
    pub fn translation(&self, a: [f64; 2]) -> DenseOperator {
        DenseOperator::from_matrix_unchecked(expi_real_symmetric(&self.translation_generator(a), 1.0))
    }

    /// `exp(βD)`, the boost with rapidity `β` (so `U(Λ_{W₁}(t))` is `boost(2πt)`).
    pub fn boost(&self, beta: f64) -> DenseOperator {
        let m = self
            .h_spectrum
            .map_complex(|l| C64::from_polar(1.0, beta * l / (2.0 * PI)))
            .expect("finite spectrum");
        DenseOperator::from_matrix_unchecked(m.matrix().map(|z| C64::new(z.re, 0.0)))
    }

    /// Smallest eigenvalues of the generators of `ℓ± = (1, ±1)`, i.e. of the
    /// Galerkin matrices of `m e^{∓θ}`.
    pub fn lightlike_generator_minima(&self) -> (f64, f64) {
        let min_eig = |m: DMatrix<f64>| crate::linalg::eigh_real(&m).0[0];
        (min_eig(self.translation_generator([1.0, 1.0])), min_eig(self.translation_generator([1.0, -1.0])))
    }

    /// `U(g)` for `g = (Λ, a)`; antilinear when `Λ` reverses time.
    pub fn group_operator(&self, g: &PoincareElement) -> Result<GroupOperator> {
        let (s, beta) = lorentz_parts(g)?;
        let a = g.translation_part();
        let ua = self.translation([a[0], a[1]]);
        let b = self.boost(beta);
        Ok(if s > 0.0 {
            GroupOperator::Linear(&ua * &b)
        } else {
            GroupOperator::Antilinear(AntilinearOperator::from_matrix_unchecked(ua.matrix() * b.matrix()))
        })
    }

    pub fn reference_modular_data(&self) -> Result<ModularData> {
        ModularData::from_j_log_delta(AntilinearOperator::conjugation(self.n), self.h.clone(), &self.tol)
    }

    /// `(J_W, log Δ_W) = U(g)(C, H)U(g)⁻¹` for `W = gW₁`.
    pub fn wedge_modular_data(&self, w: &Wedge) -> Result<ModularData> {
        if w.dim() != 2 {
            return Err(Error::Unsupported(format!("rapidity model has d=2 wedges only, got d={}", w.dim())));
        }
        let g = w.element();
        if g.max_abs_diff(&PoincareElement::identity(2)) == 0.0 {
            return self.reference_modular_data();
        }
        let u = self.group_operator(g)?;
        let log_delta = u.conjugate_linear(&self.h);
        let j = u.conjugate_antilinear(&AntilinearOperator::conjugation(self.n));
        ModularData::from_j_log_delta(j, log_delta, &self.tol)
    }

    /// Hermite coefficients `cₖ = ∫ φₖ ψ dθ` of a function on the mass shell.
    pub fn embed(&self, psi: impl Fn(f64) -> C64) -> CVector {
        let q = &self.quad;
        let scale = self.sigma.sqrt();
        let mut c = CVector::zeros(self.n);
        for i in 0..q.len() {
            let v = psi(self.sigma * q.nodes[i]);
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let w = q.log_sqrt_weight[i].exp() * scale;
            if !w.is_finite() {
                continue;
            }
            let v = v * w;
            for k in 0..self.n {
                c[k] += v * q.modes[(k, i)];
            }
        }
        c
    }

    /// `ψ_f(θ) = f̂(m cosh θ, m sinh θ)` projected to the basis.
    pub fn mass_shell_embedding(&self, f: &[GaussianBump]) -> Result<CVector> {
        for b in f {
            let ok = [b.amplitude, b.center[0], b.center[1], b.width].iter().all(|x| x.is_finite());
            if !ok || b.width <= 0.0 {
                return Err(Error::InvalidArgument(format!("bump parameters must be finite with positive width: {b:?}")));
            }
        }
        let m = self.mass;
        Ok(self.embed(|t| f.iter().map(|b| b.on_mass_shell(m, t)).sum()))
    }

    /// `‖U(Λ(t))U(a)U(Λ(−t)) − U(Λ(t)a)‖` on the first [`resolved_modes`](Self::resolved_modes) modes.
    pub fn group_law_defect(&self, t: f64, a: [f64; 2]) -> f64 {
        let bt = self.boost(2.0 * PI * t);
        let bm = self.boost(-2.0 * PI * t);
        let lhs = &(&bt * &self.translation(a)) * &bm;
        let la = PoincareElement::boost(2, t).apply(&nalgebra::DVector::from_column_slice(&a));
        let rhs = self.translation([la[0], la[1]]);
        self.restricted_norm(&(lhs.matrix() - rhs.matrix()))
    }

    /// Number of low modes on which compression errors are measured.
    pub fn resolved_modes(&self) -> usize {
        16.min(self.n / 2).max(1)
    }

    /// Operator norm of `X` restricted to the span of the resolved modes.
    pub fn restricted_norm(&self, x: &CMatrix) -> f64 {
        op_norm(&x.columns(0, self.resolved_modes()).into_owned())
    }

    /// Warns when `U(a)` oscillates faster than the basis resolves.
    pub fn resolution_warning(&self, a: [f64; 2]) -> Option<String> {
        let k_max = (2.0 * self.n as f64).sqrt() / self.sigma;
        let theta = 0.5 * self.sigma * (2.0 * self.n as f64).sqrt();
        let rate = a[0].abs().max(a[1].abs()) * self.mass * theta.cosh();
        (rate > k_max).then(|| {
            format!("translation {a:?} oscillates at rate {rate:.1} beyond the basis resolution {k_max:.1}")
        })
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec::Rapidity { mass: self.mass, n: self.n, sigma: self.sigma, quadrature_factor: self.quadrature_factor }
    }
}

/// Writes a proper d=2 Lorentz matrix as `s·B(β)` with
/// `B(β) = [[cosh β, −sinh β], [−sinh β, cosh β]]`.
pub(crate) fn lorentz_parts(g: &PoincareElement) -> Result<(f64, f64)> {
    if g.dim() != 2 {
        return Err(Error::Unsupported(format!("expected a d=2 Poincaré element, got d={}", g.dim())));
    }
    let l = g.linear();
    let s = l[(0, 0)].signum();
    let beta = (-l[(0, 1)] / s).asinh();
    let (c, sh) = (beta.cosh(), beta.sinh());
    let residual = [(l[(0, 0)] - s * c), (l[(1, 1)] - s * c), (l[(0, 1)] + s * sh), (l[(1, 0)] + s * sh)]
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    if residual > 1e-9 * c {
        return Err(Error::NotLorentz { residual });
    }
    Ok((s, beta))
}

impl NetModel for RapidityModel {
    type Wedge = Wedge;
    type Element = PoincareElement;

    fn spec(&self) -> ModelSpec {
        RapidityModel::spec(self)
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn reference_wedge(&self) -> Wedge {
        Wedge::standard(2)
    }

    fn complement(&self, w: &Wedge) -> Wedge {
        w.complement()
    }

    fn transform(&self, g: &PoincareElement, w: &Wedge) -> Result<Wedge> {
        w.transform(g)
    }

    fn wedge_key(&self, w: &Wedge) -> String {
        Region::wedge(w.clone()).canonical_key()
    }

    fn group_operator(&self, g: &PoincareElement) -> Result<GroupOperator> {
        RapidityModel::group_operator(self, g)
    }

    fn wedge_modular_data(&self, w: &Wedge) -> Result<ModularData> {
        RapidityModel::wedge_modular_data(self, w)
    }

    /// `{W₁, W₁′, W₁ ± ½ℓ₊, W₁ ± ½ℓ₋}`.
    fn default_family(&self) -> Vec<Wedge> {
        let w1 = Wedge::standard(2);
        let mut fam = vec![w1.clone(), w1.complement()];
        for a in [[0.5, 0.5], [-0.5, -0.5], [-0.5, 0.5], [0.5, -0.5]] {
            fam.push(w1.translated(&a));
        }
        fam
    }

    fn sample_elements(&self, count: usize, seed: u64) -> Vec<PoincareElement> {
        let mut r = crate::sample::rng(seed);
        (0..count)
            .map(|_| {
                let t = r.random_range(-0.05..0.05);
                let a = [r.random_range(-0.2..0.2), r.random_range(-0.2..0.2)];
                let boost = PoincareElement::boost(2, t);
                let g = PoincareElement::translation(&a).compose(&boost);
                if r.random_bool(0.5) {
                    g.compose(&PoincareElement::reflection(2))
                } else {
                    g
                }
            })
            .collect()
    }
}
