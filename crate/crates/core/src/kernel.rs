//! Dense linear and antilinear operators and the Hermitian functional calculus.
//!
//! An antilinear operator is stored as a matrix `A` acting by `x ↦ A·conj(x)`.
//! Inner products are conjugate-linear in the first slot.

use std::hash::{Hash, Hasher};
use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical tolerances shared by every operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative Hermiticity defect accepted before symmetrizing.
    pub herm: f64,
    /// Relative residual for spectral identities.
    pub spec: f64,
    /// Relative singular-value cutoff for numerical rank.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { herm: 1e-10, spec: 1e-10, rank: 1e-9 }
    }
}

/// Frobenius norm of a complex matrix.
pub fn fro(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral (largest singular value) norm.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    crate::linalg::singular_values_complex(m)[0]
}

pub fn conj_mat(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn conj_vec(v: &CVector) -> CVector {
    v.map(|z| z.conj())
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    matrix: CMatrix,
}

impl DenseOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("operator has non-finite entries".into()));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self { matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: CMatrix::identity(n, n) }
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(to_complex(m))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        &self.matrix * x
    }

    pub fn norm(&self) -> f64 {
        fro(&self.matrix)
    }

    /// `‖A − A†‖_F / ‖A‖_F` (zero for the zero operator).
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.norm();
        if n == 0.0 {
            return 0.0;
        }
        fro(&(&self.matrix - self.matrix.adjoint())) / n
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { matrix: &self.matrix * c }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix - &other.matrix }
    }

    /// Relative distance `‖A − B‖_F / max(‖B‖_F, 1e-300)`.
    pub fn rel_distance(&self, other: &Self) -> f64 {
        fro(&(&self.matrix - &other.matrix)) / other.norm().max(1e-300)
    }

    pub fn try_inverse(&self) -> Result<Self> {
        let sv = crate::linalg::singular_values_complex(&self.matrix);
        let (lo, hi) = (sv[sv.len() - 1], sv[0]);
        if hi == 0.0 || lo / hi < 1e-14 {
            return Err(Error::Singular { ratio: if hi == 0.0 { 0.0 } else { lo / hi } });
        }
        let inv = self.matrix.clone().try_inverse().ok_or(Error::Singular { ratio: lo / hi })?;
        Ok(Self { matrix: inv })
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator { matrix: &self.matrix * &rhs.matrix }
    }
}

impl Mul<&AntilinearOperator> for &DenseOperator {
    type Output = AntilinearOperator;
    fn mul(self, rhs: &AntilinearOperator) -> AntilinearOperator {
        AntilinearOperator { matrix: &self.matrix * &rhs.matrix }
    }
}

/// `x ↦ A·conj(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntilinearOperator {
    matrix: CMatrix,
}

impl AntilinearOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        DenseOperator::new(matrix).map(|d| Self { matrix: d.matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// Componentwise complex conjugation.
    pub fn conjugation(n: usize) -> Self {
        Self { matrix: CMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        &self.matrix * conj_vec(x)
    }

    /// The antilinear adjoint, defined by `⟨x, Ay⟩ = ⟨y, A* x⟩`.
    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.transpose() }
    }

    pub fn square(&self) -> DenseOperator {
        self * self
    }

    pub fn norm(&self) -> f64 {
        fro(&self.matrix)
    }

    /// `‖A² − 1‖_F / √n`.
    pub fn involution_residual(&self) -> f64 {
        let n = self.dim();
        let sq = self.square();
        fro(&(sq.matrix - CMatrix::identity(n, n))) / (n as f64).sqrt()
    }

    /// `‖A*A − 1‖_F / √n`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        fro(&(self.matrix.adjoint() * &self.matrix - CMatrix::identity(n, n))) / (n as f64).sqrt()
    }
}

impl Mul for &AntilinearOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &AntilinearOperator) -> DenseOperator {
        DenseOperator { matrix: &self.matrix * conj_mat(&rhs.matrix) }
    }
}

impl Mul<&DenseOperator> for &AntilinearOperator {
    type Output = AntilinearOperator;
    fn mul(self, rhs: &DenseOperator) -> AntilinearOperator {
        AntilinearOperator { matrix: &self.matrix * conj_mat(&rhs.matrix) }
    }
}

/// Either kind of operator, as produced by a representation with time reversals.
#[derive(Clone, Debug)]
pub enum GroupOperator {
    Linear(DenseOperator),
    Antilinear(AntilinearOperator),
}

impl GroupOperator {
    pub fn dim(&self) -> usize {
        match self {
            GroupOperator::Linear(u) => u.dim(),
            GroupOperator::Antilinear(a) => a.dim(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        match self {
            GroupOperator::Linear(u) => u.matrix(),
            GroupOperator::Antilinear(a) => a.matrix(),
        }
    }

    pub fn is_antilinear(&self) -> bool {
        matches!(self, GroupOperator::Antilinear(_))
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        match self {
            GroupOperator::Linear(u) => u.apply(x),
            GroupOperator::Antilinear(a) => a.apply(x),
        }
    }

    pub fn compose(&self, rhs: &GroupOperator) -> GroupOperator {
        use GroupOperator::*;
        match (self, rhs) {
            (Linear(a), Linear(b)) => Linear(a * b),
            (Linear(a), Antilinear(b)) => Antilinear(a * b),
            (Antilinear(a), Linear(b)) => Antilinear(a * b),
            (Antilinear(a), Antilinear(b)) => Linear(a * b),
        }
    }

    /// Inverse of a unitary or antiunitary operator.
    pub fn unitary_inverse(&self) -> GroupOperator {
        match self {
            GroupOperator::Linear(u) => GroupOperator::Linear(u.adjoint()),
            GroupOperator::Antilinear(a) => {
                GroupOperator::Antilinear(AntilinearOperator { matrix: a.matrix.transpose() })
            }
        }
    }

    /// `U X U⁻¹` for a linear `X`, with `U` unitary or antiunitary.
    pub fn conjugate_linear(&self, x: &DenseOperator) -> DenseOperator {
        match self {
            GroupOperator::Linear(u) => DenseOperator {
                matrix: u.matrix() * x.matrix() * u.matrix().adjoint(),
            },
            GroupOperator::Antilinear(a) => DenseOperator {
                matrix: a.matrix() * conj_mat(x.matrix()) * a.matrix().adjoint(),
            },
        }
    }

    /// `U X U⁻¹` for an antilinear `X`.
    pub fn conjugate_antilinear(&self, x: &AntilinearOperator) -> AntilinearOperator {
        match self {
            GroupOperator::Linear(u) => AntilinearOperator {
                matrix: u.matrix() * x.matrix() * u.matrix().transpose(),
            },
            GroupOperator::Antilinear(a) => AntilinearOperator {
                matrix: a.matrix() * conj_mat(x.matrix()) * a.matrix().transpose(),
            },
        }
    }

    /// Relative Frobenius distance between two group operators of the same kind
    /// (1.0 if the kinds differ).
    pub fn distance(&self, other: &GroupOperator) -> f64 {
        if self.is_antilinear() != other.is_antilinear() {
            return 1.0;
        }
        fro(&(self.matrix() - other.matrix())) / fro(other.matrix()).max(1e-300)
    }
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub eigenvectors: CMatrix,
    /// Hash of the symmetrized source matrix bits.
    pub source_hash: u64,
}

impl SpectralDecomposition {
    pub fn of(a: &DenseOperator, tol: &Tolerances) -> Result<Self> {
        let residual = a.hermitian_residual();
        if residual > tol.herm {
            return Err(Error::NotHermitian { residual, tolerance: tol.herm });
        }
        let sym = (a.matrix() + a.matrix().adjoint()) * C64::new(0.5, 0.0);
        let source_hash = hash_matrix(&sym);
        let (eigenvalues, eigenvectors) = crate::linalg::eigh_complex(&sym);
        Ok(Self { eigenvalues, eigenvectors, source_hash })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(f(λ)) V†` for a complex-valued `f`.
    pub fn map_complex(&self, f: impl Fn(f64) -> C64) -> Result<DenseOperator> {
        let mut scaled = self.eigenvectors.clone();
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let v = f(l);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Range { eigenvalue: l });
            }
            for z in scaled.column_mut(k).iter_mut() {
                *z *= v;
            }
        }
        Ok(DenseOperator { matrix: scaled * self.eigenvectors.adjoint() })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<DenseOperator> {
        self.map_complex(|l| C64::new(f(l), 0.0))
    }

    /// Reconstruction residual `‖V Λ V† − A‖_F / ‖A‖_F`.
    pub fn reconstruction_residual(&self, a: &DenseOperator) -> f64 {
        match self.map(|l| l) {
            Ok(r) => r.rel_distance(a),
            Err(_) => f64::INFINITY,
        }
    }
}

fn hash_matrix(m: &CMatrix) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    m.nrows().hash(&mut h);
    for z in m.iter() {
        z.re.to_bits().hash(&mut h);
        z.im.to_bits().hash(&mut h);
    }
    h.finish()
}

/// `f(A)` for Hermitian `A` and real `f`.
pub fn spectral_map(a: &DenseOperator, f: impl Fn(f64) -> f64, tol: &Tolerances) -> Result<DenseOperator> {
    SpectralDecomposition::of(a, tol)?.map(f)
}

/// `f(A)` for Hermitian `A` and complex-valued `f` (e.g. `e^{itλ}`).
pub fn spectral_map_complex(
    a: &DenseOperator,
    f: impl Fn(f64) -> C64,
    tol: &Tolerances,
) -> Result<DenseOperator> {
    SpectralDecomposition::of(a, tol)?.map_complex(f)
}

/// Polar decomposition of an invertible antilinear `S = J Δ^{1/2}`.
#[derive(Clone, Debug)]
pub struct AntilinearPolar {
    pub j: AntilinearOperator,
    pub delta: DenseOperator,
    pub log_delta: DenseOperator,
}

/// Computes `J` (antiunitary) and `Δ = S*S` (positive) with `S = J Δ^{1/2}`.
///
/// With `S = A∘C` and `A = U Σ V†` one has `Δ = conj(V) Σ² Vᵀ` and `J = (U V†)∘C`.
pub fn antilinear_polar(s: &AntilinearOperator, tol: &Tolerances) -> Result<AntilinearPolar> {
    let n = s.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    let svd = crate::linalg::svd_complex(s.matrix());
    let sv = &svd.s;
    let (lo, hi) = (sv[n - 1], sv[0]);
    if hi == 0.0 || lo <= tol.rank * hi {
        return Err(Error::Singular { ratio: if hi == 0.0 { 0.0 } else { lo / hi } });
    }
    let v = svd.v;
    let j = AntilinearOperator { matrix: &svd.u * v.adjoint() };
    let cv = conj_mat(&v);
    let build = |f: &dyn Fn(f64) -> f64| {
        let mut left = cv.clone();
        for (k, &s) in sv.iter().enumerate().take(n) {
            let w = C64::new(f(s), 0.0);
            for z in left.column_mut(k).iter_mut() {
                *z *= w;
            }
        }
        let m = left * v.transpose();
        (&m + m.adjoint()) * C64::new(0.5, 0.0)
    };
    let delta = DenseOperator { matrix: build(&|x| x * x) };
    let log_delta = DenseOperator { matrix: build(&|x| 2.0 * x.ln()) };
    Ok(AntilinearPolar { j, delta, log_delta })
}

/// Real symmetric matrix exponential `exp(i t M)` via the real eigenbasis.
pub fn expi_real_symmetric(m: &DMatrix<f64>, t: f64) -> CMatrix {
    let (vals, vecs) = crate::linalg::eigh_real(m);
    let v = to_complex(&vecs);
    let mut left = v.clone();
    for (k, &l) in vals.iter().enumerate() {
        let w = C64::from_polar(1.0, t * l);
        for z in left.column_mut(k).iter_mut() {
            *z *= w;
        }
    }
    left * v.transpose()
}

/// Inner product `⟨x, y⟩`, conjugate-linear in `x`.
pub fn inner(x: &CVector, y: &CVector) -> C64 {
    x.dotc(y)
}

pub fn to_cvector(v: &[C64]) -> CVector {
    DVector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn herm(n: usize, seed: u64) -> DenseOperator {
        let m = crate::sample::complex_gaussian(n, n, seed);
        DenseOperator::new((&m + m.adjoint()) * C64::new(0.5, 0.0)).unwrap()
    }

    #[test]
    fn diagonal_square_root() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 9.0]));
        let a = DenseOperator::from_real(&d).unwrap();
        let r = spectral_map(&a, f64::sqrt, &Tolerances::default()).unwrap();
        assert!((r.matrix()[(0, 0)].re - 2.0).abs() < 1e-15);
        assert!((r.matrix()[(1, 1)].re - 3.0).abs() < 1e-15);
        assert!(r.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn log_of_nonpositive_is_range_error() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0]));
        let a = DenseOperator::from_real(&d).unwrap();
        assert!(matches!(spectral_map(&a, f64::ln, &Tolerances::default()), Err(Error::Range { .. })));
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let a = DenseOperator::new(m).unwrap();
        assert!(matches!(spectral_map(&a, |x| x, &Tolerances::default()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn polar_of_conjugation_times_diagonal() {
        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(2.0, 0.0), C64::new(0.5, 0.0)]));
        let s = AntilinearOperator::new(d).unwrap();
        let p = antilinear_polar(&s, &Tolerances::default()).unwrap();
        assert!((p.delta.matrix()[(0, 0)].re - 4.0).abs() < 1e-14);
        assert!((p.delta.matrix()[(1, 1)].re - 0.25).abs() < 1e-14);
        assert!(fro(&(p.j.matrix() - CMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn polar_rejects_singular() {
        let s = AntilinearOperator::new(CMatrix::zeros(2, 2)).unwrap();
        assert!(matches!(antilinear_polar(&s, &Tolerances::default()), Err(Error::Singular { .. })));
    }

    #[test]
    fn conjugation_matches_composition() {
        let q = crate::sample::complex_gaussian(4, 4, 3);
        let (_, u) = crate::linalg::eigh_complex(&(&q + q.adjoint()));
        for g in [
            GroupOperator::Linear(DenseOperator::new(u.clone()).unwrap()),
            GroupOperator::Antilinear(AntilinearOperator::new(u.clone()).unwrap()),
        ] {
            let x = herm(4, 5);
            let a = AntilinearOperator::new(crate::sample::complex_gaussian(4, 4, 6)).unwrap();
            let inv = g.unitary_inverse();
            let lin = g.compose(&GroupOperator::Linear(x.clone())).compose(&inv);
            assert!(fro(&(lin.matrix() - g.conjugate_linear(&x).matrix())) < 1e-12);
            let anti = g.compose(&GroupOperator::Antilinear(a.clone())).compose(&inv);
            assert!(anti.is_antilinear());
            assert!(fro(&(anti.matrix() - g.conjugate_antilinear(&a).matrix())) < 1e-12);
        }
    }

    #[test]
    fn antilinear_adjoint_identity() {
        let a = AntilinearOperator::new(crate::sample::complex_gaussian(4, 4, 3)).unwrap();
        let x = crate::sample::complex_gaussian(4, 1, 4).column(0).into_owned();
        let y = crate::sample::complex_gaussian(4, 1, 5).column(0).into_owned();
        let lhs = inner(&x, &a.apply(&y));
        let rhs = inner(&y, &a.adjoint().apply(&x));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn spectral_map_is_multiplicative(n in 1usize..7, seed in 0u64..1000) {
            let a = herm(n, seed);
            let tol = Tolerances::default();
            let dec = SpectralDecomposition::of(&a, &tol).unwrap();
            let f = dec.map(|x| x.sin()).unwrap();
            let g = dec.map(|x| x.cos() + 2.0).unwrap();
            let fg = dec.map(|x| x.sin() * (x.cos() + 2.0)).unwrap();
            prop_assert!((&f * &g).rel_distance(&fg) < 1e-12);
            prop_assert!(dec.reconstruction_residual(&a) < 1e-12);
        }

        #[test]
        fn exp_of_sum_for_commuting_functions(n in 1usize..7, seed in 0u64..1000, t in -2.0f64..2.0, s in -2.0f64..2.0) {
            let a = herm(n, seed);
            let tol = Tolerances::default();
            let et = spectral_map_complex(&a, |x| C64::from_polar(1.0, t * x), &tol).unwrap();
            let es = spectral_map_complex(&a, |x| C64::from_polar(1.0, s * x), &tol).unwrap();
            let ets = spectral_map_complex(&a, |x| C64::from_polar(1.0, (t + s) * x), &tol).unwrap();
            prop_assert!((&et * &es).rel_distance(&ets) < 1e-12);
        }

        #[test]
        fn polar_reconstructs(n in 1usize..7, seed in 0u64..1000) {
            let m = crate::sample::complex_gaussian(n, n, seed);
            let s = AntilinearOperator::new(m.clone()).unwrap();
            if let Ok(p) = antilinear_polar(&s, &Tolerances::default()) {
                let half = spectral_map(&p.delta, f64::sqrt, &Tolerances { herm: 1e-8, ..Default::default() }).unwrap();
                let rebuilt = &p.j * &half;
                prop_assert!(fro(&(rebuilt.matrix() - &m)) / fro(&m) < 1e-9);
                prop_assert!(p.j.unitarity_residual() < 1e-12);
            }
        }
    }
}
