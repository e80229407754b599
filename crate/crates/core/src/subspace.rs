//! Closed real subspaces of `ℂⁿ`, their symplectic lattice, and Tomita data.
//!
//! A vector `z ∈ ℂⁿ` is realified as `(Re z; Im z) ∈ ℝ²ⁿ`, so the real inner
//! product is `Re⟨h,k⟩` and `Im⟨h,k⟩ = Re⟨ih,k⟩`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    antilinear_polar, conj_mat, fro, AntilinearOperator, CMatrix, CVector, DenseOperator,
    SpectralDecomposition, Tolerances, C64,
};

/// Relative tolerance for matching `log λ` with `−log λ`.
pub const PAIRING_TOL: f64 = 1e-8;

pub fn realify(z: &CVector) -> DVector<f64> {
    let n = z.len();
    DVector::from_fn(2 * n, |r, _| if r < n { z[r].re } else { z[r - n].im })
}

pub fn complexify(x: &DVector<f64>) -> CVector {
    let n = x.len() / 2;
    CVector::from_fn(n, |r, _| C64::new(x[r], x[r + n]))
}

fn realify_columns(m: &CMatrix) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, m.ncols(), |r, c| if r < n { m[(r, c)].re } else { m[(r - n, c)].im })
}

#[derive(Clone, Debug)]
pub struct RealSubspace {
    n: usize,
    /// Orthonormal basis of the realified subspace, `2n × k`.
    basis: DMatrix<f64>,
    rank_tol: f64,
}

impl RealSubspace {
    pub fn zero(n: usize) -> Self {
        Self { n, basis: DMatrix::zeros(2 * n, 0), rank_tol: Tolerances::default().rank }
    }

    pub fn full(n: usize) -> Self {
        Self { n, basis: DMatrix::identity(2 * n, 2 * n), rank_tol: Tolerances::default().rank }
    }

    /// `ℝⁿ ⊂ ℂⁿ`.
    pub fn real_part(n: usize) -> Self {
        let mut b = DMatrix::zeros(2 * n, n);
        for k in 0..n {
            b[(k, k)] = 1.0;
        }
        Self { n, basis: b, rank_tol: Tolerances::default().rank }
    }

    /// Real span of the given realified columns (`2n × p`).
    pub fn from_real_columns(n: usize, cols: &DMatrix<f64>, rank_tol: f64) -> Self {
        assert_eq!(cols.nrows(), 2 * n, "realified generators must have 2n rows");
        if cols.ncols() == 0 {
            return Self { rank_tol, ..Self::zero(n) };
        }
        let svd = crate::linalg::svd_real(cols);
        let top = svd.s[0];
        let rank = svd.s.iter().take_while(|&&x| top > 1e-300 && x > rank_tol * top).count();
        Self { n, basis: svd.u.columns(0, rank).into_owned(), rank_tol }
    }

    /// Real span of the columns of a complex `n × p` matrix.
    pub fn from_complex_columns(m: &CMatrix, rank_tol: f64) -> Self {
        Self::from_real_columns(m.nrows(), &realify_columns(m), rank_tol)
    }

    pub fn from_generators(n: usize, gens: &[CVector], rank_tol: f64) -> Result<Self> {
        let mut m = CMatrix::zeros(n, gens.len());
        for (c, g) in gens.iter().enumerate() {
            if g.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.len() });
            }
            m.set_column(c, g);
        }
        Ok(Self::from_complex_columns(&m, rank_tol))
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn real_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn with_rank_tol(mut self, rank_tol: f64) -> Self {
        self.rank_tol = rank_tol;
        self
    }

    pub fn real_basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Basis vectors as complex columns, `n × k`.
    pub fn complex_basis(&self) -> CMatrix {
        let n = self.n;
        CMatrix::from_fn(n, self.real_dim(), |r, c| C64::new(self.basis[(r, c)], self.basis[(r + n, c)]))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    fn tol_with(&self, other: &Self) -> f64 {
        self.rank_tol.max(other.rank_tol)
    }

    /// Orthogonal projection of `h` onto the subspace.
    pub fn project(&self, h: &CVector) -> CVector {
        let x = realify(h);
        complexify(&(&self.basis * (self.basis.transpose() * x)))
    }

    /// `‖h − P h‖ / ‖h‖` (zero for `h = 0`).
    pub fn relative_distance(&self, h: &CVector) -> f64 {
        let nh = h.norm();
        if nh == 0.0 {
            return 0.0;
        }
        (h - self.project(h)).norm() / nh
    }

    pub fn contains(&self, h: &CVector) -> bool {
        self.relative_distance(h) <= self.rank_tol.sqrt().max(self.rank_tol * 10.0)
    }

    /// Multiplication by `i`.
    pub fn times_i(&self) -> Self {
        let n = self.n;
        let mut b = DMatrix::zeros(2 * n, self.real_dim());
        for c in 0..self.real_dim() {
            for r in 0..n {
                b[(r, c)] = -self.basis[(r + n, c)];
                b[(r + n, c)] = self.basis[(r, c)];
            }
        }
        Self { n, basis: b, rank_tol: self.rank_tol }
    }

    /// Real orthogonal complement in `ℝ²ⁿ`.
    pub fn orthogonal_complement(&self) -> Self {
        let m = 2 * self.n;
        if self.real_dim() == 0 {
            return Self { rank_tol: self.rank_tol, ..Self::full(self.n) };
        }
        if self.real_dim() == m {
            return Self { rank_tol: self.rank_tol, ..Self::zero(self.n) };
        }
        let q = DMatrix::<f64>::identity(m, m) - &self.basis * self.basis.transpose();
        let (vals, vecs) = crate::linalg::eigh_real(&q);
        let start = vals.iter().take_while(|&&l| l <= 0.5).count();
        Self { n: self.n, basis: vecs.columns(start, m - start).into_owned(), rank_tol: self.rank_tol }
    }

    /// `K′ = {h : Im⟨h,k⟩ = 0 ∀k ∈ K} = i·K^⊥`.
    pub fn symplectic_complement(&self) -> Self {
        self.orthogonal_complement().times_i()
    }

    /// Sines of the principal angles from this subspace into `other`, ascending.
    pub fn principal_sines(&self, other: &Self) -> Result<Vec<f64>> {
        self.check_same(other)?;
        if self.real_dim() == 0 {
            return Ok(Vec::new());
        }
        let resid = &self.basis - &other.basis * (other.basis.transpose() * &self.basis);
        let mut s = crate::linalg::singular_values_real(&resid);
        s.reverse();
        s.resize(self.real_dim(), 0.0);
        Ok(s)
    }

    /// Largest distance from a unit vector of `self` to `other`.
    pub fn max_sine_to(&self, other: &Self) -> Result<f64> {
        Ok(self.principal_sines(other)?.last().copied().unwrap_or(0.0))
    }

    /// Symmetric gap: `1` when real dimensions differ, else the largest principal sine.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        if self.real_dim() != other.real_dim() {
            return Ok(1.0);
        }
        Ok(self.max_sine_to(other)?.max(other.max_sine_to(self)?))
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let tol = self.tol_with(other);
        if self.real_dim() == 0 || other.real_dim() == 0 {
            return Ok(Self { rank_tol: tol, ..Self::zero(self.n) });
        }
        let resid = &self.basis - &other.basis * (other.basis.transpose() * &self.basis);
        let svd = crate::linalg::svd_real(&resid);
        let mut cols = Vec::new();
        for (r, &s) in svd.s.iter().enumerate() {
            if s <= tol {
                cols.push(&self.basis * svd.v.column(r));
            }
        }
        if cols.is_empty() {
            return Ok(Self { rank_tol: tol, ..Self::zero(self.n) });
        }
        let m = DMatrix::from_columns(&cols);
        Ok(Self::from_real_columns(self.n, &m, tol))
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut m = DMatrix::zeros(2 * self.n, self.real_dim() + other.real_dim());
        m.columns_mut(0, self.real_dim()).copy_from(&self.basis);
        m.columns_mut(self.real_dim(), other.real_dim()).copy_from(&other.basis);
        Ok(Self::from_real_columns(self.n, &m, self.tol_with(other)))
    }

    /// Rank-based equality: equal dimensions, and the join adds nothing.
    pub fn same_as(&self, other: &Self) -> Result<bool> {
        if self.real_dim() != other.real_dim() {
            self.check_same(other)?;
            return Ok(false);
        }
        Ok(self.join(other)?.real_dim() == self.real_dim())
    }

    pub fn is_subspace_of(&self, other: &Self) -> Result<bool> {
        Ok(self.join(other)?.real_dim() == other.real_dim())
    }

    /// Image under a complex-linear map.
    pub fn map_linear(&self, u: &CMatrix) -> Self {
        Self::from_complex_columns(&(u * self.complex_basis()), self.rank_tol)
    }

    /// Image under an antilinear map `x ↦ A·conj(x)`.
    pub fn map_antilinear(&self, a: &AntilinearOperator) -> Self {
        Self::from_complex_columns(&(a.matrix() * conj_mat(&self.complex_basis())), self.rank_tol)
    }

    pub fn to_json(&self, tol: &Tolerances) -> SubspaceJson {
        let b = self.complex_basis();
        SubspaceJson {
            ambient_dim: self.n,
            real_dim: self.real_dim(),
            basis: (0..b.ncols()).map(|c| b.column(c).iter().map(|z| [z.re, z.im]).collect()).collect(),
            tolerances: *tol,
        }
    }

    pub fn from_json(j: &SubspaceJson) -> Result<Self> {
        let gens: Vec<CVector> = j
            .basis
            .iter()
            .map(|v| CVector::from_iterator(v.len(), v.iter().map(|p| C64::new(p[0], p[1]))))
            .collect();
        Self::from_generators(j.ambient_dim, &gens, j.tolerances.rank)
    }
}

/// Serialized subspace: basis vectors as lists of `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SubspaceJson {
    pub ambient_dim: usize,
    pub real_dim: usize,
    pub basis: Vec<Vec<[f64; 2]>>,
    pub tolerances: Tolerances,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Standardness {
    Standard,
    FailsSeparating,
    FailsCyclic,
    FailsBoth,
}

impl fmt::Display for Standardness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Standardness::Standard => "standard",
            Standardness::FailsSeparating => "fails_separating",
            Standardness::FailsCyclic => "fails_cyclic",
            Standardness::FailsBoth => "fails_separating_and_cyclic",
        })
    }
}

#[derive(Clone, Debug)]
pub struct StandardnessReport {
    pub verdict: Standardness,
    /// `real_dim(K ∩ iK)`.
    pub separating_defect: usize,
    /// `2n − real_dim(K + iK)`.
    pub cyclic_defect: usize,
    /// Nonzero vector of `K ∩ iK`.
    pub separating_witness: Option<CVector>,
    /// Vector orthogonal to `K + iK`.
    pub cyclic_witness: Option<CVector>,
}

pub fn standardness(k: &RealSubspace) -> StandardnessReport {
    let ik = k.times_i();
    let meet = k.meet(&ik).expect("same ambient");
    let join = k.join(&ik).expect("same ambient");
    let separating_defect = meet.real_dim();
    let cyclic_defect = 2 * k.ambient_dim() - join.real_dim();
    let separating_witness = (separating_defect > 0).then(|| meet.complex_basis().column(0).into_owned());
    let cyclic_witness = (cyclic_defect > 0)
        .then(|| join.orthogonal_complement().complex_basis().column(0).into_owned());
    let verdict = match (separating_defect > 0, cyclic_defect > 0) {
        (false, false) => Standardness::Standard,
        (true, false) => Standardness::FailsSeparating,
        (false, true) => Standardness::FailsCyclic,
        (true, true) => Standardness::FailsBoth,
    };
    StandardnessReport { verdict, separating_defect, cyclic_defect, separating_witness, cyclic_witness }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeOp {
    Meet,
    Join,
}

pub fn lattice_op(op: LatticeOp, a: &RealSubspace, b: &RealSubspace) -> Result<RealSubspace> {
    match op {
        LatticeOp::Meet => a.meet(b),
        LatticeOp::Join => a.join(b),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorReport {
    pub factor: bool,
    pub center_real_dim: usize,
}

pub fn factor_classify(k: &RealSubspace) -> FactorReport {
    let center = k.meet(&k.symplectic_complement()).expect("same ambient").real_dim();
    FactorReport { factor: center == 0, center_real_dim: center }
}

/// Tomita operator `S = JΔ^{1/2}` with its polar parts.
#[derive(Clone, Debug)]
pub struct ModularData {
    pub s: AntilinearOperator,
    pub j: AntilinearOperator,
    pub delta: DenseOperator,
    pub log_delta: DenseOperator,
    spectrum: SpectralDecomposition,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModularResiduals {
    /// `‖J log Δ J + log Δ‖ / max(‖log Δ‖, 1)`.
    pub j_log_delta_j: f64,
    /// `‖JΔJ − Δ⁻¹‖ / ‖Δ⁻¹‖`.
    pub j_delta_j: f64,
    /// `‖J² − 1‖ / √n`.
    pub j_square: f64,
    /// `‖S² − 1‖ / √n`.
    pub s_square: f64,
}

impl ModularData {
    /// Builds data from `J` and `log Δ`, with `Δ = exp(log Δ)` and `S = JΔ^{1/2}`.
    pub fn from_j_log_delta(j: AntilinearOperator, log_delta: DenseOperator, tol: &Tolerances) -> Result<Self> {
        if j.dim() != log_delta.dim() {
            return Err(Error::DimensionMismatch { expected: log_delta.dim(), found: j.dim() });
        }
        let spectrum = SpectralDecomposition::of(&log_delta, tol)?;
        let delta = spectrum.map(f64::exp)?;
        let half = spectrum.map(|l| (0.5 * l).exp())?;
        let s = &j * &half;
        let log_delta = DenseOperator::new((log_delta.matrix() + log_delta.matrix().adjoint()) * C64::new(0.5, 0.0))?;
        Ok(Self { s, j, delta, log_delta, spectrum })
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn log_spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn delta_inverse(&self) -> DenseOperator {
        self.spectrum.map(|l| (-l).exp()).expect("finite spectrum")
    }

    /// `Δ^{it}`.
    pub fn delta_it(&self, t: f64) -> DenseOperator {
        self.spectrum.map_complex(|l| C64::from_polar(1.0, t * l)).expect("finite spectrum")
    }

    pub fn residuals(&self) -> ModularResiduals {
        let n = self.dim();
        let id = DenseOperator::identity(n);
        let jlj = &(&self.j * &self.log_delta) * &self.j;
        let j_log_delta_j =
            fro(&(jlj.matrix() + self.log_delta.matrix())) / self.log_delta.norm().max(1.0);
        let jdj = &(&self.j * &self.delta) * &self.j;
        let j_delta_j = jdj.rel_distance(&self.delta_inverse());
        let sq = |x: DenseOperator| fro(&(x.matrix() - id.matrix())) / (n as f64).sqrt();
        ModularResiduals { j_log_delta_j, j_delta_j, j_square: sq(self.j.square()), s_square: sq(self.s.square()) }
    }

    /// Data of the symplectic complement: `(J, Δ⁻¹)`, so `S′ = JΔ^{-1/2} = S*`.
    pub fn dual(&self, tol: &Tolerances) -> Result<Self> {
        Self::from_j_log_delta(self.j.clone(), self.log_delta.scale(C64::new(-1.0, 0.0)), tol)
    }

    pub fn to_json(&self, tol: &Tolerances) -> ModularJson {
        let pairs = |m: &CMatrix| -> Vec<Vec<[f64; 2]>> {
            (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
        };
        ModularJson {
            ambient_dim: self.dim(),
            j: pairs(self.j.matrix()),
            log_delta: pairs(self.log_delta.matrix()),
            log_delta_spectrum: self.spectrum.eigenvalues.clone(),
            tolerances: *tol,
        }
    }
}

/// Serialized modular data: `J` as the matrix of `x ↦ J·conj(x)` and `log Δ`, row-major.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModularJson {
    pub ambient_dim: usize,
    pub j: Vec<Vec<[f64; 2]>>,
    pub log_delta: Vec<Vec<[f64; 2]>>,
    pub log_delta_spectrum: Vec<f64>,
    pub tolerances: Tolerances,
}

pub fn modular_from_subspace(k: &RealSubspace, tol: &Tolerances) -> Result<ModularData> {
    let rep = standardness(k);
    if rep.verdict != Standardness::Standard {
        let w = rep.separating_witness.or(rep.cyclic_witness).unwrap_or_else(|| CVector::zeros(0));
        return Err(Error::NotStandard { verdict: rep.verdict, witness_norm: w.norm(), witness: w.iter().copied().collect() });
    }
    let b = k.complex_basis();
    let b_inv = DenseOperator::new(b.clone())?.try_inverse()?;
    let s = AntilinearOperator::new(&b * conj_mat(b_inv.matrix()))?;
    let polar = antilinear_polar(&s, tol)?;
    let spectrum = SpectralDecomposition::of(&polar.log_delta, tol)?;
    let delta = spectrum.map(f64::exp)?;
    Ok(ModularData { s, j: polar.j, delta, log_delta: polar.log_delta, spectrum })
}

/// Fixed-point space of `S`, assembled on `(λ, 1/λ)` eigenpairs of `Δ`.
pub fn subspace_from_modular(m: &ModularData, tol: &Tolerances) -> Result<RealSubspace> {
    let n = m.dim();
    let res = m.residuals();
    if res.j_log_delta_j > PAIRING_TOL {
        return Err(Error::Invariant { identity: "J log Δ J = −log Δ".into(), residual: res.j_log_delta_j });
    }
    if res.j_square > PAIRING_TOL {
        return Err(Error::Invariant { identity: "J² = 1".into(), residual: res.j_square });
    }
    let spec = &m.spectrum;
    let l = &spec.eigenvalues;
    for i in 0..n {
        let partner = l[n - 1 - i];
        if (l[i] + partner).abs() > PAIRING_TOL * l[i].abs().max(1.0) {
            return Err(Error::UnpairedEigenvalue { log_lambda: l[i] });
        }
    }
    let mut cols = Vec::new();
    for (idx, &li) in l.iter().enumerate() {
        if li < -PAIRING_TOL * li.abs().max(1.0) {
            continue;
        }
        let e = spec.eigenvectors.column(idx).into_owned();
        let damp = C64::new((-0.5 * li.max(0.0)).exp(), 0.0);
        for c in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let u = &e * c;
            cols.push(&u * damp + m.j.apply(&u));
        }
    }
    let k = RealSubspace::from_generators(n, &cols, tol.rank)?;
    if k.real_dim() != n {
        return Err(Error::Invariant { identity: "real_dim(ker(S − 1)) = n".into(), residual: k.real_dim() as f64 });
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn v(z: &[C64]) -> CVector {
        CVector::from_column_slice(z)
    }

    #[test]
    fn standardness_examples() {
        let tol = Tolerances::default().rank;
        let k = RealSubspace::from_generators(1, &[v(&[c(1.0, 0.0)])], tol).unwrap();
        assert_eq!(standardness(&k).verdict, Standardness::Standard);

        let k = RealSubspace::from_generators(2, &[v(&[c(1.0, 0.0), c(0.0, 0.0)]), v(&[c(0.0, 1.0), c(0.0, 0.0)])], tol).unwrap();
        let r = standardness(&k);
        assert_eq!(r.verdict, Standardness::FailsBoth);
        let w = r.separating_witness.unwrap();
        assert!(w[1].norm() < 1e-14 && w[0].norm() > 0.5);

        let k = RealSubspace::from_generators(2, &[v(&[c(1.0, 0.0), c(0.0, 0.0)])], tol).unwrap();
        let r = standardness(&k);
        assert_eq!(r.verdict, Standardness::FailsCyclic);
        assert_eq!(r.cyclic_defect, 2);
    }

    #[test]
    fn real_part_has_plain_conjugation() {
        let tol = Tolerances::default();
        let m = modular_from_subspace(&RealSubspace::real_part(3), &tol).unwrap();
        assert!(fro(&(m.j.matrix() - CMatrix::identity(3, 3))) < 1e-14);
        assert!(fro(&(m.delta.matrix() - CMatrix::identity(3, 3))) < 1e-14);
    }

    #[test]
    fn rotated_line_conjugation() {
        let phi: f64 = 0.7;
        let tol = Tolerances::default();
        let k = RealSubspace::from_generators(1, &[v(&[C64::from_polar(1.0, phi)])], tol.rank).unwrap();
        let m = modular_from_subspace(&k, &tol).unwrap();
        assert!((m.j.matrix()[(0, 0)] - C64::from_polar(1.0, 2.0 * phi)).norm() < 1e-14);
        assert!((m.delta.matrix()[(0, 0)] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn non_standard_rejected_with_witness() {
        let k = RealSubspace::from_generators(2, &[v(&[c(1.0, 0.0), c(0.0, 0.0)])], 1e-9).unwrap();
        match modular_from_subspace(&k, &Tolerances::default()) {
            Err(Error::NotStandard { verdict, witness_norm, .. }) => {
                assert_eq!(verdict, Standardness::FailsCyclic);
                assert!(witness_norm > 0.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn plain_conjugation_gives_real_part() {
        let tol = Tolerances::default();
        let m = ModularData::from_j_log_delta(AntilinearOperator::conjugation(4), DenseOperator::new(CMatrix::zeros(4, 4)).unwrap(), &tol).unwrap();
        let k = subspace_from_modular(&m, &tol).unwrap();
        assert!(k.same_as(&RealSubspace::real_part(4)).unwrap());
    }

    #[test]
    fn unpaired_spectrum_is_rejected() {
        let tol = Tolerances::default();
        let log = DenseOperator::new(CMatrix::from_diagonal(&v(&[c(1.0, 0.0), c(2.0, 0.0)]))).unwrap();
        let m = ModularData::from_j_log_delta(AntilinearOperator::conjugation(2), log, &tol).unwrap();
        assert!(subspace_from_modular(&m, &tol).is_err());
    }

    #[test]
    fn lattice_examples() {
        let tol = 1e-9;
        let a = RealSubspace::from_generators(2, &[v(&[c(1.0, 0.0), c(0.0, 0.0)])], tol).unwrap();
        let b = RealSubspace::from_generators(2, &[v(&[c(0.0, 0.0), c(1.0, 0.0)])], tol).unwrap();
        assert_eq!(a.meet(&b).unwrap().real_dim(), 0);
        assert_eq!(a.join(&b).unwrap().real_dim(), 2);
        assert!(a.meet(&a).unwrap().same_as(&a).unwrap());
        assert!(lattice_op(LatticeOp::Meet, &a, &RealSubspace::zero(3)).is_err());
    }

    #[test]
    fn trivial_representation_is_not_a_factor() {
        let r = factor_classify(&RealSubspace::real_part(1));
        assert_eq!(r, FactorReport { factor: false, center_real_dim: 1 });
    }

    #[test]
    fn json_roundtrip() {
        let tol = Tolerances::default();
        let mut r = sample::rng(5);
        let k = sample::random_standard(3, 50.0, &mut r, tol.rank);
        let j = serde_json::to_string(&k.to_json(&tol)).unwrap();
        let back = RealSubspace::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert!(back.same_as(&k).unwrap());
    }

    fn random_pair(n: usize, seed: u64) -> (RealSubspace, RealSubspace) {
        let mut r = sample::rng(seed);
        let g1 = sample::complex_gaussian_with(n, 2, &mut r);
        let g2 = sample::complex_gaussian_with(n, 3, &mut r);
        (RealSubspace::from_complex_columns(&g1, 1e-9), RealSubspace::from_complex_columns(&g2, 1e-9))
    }

    proptest! {
        #[test]
        fn de_morgan(seed in 0u64..500) {
            let (a, b) = random_pair(3, seed);
            let lhs = a.meet(&b).unwrap().symplectic_complement();
            let rhs = a.symplectic_complement().join(&b.symplectic_complement()).unwrap();
            prop_assert!(lhs.distance(&rhs).unwrap() < 1e-9);
        }

        #[test]
        fn double_complement(seed in 0u64..500) {
            let (a, _) = random_pair(3, seed);
            prop_assert!(a.symplectic_complement().symplectic_complement().distance(&a).unwrap() < 1e-12);
        }

        #[test]
        fn symplectic_orthogonality(seed in 0u64..500) {
            let (a, _) = random_pair(4, seed);
            let ac = a.symplectic_complement();
            let (ba, bc) = (a.complex_basis(), ac.complex_basis());
            for i in 0..ba.ncols() {
                for j in 0..bc.ncols() {
                    prop_assert!(ba.column(i).dotc(&bc.column(j)).im.abs() < 1e-12);
                }
            }
        }

        #[test]
        fn modular_round_trip_and_identities(n in 1usize..7, seed in 0u64..1000) {
            let tol = Tolerances::default();
            let mut r = sample::rng(seed);
            let k = sample::random_standard(n, 50.0, &mut r, tol.rank);
            let m = modular_from_subspace(&k, &tol).unwrap();
            let back = subspace_from_modular(&m, &Tolerances { rank: 1e-8, ..tol }).unwrap();
            prop_assert!(back.same_as(&k.clone().with_rank_tol(1e-8)).unwrap());
            let res = m.residuals();
            prop_assert!(res.j_delta_j < 1e-10 && res.s_square < 1e-10);

            // J K = K′ and Δ^{it} K = K.
            prop_assert!(k.map_antilinear(&m.j).distance(&k.symplectic_complement()).unwrap() < 1e-9);
            let flow = m.delta_it(0.37);
            prop_assert!(k.map_linear(flow.matrix()).distance(&k).unwrap() < 1e-9);

            // The complement is standard, with modular data (J, Δ⁻¹).
            let kc = k.symplectic_complement();
            prop_assert_eq!(standardness(&kc).verdict, Standardness::Standard);
            let mc = modular_from_subspace(&kc, &tol).unwrap();
            prop_assert!(fro(&(mc.s.matrix() - m.s.adjoint().matrix())) / m.s.norm() < 1e-10);
        }

        #[test]
        fn graph_norm_identity(seed in 0u64..500) {
            let mut r = sample::rng(seed);
            let k = sample::random_standard(3, 50.0, &mut r, 1e-9);
            let b = k.complex_basis();
            let x = sample::real_gaussian_with(b.ncols(), 2, &mut r);
            let cx = crate::kernel::to_complex(&x);
            let h = &b * cx.column(0);
            let kk = &b * cx.column(1);
            let i = crate::kernel::I;
            let lhs = (&h + &kk * i).norm_squared() + (&h - &kk * i).norm_squared();
            let rhs = 2.0 * (h.norm_squared() + kk.norm_squared());
            prop_assert!((lhs - rhs).abs() < 1e-10 * rhs);
        }
    }
}
