//! Bosonic Fock space truncated at total particle number `N_max`.
//!
//! Basis vectors are occupation-number states `|m₁ … mₙ⟩`, ordered by total
//! number and, within one total, lexicographically decreasing:
//! `|0,0⟩, |1,0⟩, |0,1⟩, |2,0⟩, |1,1⟩, |0,2⟩, …`.
//!
//! Weyl operators are `V(h) = exp(i(a*(h) + a(h))/√2)`, so that
//! `V(h)V(k) = e^{−(i/2)Im⟨h,k⟩} V(h+k)` and `V(h)Ω = e^{−‖h‖²/4} e^{ih/√2}`.
//! On coherent vectors `e^g = ⊕ g^{⊗k}/√k!` they act by
//! `V(h)e^g = exp(−‖h‖²/4 + (i/√2)⟨h,g⟩) e^{g + ih/√2}`.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::kernel::{inner, AntilinearOperator, CMatrix, CVector, DenseOperator, C64};
use crate::subspace::{ModularData, RealSubspace};
use crate::{Error, Result};

/// Largest `‖h‖` accepted without explicit opt-in.
pub const DEFAULT_ARGUMENT_BOUND: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct FockSpace {
    n: usize,
    n_max: usize,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

fn occupations(n: usize, total: usize, out: &mut Vec<Vec<u32>>) {
    fn rec(prefix: &mut Vec<u32>, modes_left: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
        if modes_left == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=remaining).rev() {
            prefix.push(k);
            rec(prefix, modes_left - 1, remaining - k, out);
            prefix.pop();
        }
    }
    if n == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return;
    }
    rec(&mut Vec::with_capacity(n), n, total as u32, out);
}

fn sqrt_factorial(k: u32) -> f64 {
    (1..=k).map(|j| (j as f64).sqrt()).product()
}

impl FockSpace {
    pub fn new(n: usize, n_max: usize) -> Self {
        let mut basis = Vec::new();
        for total in 0..=n_max {
            occupations(n, total, &mut basis);
        }
        let index = basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Self { n, n_max, basis, index }
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn index_of(&self, occ: &[u32]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.basis[idx].iter().sum::<u32>() as usize
    }

    pub fn vacuum(&self) -> FockState {
        let mut c = CVector::zeros(self.dim());
        c[0] = C64::new(1.0, 0.0);
        FockState { n: self.n, n_max: self.n_max, coeffs: c, tail: 0.0, coherent: vec![(C64::new(1.0, 0.0), CVector::zeros(self.n))] }
    }

    /// `e^h` truncated; `tail = Σ_{k>N_max} ‖h‖^{2k}/k!`.
    pub fn coherent(&self, h: &CVector) -> Result<FockState> {
        let mut e = self.truncated_coherent(h)?;
        e.coherent = vec![(C64::new(1.0, 0.0), h.clone())];
        Ok(e)
    }

    fn truncated_coherent(&self, h: &CVector) -> Result<FockState> {
        self.check_arg(h)?;
        let coeffs = CVector::from_iterator(
            self.dim(),
            self.basis.iter().map(|m| {
                m.iter().zip(h.iter()).fold(C64::new(1.0, 0.0), |acc, (&k, z)| acc * z.powu(k) / sqrt_factorial(k))
            }),
        );
        let tail = series_tail(h.norm_squared(), self.n_max);
        Ok(FockState { n: self.n, n_max: self.n_max, coeffs, tail, coherent: Vec::new() })
    }

    fn check_arg(&self, h: &CVector) -> Result<()> {
        if h.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: h.len() });
        }
        Ok(())
    }

    /// Matrix of `V(h)` compressed to the truncated space, assembled from exact
    /// single-mode displacement elements.
    pub fn weyl_matrix(&self, h: &CVector) -> Result<CMatrix> {
        self.check_arg(h)?;
        let tables: Vec<CMatrix> =
            h.iter().map(|&z| displacement_table(z * C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2), self.n_max)).collect();
        let d = self.dim();
        Ok(CMatrix::from_fn(d, d, |r, c| {
            let (mr, mc) = (&self.basis[r], &self.basis[c]);
            (0..self.n).fold(C64::new(1.0, 0.0), |acc, i| acc * tables[i][(mr[i] as usize, mc[i] as usize)])
        }))
    }

    /// `Γ(A)`: `A^{⊗k}` on each symmetric `k`-particle block.
    pub fn second_quantize(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.nrows() != self.n || a.ncols() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.nrows() });
        }
        let d = self.dim();
        let mut g = CMatrix::zeros(d, d);
        for (col, occ) in self.basis.iter().enumerate() {
            // Π_i (Σ_j A_{ji} x_j)^{n_i}, coefficients keyed by exponent vectors.
            let mut poly: HashMap<Vec<u32>, C64> = HashMap::from([(vec![0; self.n], C64::new(1.0, 0.0))]);
            for (i, &ni) in occ.iter().enumerate() {
                for _ in 0..ni {
                    let mut next: HashMap<Vec<u32>, C64> = HashMap::new();
                    for (exp, c) in &poly {
                        for j in 0..self.n {
                            let coef = a[(j, i)];
                            if coef == C64::new(0.0, 0.0) {
                                continue;
                            }
                            let mut e = exp.clone();
                            e[j] += 1;
                            *next.entry(e).or_insert(C64::new(0.0, 0.0)) += c * coef;
                        }
                    }
                    poly = next;
                }
            }
            let norm_in: f64 = occ.iter().map(|&k| sqrt_factorial(k)).product();
            for (exp, c) in poly {
                let row = self.index_of(&exp).expect("degree is preserved");
                let norm_out: f64 = exp.iter().map(|&k| sqrt_factorial(k)).product();
                g[(row, col)] = c * norm_out / norm_in;
            }
        }
        Ok(g)
    }
}

/// `Σ_{k>N} x^k/k!`, summed directly (no cancellation against `eˣ`).
pub fn series_tail(x: f64, n_max: usize) -> f64 {
    let mut term = 1.0;
    for k in 1..=n_max + 1 {
        term *= x / k as f64;
    }
    let mut sum = 0.0;
    let mut k = n_max + 1;
    while term > f64::MIN_POSITIVE && term > 1e-18 * sum {
        sum += term;
        k += 1;
        term *= x / k as f64;
        if k > n_max + 10_000 {
            break;
        }
    }
    sum
}

/// `⟨m|D(α)|l⟩` for `m, l ≤ N` with `D(α) = exp(α a† − ᾱ a)`.
fn displacement_table(alpha: C64, n: usize) -> CMatrix {
    let x = alpha.norm_sqr();
    let damp = (-0.5 * x).exp();
    CMatrix::from_fn(n + 1, n + 1, |m, l| {
        if m >= l {
            let k = (m - l) as u32;
            let ratio = sqrt_factorial(l as u32) / sqrt_factorial(m as u32);
            alpha.powu(k) * (ratio * damp * laguerre(l, k as f64, x))
        } else {
            let k = (l - m) as u32;
            let ratio = sqrt_factorial(m as u32) / sqrt_factorial(l as u32);
            (-alpha.conj()).powu(k) * (ratio * damp * laguerre(m, k as f64, x))
        }
    })
}

/// Generalized Laguerre polynomial `L_n^{(a)}(x)`.
fn laguerre(n: usize, a: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 + a - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    n: usize,
    n_max: usize,
    pub coeffs: CVector,
    /// Bound on the squared norm of the part cut off by the truncation.
    pub tail: f64,
    /// When known, the untruncated vector as `Σ cⱼ e^{gⱼ}`; Weyl operators then
    /// act on it exactly instead of on the truncated components.
    coherent: Vec<(C64, CVector)>,
}

impl FockState {
    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn inner(&self, other: &FockState) -> C64 {
        inner(&self.coeffs, &other.coeffs)
    }

    pub fn distance(&self, other: &FockState) -> f64 {
        (&self.coeffs - &other.coeffs).norm()
    }

    pub fn scale(&self, c: C64) -> FockState {
        FockState {
            coeffs: &self.coeffs * c,
            tail: self.tail * c.norm_sqr(),
            coherent: self.coherent.iter().map(|(a, g)| (a * c, g.clone())).collect(),
            ..self.clone()
        }
    }

    /// From raw components; Weyl operators act on it through the truncated matrix.
    pub fn from_components(n: usize, n_max: usize, coeffs: CVector) -> Result<FockState> {
        let dim = FockSpace::new(n, n_max).dim();
        if coeffs.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: coeffs.len() });
        }
        Ok(FockState { n, n_max, coeffs, tail: 0.0, coherent: Vec::new() })
    }

    pub fn is_coherent_combination(&self) -> bool {
        !self.coherent.is_empty()
    }
}

pub fn coherent_vector(h: &CVector, n_max: usize) -> Result<FockState> {
    FockSpace::new(h.len(), n_max).coherent(h)
}

/// `V(h)Ψ`. Combinations of coherent vectors are mapped exactly by the closed
/// form and then truncated; other states go through the truncated matrix, and
/// the tail grows by the norm pushed past `N_max`.
pub fn weyl_apply(h: &CVector, psi: &FockState) -> Result<FockState> {
    if h.len() != psi.n {
        return Err(Error::DimensionMismatch { expected: psi.n, found: h.len() });
    }
    let space = FockSpace::new(psi.n, psi.n_max);
    if psi.is_coherent_combination() {
        let shift = h * C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
        let mut coeffs = CVector::zeros(space.dim());
        let mut tail_norm = 0.0;
        let mut terms = Vec::with_capacity(psi.coherent.len());
        for (c, g) in &psi.coherent {
            let phase = C64::new(-0.25 * h.norm_squared(), 0.0)
                + C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2) * inner(h, g);
            let c = c * phase.exp();
            let g = g + &shift;
            let e = space.truncated_coherent(&g)?;
            coeffs += &e.coeffs * c;
            tail_norm += c.norm() * e.tail.sqrt();
            terms.push((c, g));
        }
        return Ok(FockState { n: psi.n, n_max: psi.n_max, coeffs, tail: tail_norm * tail_norm, coherent: terms });
    }
    let coeffs = space.weyl_matrix(h)? * &psi.coeffs;
    // The difference of squared norms is only good to a few ulps of ‖Ψ‖².
    let n2 = psi.coeffs.norm_squared();
    let dropped = (n2 - coeffs.norm_squared()).max(0.0) + 8.0 * f64::EPSILON * n2;
    let tail = (psi.tail.sqrt() + dropped.sqrt()).powi(2);
    Ok(FockState { n: psi.n, n_max: psi.n_max, coeffs, tail, coherent: Vec::new() })
}

/// Closed form `V(h)e^g = exp(−‖h‖²/4 + (i/√2)⟨h,g⟩) e^{g + ih/√2}`.
pub fn weyl_on_coherent(h: &CVector, g: &CVector, n_max: usize) -> Result<FockState> {
    weyl_apply(h, &coherent_vector(g, n_max)?)
}

/// `V(h)Ω = e^{−‖h‖²/4} e^{ih/√2}`.
pub fn weyl_vacuum(h: &CVector, n_max: usize) -> Result<FockState> {
    weyl_on_coherent(h, &CVector::zeros(h.len()), n_max)
}

/// Rejects arguments above the default norm bound unless `opt_in` is set.
pub fn check_argument(h: &CVector, opt_in: bool) -> Result<()> {
    if !opt_in && h.norm() > DEFAULT_ARGUMENT_BOUND {
        return Err(Error::InvalidArgument(format!(
            "‖h‖ = {:.3} exceeds {DEFAULT_ARGUMENT_BOUND}; opt in to larger arguments explicitly",
            h.norm()
        )));
    }
    Ok(())
}

/// `Γ(J)` (antilinear, as `Γ(A)∘C` for `J = A∘C`) and `Γ(Δ^{it})`.
#[derive(Clone, Debug)]
pub struct SecondQuantizedModular {
    pub j: AntilinearOperator,
    pub delta_it: DenseOperator,
    pub t: f64,
}

pub fn second_quantized_modular(md: &ModularData, n_max: usize, t: f64) -> Result<SecondQuantizedModular> {
    let space = FockSpace::new(md.dim(), n_max);
    let j = AntilinearOperator::new(space.second_quantize(md.j.matrix())?)?;
    let delta_it = DenseOperator::new(space.second_quantize(md.delta_it(t).matrix())?)?;
    Ok(SecondQuantizedModular { j, delta_it, t })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicityReport {
    pub rank: usize,
    pub full_dim: usize,
    pub sample_count: usize,
    /// Fewer samples than the truncated dimension, so full rank is impossible.
    pub undersampled: bool,
    /// Singular values of the sample matrix, descending.
    pub singular_values: Vec<f64>,
}

impl CyclicityReport {
    pub fn full_rank(&self) -> bool {
        self.rank == self.full_dim
    }
}

/// Seeded `h = Σ cᵢbᵢ`, `cᵢ ~ U[−0.3, 0.3]` over the real basis of `K`; the
/// first `k` samples do not depend on `count`.
pub fn sample_from_subspace(k: &RealSubspace, count: usize, seed: u64) -> Vec<CVector> {
    let mut r = crate::sample::rng(seed);
    let b = k.complex_basis();
    (0..count)
        .map(|_| {
            let mut h = CVector::zeros(k.ambient_dim());
            for c in 0..k.real_dim() {
                h += b.column(c) * C64::new(r.random_range(-0.3..=0.3), 0.0);
            }
            h
        })
        .collect()
}

/// Numerical rank of `span{V(h)Ω}` over samples `h ∈ K`.
pub fn cyclicity_rank(k: &RealSubspace, sample_count: usize, n_max: usize, seed: u64, rank_tol: f64) -> Result<CyclicityReport> {
    let space = FockSpace::new(k.ambient_dim(), n_max);
    let samples = sample_from_subspace(k, sample_count, seed);
    let mut x = CMatrix::zeros(space.dim(), sample_count);
    for (c, h) in samples.iter().enumerate() {
        x.set_column(c, &weyl_vacuum(h, n_max)?.coeffs);
    }
    let sv = if sample_count == 0 { Vec::new() } else { crate::linalg::singular_values_complex(&x) };
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > rank_tol * top).count();
    Ok(CyclicityReport {
        rank,
        full_dim: space.dim(),
        sample_count,
        undersampled: sample_count < space.dim(),
        singular_values: sv,
    })
}
