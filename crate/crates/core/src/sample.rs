//! Seeded random inputs.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kernel::{CMatrix, C64};
use crate::subspace::RealSubspace;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut r = rng(seed);
    complex_gaussian_with(rows, cols, &mut r)
}

pub fn complex_gaussian_with(rows: usize, cols: usize, r: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(r.sample::<f64, _>(StandardNormal), r.sample::<f64, _>(StandardNormal))
    })
}

pub fn real_gaussian_with(rows: usize, cols: usize, r: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| r.sample::<f64, _>(StandardNormal))
}

/// Random standard subspace of `ℂⁿ`: the real span of the columns of a complex
/// Gaussian matrix, redrawn until its condition number is at most `max_cond`.
pub fn random_standard(n: usize, max_cond: f64, r: &mut impl Rng, rank_tol: f64) -> RealSubspace {
    loop {
        let g = complex_gaussian_with(n, n, r);
        let sv = crate::linalg::singular_values_complex(&g);
        if sv[0] <= max_cond * sv[n - 1] {
            return RealSubspace::from_complex_columns(&g, rank_tol);
        }
    }
}
