//! SVD and Hermitian eigendecompositions for `nalgebra` matrices, computed by `faer`.

use faer::{Mat, Side};
use nalgebra::{DMatrix, Scalar};

use crate::kernel::C64;

/// Thin SVD `M = U diag(s) V†`, singular values nonincreasing.
pub struct Svd<T: Scalar> {
    pub u: DMatrix<T>,
    pub s: Vec<f64>,
    pub v: DMatrix<T>,
}

macro_rules! impl_field {
    ($svd:ident, $sv:ident, $eigh:ident, $t:ty, $zero:expr, $re:expr) => {
        pub fn $svd(m: &DMatrix<$t>) -> Svd<$t> {
            let (r, c) = m.shape();
            if r == 0 || c == 0 {
                return Svd { u: DMatrix::from_element(r, 0, $zero), s: Vec::new(), v: DMatrix::from_element(c, 0, $zero) };
            }
            let f = Mat::<$t>::from_fn(r, c, |i, j| m[(i, j)]);
            let svd = f.thin_svd().expect("SVD did not converge");
            let s = (0..r.min(c)).map(|k| $re(svd.S()[k])).collect();
            let (u, v) = (svd.U(), svd.V());
            Svd {
                u: DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
                s,
                v: DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
            }
        }

        pub fn $sv(m: &DMatrix<$t>) -> Vec<f64> {
            if m.is_empty() {
                return Vec::new();
            }
            let f = Mat::<$t>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
            f.singular_values().expect("SVD did not converge")
        }

        /// Eigenvalues (nondecreasing) and orthonormal eigenvectors of a
        /// self-adjoint matrix; only the lower triangle is read.
        pub fn $eigh(m: &DMatrix<$t>) -> (Vec<f64>, DMatrix<$t>) {
            let n = m.nrows();
            if n == 0 {
                return (Vec::new(), m.clone());
            }
            let f = Mat::<$t>::from_fn(n, n, |i, j| m[(i, j)]);
            let e = f.self_adjoint_eigen(Side::Lower).expect("eigensolver did not converge");
            let u = e.U();
            ((0..n).map(|k| $re(e.S()[k])).collect(), DMatrix::from_fn(n, n, |i, j| u[(i, j)]))
        }
    };
}

impl_field!(svd_real, singular_values_real, eigh_real, f64, 0.0, |x: f64| x);
impl_field!(svd_complex, singular_values_complex, eigh_complex, C64, C64::new(0.0, 0.0), |x: C64| x.re);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::CMatrix;

    #[test]
    fn rank_deficient_svd_reconstructs() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let s = svd_real(&m);
        let rec = &s.u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s.s.clone())) * s.v.transpose();
        assert!((rec - &m).norm() < 1e-14);
        assert!(s.s[1] < 1e-14);
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let m = crate::sample::complex_gaussian(5, 5, 1);
        let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let (l, v) = eigh_complex(&h);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(5, l.iter().map(|&x| C64::new(x, 0.0))));
        assert!((&v * d * v.adjoint() - &h).norm() < 1e-13);
        assert!(l.windows(2).all(|w| w[0] <= w[1]));
    }
}
