//! PCT doubling of a representation of the orientation- and time-preserving
//! subgroup.
//!
//! Given `U` on `H` and an antiunitary involution `C`, the doubled
//! representation on `H ⊕ H` is `Ũ(g) = U(g) ⊕ C U(RgR) C` and `Ũ(R)` swaps the
//! summands through `C`.

use crate::kernel::{AntilinearOperator, CMatrix, DenseOperator, GroupOperator};
use crate::{Error, Result};

type Rep<G> = Box<dyn Fn(&G) -> Result<DenseOperator> + Send + Sync>;
type Reflect<G> = Box<dyn Fn(&G) -> G + Send + Sync>;

/// `g·R^ε` in the doubled group.
#[derive(Clone, Debug, PartialEq)]
pub struct Doubled<G> {
    pub g: G,
    pub reflected: bool,
}

pub struct PctDouble<G> {
    n: usize,
    c: AntilinearOperator,
    rep: Rep<G>,
    reflect: Reflect<G>,
}

impl<G> PctDouble<G> {
    /// `rep` represents the orientation-preserving orthochronous elements;
    /// `reflect` is `g ↦ RgR`.
    pub fn new(
        c: AntilinearOperator,
        rep: impl Fn(&G) -> Result<DenseOperator> + Send + Sync + 'static,
        reflect: impl Fn(&G) -> G + Send + Sync + 'static,
    ) -> Result<Self> {
        let residual = c.involution_residual();
        if residual > 1e-10 {
            return Err(Error::Invariant { identity: "C² = 1".into(), residual });
        }
        let unitary = c.unitarity_residual();
        if unitary > 1e-10 {
            return Err(Error::Invariant { identity: "C antiunitary".into(), residual: unitary });
        }
        Ok(Self { n: c.dim(), c, rep: Box::new(rep), reflect: Box::new(reflect) })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// `U(g) ⊕ C U(RgR) C`.
    pub fn even(&self, g: &G) -> Result<DenseOperator> {
        let u = (self.rep)(g)?;
        if u.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: u.dim() });
        }
        let lower = &(&self.c * &(self.rep)(&(self.reflect)(g))?) * &self.c;
        let mut m = CMatrix::zeros(2 * self.n, 2 * self.n);
        m.view_mut((0, 0), (self.n, self.n)).copy_from(u.matrix());
        m.view_mut((self.n, self.n), (self.n, self.n)).copy_from(lower.matrix());
        DenseOperator::new(m)
    }

    /// `Ũ(R)`: `(x, y) ↦ (Cy, Cx)`.
    pub fn reflection(&self) -> AntilinearOperator {
        let mut m = CMatrix::zeros(2 * self.n, 2 * self.n);
        m.view_mut((0, self.n), (self.n, self.n)).copy_from(self.c.matrix());
        m.view_mut((self.n, 0), (self.n, self.n)).copy_from(self.c.matrix());
        AntilinearOperator::new(m).expect("finite blocks")
    }

    pub fn operator(&self, e: &Doubled<G>) -> Result<GroupOperator> {
        let even = GroupOperator::Linear(self.even(&e.g)?);
        Ok(if e.reflected { even.compose(&GroupOperator::Antilinear(self.reflection())) } else { even })
    }

    /// `‖Ũ(R)Ũ(g)Ũ(R) − Ũ(RgR)‖_F`.
    pub fn reflection_residual(&self, g: &G) -> Result<f64> {
        let r = GroupOperator::Antilinear(self.reflection());
        let lhs = r.compose(&GroupOperator::Linear(self.even(g)?)).compose(&r);
        let rhs = self.even(&(self.reflect)(g))?;
        Ok(crate::kernel::fro(&(lhs.matrix() - rhs.matrix())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{fro, C64};
    use crate::rep::rapidity::RapidityModel;
    use crate::wedge::PoincareElement;
    use std::sync::Arc;

    fn doubled_rapidity() -> PctDouble<PoincareElement> {
        let m = Arc::new(RapidityModel::new(1.0, 12).unwrap());
        let m2 = m.clone();
        // RgR for R = −1: same Lorentz part, negated translation.
        PctDouble::new(
            AntilinearOperator::conjugation(12),
            move |g: &PoincareElement| match m2.group_operator(g)? {
                GroupOperator::Linear(u) => Ok(u),
                GroupOperator::Antilinear(_) => Err(Error::InvalidArgument("time-reversing element".into())),
            },
            |g: &PoincareElement| {
                let r = PoincareElement::reflection(2);
                r.compose(g).compose(&r)
            },
        )
        .unwrap()
    }

    #[test]
    fn reflection_squares_to_one() {
        let d = doubled_rapidity();
        let r = d.reflection();
        assert!(fro(&(r.square().matrix() - CMatrix::identity(24, 24))) < 1e-15);
        let id = d.even(&PoincareElement::identity(2)).unwrap();
        assert!(fro(&(id.matrix() - CMatrix::identity(24, 24))) < 1e-12);
    }

    #[test]
    fn reflection_covariance() {
        let d = doubled_rapidity();
        let g = PoincareElement::translation(&[0.2, -0.1]).compose(&PoincareElement::boost(2, 0.03));
        assert!(d.reflection_residual(&g).unwrap() < 1e-10);
    }

    #[test]
    fn non_involution_rejected() {
        let c = AntilinearOperator::new(CMatrix::identity(2, 2) * C64::new(0.0, 1.0)).unwrap();
        // (iC)² = i·conj(i) = 1, while a real quarter turn squares to −1.
        assert!(PctDouble::<()>::new(c, |_| Ok(DenseOperator::identity(2)), |_| ()).is_ok());
        let rot = CMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0].map(|x| C64::new(x, 0.0)));
        let c = AntilinearOperator::new(rot).unwrap();
        assert!(PctDouble::<()>::new(c, |_| Ok(DenseOperator::identity(2)), |_| ()).is_err());
    }
}
