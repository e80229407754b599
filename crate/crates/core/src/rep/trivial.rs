//! The one-dimensional trivial representation: `U ≡ 1`, `J = C`, `Δ = 1`.
//!
//! Every wedge gets the same space `K = ℝ`, which makes it the control case
//! for irreducibility.

use super::{ModelSpec, NetModel, ValidationReport};
use crate::kernel::{AntilinearOperator, DenseOperator, GroupOperator, Tolerances};
use crate::subspace::ModularData;
use crate::wedge::{PoincareElement, Region, Wedge};
use crate::Result;

#[derive(Clone, Debug)]
pub struct TrivialModel {
    tol: Tolerances,
    validation: ValidationReport,
}

impl TrivialModel {
    pub fn new(tol: Tolerances) -> Self {
        let mut validation = ValidationReport::default();
        validation.push("U(g) = 1", 0.0, 0.0);
        Self { tol, validation }
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.validation
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec::Trivial
    }

    pub fn group_operator(&self, g: &PoincareElement) -> Result<GroupOperator> {
        Ok(if g.is_orthochronous() {
            GroupOperator::Linear(DenseOperator::identity(1))
        } else {
            GroupOperator::Antilinear(AntilinearOperator::conjugation(1))
        })
    }
}

impl NetModel for TrivialModel {
    type Wedge = Wedge;
    type Element = PoincareElement;

    fn spec(&self) -> ModelSpec {
        ModelSpec::Trivial
    }

    fn dim(&self) -> usize {
        1
    }

    fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn has_invariant_vectors(&self) -> bool {
        true
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
        TrivialModel::group_operator(self, g)
    }

    fn wedge_modular_data(&self, _w: &Wedge) -> Result<ModularData> {
        ModularData::from_j_log_delta(AntilinearOperator::conjugation(1), DenseOperator::new(nalgebra::DMatrix::zeros(1, 1))?, &self.tol)
    }

    fn default_family(&self) -> Vec<Wedge> {
        let w1 = Wedge::standard(2);
        vec![w1.clone(), w1.complement(), w1.translated(&[0.5, 0.5]), w1.translated(&[-0.5, 0.5])]
    }

    fn sample_elements(&self, count: usize, _seed: u64) -> Vec<PoincareElement> {
        (0..count).map(|k| PoincareElement::translation(&[0.1 * k as f64, 0.0])).collect()
    }
}
