//! Finite-dimensional (anti-)unitary representations with wedge modular data.
//!
//! Three concrete models are provided: a Galerkin compression of the d=2
//! massive scalar in rapidity space, the exactly finite-dimensional `S²×ℝ`
//! toy model, and the one-dimensional trivial representation. PCT doubling
//! lives in [`pct`].

mod hermite;
pub mod pct;
pub mod probes;
pub mod rapidity;
pub mod sphere;
pub mod trivial;

use serde::{Deserialize, Serialize};

use crate::kernel::{GroupOperator, Tolerances};
use crate::subspace::{subspace_from_modular, ModularData, RealSubspace};
use crate::wedge::PoincareElement;
use crate::Result;

pub use rapidity::{GaussianBump, RapidityModel};
pub use sphere::{SphereElement, SphereToyModel, SphereWedge};
pub use trivial::TrivialModel;

fn default_sigma() -> f64 {
    rapidity::DEFAULT_SIGMA
}

fn default_quadrature_factor() -> usize {
    rapidity::DEFAULT_QUADRATURE_FACTOR
}

/// Serializable model description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Rapidity {
        mass: f64,
        n: usize,
        #[serde(default = "default_sigma")]
        sigma: f64,
        #[serde(default = "default_quadrature_factor")]
        quadrature_factor: usize,
    },
    Sphere {
        j: u32,
        energy: f64,
    },
    Trivial,
}

impl ModelSpec {
    pub fn rapidity(mass: f64, n: usize) -> Self {
        ModelSpec::Rapidity { mass, n, sigma: default_sigma(), quadrature_factor: default_quadrature_factor() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Rapidity { .. } => "rapidity",
            ModelSpec::Sphere { .. } => "sphere",
            ModelSpec::Trivial => "trivial",
        }
    }
}

/// One checked identity of a model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationEntry {
    pub identity: String,
    pub residual: f64,
    pub tolerance: f64,
    /// The residual is zero bitwise, not just small.
    pub exact: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    pub(crate) fn push(&mut self, identity: &str, residual: f64, tolerance: f64) {
        self.entries.push(ValidationEntry {
            identity: identity.to_string(),
            residual,
            tolerance,
            exact: residual == 0.0,
        });
    }

    /// Fails with the first identity whose residual exceeds its tolerance.
    pub(crate) fn check(self) -> Result<Self> {
        if let Some(e) = self.entries.iter().find(|e| e.residual.is_nan() || e.residual > e.tolerance) {
            return Err(crate::Error::Invariant { identity: e.identity.clone(), residual: e.residual });
        }
        Ok(self)
    }
}

/// A group element of either model family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum GroupElement {
    Poincare2d(crate::wedge::PoincareJson),
    SphereGroup(SphereElement),
}

impl From<PoincareElement> for GroupElement {
    fn from(g: PoincareElement) -> Self {
        GroupElement::Poincare2d(g.into())
    }
}

impl From<SphereElement> for GroupElement {
    fn from(g: SphereElement) -> Self {
        GroupElement::SphereGroup(g)
    }
}

/// What the net builder needs from a representation.
pub trait NetModel: Send + Sync {
    type Wedge: Clone + Send + Sync + std::fmt::Debug + std::fmt::Display;
    type Element: Clone + Send + Sync + std::fmt::Debug;

    fn spec(&self) -> ModelSpec;
    fn dim(&self) -> usize;
    fn tolerances(&self) -> &Tolerances;

    fn reference_wedge(&self) -> Self::Wedge;
    fn complement(&self, w: &Self::Wedge) -> Self::Wedge;
    fn transform(&self, g: &Self::Element, w: &Self::Wedge) -> Result<Self::Wedge>;
    /// Canonical key; equal wedges get equal keys.
    fn wedge_key(&self, w: &Self::Wedge) -> String;

    fn group_operator(&self, g: &Self::Element) -> Result<GroupOperator>;
    fn wedge_modular_data(&self, w: &Self::Wedge) -> Result<ModularData>;

    /// Wedge family used for the irreducibility check.
    fn default_family(&self) -> Vec<Self::Wedge>;
    /// Seeded elements for covariance checks.
    fn sample_elements(&self, count: usize, seed: u64) -> Vec<Self::Element>;

    /// Whether `U` fixes nonzero vectors, in which case every `K_W` contains them
    /// and the net is reducible.
    fn has_invariant_vectors(&self) -> bool {
        false
    }

    fn wedge_space(&self, w: &Self::Wedge) -> Result<RealSubspace> {
        subspace_from_modular(&self.wedge_modular_data(w)?, self.tolerances())
    }
}

/// A built model of any variant.
#[derive(Clone, Debug)]
pub enum Model {
    Rapidity(RapidityModel),
    Sphere(SphereToyModel),
    Trivial(TrivialModel),
}

impl Model {
    pub fn spec(&self) -> ModelSpec {
        match self {
            Model::Rapidity(m) => m.spec(),
            Model::Sphere(m) => m.spec(),
            Model::Trivial(m) => m.spec(),
        }
    }

    pub fn validation(&self) -> &ValidationReport {
        match self {
            Model::Rapidity(m) => m.validation(),
            Model::Sphere(m) => m.validation(),
            Model::Trivial(m) => m.validation(),
        }
    }

    /// `U(g)`; fails when `g` belongs to another model family.
    pub fn group_operator(&self, g: &GroupElement) -> Result<GroupOperator> {
        match (self, g) {
            (Model::Rapidity(m), GroupElement::Poincare2d(p)) => m.group_operator(&p.clone().try_into()?),
            (Model::Trivial(m), GroupElement::Poincare2d(p)) => m.group_operator(&p.clone().try_into()?),
            (Model::Sphere(m), GroupElement::SphereGroup(s)) => m.group_operator(s),
            (m, _) => Err(crate::Error::Unsupported(format!(
                "group element does not belong to the {} model",
                m.spec().name()
            ))),
        }
    }
}

/// Builds and validates a model.
pub fn build_model(spec: &ModelSpec, tol: &Tolerances) -> Result<Model> {
    Ok(match *spec {
        ModelSpec::Rapidity { mass, n, sigma, quadrature_factor } => {
            Model::Rapidity(RapidityModel::with_options(mass, n, sigma, quadrature_factor, *tol)?)
        }
        ModelSpec::Sphere { j, energy } => Model::Sphere(SphereToyModel::new(j, energy, *tol)?),
        ModelSpec::Trivial => Model::Trivial(TrivialModel::new(*tol)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_roundtrip_and_defaults() {
        let s: ModelSpec = serde_json::from_str(r#"{"variant":"rapidity","mass":1.0,"n":8}"#).unwrap();
        assert_eq!(s, ModelSpec::rapidity(1.0, 8));
        let back: ModelSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<ModelSpec>(r#"{"variant":"rapidity","mass":1.0,"n":8,"m":2}"#).is_err());
    }

    #[test]
    fn variant_mismatch_is_an_error() {
        let m = build_model(&ModelSpec::Sphere { j: 1, energy: 1.0 }, &Tolerances::default()).unwrap();
        let g: GroupElement = PoincareElement::identity(2).into();
        assert!(matches!(m.group_operator(&g), Err(crate::Error::Unsupported(_))));
    }
}
