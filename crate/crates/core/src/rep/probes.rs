//! Probes on the rapidity model: positivity versus isotony, the twisted
//! conjugation, light-like strips, the one-particle Bisognano–Wichmann check and
//! the spectral gap of `Δ` around 1.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::rapidity::{GaussianBump, RapidityModel};
use super::NetModel;
use crate::kernel::{AntilinearOperator, DenseOperator, C64, I};
use crate::subspace::{lattice_op, standardness, subspace_from_modular, LatticeOp, ModularData, Standardness};
use crate::wedge::Wedge;
use crate::{Error, Result};

/// Time parameter used for the dilation precondition.
pub const DILATION_T: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsotonyMode {
    Plain,
    /// `J` replaced by `V J` with `V` a Cayley transform of the modular operator.
    Twisted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotonyReport {
    pub mode: IsotonyMode,
    pub translation: [f64; 2],
    /// `max ‖k − P_{K_W}k‖` over an orthonormal basis of `K_{W+a}`.
    pub residual: f64,
    /// `‖Δ^{-it}U(a)Δ^{it} − U(Λ_W(−t)a)‖` on the resolved modes, `t = 0.1`.
    pub dilation_residual: f64,
    /// `‖J U(a) J − U(R_W a)‖` on the resolved modes, with the probe's `J`.
    pub reflection_residual: f64,
    /// `‖(V J)² − 1‖/√n` for the literal `V = (Δ + i)(Δ − i)⁻¹` (twisted mode).
    pub literal_twist_involution_residual: Option<f64>,
    pub resolution_warning: Option<String>,
}

/// `V = (cosh log Δ + i)(cosh log Δ − i)⁻¹`.
///
/// Unlike the literal `(Δ + i)(Δ − i)⁻¹`, which satisfies `JVJ = −V` and so makes
/// `(VJ)² = −V² ≠ 1`, this `V` is unitary, commutes with `Δ` and obeys
/// `JVJ = V*`, so `VJ` is again a conjugation with `(VJ) Δ (VJ) = Δ⁻¹`.
pub fn twist_unitary(md: &ModularData) -> DenseOperator {
    md.log_spectrum().map_complex(|l| (C64::new(l.cosh(), 0.0) + I) / (C64::new(l.cosh(), 0.0) - I)).expect("finite")
}

fn literal_twist_residual(md: &ModularData) -> f64 {
    let v = md.log_spectrum().map_complex(|l| (C64::new(l.exp(), 0.0) + I) / (C64::new(l.exp(), 0.0) - I));
    match v {
        Ok(v) => (&v * &md.j).involution_residual(),
        Err(_) => f64::INFINITY,
    }
}

pub fn isotony_probe(model: &RapidityModel, w: &Wedge, a: [f64; 2], mode: IsotonyMode) -> Result<IsotonyReport> {
    let tol = crate::kernel::Tolerances::default();
    let md = model.wedge_modular_data(w)?;
    let ua = model.translation(a);
    let (k_w, k_wa, j, literal) = match mode {
        IsotonyMode::Plain => {
            let k_w = subspace_from_modular(&md, &tol)?;
            let k_wa = NetModel::wedge_space(model, &w.translated(&a))?;
            (k_w, k_wa, md.j.clone(), None)
        }
        IsotonyMode::Twisted => {
            let v = twist_unitary(&md);
            let j: AntilinearOperator = &v * &md.j;
            let twisted = ModularData::from_j_log_delta(j.clone(), md.log_delta.clone(), &tol)?;
            let k_w = subspace_from_modular(&twisted, &tol)?;
            let k_wa = k_w.map_linear(ua.matrix());
            (k_w, k_wa, j, Some(literal_twist_residual(&md)))
        }
    };
    let residual = k_wa.max_sine_to(&k_w)?;

    let av = DVector::from_column_slice(&a);
    let back = w.boost(-DILATION_T).linear() * &av;
    let conj = &(&md.delta_it(-DILATION_T) * &ua) * &md.delta_it(DILATION_T);
    let dilation_residual = model.restricted_norm(&(conj.matrix() - model.translation([back[0], back[1]]).matrix()));
    let ra = w.reflection().linear() * &av;
    let jaj = &(&j * &ua) * &j;
    let reflection_residual = model.restricted_norm(&(jaj.matrix() - model.translation([ra[0], ra[1]]).matrix()));

    Ok(IsotonyReport {
        mode,
        translation: a,
        residual,
        dilation_residual,
        reflection_residual,
        literal_twist_involution_residual: literal,
        resolution_warning: model.resolution_warning(a),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripReport {
    pub translation: [f64; 2],
    /// `a = 0`: the strip collapses to the edge of `W₁`.
    pub degenerate: bool,
    /// `W₁ + a ⊄ W₁`, so `W̄₁ ∩ (W̄₁′ + a)` has no interior.
    pub strip_empty: bool,
    pub meet_real_dim: usize,
    pub verdict: Standardness,
    pub separating_defect: usize,
    pub cyclic_defect: usize,
    /// Real dimension of `{x : U(a)Δ^{1/2}U(a)Δ^{1/2}x = x}` at the compressed level.
    pub fixed_space_real_dim: usize,
    /// Smallest singular value of `U(a)Δ^{1/2}U(a)Δ^{1/2} − 1`.
    pub fixed_space_min_singular: f64,
    /// Condition number of `Δ^{1/2}`, which bounds how meaningful the fixed-space count is.
    pub delta_half_condition: f64,
}

pub fn strip_standardness_probe(model: &RapidityModel, a: [f64; 2]) -> Result<StripReport> {
    let scale = a[0].abs().max(a[1].abs());
    if (a[0].abs() - a[1].abs()).abs() > 1e-12 * scale.max(1.0) || !scale.is_finite() {
        return Err(Error::InvalidArgument(format!("translation {a:?} is not lightlike")));
    }
    let tol = crate::kernel::Tolerances::default();
    let w1 = Wedge::standard(2);
    let md = model.reference_modular_data()?;
    let k1 = subspace_from_modular(&md, &tol)?;
    let k2 = NetModel::wedge_space(model, &w1.complement().translated(&a))?;
    let meet = lattice_op(LatticeOp::Meet, &k1, &k2)?;
    let st = standardness(&meet);

    let half = md.log_spectrum().map(|l| (0.5 * l).exp())?;
    let ua = model.translation(a);
    let t = &(&(&ua * &half) * &ua) * &half;
    let n = model.n();
    let shifted = t.matrix() - crate::kernel::CMatrix::identity(n, n);
    let sv = crate::linalg::singular_values_complex(&shifted);
    let cutoff = tol.rank * sv[0].max(1.0);
    let fixed = sv.iter().filter(|&&s| s <= cutoff).count();
    let ev = &md.log_spectrum().eigenvalues;
    Ok(StripReport {
        translation: a,
        degenerate: scale == 0.0,
        strip_empty: a[1] < a[0].abs(),
        meet_real_dim: meet.real_dim(),
        verdict: st.verdict,
        separating_defect: st.separating_defect,
        cyclic_defect: st.cyclic_defect,
        fixed_space_real_dim: 2 * fixed,
        fixed_space_min_singular: sv[sv.len() - 1],
        delta_half_condition: (0.5 * (ev[ev.len() - 1] - ev[0])).exp(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BwReport {
    pub n: usize,
    /// `‖ψ_f − P_{K_{W₁}}ψ_f‖ / ‖ψ_f‖` per bump.
    pub distances: Vec<f64>,
    /// `‖S_{W₁}ψ_f − ψ_f‖ / ‖ψ_f‖` per bump with the compressed `S`.
    pub literal_residuals: Vec<f64>,
    pub median_distance: f64,
    pub max_distance: f64,
}

pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

pub fn bw_probe(model: &RapidityModel, bumps: &[GaussianBump]) -> Result<BwReport> {
    let tol = crate::kernel::Tolerances::default();
    let md = model.reference_modular_data()?;
    let k = subspace_from_modular(&md, &tol)?;
    let mut distances = Vec::with_capacity(bumps.len());
    let mut literal_residuals = Vec::with_capacity(bumps.len());
    for b in bumps {
        let psi = model.mass_shell_embedding(std::slice::from_ref(b))?;
        distances.push(k.relative_distance(&psi));
        literal_residuals.push((md.s.apply(&psi) - &psi).norm() / psi.norm());
    }
    Ok(BwReport {
        n: model.n(),
        median_distance: median(&distances),
        max_distance: distances.iter().copied().fold(0.0, f64::max),
        distances,
        literal_residuals,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGapReport {
    pub n: usize,
    /// `min |λ − 1|` over the eigenvalues of `Δ_{W₁}`.
    pub min_gap: f64,
    /// Multiplicity of the eigenvalue 1 (within the spectral tolerance).
    pub unit_eigenspace_dim: usize,
}

pub fn spectral_gap_probe(md: &ModularData, spec_tol: f64) -> SpectralGapReport {
    let gaps: Vec<f64> = md.log_spectrum().eigenvalues.iter().map(|&l| l.exp_m1().abs()).collect();
    SpectralGapReport {
        n: md.dim(),
        min_gap: gaps.iter().copied().fold(f64::INFINITY, f64::min),
        unit_eigenspace_dim: gaps.iter().filter(|&&g| g <= spec_tol).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Tolerances;

    #[test]
    fn zero_translation_is_trivially_isotone() {
        let m = RapidityModel::new(1.0, 16).unwrap();
        let r = isotony_probe(&m, &Wedge::standard(2), [0.0, 0.0], IsotonyMode::Plain).unwrap();
        assert!(r.residual < 1e-9, "{}", r.residual);
        assert!(r.reflection_residual < 1e-12);
    }

    #[test]
    fn twisted_conjugation_is_an_involution() {
        let m = RapidityModel::new(1.0, 16).unwrap();
        let md = m.reference_modular_data().unwrap();
        let j = &twist_unitary(&md) * &md.j;
        assert!(j.involution_residual() < 1e-10);
        let lit = literal_twist_residual(&md);
        assert!(lit > 1.0, "literal twist squares to −V², got {lit}");
        let tw = ModularData::from_j_log_delta(j, md.log_delta.clone(), &Tolerances::default()).unwrap();
        assert!(tw.residuals().j_log_delta_j < 1e-10);
    }

    #[test]
    fn strip_rejects_spacelike_translation() {
        let m = RapidityModel::new(1.0, 8).unwrap();
        assert!(strip_standardness_probe(&m, [0.0, 1.0]).is_err());
    }

    #[test]
    fn degenerate_strip_has_trivial_meet() {
        let m = RapidityModel::new(1.0, 16).unwrap();
        let r = strip_standardness_probe(&m, [0.0, 0.0]).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.meet_real_dim, 0);
    }

    #[test]
    fn even_basis_has_no_unit_eigenvalue() {
        let m = RapidityModel::new(1.0, 16).unwrap();
        let r = spectral_gap_probe(&m.reference_modular_data().unwrap(), 1e-10);
        assert_eq!(r.unit_eigenspace_dim, 0);
        assert!(r.min_gap > 0.0);
        let odd = RapidityModel::new(1.0, 15).unwrap();
        assert_eq!(spectral_gap_probe(&odd.reference_modular_data().unwrap(), 1e-10).unit_eigenspace_dim, 1);
    }
}
