//! Browser bindings for a few modloc operations. Every export returns a JSON string.

use modloc::experiments::{execute, ExperimentConfig};
use modloc::fock::{check_argument, weyl_apply, weyl_vacuum, FockSpace, FockState};
use modloc::kernel::{inner, CVector, Tolerances, C64};
use modloc::subspace::{factor_classify, modular_from_subspace, subspace_from_modular};
use modloc::{sample, Error};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn to_js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

fn round_trip_value(n: usize, seed: u64) -> Result<Value, Error> {
    if !(1..=12).contains(&n) {
        return Err(Error::InvalidArgument(format!("n = {n} must be between 1 and 12")));
    }
    let tol = Tolerances::default();
    let mut r = sample::rng(seed);
    let k = sample::random_standard(n, 50.0, &mut r, tol.rank);
    let md = modular_from_subspace(&k, &tol)?;
    let back = subspace_from_modular(&md, &tol)?;
    let res = md.residuals();
    Ok(json!({
        "n": n,
        "real_dim": k.real_dim(),
        "log_delta_spectrum": md.log_spectrum().eigenvalues,
        "round_trip_distance": back.distance(&k)?,
        "j_delta_j": res.j_delta_j,
        "s_square": res.s_square,
        "center_real_dim": factor_classify(&k).center_real_dim,
    }))
}

/// Random standard subspace of Cⁿ, its modular spectrum and round-trip residuals.
#[wasm_bindgen]
pub fn round_trip(n: usize, seed: u64) -> Result<String, JsError> {
    round_trip_value(n, seed).map(|v| v.to_string()).map_err(to_js)
}

fn sphere_value(j: u32, energy: f64) -> Result<Value, Error> {
    if !(1..=6).contains(&j) {
        return Err(Error::InvalidArgument(format!("j = {j} must be between 1 and 6")));
    }
    let cfg = ExperimentConfig::from_json(
        &json!({
            "schema_version": 1,
            "model": { "variant": "sphere", "j": j, "energy": energy },
            "experiments": [{ "probe": "wedge_structure" }, { "probe": "net_report" }]
        })
        .to_string(),
    )?;
    let mut checks = Vec::new();
    for p in cfg.plan()? {
        checks.extend(execute(&p, &cfg.tolerances, cfg.seed, false)?.checks);
    }
    Ok(json!({ "j": j, "energy": energy, "checks": checks }))
}

/// Wedge structure and net checks for the spin-`j` toy model.
#[wasm_bindgen]
pub fn sphere_net(j: u32, energy: f64) -> Result<String, JsError> {
    sphere_value(j, energy).map(|v| v.to_string()).map_err(to_js)
}

fn weyl_value(h: C64, k: C64, n_max: usize) -> Result<Value, Error> {
    if !(1..=40).contains(&n_max) {
        return Err(Error::InvalidArgument(format!("n_max = {n_max} must be between 1 and 40")));
    }
    let h = CVector::from_element(1, h);
    let k = CVector::from_element(1, k);
    check_argument(&h, false)?;
    check_argument(&k, false)?;
    let space = FockSpace::new(1, n_max);
    let vacuum = FockState::from_components(1, n_max, space.vacuum().coeffs)?;
    let lhs = weyl_apply(&h, &weyl_apply(&k, &vacuum)?)?;
    let phase = C64::new(0.0, -0.5 * inner(&h, &k).im).exp();
    let rhs = weyl_vacuum(&(&h + &k), n_max)?.scale(phase);
    let probabilities: Vec<f64> = lhs.coeffs.iter().map(|c| c.norm_sqr()).collect();
    Ok(json!({
        "n_max": n_max,
        "weyl_residual": lhs.distance(&rhs),
        "tail": lhs.tail,
        "probabilities": probabilities,
    }))
}

/// One-mode Weyl relation `V(h)V(k)Ω` against `e^{−(i/2)Im⟨h,k⟩}V(h+k)Ω`,
/// with the photon-number distribution of the left side.
#[wasm_bindgen]
pub fn weyl(h_re: f64, h_im: f64, k_re: f64, k_im: f64, n_max: usize) -> Result<String, JsError> {
    weyl_value(C64::new(h_re, h_im), C64::new(k_re, k_im), n_max).map(|v| v.to_string()).map_err(to_js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_tight() {
        let v = round_trip_value(4, 3).unwrap();
        assert_eq!(v["real_dim"], 4);
        assert!(v["round_trip_distance"].as_f64().unwrap() < 1e-10);
        assert!(round_trip_value(0, 1).is_err());
    }

    #[test]
    fn sphere_checks_pass() {
        let v = sphere_value(2, 1.0).unwrap();
        let checks = v["checks"].as_array().unwrap();
        assert!(checks.iter().all(|c| c["status"] != "fail"), "{v}");
    }

    #[test]
    fn weyl_probabilities_sum_to_one() {
        let v = weyl_value(C64::new(0.3, 0.1), C64::new(-0.2, 0.25), 12).unwrap();
        let total: f64 = v["probabilities"].as_array().unwrap().iter().map(|p| p.as_f64().unwrap()).sum();
        assert!((total + v["tail"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!(v["weyl_residual"].as_f64().unwrap() < 1e-6);
        assert!(weyl_value(C64::new(2.0, 0.0), C64::new(0.0, 0.0), 12).is_err());
    }
}
