//! Experiment configuration and the probes it can request.
//!
//! A config names a model and a list of experiments; each experiment is a probe
//! name, its parameters and optional sweep axes. Sweeps expand to one
//! experiment per grid point, axes taken in alphabetical order.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::fock::{cyclicity_rank, weyl_apply, FockSpace, FockState};
use crate::kernel::{fro, CVector, Tolerances, C64};
use crate::net::{generic_checks, poincare_checks, rapidity_checks, LocalNet, NetReportConfig};
use crate::rep::probes::{bw_probe, isotony_probe, median, spectral_gap_probe, strip_standardness_probe, IsotonyMode};
use crate::rep::rapidity::random_w1_bumps;
use crate::rep::{build_model, Model, ModelSpec, NetModel, RapidityModel, SphereToyModel, TrivialModel};
use crate::report::{Check, ExperimentReport};
use crate::sample;
use crate::subspace::{factor_classify, modular_from_subspace, standardness, subspace_from_modular, RealSubspace, Standardness};
use crate::wedge::Wedge;
use crate::{Error, Result};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub model: ModelSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub experiments: Vec<ExperimentSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    /// Report file name inside the output directory.
    pub report: String,
    /// Sweep table file name; written only when some experiment sweeps.
    pub csv: String,
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self { report: "report.json".into(), csv: "sweep.csv".into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub probe: String,
    #[serde(default = "empty_object")]
    pub params: Value,
    /// Axis name → values. Names of model fields override the model.
    #[serde(default)]
    pub sweep: BTreeMap<String, Vec<Value>>,
    /// Replaces the config-level model for this experiment.
    #[serde(default)]
    pub model: Option<ModelSpec>,
}

fn empty_object() -> Value {
    Value::Object(Map::new())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "probe", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum Probe {
    ModelValidation(Empty),
    NetReport(NetReportConfig),
    WedgeStructure(WedgeStructureParams),
    RoundTrip(RoundTripParams),
    Duality(RoundTripParams),
    BisognanoWichmann(BwParams),
    Isotony(IsotonyParams),
    Strip(StripParams),
    FockWeyl(FockParams),
    Cyclicity(CyclicityParams),
    HaagDuality(HaagParams),
    SpectralGap(GapParams),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Empty {}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WedgeStructureParams {
    pub expect_real_dim: Option<usize>,
    pub expect_center_dim: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoundTripParams {
    pub samples: usize,
    pub min_dim: usize,
    pub max_dim: usize,
    pub max_cond: f64,
    pub rank_tol: f64,
    pub residual_tol: f64,
}

impl Default for RoundTripParams {
    fn default() -> Self {
        Self { samples: 100, min_dim: 2, max_dim: 8, max_cond: 50.0, rank_tol: 1e-8, residual_tol: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BwParams {
    pub bumps: usize,
    pub tol: f64,
    /// Sizes over which the median must not increase; empty skips the trend.
    pub trend_ns: Vec<usize>,
}

impl Default for BwParams {
    fn default() -> Self {
        Self { bumps: 20, tol: 1e-3, trend_ns: vec![32, 64, 128] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Included,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsotonyParams {
    pub a: [f64; 2],
    #[serde(default = "plain")]
    pub mode: IsotonyMode,
    pub expect: Expectation,
    /// Upper bound when included, lower bound when violated.
    #[serde(default)]
    pub threshold: Option<f64>,
}

fn plain() -> IsotonyMode {
    IsotonyMode::Plain
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripParams {
    pub a: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FockParams {
    pub n: usize,
    pub n_max: usize,
    pub pairs: usize,
    pub radius: f64,
    pub weyl_tol: f64,
    pub vacuum_tol: f64,
}

impl Default for FockParams {
    fn default() -> Self {
        Self { n: 2, n_max: 12, pairs: 50, radius: 0.5, weyl_tol: 1e-6, vacuum_tol: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyclicityParams {
    /// Generators of `K` as lists of `[re, im]` pairs.
    pub generators: Vec<Vec<[f64; 2]>>,
    pub ambient_dim: usize,
    pub n_max: usize,
    pub samples: usize,
    #[serde(default)]
    pub expect_full: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HaagParams {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub tol: f64,
    /// Sizes over which the residual must not increase; empty skips the trend.
    pub trend_ns: Vec<usize>,
}

impl Default for HaagParams {
    fn default() -> Self {
        Self { a: [0.0, -0.5], b: [0.0, 0.5], tol: 1e-9, trend_ns: vec![32, 64, 128] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GapParams {
    pub ns: Vec<usize>,
}

impl Default for GapParams {
    fn default() -> Self {
        Self { ns: vec![32, 64, 128] }
    }
}

/// One expanded, typed experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Planned {
    pub index: usize,
    /// Axis assignments of this sweep point, empty without a sweep.
    pub point: Vec<(String, Value)>,
    pub model: ModelSpec,
    pub probe: Probe,
}

const MODEL_FIELDS: [&str; 6] = ["mass", "n", "sigma", "quadrature_factor", "j", "energy"];

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    /// Checks the schema, expands sweeps and types every probe; no model is built.
    pub fn plan(&self) -> Result<Vec<Planned>> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {CONFIG_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        let mut out = Vec::new();
        for (i, e) in self.experiments.iter().enumerate() {
            let base_model = e.model.clone().unwrap_or_else(|| self.model.clone());
            for point in grid(&e.sweep) {
                let mut model = serde_json::to_value(&base_model)?;
                let mut params = e.params.clone();
                if !params.is_object() {
                    return Err(Error::Config(format!("experiment {i}: params must be an object")));
                }
                for (axis, v) in &point {
                    let target = if MODEL_FIELDS.contains(&axis.as_str()) { &mut model } else { &mut params };
                    target.as_object_mut().expect("object").insert(axis.clone(), v.clone());
                }
                let model: ModelSpec = serde_json::from_value(model)
                    .map_err(|err| Error::Config(format!("experiment {i} ({}): model: {err}", e.probe)))?;
                let probe = parse_probe(&e.probe, params).map_err(|err| Error::Config(format!("experiment {i}: {err}")))?;
                check_combination(&probe, &model)?;
                out.push(Planned { index: out.len(), point, model, probe });
            }
        }
        Ok(out)
    }
}

fn grid(sweep: &BTreeMap<String, Vec<Value>>) -> Vec<Vec<(String, Value)>> {
    let mut points = vec![Vec::new()];
    for (axis, values) in sweep {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((axis.clone(), v.clone()));
                    q
                })
            })
            .collect();
    }
    points
}

fn parse_probe(name: &str, params: Value) -> std::result::Result<Probe, String> {
    let mut obj = Map::new();
    obj.insert("probe".into(), Value::String(name.into()));
    obj.insert("params".into(), params);
    serde_json::from_value(Value::Object(obj)).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("unknown variant") {
            format!("unknown probe `{name}`")
        } else {
            format!("probe `{name}`: {msg}")
        }
    })
}

pub fn probe_name(p: &Probe) -> &'static str {
    match p {
        Probe::ModelValidation(_) => "model_validation",
        Probe::NetReport(_) => "net_report",
        Probe::WedgeStructure(_) => "wedge_structure",
        Probe::RoundTrip(_) => "round_trip",
        Probe::Duality(_) => "duality",
        Probe::BisognanoWichmann(_) => "bisognano_wichmann",
        Probe::Isotony(_) => "isotony",
        Probe::Strip(_) => "strip",
        Probe::FockWeyl(_) => "fock_weyl",
        Probe::Cyclicity(_) => "cyclicity",
        Probe::HaagDuality(_) => "haag_duality",
        Probe::SpectralGap(_) => "spectral_gap",
    }
}

fn check_combination(p: &Probe, m: &ModelSpec) -> Result<()> {
    let rapidity_only = matches!(
        p,
        Probe::BisognanoWichmann(_) | Probe::Isotony(_) | Probe::Strip(_) | Probe::SpectralGap(_)
    );
    let poincare_only = matches!(p, Probe::HaagDuality(_));
    let ok = match m {
        ModelSpec::Rapidity { .. } => true,
        ModelSpec::Trivial => !rapidity_only,
        ModelSpec::Sphere { .. } => !rapidity_only && !poincare_only,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("probe `{}` is not available for the {} model", probe_name(p), m.name())))
    }
}

fn rapidity(model: &Model) -> Result<&RapidityModel> {
    match model {
        Model::Rapidity(m) => Ok(m),
        other => Err(Error::Unsupported(format!("needs the rapidity model, got {}", other.spec().name()))),
    }
}

fn resized(m: &RapidityModel, n: usize) -> Result<RapidityModel> {
    RapidityModel::with_options(m.mass(), n, m.sigma(), m.quadrature_factor(), *m.tolerances())
}

fn with_net<R>(
    model: &Model,
    rap: impl FnOnce(&LocalNet<RapidityModel>) -> Result<R>,
    sph: impl FnOnce(&LocalNet<SphereToyModel>) -> Result<R>,
    tri: impl FnOnce(&LocalNet<TrivialModel>) -> Result<R>,
) -> Result<R> {
    match model {
        Model::Rapidity(m) => rap(&LocalNet::new(Arc::new(m.clone()))),
        Model::Sphere(m) => sph(&LocalNet::new(Arc::new(m.clone()))),
        Model::Trivial(m) => tri(&LocalNet::new(Arc::new(m.clone()))),
    }
}

/// Builds the model and runs one planned experiment.
pub fn execute(plan: &Planned, tol: &Tolerances, seed: u64, strict: bool) -> Result<ExperimentReport> {
    let mut provenance = Vec::new();
    let checks = match &plan.probe {
        Probe::RoundTrip(p) => round_trip(p, seed)?,
        Probe::Duality(p) => duality(p, seed)?,
        Probe::FockWeyl(p) => fock_weyl(p, seed)?,
        Probe::Cyclicity(p) => cyclicity(p, seed, tol)?,
        _ => {
            let model = build_model(&plan.model, tol)?;
            model_probe(&plan.probe, &model, seed, strict, &mut provenance)?
        }
    };
    Ok(ExperimentReport {
        index: plan.index,
        probe: probe_name(&plan.probe).to_string(),
        model_spec: plan.model.clone(),
        checks,
        provenance,
    })
}

fn model_probe(p: &Probe, model: &Model, seed: u64, strict: bool, provenance: &mut Vec<String>) -> Result<Vec<Check>> {
    Ok(match p {
        Probe::ModelValidation(_) => model
            .validation()
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let c = Check::residual(&format!("representation[{i}]"), &e.identity, e.residual, e.tolerance);
                if e.exact {
                    c.with_note("exact")
                } else {
                    c
                }
            })
            .collect(),
        Probe::NetReport(cfg) => {
            let cfg = NetReportConfig { strict: cfg.strict || strict, ..cfg.clone() };
            let (checks, prov) = with_net(
                model,
                |net| {
                    let mut c = generic_checks(net, &cfg, seed)?;
                    c.extend(poincare_checks(net, &cfg)?);
                    c.extend(rapidity_checks(net.model(), &cfg, seed)?);
                    Ok((c, net.provenance()))
                },
                |net| Ok((generic_checks(net, &cfg, seed)?, net.provenance())),
                |net| {
                    let mut c = generic_checks(net, &cfg, seed)?;
                    c.extend(poincare_checks(net, &cfg)?);
                    Ok((c, net.provenance()))
                },
            )?;
            provenance.extend(prov.into_iter().map(|p| format!("{:?} {} ← {}", p.construction, p.key, p.family.join(", "))));
            checks
        }
        Probe::WedgeStructure(params) => {
            let (k, key) = match model {
                Model::Rapidity(m) => (m.wedge_space(&m.reference_wedge())?, m.wedge_key(&m.reference_wedge())),
                Model::Sphere(m) => (m.wedge_space(&m.reference_wedge())?, m.wedge_key(&m.reference_wedge())),
                Model::Trivial(m) => (m.wedge_space(&m.reference_wedge())?, m.wedge_key(&m.reference_wedge())),
            };
            let f = factor_classify(&k);
            let st = standardness(&k);
            let mut out = vec![Check::boolean("wedge_standard", "K_W is standard", st.verdict == Standardness::Standard)
                .with_dim("separating_defect", st.separating_defect)
                .with_dim("cyclic_defect", st.cyclic_defect)
                .with_note(key)];
            let expect = |name: &str, statement: &str, got: usize, want: Option<usize>| match want {
                Some(w) => Check::boolean(name, statement, got == w).with_dim("real_dim", got).with_dim("expected", w),
                None => Check::info(name, statement).with_dim("real_dim", got),
            };
            out.push(expect("wedge_real_dim", "real dimension of K_W", k.real_dim(), params.expect_real_dim));
            out.push(expect("center_real_dim", "real dimension of K_W ∩ K_W′", f.center_real_dim, params.expect_center_dim));
            out
        }
        Probe::BisognanoWichmann(p) => {
            let m = rapidity(model)?;
            let report = bw_probe(m, &random_w1_bumps(p.bumps, seed))?;
            let literal = median(&report.literal_residuals);
            let mut out = vec![Check::residual(
                "bisognano_wichmann",
                "median relative distance of W₁-localized bumps from K_{W₁}",
                report.median_distance,
                p.tol,
            )
            .with_dim("n", m.n())
            .with_note(format!("max {:.3e}; literal ‖Sψ − ψ‖/‖ψ‖ median {literal:.3e}", report.max_distance))];
            if !p.trend_ns.is_empty() {
                let mut medians = Vec::new();
                for &n in &p.trend_ns {
                    medians.push(bw_probe(&resized(m, n)?, &random_w1_bumps(p.bumps, seed))?.median_distance);
                }
                out.push(monotone("bisognano_wichmann_trend", "median distance is non-increasing in N", &p.trend_ns, &medians));
            }
            out
        }
        Probe::Isotony(p) => {
            let m = rapidity(model)?;
            let r = isotony_probe(m, &Wedge::standard(2), p.a, p.mode)?;
            let statement = format!("K_{{W+a}} ⊆ K_W for a = ({}, {}), {:?} conjugation", p.a[0], p.a[1], p.mode);
            let mut c = match p.expect {
                Expectation::Included => Check::residual("isotony", &statement, r.residual, p.threshold.unwrap_or(1e-6)),
                Expectation::Violated => Check::exceeds("isotony_violation", &statement, r.residual, p.threshold.unwrap_or(0.1)),
            };
            let mut note = format!("dilation {:.3e}, reflection {:.3e}", r.dilation_residual, r.reflection_residual);
            if let Some(l) = r.literal_twist_involution_residual {
                note.push_str(&format!(", literal (Δ+i)(Δ−i)⁻¹J involution defect {l:.3e}"));
            }
            if let Some(w) = r.resolution_warning {
                note.push_str(&format!("; {w}"));
            }
            c.note = Some(note);
            vec![c]
        }
        Probe::Strip(p) => {
            let m = rapidity(model)?;
            let r = strip_standardness_probe(m, p.a)?;
            vec![Check::boolean("strip_standard", "K_{W₁} ∩ K_{W₁′+a} is standard", r.verdict == Standardness::Standard)
                .with_dim("meet_real_dim", r.meet_real_dim)
                .with_dim("separating_defect", r.separating_defect)
                .with_dim("cyclic_defect", r.cyclic_defect)
                .with_dim("fixed_space_real_dim", r.fixed_space_real_dim)
                .with_note(format!("{}; cond Δ^(1/2) = {:.3e}", r.verdict, r.delta_half_condition))]
        }
        Probe::HaagDuality(p) => haag(model, p)?,
        Probe::SpectralGap(p) => {
            let m = rapidity(model)?;
            let here = spectral_gap_probe(&m.reference_modular_data()?, m.tolerances().spec);
            let mut out = vec![Check::info("spectral_gap", "min |λ − 1| over the spectrum of Δ_{W₁} (heuristic trend, not a type claim)")
                .with_residual(here.min_gap)
                .with_dim("unit_eigenspace_dim", here.unit_eigenspace_dim)];
            if !p.ns.is_empty() {
                let mut gaps = Vec::new();
                for &n in &p.ns {
                    gaps.push(spectral_gap_probe(&resized(m, n)?.reference_modular_data()?, m.tolerances().spec).min_gap);
                }
                let c = monotone("spectral_gap_trend", "min |λ − 1| is non-increasing in N (heuristic trend)", &p.ns, &gaps);
                out.push(if strict { c } else { c.as_info() });
            }
            out
        }
        Probe::RoundTrip(_) | Probe::Duality(_) | Probe::FockWeyl(_) | Probe::Cyclicity(_) => unreachable!("model-free probes"),
    })
}

fn monotone(name: &str, statement: &str, ns: &[usize], values: &[f64]) -> Check {
    let ok = values.windows(2).all(|w| w[1] <= w[0]);
    let listed = ns.iter().zip(values).map(|(n, v)| format!("N={n}: {v:.3e}")).collect::<Vec<_>>().join(", ");
    Check::boolean(name, statement, ok).with_note(listed)
}

fn haag(model: &Model, p: &HaagParams) -> Result<Vec<Check>> {
    let residual = |m: &Model| -> Result<crate::net::HaagReport> {
        match m {
            Model::Rapidity(r) => LocalNet::new(Arc::new(r.clone())).haag_duality(p.a, p.b),
            Model::Trivial(t) => LocalNet::new(Arc::new(t.clone())).haag_duality(p.a, p.b),
            Model::Sphere(_) => Err(Error::Unsupported("Haag duality probe needs a d = 2 model".into())),
        }
    };
    let h = residual(model)?;
    let mut out = vec![Check::residual("haag_duality", "K_{O′} = (K_O)′ for the double cone O", h.residual, p.tol)
        .with_dim("local_real_dim", h.local_real_dim)
        .with_dim("complement_real_dim", h.complement_real_dim)
        .with_dim("causal_complement_real_dim", h.causal_complement_real_dim)];
    if let (Model::Rapidity(m), false) = (model, p.trend_ns.is_empty()) {
        let mut rs = Vec::new();
        for &n in &p.trend_ns {
            rs.push(residual(&Model::Rapidity(resized(m, n)?))?.residual);
        }
        out.push(monotone("haag_duality_trend", "Haag residual is non-increasing in N", &p.trend_ns, &rs));
    }
    Ok(out)
}

fn standard_samples(p: &RoundTripParams, seed: u64) -> Result<Vec<RealSubspace>> {
    if p.min_dim == 0 || p.max_dim < p.min_dim {
        return Err(Error::Config(format!("dimension range {}..={} is empty", p.min_dim, p.max_dim)));
    }
    let mut r = sample::rng(seed);
    let span = p.max_dim - p.min_dim + 1;
    Ok((0..p.samples).map(|i| sample::random_standard(p.min_dim + i % span, p.max_cond, &mut r, p.rank_tol)).collect())
}

/// `subspace_from_modular ∘ modular_from_subspace = id` with modular residuals.
pub fn round_trip(p: &RoundTripParams, seed: u64) -> Result<Vec<Check>> {
    let tol = Tolerances { rank: p.rank_tol, ..Tolerances::default() };
    let (mut worst_dist, mut worst_jdj, mut worst_s2) = (0.0f64, 0.0f64, 0.0f64);
    let mut mismatched = 0;
    let samples = standard_samples(p, seed)?;
    for k in &samples {
        let md = modular_from_subspace(k, &tol)?;
        let back = subspace_from_modular(&md, &tol)?;
        if !back.same_as(k)? {
            mismatched += 1;
        }
        worst_dist = worst_dist.max(back.distance(k)?);
        let r = md.residuals();
        worst_jdj = worst_jdj.max(r.j_delta_j);
        worst_s2 = worst_s2.max(r.s_square);
    }
    Ok(vec![
        Check::boolean("round_trip", "subspace_from_modular(modular_from_subspace(K)) = K at the rank tolerance", mismatched == 0)
            .with_residual(worst_dist)
            .with_dim("samples", samples.len())
            .with_dim("mismatched", mismatched),
        Check::residual("j_delta_j", "JΔJ = Δ⁻¹", worst_jdj, p.residual_tol),
        Check::residual("s_square", "S² = 1", worst_s2, p.residual_tol),
    ])
}

/// Modular data of `K′` is `(J, Δ⁻¹)`, and `JK = K′`.
pub fn duality(p: &RoundTripParams, seed: u64) -> Result<Vec<Check>> {
    let tol = Tolerances { rank: p.rank_tol, ..Tolerances::default() };
    let (mut worst_j, mut worst_delta) = (0.0f64, 0.0f64);
    let mut mismatched = 0;
    let samples = standard_samples(p, seed)?;
    for k in &samples {
        let md = modular_from_subspace(k, &tol)?;
        let kp = k.symplectic_complement();
        let mdp = modular_from_subspace(&kp, &tol)?;
        worst_j = worst_j.max(fro(&(mdp.j.matrix() - md.j.matrix())) / fro(md.j.matrix()));
        worst_delta = worst_delta.max(mdp.delta.rel_distance(&md.delta_inverse()));
        if !k.map_antilinear(&md.j).same_as(&kp)? {
            mismatched += 1;
        }
    }
    Ok(vec![
        Check::residual("dual_conjugation", "J_{K′} = J_K", worst_j, p.residual_tol),
        Check::residual("dual_modular_operator", "Δ_{K′} = Δ_K⁻¹", worst_delta, p.residual_tol),
        Check::boolean("conjugation_maps_to_complement", "J K = K′ at the rank tolerance", mismatched == 0)
            .with_dim("samples", samples.len())
            .with_dim("mismatched", mismatched),
    ])
}

fn small_vector(n: usize, radius: f64, r: &mut impl rand::Rng) -> CVector {
    let g = sample::complex_gaussian_with(n, 1, r).column(0).into_owned();
    let s = radius * r.random_range(0.0..=1.0);
    &g * C64::new(s / g.norm().max(f64::MIN_POSITIVE), 0.0)
}

/// Weyl relation and the vacuum formula; the left side goes through the
/// truncated Weyl matrices, the right side through the closed form.
pub fn fock_weyl(p: &FockParams, seed: u64) -> Result<Vec<Check>> {
    crate::fock::check_argument(&CVector::from_element(1, C64::new(p.radius, 0.0)), false)?;
    let space = FockSpace::new(p.n, p.n_max);
    let vacuum = FockState::from_components(p.n, p.n_max, space.vacuum().coeffs)?;
    let mut r = sample::rng(seed);
    let (mut weyl, mut vac, mut unitary) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..p.pairs {
        let h = small_vector(p.n, p.radius, &mut r);
        let k = small_vector(p.n, p.radius, &mut r);
        let lhs = weyl_apply(&h, &weyl_apply(&k, &vacuum)?)?;
        let phase = C64::new(0.0, -0.5 * crate::kernel::inner(&h, &k).im).exp();
        let rhs = crate::fock::weyl_vacuum(&(&h + &k), p.n_max)?.scale(phase);
        weyl = weyl.max(lhs.distance(&rhs));
        unitary = unitary.max((lhs.norm() - 1.0).abs() - lhs.tail.sqrt());

        let direct = weyl_apply(&h, &vacuum)?;
        let shift = &h * C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
        let formula = space.coherent(&shift)?.scale(C64::new((-0.25 * h.norm_squared()).exp(), 0.0));
        vac = vac.max(direct.distance(&formula));
    }
    Ok(vec![
        Check::residual("weyl_relation", "V(h)V(k)Ω = e^{−(i/2)Im⟨h,k⟩}V(h+k)Ω", weyl, p.weyl_tol).with_dim("pairs", p.pairs),
        Check::residual("weyl_vacuum", "V(h)Ω = e^{−‖h‖²/4} e^{ih/√2}", vac, p.vacuum_tol),
        Check::residual("weyl_unitarity", "|‖V(h)V(k)Ω‖ − 1| minus the truncation tail", unitary.max(0.0), 1e-12),
    ])
}

pub fn cyclicity(p: &CyclicityParams, seed: u64, tol: &Tolerances) -> Result<Vec<Check>> {
    let gens: Vec<CVector> = p
        .generators
        .iter()
        .map(|g| CVector::from_iterator(g.len(), g.iter().map(|z| C64::new(z[0], z[1]))))
        .collect();
    let k = RealSubspace::from_generators(p.ambient_dim, &gens, tol.rank)?;
    let r = cyclicity_rank(&k, p.samples, p.n_max, seed, tol.rank)?;
    let statement = "rank of span{V(h)Ω : h ∈ K} against the truncated Fock dimension";
    let c = match p.expect_full {
        Some(want) => Check::boolean("cyclicity", statement, r.full_rank() == want),
        None => Check::info("cyclicity", statement),
    };
    let mut c = c.with_dim("rank", r.rank).with_dim("fock_dim", r.full_dim).with_dim("k_real_dim", k.real_dim());
    if r.undersampled {
        c = c.with_note("fewer samples than the truncated dimension");
    }
    Ok(vec![c])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(experiments: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{"schema_version": 1, "model": {{"variant": "rapidity", "mass": 1.0, "n": 16}}, "experiments": {experiments}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn unknown_probe_is_named() {
        let err = config(r#"[{"probe": "teleport"}]"#).plan().unwrap_err().to_string();
        assert!(err.contains("teleport"), "{err}");
    }

    #[test]
    fn unknown_parameter_rejected() {
        assert!(config(r#"[{"probe": "strip", "params": {"a": [0.5, 0.5], "b": 1}}]"#).plan().is_err());
    }

    #[test]
    fn sweep_expands_model_and_params() {
        let plan = config(r#"[{"probe": "isotony", "params": {"expect": "violated"}, "sweep": {"n": [8, 12], "a": [[0, 1], [0, -1]]}}]"#)
            .plan()
            .unwrap();
        assert_eq!(plan.len(), 4);
        assert_eq!(plan[3].model, ModelSpec::rapidity(1.0, 12));
        assert!(matches!(&plan[3].probe, Probe::Isotony(p) if p.a == [0.0, -1.0]));
    }

    #[test]
    fn unsupported_combination_named() {
        let c = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "model": {"variant": "sphere", "j": 1, "energy": 1.0}, "experiments": [{"probe": "strip", "params": {"a": [0.5, 0.5]}}]}"#,
        )
        .unwrap();
        let err = c.plan().unwrap_err().to_string();
        assert!(err.contains("strip") && err.contains("sphere"), "{err}");
    }

    #[test]
    fn wrong_schema_version() {
        let c = ExperimentConfig::from_json(r#"{"schema_version": 2, "model": {"variant": "trivial"}}"#).unwrap();
        assert!(c.plan().is_err());
    }
}
