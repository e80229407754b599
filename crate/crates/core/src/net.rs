//! The net `O ↦ K_O` assembled from wedge spaces.
//!
//! Regions are meets (`K_C = ⋂ K_W` over the minimal wedge family of `C`) or
//! joins (`⋁ K_W`, used for two-component causal complements). Spaces are
//! cached by canonical key; a cache miss is a pure recomputation, so
//! concurrent misses agree bit for bit.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::kernel::Tolerances;
use crate::report::Check;
use crate::rep::probes::{bw_probe, spectral_gap_probe};
use crate::rep::rapidity::random_w1_bumps;
use crate::rep::{NetModel, RapidityModel};
use crate::subspace::{factor_classify, subspace_from_modular, RealSubspace};
use crate::wedge::{covering_family, separating_wedge, Region, Wedge};
use crate::{Error, Result};

/// A region described by wedges.
#[derive(Clone, Debug, PartialEq)]
pub enum Localization<W> {
    Meet(Vec<W>),
    Join(Vec<W>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Modular,
    Meet,
    Join,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub key: String,
    pub construction: Construction,
    /// Keys of the wedges that produced the entry.
    pub family: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CacheEntry {
    pub space: Arc<RealSubspace>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotonyEntry {
    pub smaller: String,
    pub larger: String,
    /// Largest sine from `K_smaller` into `K_larger`.
    pub residual: f64,
    pub violated: bool,
}

struct Recorded<W> {
    smaller: Localization<W>,
    larger: Localization<W>,
}

pub struct LocalNet<M: NetModel> {
    model: Arc<M>,
    tol: RwLock<Tolerances>,
    cache: RwLock<BTreeMap<String, CacheEntry>>,
    ledger: RwLock<Vec<(Recorded<M::Wedge>, IsotonyEntry)>>,
}

impl<M: NetModel> LocalNet<M> {
    pub fn new(model: Arc<M>) -> Self {
        let tol = *model.tolerances();
        Self { model, tol: RwLock::new(tol), cache: RwLock::new(BTreeMap::new()), ledger: RwLock::new(Vec::new()) }
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn tolerances(&self) -> Tolerances {
        *self.tol.read().expect("tolerance lock")
    }

    /// Changes the tolerances, drops the cache and re-verifies every recorded inclusion.
    pub fn set_tolerances(&self, tol: Tolerances) -> Result<Vec<IsotonyEntry>> {
        *self.tol.write().expect("tolerance lock") = tol;
        self.cache.write().expect("cache lock").clear();
        let pending: Vec<_> = self
            .ledger
            .read()
            .expect("ledger lock")
            .iter()
            .map(|(r, _)| (r.smaller.clone(), r.larger.clone()))
            .collect();
        let mut fresh = Vec::with_capacity(pending.len());
        for (s, l) in pending {
            let e = self.inclusion_entry(&s, &l)?;
            fresh.push((Recorded { smaller: s, larger: l }, e));
        }
        *self.ledger.write().expect("ledger lock") = fresh;
        Ok(self.isotony_ledger())
    }

    pub fn key(&self, loc: &Localization<M::Wedge>) -> String {
        let keys = |ws: &[M::Wedge]| {
            let mut k: Vec<String> = ws.iter().map(|w| self.model.wedge_key(w)).collect();
            k.sort();
            k.dedup();
            k
        };
        match loc {
            Localization::Meet(ws) if keys(ws).len() == 1 => format!("wedge({})", keys(ws)[0]),
            Localization::Meet(ws) => format!("meet({})", keys(ws).join("|")),
            Localization::Join(ws) => format!("join({})", keys(ws).join("|")),
        }
    }

    pub fn cached(&self, key: &str) -> Option<CacheEntry> {
        self.cache.read().expect("cache lock").get(key).cloned()
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    pub fn provenance(&self) -> Vec<Provenance> {
        self.cache.read().expect("cache lock").values().map(|e| e.provenance.clone()).collect()
    }

    pub fn isotony_ledger(&self) -> Vec<IsotonyEntry> {
        self.ledger.read().expect("ledger lock").iter().map(|(_, e)| e.clone()).collect()
    }

    fn insert(&self, provenance: Provenance, space: RealSubspace) -> Arc<RealSubspace> {
        let mut cache = self.cache.write().expect("cache lock");
        let entry = cache
            .entry(provenance.key.clone())
            .or_insert_with(|| CacheEntry { space: Arc::new(space), provenance });
        entry.space.clone()
    }

    pub fn wedge_space(&self, w: &M::Wedge) -> Result<Arc<RealSubspace>> {
        let key = self.key(&Localization::Meet(vec![w.clone()]));
        if let Some(e) = self.cached(&key) {
            return Ok(e.space);
        }
        let tol = self.tolerances();
        let k = subspace_from_modular(&self.model.wedge_modular_data(w)?, &tol)?.with_rank_tol(tol.rank);
        let family = vec![self.model.wedge_key(w)];
        Ok(self.insert(Provenance { key, construction: Construction::Modular, family }, k))
    }

    pub fn space(&self, loc: &Localization<M::Wedge>) -> Result<Arc<RealSubspace>> {
        let (ws, construction) = match loc {
            Localization::Meet(ws) => (ws, Construction::Meet),
            Localization::Join(ws) => (ws, Construction::Join),
        };
        if ws.is_empty() {
            return Err(Error::InvalidArgument("region needs at least one wedge".into()));
        }
        if ws.len() == 1 && construction == Construction::Meet {
            return self.wedge_space(&ws[0]);
        }
        let key = self.key(loc);
        if let Some(e) = self.cached(&key) {
            return Ok(e.space);
        }
        let mut acc = (*self.wedge_space(&ws[0])?).clone();
        for w in &ws[1..] {
            let k = self.wedge_space(w)?;
            acc = match construction {
                Construction::Join => acc.join(&k)?,
                _ => acc.meet(&k)?,
            };
        }
        let family = ws.iter().map(|w| self.model.wedge_key(w)).collect();
        Ok(self.insert(Provenance { key, construction, family }, acc))
    }

    fn inclusion_entry(&self, smaller: &Localization<M::Wedge>, larger: &Localization<M::Wedge>) -> Result<IsotonyEntry> {
        let (s, l) = (self.space(smaller)?, self.space(larger)?);
        let residual = s.max_sine_to(&l)?;
        Ok(IsotonyEntry {
            smaller: self.key(smaller),
            larger: self.key(larger),
            residual,
            violated: residual > self.tolerances().rank,
        })
    }

    /// Records `R₁ ⊆ R₂` in the isotony ledger and checks `K_{R₁} ⊆ K_{R₂}`.
    pub fn record_inclusion(&self, smaller: Localization<M::Wedge>, larger: Localization<M::Wedge>) -> Result<IsotonyEntry> {
        let e = self.inclusion_entry(&smaller, &larger)?;
        self.ledger.write().expect("ledger lock").push((Recorded { smaller, larger }, e.clone()));
        Ok(e)
    }

    /// `dist(K_{W′}, K_W′)`.
    pub fn duality_residual(&self, w: &M::Wedge) -> Result<f64> {
        let k = self.wedge_space(w)?;
        let kc = self.wedge_space(&self.model.complement(w))?;
        kc.distance(&k.symplectic_complement())
    }

    /// `max_g dist(U(g)K_W, K_{gW})`.
    pub fn covariance_residual(&self, w: &M::Wedge, elements: &[M::Element]) -> Result<f64> {
        let k = self.wedge_space(w)?;
        let mut worst: f64 = 0.0;
        for g in elements {
            let moved = match self.model.group_operator(g)? {
                crate::kernel::GroupOperator::Linear(u) => k.map_linear(u.matrix()),
                crate::kernel::GroupOperator::Antilinear(a) => k.map_antilinear(&a),
            };
            let target = self.wedge_space(&self.model.transform(g, w)?)?;
            worst = worst.max(moved.distance(&target)?);
        }
        Ok(worst)
    }
}

/// Haag duality for `O = (W₁ + a) ∩ (W₁′ + b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaagReport {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub local_real_dim: usize,
    /// `dim (K_O)′`.
    pub complement_real_dim: usize,
    /// `dim K_{O′}`, with `O′ = (W₁′ + a) ∪ (W₁ + b)`.
    pub causal_complement_real_dim: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalityReport {
    pub separating_wedge: String,
    /// Largest sine from `K_{R₁}` into `(K_{R₂})′`.
    pub residual: f64,
}

impl<M: NetModel<Wedge = Wedge>> LocalNet<M> {
    /// `K_R` over the minimal covering family of `R`.
    pub fn local_space(&self, r: &Region) -> Result<Arc<RealSubspace>> {
        let fam = covering_family(r)?;
        self.space(&Localization::Meet(fam.wedges))
    }

    /// For a wedge region, `dist(K_W direct, K_W via its covering family)`.
    pub fn wedge_consistency(&self, w: &Wedge) -> Result<f64> {
        let direct = self.wedge_space(w)?;
        let fam = covering_family(&Region::wedge(w.clone()))?;
        let mut acc = (*self.wedge_space(&fam.wedges[0])?).clone();
        for v in &fam.wedges[1..] {
            acc = acc.meet(&*self.wedge_space(v)?)?;
        }
        direct.distance(&acc)
    }

    pub fn haag_duality(&self, a: [f64; 2], b: [f64; 2]) -> Result<HaagReport> {
        let w1 = Wedge::standard(2);
        let o = Localization::Meet(vec![w1.translated(&a), w1.complement().translated(&b)]);
        let o_prime = Localization::Join(vec![w1.complement().translated(&a), w1.translated(&b)]);
        let k = self.space(&o)?;
        let kc = k.symplectic_complement();
        let k_prime = self.space(&o_prime)?;
        Ok(HaagReport {
            a,
            b,
            local_real_dim: k.real_dim(),
            complement_real_dim: kc.real_dim(),
            causal_complement_real_dim: k_prime.real_dim(),
            residual: kc.distance(&k_prime)?,
        })
    }

    /// `K_{R₁} ⊆ (K_{R₂})′` for spacelike separated regions; `None` if no
    /// separating wedge exists.
    pub fn locality(&self, r1: &Region, r2: &Region) -> Result<Option<LocalityReport>> {
        let Some(w) = separating_wedge(r1, r2) else { return Ok(None) };
        let k1 = self.local_space(r1)?;
        let k2 = self.local_space(r2)?;
        Ok(Some(LocalityReport {
            separating_wedge: w.to_string(),
            residual: k1.max_sine_to(&k2.symplectic_complement())?,
        }))
    }
}

/// Thresholds and sizes for [`net_report`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetReportConfig {
    pub duality_tol: f64,
    pub covariance_tol: f64,
    pub covariance_samples: usize,
    pub bw_tol: f64,
    pub bw_bumps: usize,
    pub haag_tol: f64,
    pub haag_a: [f64; 2],
    pub haag_b: [f64; 2],
    /// Sizes for the spectral-gap trend (rapidity only); empty skips it.
    pub gap_ns: Vec<usize>,
    /// Treat trend probes as gates.
    pub strict: bool,
}

impl Default for NetReportConfig {
    fn default() -> Self {
        Self {
            duality_tol: 1e-9,
            covariance_tol: 1e-8,
            covariance_samples: 8,
            bw_tol: 1e-3,
            bw_bumps: 20,
            haag_tol: 1e-9,
            haag_a: [0.0, -0.5],
            haag_b: [0.0, 0.5],
            gap_ns: vec![32, 64, 128],
            strict: false,
        }
    }
}

fn trend(strict: bool, c: Check) -> Check {
    if strict {
        c
    } else {
        c.as_info()
    }
}

/// Checks shared by every model: duality, covariance, irreducibility, factors.
pub fn generic_checks<M: NetModel>(net: &LocalNet<M>, cfg: &NetReportConfig, seed: u64) -> Result<Vec<Check>> {
    let model = net.model();
    let family = model.default_family();
    let mut out = Vec::new();

    let mut dual: f64 = 0.0;
    for w in &family {
        dual = dual.max(net.duality_residual(w)?);
    }
    out.push(Check::residual("wedge_duality", "K_{W′} = K_W′ over the wedge family", dual, cfg.duality_tol));

    let elements = model.sample_elements(cfg.covariance_samples, seed);
    let cov = net.covariance_residual(&model.reference_wedge(), &elements)?;
    out.push(
        Check::residual("covariance", "U(g)K_W = K_{gW} for sampled g", cov, cfg.covariance_tol)
            .with_dim("samples", elements.len()),
    );

    let meet = net.space(&Localization::Meet(family.clone()))?;
    let expect_reducible = model.has_invariant_vectors();
    let ok = (meet.real_dim() > 0) == expect_reducible;
    let statement = if expect_reducible {
        "meet of K_W over the wedge family contains the invariant vectors"
    } else {
        "meet of K_W over the wedge family is {0} (irreducible)"
    };
    out.push(
        Check::boolean("irreducibility", statement, ok)
            .with_dim("meet_real_dim", meet.real_dim())
            .with_dim("family_size", family.len()),
    );

    for (i, w) in family.iter().enumerate() {
        let k = net.wedge_space(w)?;
        let f = factor_classify(&k);
        out.push(
            Check::info(&format!("factor[{i}]"), "K_W ∩ K_W′ (center)")
                .with_dim("center_real_dim", f.center_real_dim)
                .with_dim("wedge_real_dim", k.real_dim())
                .with_note(format!("{w} · {}", if f.factor { "factor" } else { "not a factor" })),
        );
    }
    Ok(out)
}

/// Haag duality and locality for a `d = 2` model.
pub fn poincare_checks<M: NetModel<Wedge = Wedge>>(net: &LocalNet<M>, cfg: &NetReportConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let w1 = Wedge::standard(2);
    out.push(Check::residual(
        "wedge_consistency",
        "K_W from modular data equals the meet over its covering family",
        net.wedge_consistency(&w1)?,
        net.tolerances().rank,
    ));
    let h = net.haag_duality(cfg.haag_a, cfg.haag_b)?;
    out.push(
        Check::residual("haag_duality", "K_{O′} = (K_O)′ for the double cone O", h.residual, cfg.haag_tol)
            .with_dim("local_real_dim", h.local_real_dim)
            .with_dim("complement_real_dim", h.complement_real_dim)
            .with_dim("causal_complement_real_dim", h.causal_complement_real_dim),
    );
    let left = Region::double_cone_2d([0.0, -2.0], [0.0, -1.0]);
    let right = Region::double_cone_2d([0.0, 1.0], [0.0, 2.0]);
    if let Some(l) = net.locality(&left, &right)? {
        out.push(
            Check::residual("locality", "K_{O₁} ⊆ (K_{O₂})′ for spacelike separated double cones", l.residual, net.tolerances().rank)
                .with_note(format!("separated by {}", l.separating_wedge)),
        );
    }
    Ok(out)
}

/// Bisognano–Wichmann cross-check and the spectral-gap trend.
pub fn rapidity_checks(model: &RapidityModel, cfg: &NetReportConfig, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let bw = bw_probe(model, &random_w1_bumps(cfg.bw_bumps, seed))?;
    out.push(
        Check::residual(
            "bisognano_wichmann",
            "median relative distance of W₁-localized bumps from K_{W₁}",
            bw.median_distance,
            cfg.bw_tol,
        )
        .with_dim("bumps", bw.distances.len())
        .with_note(format!("max {:.3e}", bw.max_distance)),
    );
    let md = model.reference_modular_data()?;
    let gap = spectral_gap_probe(&md, model.tolerances().spec);
    out.push(
        Check::info("spectral_gap", "min |λ − 1| over the spectrum of Δ_{W₁} (heuristic trend, not a type claim)")
            .with_residual(gap.min_gap)
            .with_dim("unit_eigenspace_dim", gap.unit_eigenspace_dim),
    );
    if !cfg.gap_ns.is_empty() {
        let mut gaps = Vec::new();
        for &n in &cfg.gap_ns {
            let m = RapidityModel::with_options(model.mass(), n, model.sigma(), model.quadrature_factor(), *model.tolerances())?;
            gaps.push(spectral_gap_probe(&m.reference_modular_data()?, model.tolerances().spec).min_gap);
        }
        let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
        let listed = cfg.gap_ns.iter().zip(&gaps).map(|(n, g)| format!("N={n}: {g:.3e}")).collect::<Vec<_>>().join(", ");
        out.push(trend(
            cfg.strict,
            Check::boolean("spectral_gap_trend", "min |λ − 1| decreases with N (heuristic trend)", decreasing).with_note(listed),
        ));
    }
    Ok(out)
}
