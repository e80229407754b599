//! Parallel execution of a config and the files it writes.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::experiments::{execute, ExperimentConfig, Planned};
use crate::report::Report;
use crate::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the config seed.
    pub seed: Option<u64>,
    /// Overrides the config parallelism.
    pub jobs: Option<usize>,
    pub strict: bool,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::from_json(&text)
}

/// Runs every planned experiment; the report is ordered by experiment index.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(Report, Vec<Planned>)> {
    let plan = cfg.plan()?;
    let seed = opts.seed.unwrap_or(cfg.seed);
    let jobs = opts.jobs.or(cfg.jobs).unwrap_or(1).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    let results: Vec<Result<_>> =
        pool.install(|| plan.par_iter().map(|p| execute(p, &cfg.tolerances, seed, opts.strict)).collect());
    let mut report = Report::new(cfg.model.clone(), cfg.tolerances, seed);
    for r in results {
        report.experiments.push(r?);
    }
    Ok((report, plan))
}

/// `experiment,probe,point,check,residual,threshold,status`, one row per check.
pub fn sweep_table(report: &Report, plan: &[Planned]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["experiment", "probe", "point", "check", "residual", "threshold", "status"])
        .map_err(|e| Error::Config(e.to_string()))?;
    for (e, p) in report.experiments.iter().zip(plan) {
        let point = p.point.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        for c in &e.checks {
            let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
            let status = serde_json::to_value(c.status)?.as_str().unwrap_or_default().to_string();
            w.write_record([e.index.to_string(), e.probe.clone(), point.clone(), c.name.clone(), num(c.residual), num(c.threshold), status])
                .map_err(|e| Error::Config(e.to_string()))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Writes the JSON report and, when the config sweeps, the CSV table.
pub fn write_outputs(cfg: &ExperimentConfig, report: &Report, plan: &[Planned], out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let path = out.join(&cfg.output.report);
    fs::write(&path, report.to_json())?;
    written.push(path);
    if cfg.experiments.iter().any(|e| !e.sweep.is_empty()) {
        let path = out.join(&cfg.output.csv);
        fs::write(&path, sweep_table(report, plan)?)?;
        written.push(path);
    }
    Ok(written)
}
