use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modloc::experiments::{probe_name, ExperimentConfig};
use modloc::report::Report;
use modloc::runner::{load_config, run, sweep_table, write_outputs, RunOptions};

/// Modular localization experiments: standard subspaces, wedge nets and their checks.
#[derive(Parser)]
#[command(name = "modloc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config and list the experiments it expands to.
    Validate(Common),
    /// Run every experiment and write the JSON report.
    Run(Common),
    /// Run and also write the CSV sweep table, printing it.
    Sweep(Common),
    /// Print a summary of a written report.
    Report {
        #[command(flatten)]
        common: Common,
        /// Report file; defaults to the config's report name inside --out.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the report and sweep table.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Gate trend probes that are otherwise informational.
    #[arg(long)]
    strict: bool,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions { seed: self.seed, jobs: self.jobs, strict: self.strict }
    }
}

fn exit_for(report: &Report) -> ExitCode {
    if report.failures() == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: Command) -> modloc::Result<ExitCode> {
    match cmd {
        Command::Validate(c) => {
            let cfg = load_config(&c.config)?;
            let plan = cfg.plan()?;
            println!("config ok: schema v{}, model {}, {} experiment(s)", cfg.schema_version, cfg.model.name(), plan.len());
            for p in &plan {
                let point = p.point.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ");
                println!("  [{}] {} on {} {}", p.index, probe_name(&p.probe), p.model.name(), point);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(c) => {
            let cfg = load_config(&c.config)?;
            let (report, plan) = run(&cfg, &c.options())?;
            for path in write_outputs(&cfg, &report, &plan, &c.out)? {
                eprintln!("wrote {}", path.display());
            }
            print!("{}", report.summary());
            Ok(exit_for(&report))
        }
        Command::Sweep(c) => {
            let cfg = load_config(&c.config)?;
            let (report, plan) = run(&cfg, &c.options())?;
            write_outputs(&cfg, &report, &plan, &c.out)?;
            let table = sweep_table(&report, &plan)?;
            let path = c.out.join(&cfg.output.csv);
            std::fs::write(&path, &table)?;
            eprintln!("wrote {}", path.display());
            print!("{table}");
            Ok(exit_for(&report))
        }
        Command::Report { common, input } => {
            let path = match input {
                Some(p) => p,
                None => {
                    let cfg: ExperimentConfig = load_config(&common.config)?;
                    common.out.join(cfg.output.report)
                }
            };
            let text = std::fs::read_to_string(&path)
                .map_err(|e| modloc::Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let report: Report = serde_json::from_str(&text)?;
            print!("{}", report.summary());
            Ok(exit_for(&report))
        }
    }
}
