use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::experiments;
use crate::output::OutputSet;
use crate::report::{ExperimentReport, Outcome};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Command-line overrides of the configuration.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub out: Option<String>,
    pub seed: Option<u64>,
}

fn dispatch(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    match cfg.experiment {
        Experiment::SweepSmall => experiments::sweep_small::run(cfg),
        Experiment::NonradiatingAudit => experiments::nonradiating_audit::run(cfg),
        Experiment::CgoVerify => experiments::cgo_verify::run(cfg),
        Experiment::IdentityCheck => experiments::identity_check::run(cfg),
        Experiment::KpointDecay => experiments::kpoint_decay::run(cfg),
        Experiment::MediumDemo => experiments::medium_demo::run(cfg),
        Experiment::Distinguish => experiments::distinguish::run(cfg),
    }
}

/// Run one subcommand; returns the written files.
///
/// On any failure every file written by this run is removed.
pub fn run(subcommand: Experiment, config_path: &Path, opts: &RunOptions) -> CliResult<Vec<PathBuf>> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    if cfg.experiment != subcommand {
        return Err(CliError::ConfigInvalid(format!(
            "config is for `{}` but the subcommand is `{}`",
            cfg.experiment.name(),
            subcommand.name()
        )));
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(o) = &opts.out {
        cfg.output = o.clone();
    }
    cfg.validate()?;
    let workers = opts.workers.unwrap_or_else(|| rayon::current_num_threads().max(1));
    if workers == 0 {
        return Err(CliError::ConfigInvalid("--workers must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let mut out = OutputSet::new(&cfg.output)?;
    let started = Instant::now();
    let result = pool.install(|| dispatch(&cfg)).and_then(|outcome| {
        let mut tables = Vec::new();
        for (name, t) in &outcome.tables {
            let p = out.write_table(name, t)?;
            tables.push(p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
        }
        let report = ExperimentReport {
            artifact_version: env!("CARGO_PKG_VERSION"),
            experiment: cfg.experiment.name(),
            config: &cfg,
            workers,
            results: &outcome.results,
            calibrations: &outcome.calibrations,
            checks: &outcome.checks,
            tables,
            wall_clock_seconds: started.elapsed().as_secs_f64(),
        };
        out.write_report(&report)?;
        let failed: Vec<String> = outcome
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} = {:e} (threshold {:e})", c.name, c.value, c.threshold))
            .collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(failed.join("; ")))
        }
    });
    match result {
        Ok(()) => Ok(out.written().to_vec()),
        Err(e) => {
            out.remove_all();
            Err(e)
        }
    }
}
