//! Seeded Monte Carlo experiments with verdicts against the closed-form
//! laws, plus the dataset simulation and analysis used by the command line.
//!
//! Replicate `i` draws from its own stream `seed::task_rng(master_seed, i)`
//! and results are gathered in replicate order, so a report depends only on
//! its configuration, never on the thread count.

mod analysis;
mod config;
mod moments;
mod multivariate;
mod report;
mod univariate;

pub use analysis::{analyze, simulate_dataset, AnalysisReport, Dataset, UnitAnalysis};
pub use config::{ConfigFile, ExperimentConfig, ExperimentKind, Tolerances, DEFAULT_SEED};
pub use multivariate::{multivariate_replicate, simulate_multivariate};
pub use report::{ExperimentReport, ReportBody, Table, Verdict};

use crate::error::Result;
use crate::seed::{task_rng, SimRng};
use rayon::prelude::*;
use std::time::Instant;

/// Runs `f` once per replicate index `offset + i`, `i < count`, each with
/// its own derived stream; results come back in index order.
pub(crate) fn replicates<T, F>(master: u64, offset: u64, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut SimRng) -> Result<T> + Sync,
{
    (0..count as u64)
        .into_par_iter()
        .map(|i| f(&mut task_rng(master, offset + i)))
        .collect()
}

/// Validates `config`, runs every replicate and compares the aggregates with
/// the theoretical targets.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let mut b = report::Builder::new(config);
    match config.experiment {
        ExperimentKind::UnivarNull | ExperimentKind::UnivarCoupled => univariate::run_von_mises(config, &mut b)?,
        ExperimentKind::BiasCurve => univariate::run_bias_curve(config, &mut b)?,
        ExperimentKind::SinusoidUncoupled => univariate::run_sinusoid(config, &mut b)?,
        ExperimentKind::MultivarNull | ExperimentKind::MultivarCoupled => multivariate::run(config, &mut b)?,
        ExperimentKind::MomentOracle => moments::run(config, &mut b)?,
    }
    Ok(ExperimentReport {
        body: b.body,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::preset(kind);
        c.replicates = 40;
        match kind {
            ExperimentKind::UnivarNull | ExperimentKind::UnivarCoupled | ExperimentKind::SinusoidUncoupled => {
                c.trials = 20
            }
            ExperimentKind::MultivarNull | ExperimentKind::MultivarCoupled => {
                c.replicates = 3;
                c.window = 2.0;
                c.n_channels = 10;
                c.n_units = 8;
            }
            ExperimentKind::MomentOracle => c.replicates = 2000,
            ExperimentKind::BiasCurve => {}
        }
        c
    }

    #[test]
    fn every_experiment_runs_and_is_deterministic() {
        for kind in ExperimentKind::ALL {
            let c = small(kind);
            let a = run_experiment(&c).unwrap();
            let b = run_experiment(&c).unwrap();
            assert_eq!(a.body_json(), b.body_json(), "{kind}");
            assert!(!a.body.verdicts.is_empty(), "{kind}");
            for v in &a.body.verdicts {
                assert!(
                    serde_json::to_value(&c.tolerances).unwrap().get(&v.tolerance).is_some(),
                    "{kind}: verdict {} cites unknown tolerance {}",
                    v.check,
                    v.tolerance
                );
            }
        }
    }

    #[test]
    fn invalid_config_fails_before_running() {
        let mut c = ExperimentConfig::preset(ExperimentKind::SinusoidUncoupled);
        c.varkappa = 2.0;
        assert!(run_experiment(&c).is_err());
    }

    #[test]
    fn report_files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_experiment(&small(ExperimentKind::BiasCurve)).unwrap();
        r.write(dir.path()).unwrap();
        assert!(dir.path().join("report.json").exists());
        assert!(dir.path().join("bias_curve.csv").exists());
        let back: ExperimentReport =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(back.body, r.body);
    }
}
