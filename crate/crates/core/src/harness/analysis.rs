use super::config::{ExperimentConfig, ExperimentKind};
use super::multivariate::simulate_multivariate;
use crate::error::{Error, Result};
use crate::multicoupling::{build_coupling_matrix, normalize, spectrum_with_margin, CouplingMatrix, SpectrumReport};
use crate::pointproc::{simulate_poisson, IntensityModel, SpikeData};
use crate::seed::task_rng;
use crate::signals::{PhaseSpec, SignalMatrix};
use crate::unicoupling::{estimate_coupling, estimate_plv, plv_asymptotics_vonmises, plv_null_test, AsymptoticLaw};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One simulated dataset.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub spikes: SpikeData,
    pub signals: Option<SignalMatrix>,
    pub phase: Option<PhaseSpec>,
}

/// Simulates the data of replicate 0 of `config`.
pub fn simulate_dataset(config: &ExperimentConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = task_rng(config.master_seed, 0);
    let single = |model: &IntensityModel, window: f64, rng: &mut _| simulate_poisson(model, window, config.trials, rng);
    Ok(match config.experiment {
        ExperimentKind::UnivarNull | ExperimentKind::UnivarCoupled => Dataset {
            spikes: single(&config.univariate_model()?, config.window, &mut rng)?,
            signals: None,
            phase: Some(config.univariate_phase()?),
        },
        ExperimentKind::BiasCurve => Dataset {
            spikes: single(&config.bias_model(config.window)?, config.window, &mut rng)?,
            signals: None,
            phase: Some(config.univariate_phase()?),
        },
        ExperimentKind::SinusoidUncoupled => Dataset {
            spikes: single(&config.sinusoid_model(config.m)?, config.window, &mut rng)?,
            signals: None,
            phase: Some(config.sinusoid_phase()?),
        },
        ExperimentKind::MultivarNull | ExperimentKind::MultivarCoupled => {
            let models = config.multivariate_models()?;
            let (signals, spikes) = simulate_multivariate(config, &models, &mut rng)?;
            Dataset {
                spikes,
                signals: Some(signals),
                phase: None,
            }
        }
        ExperimentKind::MomentOracle => Dataset {
            spikes: single(&IntensityModel::homogeneous(config.lambda0)?, config.window, &mut rng)?,
            signals: None,
            phase: None,
        },
    })
}

/// Univariate coupling of one unit to a phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitAnalysis {
    pub id: u64,
    pub trials: usize,
    pub total_spikes: usize,
    /// `c_K` for `x = e^{i phi}`.
    pub coupling: Complex64,
    /// `None` when the unit has no spikes.
    pub plv: Option<Complex64>,
    /// Null law (`kappa = 0`) at the estimated rate `N / (K T)`.
    pub null_law: Option<AsymptoticLaw>,
    /// `sqrt(K) PLV` against the null law.
    pub scaled_residual: Option<Complex64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub units: Vec<UnitAnalysis>,
    pub coupling: Option<CouplingMatrix>,
    pub spectrum: Option<SpectrumReport>,
}

/// Univariate analysis of every unit against `phase`, and the coupling
/// matrix with its spectrum when `signals` are given.
pub fn analyze(
    spikes: &SpikeData,
    signals: Option<&SignalMatrix>,
    phase: Option<&PhaseSpec>,
    margin: f64,
) -> Result<AnalysisReport> {
    spikes.validate()?;
    if signals.is_none() && phase.is_none() {
        return Err(Error::config("analysis needs signals, a phase, or both"));
    }
    let mut units = Vec::new();
    if let Some(phase) = phase {
        for unit in &spikes.units {
            let one = SpikeData {
                window: spikes.window,
                units: vec![unit.clone()],
            };
            let k = unit.trials.len();
            let n = unit.total_count();
            let coupling = estimate_coupling(phase, &one)?;
            let (plv, law, resid, p) = if n > 0 {
                let plv = estimate_plv(phase, &one)?;
                let rate = n as f64 / (k as f64 * spikes.window);
                let law = plv_asymptotics_vonmises(0.0, 0.0, rate, spikes.window)?;
                let resid = law.scaled_residual(plv, k);
                (Some(plv), Some(law), Some(resid), Some(plv_null_test(plv, n)?))
            } else {
                (None, None, None, None)
            };
            units.push(UnitAnalysis {
                id: unit.id,
                trials: k,
                total_spikes: n,
                coupling,
                plv,
                null_law: law,
                scaled_residual: resid,
                p_value: p,
            });
        }
    }
    let (coupling, spectrum) = match signals {
        Some(x) => {
            let raw = build_coupling_matrix(x, spikes)?;
            let report = spectrum_with_margin(&normalize(&raw)?, margin)?;
            (Some(raw), Some(report))
        }
        None => (None, None),
    };
    Ok(AnalysisReport {
        units,
        coupling,
        spectrum,
    })
}
