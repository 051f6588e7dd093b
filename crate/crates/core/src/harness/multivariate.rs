use super::config::{ExperimentConfig, ExperimentKind};
use super::report::{Builder, Table, Verdict};
use super::replicates;
use crate::error::Result;
use crate::multicoupling::{build_coupling_matrix, esd_histogram, ks_distance_values, normalize, spectrum_with_margin, SpectrumReport};
use crate::pointproc::{simulate_population, IntensityModel, SpikeData};
use crate::seed::SimRng;
use crate::signals::{synthesize_oscillations, whiten, SignalMatrix};
use crate::specfun::mp_law;
use crate::stats::mean;

/// Whitened noisy oscillations and the spikes of all units for one
/// replicate, drawn in that order from `rng`.
pub fn simulate_multivariate(
    cfg: &ExperimentConfig,
    models: &[IntensityModel],
    rng: &mut SimRng,
) -> Result<(SignalMatrix, SpikeData)> {
    let raw = synthesize_oscillations(&cfg.components, cfg.window, cfg.dt, cfg.kappa_noise, cfg.n_channels, rng)?;
    let signals = whiten(&raw)?;
    let spikes = simulate_population(models, cfg.window, cfg.trials, rng)?;
    Ok((signals, spikes))
}

/// Coupling matrix, normalization and spectrum of one simulated replicate.
pub fn multivariate_replicate(cfg: &ExperimentConfig, models: &[IntensityModel], rng: &mut SimRng) -> Result<SpectrumReport> {
    let (signals, spikes) = simulate_multivariate(cfg, models, rng)?;
    let raw = build_coupling_matrix(&signals, &spikes)?;
    spectrum_with_margin(&normalize(&raw)?, cfg.margin)
}

pub(crate) fn run(cfg: &ExperimentConfig, b: &mut Builder) -> Result<()> {
    let tol = &cfg.tolerances;
    let models = cfg.multivariate_models()?;
    let reports = replicates(cfg.master_seed, 0, cfg.replicates, |rng| multivariate_replicate(cfg, &models, rng))?;
    let law = mp_law(cfg.n_channels as f64 / cfg.n_units as f64)?;
    let edge = law.upper_edge;
    let n = reports.len() as f64;

    let top: Vec<f64> = reports.iter().map(|r| r.eigenvalues[0]).collect();
    let ks: Vec<f64> = reports.iter().map(|r| r.ks_distance).collect();
    let trace: Vec<f64> = reports.iter().map(|r| r.eigenvalues.iter().sum::<f64>() / r.p as f64).collect();
    let zero_frac: Vec<f64> = reports
        .iter()
        .map(|r| r.eigenvalues.iter().filter(|&&l| l == 0.0).count() as f64 / r.p as f64)
        .collect();
    let pooled: Vec<f64> = reports.iter().flat_map(|r| r.eigenvalues.iter().copied()).collect();
    let pooled_ks = ks_distance_values(&pooled, &law)?;
    let above = |factor: f64| top.iter().filter(|&&l| l > edge * factor).count() as f64 / n;

    b.target("alpha", law.alpha);
    b.target("mp_upper_edge", edge);
    b.target("mp_lower_edge", law.lower_edge);
    b.target("mp_zero_atom", law.zero_atom);
    b.target("trace_per_channel", 1.0);
    b.stat("mean_top_eigenvalue", mean(&top));
    b.stat("mean_ks", mean(&ks));
    b.stat("pooled_ks", pooled_ks);
    b.stat("mean_trace_per_channel", mean(&trace));
    b.stat("mean_zero_fraction", mean(&zero_frac));
    b.stat("fraction_top_above_edge", above(1.0));
    b.stat("fraction_top_above_inflated_edge", above(tol.edge_factor));
    b.stat(
        "mean_significant",
        mean(&reports.iter().map(|r| r.n_significant as f64).collect::<Vec<_>>()),
    );
    b.stat(
        "max_eigen_residual",
        reports.iter().map(|r| r.max_residual).fold(0.0, f64::max),
    );

    match cfg.experiment {
        ExperimentKind::MultivarNull => {
            b.verdict(Verdict::below("mean_ks", "ks_mp_mean", mean(&ks), tol.ks_mp_mean));
            b.verdict(Verdict::below("pooled_ks", "ks_mp_pooled", pooled_ks, tol.ks_mp_pooled));
            b.verdict(Verdict::relative("mean_top_eigenvalue", "edge_rel", tol.edge_rel, mean(&top), edge));
            b.verdict(Verdict::below(
                "fraction_top_above_inflated_edge",
                "edge_exceed_max",
                above(tol.edge_factor),
                tol.edge_exceed_max,
            ));
            b.verdict(Verdict::relative("mean_trace_per_channel", "trace_rel", tol.trace_rel, mean(&trace), 1.0));
        }
        _ => {
            let detected = reports.iter().filter(|r| r.n_significant > 0).count() as f64 / n;
            b.stat("detection_rate", detected);
            b.verdict(Verdict::at_least("detection_rate", "detection_min", detected, tol.detection_min));
        }
    }

    let mut per = Table::new(&["replicate", "top_eigenvalue", "ks_distance", "trace_per_channel", "n_significant"]);
    let mut eig = Table::new(&["replicate", "rank", "eigenvalue", "singular_value"]);
    for (i, r) in reports.iter().enumerate() {
        per.push(vec![i as f64, r.eigenvalues[0], r.ks_distance, trace[i], r.n_significant as f64]);
        for (k, (l, s)) in r.eigenvalues.iter().zip(&r.singular_values).enumerate() {
            eig.push(vec![i as f64, k as f64, *l, *s]);
        }
    }
    let mut esd = Table::new(&["lower", "upper", "empirical_density", "mp_density"]);
    for bin in esd_histogram(&pooled, &law, 60)? {
        esd.push(vec![bin.lower, bin.upper, bin.empirical, bin.mp]);
    }
    b.table("replicates", per);
    b.table("eigenvalues", eig);
    b.table("esd_vs_mp", esd);
    Ok(())
}
