use super::config::{ExperimentConfig, ExperimentKind};
use super::report::{Builder, Table, Verdict};
use super::replicates;
use crate::error::Result;
use crate::pointproc::{simulate_trial_into, IntensityModel};
use crate::seed::SimRng;
use crate::signals::PhaseSpec;
use crate::stats::{ks_statistic, lag1_autocorrelation, mean, normal_cdf, std_error, Moments2};
use crate::unicoupling::{
    phase_sum, plv_asymptotics_sinusoid, plv_asymptotics_vonmises, plv_covariance_delta, plv_from_sum,
    plv_limit_numeric, plv_null_test, AsymptoticLaw,
};
use num_complex::Complex64;

/// Draws the PLV numerator and spike count of `K` simulated trials without
/// materializing the spike data.
pub(crate) struct PlvSampler<'a> {
    model: &'a IntensityModel,
    bound: f64,
    phase: &'a PhaseSpec,
    window: f64,
    trials: usize,
}

impl<'a> PlvSampler<'a> {
    pub fn new(model: &'a IntensityModel, phase: &'a PhaseSpec, window: f64, trials: usize) -> Result<Self> {
        Ok(PlvSampler {
            model,
            bound: model.upper_bound()?,
            phase,
            window,
            trials,
        })
    }

    /// Same draws and summation order as simulating the trials and calling
    /// `estimate_plv` on them.
    pub fn draw(&self, rng: &mut SimRng) -> (Complex64, usize) {
        let mut buf = Vec::new();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut n = 0;
        for _ in 0..self.trials {
            buf.clear();
            simulate_trial_into(self.model, self.bound, self.window, rng, &mut buf);
            let (s, c) = phase_sum(self.phase, std::slice::from_ref(&buf));
            sum += s;
            n += c;
        }
        (sum, n)
    }
}

fn histogram(values: &[f64], sd: f64, bins: usize) -> Table {
    let mut t = Table::new(&["lower", "upper", "count", "normal_expected"]);
    let (lo, hi) = (-4.0 * sd, 4.0 * sd);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        if v >= lo && v < hi {
            counts[((v - lo) / width) as usize] += 1;
        }
    }
    let n = values.len() as f64;
    for (b, &c) in counts.iter().enumerate() {
        let a = lo + b as f64 * width;
        let e = n * (normal_cdf(a + width, 0.0, sd) - normal_cdf(a, 0.0, sd));
        t.push(vec![a, a + width, c as f64, e]);
    }
    t
}

struct LawChecks {
    /// Check variances against the law with `variance_rel` (else `covariance_rel`).
    variance_tolerance: bool,
    ks: bool,
    null_test: bool,
}

// Compares rotated scaled residuals with `law`; `prefix` namespaces the keys.
fn law_checks(
    b: &mut Builder,
    cfg: &ExperimentConfig,
    prefix: &str,
    draws: &[(Complex64, usize)],
    law: &AsymptoticLaw,
    opts: LawChecks,
) -> Result<Vec<Complex64>> {
    let tol = &cfg.tolerances;
    let k = cfg.trials;
    let plv: Vec<Complex64> = draws.iter().map(|&(s, n)| plv_from_sum(s, n)).collect::<Result<_>>()?;
    let resid: Vec<Complex64> = plv.iter().map(|&p| law.scaled_residual(p, k)).collect();
    let re: Vec<f64> = resid.iter().map(|z| z.re).collect();
    let im: Vec<f64> = resid.iter().map(|z| z.im).collect();
    let mom = Moments2::from_pairs(&re, &im);
    let key = |s: &str| format!("{prefix}{s}");

    b.target(key("plv_re"), law.limit.re);
    b.target(key("plv_im"), law.limit.im);
    b.target(key("cov_re_re"), law.cov[0][0]);
    b.target(key("cov_im_im"), law.cov[1][1]);
    b.target(key("lambda_t"), law.lambda_t);
    let rotated: Vec<Complex64> = plv.iter().map(|&p| law.rotate(p)).collect();
    let rot_re: Vec<f64> = rotated.iter().map(|z| z.re).collect();
    let rot_im: Vec<f64> = rotated.iter().map(|z| z.im).collect();
    let limit_rot = law.rotate(law.limit);
    b.stat(key("mean_plv_re"), mean(&plv.iter().map(|z| z.re).collect::<Vec<_>>()));
    b.stat(key("mean_plv_im"), mean(&plv.iter().map(|z| z.im).collect::<Vec<_>>()));
    b.stat(key("mean_plv_rotated_re"), mean(&rot_re));
    b.stat(key("mean_plv_rotated_im"), mean(&rot_im));
    b.stat(key("residual_mean_re"), mom.mean[0]);
    b.stat(key("residual_mean_im"), mom.mean[1]);
    b.stat(key("residual_mean_modulus"), (mom.mean[0].powi(2) + mom.mean[1].powi(2)).sqrt());
    b.stat(key("cov_re_re"), mom.cov[0][0]);
    b.stat(key("cov_re_im"), mom.cov[0][1]);
    b.stat(key("cov_im_im"), mom.cov[1][1]);
    b.stat(key("mean_total_spikes"), mean(&draws.iter().map(|d| d.1 as f64).collect::<Vec<_>>()));

    b.verdict(Verdict::within_se(&key("mean_re"), "mean_se", tol.mean_se, mean(&rot_re), std_error(&rot_re), limit_rot.re));
    b.verdict(Verdict::within_se(&key("mean_im"), "mean_se", tol.mean_se, mean(&rot_im), std_error(&rot_im), limit_rot.im));
    let (name, rel) = if opts.variance_tolerance {
        ("variance_rel", tol.variance_rel)
    } else {
        ("covariance_rel", tol.covariance_rel)
    };
    b.verdict(Verdict::relative(&key("cov_re_re"), name, rel, mom.cov[0][0], law.cov[0][0]));
    b.verdict(Verdict::relative(&key("cov_im_im"), name, rel, mom.cov[1][1], law.cov[1][1]));
    b.verdict(Verdict::within_se(&key("cov_re_im"), "mean_se", tol.mean_se, mom.cov[0][1], mom.cross_cov_se(), 0.0));

    let sd = law.cov[0][0].sqrt();
    let ks = ks_statistic(&re, |x| normal_cdf(x, 0.0, sd));
    b.stat(key("ks_residual_re"), ks);
    if opts.ks {
        b.verdict(Verdict::below(&key("ks_residual_re"), "ks_normal", ks, tol.ks_normal));
    }

    let rho = lag1_autocorrelation(&rot_re);
    b.stat(key("lag1_autocorrelation"), rho);
    let bound = tol.autocorr_se / (draws.len() as f64).sqrt();
    b.verdict(Verdict::absolute(&key("replicate_independence"), "autocorr_se", bound, rho, 0.0));

    if opts.null_test {
        let mut rejections = 0usize;
        for (&p, &(_, n)) in plv.iter().zip(draws) {
            if plv_null_test(p, n)? < tol.null_level {
                rejections += 1;
            }
        }
        let rate = rejections as f64 / draws.len() as f64;
        b.stat(key("false_positive_rate"), rate);
        b.verdict(Verdict::absolute(&key("null_test_calibration"), "false_positive_abs", tol.false_positive_abs, rate, tol.null_level));
    }

    let mut t = Table::new(&["replicate", "plv_re", "plv_im", "total_spikes", "residual_re", "residual_im"]);
    for (i, ((p, d), z)) in plv.iter().zip(draws).zip(&resid).enumerate() {
        t.push(vec![i as f64, p.re, p.im, d.1 as f64, z.re, z.im]);
    }
    b.table(&key("replicates"), t);
    b.table(&key("residual_histogram"), histogram(&re, sd, 40));
    Ok(plv)
}

/// Von Mises rate with linear phase over whole periods, `kappa = 0` (null)
/// or `kappa > 0` (coupled).
pub(crate) fn run_von_mises(cfg: &ExperimentConfig, b: &mut Builder) -> Result<()> {
    let phase = cfg.univariate_phase()?;
    let model = cfg.univariate_model()?;
    let law = plv_asymptotics_vonmises(cfg.kappa, cfg.phi0, cfg.lambda0, cfg.window)?;
    let sampler = PlvSampler::new(&model, &phase, cfg.window, cfg.trials)?;
    let draws = replicates(cfg.master_seed, 0, cfg.replicates, |rng| Ok(sampler.draw(rng)))?;
    let null = cfg.experiment == ExperimentKind::UnivarNull;
    law_checks(
        b,
        cfg,
        "",
        &draws,
        &law,
        LawChecks {
            variance_tolerance: null,
            ks: null,
            null_test: null,
        },
    )?;
    let delta = plv_covariance_delta(&phase, &model, cfg.window, cfg.phi0)?;
    b.stat("cov_delta_re_re", delta[0][0]);
    b.stat("cov_delta_im_im", delta[1][1]);
    b.stat("cov_delta_re_im", delta[0][1]);
    if !null {
        b.note(
            "cov_* verdicts compare with the closed-form covariance; cov_delta_* is the delta-method \
             covariance of the ratio estimator, which also accounts for the random spike count",
        );
    }
    Ok(())
}

/// Mean PLV against the numeric finite-window limit for each window.
pub(crate) fn run_bias_curve(cfg: &ExperimentConfig, b: &mut Builder) -> Result<()> {
    let tol = &cfg.tolerances;
    let mut curve = Table::new(&[
        "window", "limit_re", "limit_im", "limit_modulus", "mean_re", "mean_im", "se_re", "se_im", "mean_modulus",
    ]);
    for (w, &window) in cfg.windows.iter().enumerate() {
        let phase = PhaseSpec::linear(cfg.frequency, window)?;
        let model = cfg.bias_model(window)?;
        let limit = plv_limit_numeric(&phase, &model, window)?;
        let sampler = PlvSampler::new(&model, &phase, window, cfg.trials)?;
        let offset = (w as u64) << 32;
        let draws = replicates(cfg.master_seed, offset, cfg.replicates, |rng| Ok(sampler.draw(rng)))?;
        let plv: Vec<Complex64> = draws.iter().filter(|d| d.1 > 0).map(|&(s, n)| plv_from_sum(s, n)).collect::<Result<_>>()?;
        let undefined = draws.len() - plv.len();
        let re: Vec<f64> = plv.iter().map(|z| z.re).collect();
        let im: Vec<f64> = plv.iter().map(|z| z.im).collect();
        let tag = format!("T={window}");
        b.target(format!("{tag}/limit_re"), limit.re);
        b.target(format!("{tag}/limit_im"), limit.im);
        b.target(format!("{tag}/limit_modulus"), limit.norm());
        b.stat(format!("{tag}/mean_re"), mean(&re));
        b.stat(format!("{tag}/mean_im"), mean(&im));
        b.stat(format!("{tag}/undefined_replicates"), undefined as f64);
        if undefined > 0 {
            b.note(format!("{tag}: {undefined} replicates had no spikes and were excluded"));
        }
        b.verdict(Verdict::within_se(&format!("{tag}/mean_re"), "mean_se", tol.mean_se, mean(&re), std_error(&re), limit.re));
        b.verdict(Verdict::within_se(&format!("{tag}/mean_im"), "mean_se", tol.mean_se, mean(&im), std_error(&im), limit.im));
        let (mr, mi) = (mean(&re), mean(&im));
        curve.push(vec![
            window,
            limit.re,
            limit.im,
            limit.norm(),
            mr,
            mi,
            std_error(&re),
            std_error(&im),
            (mr * mr + mi * mi).sqrt(),
        ]);
    }
    b.table("bias_curve", curve);
    Ok(())
}

/// Sinusoidally modulated rate against phase harmonic `k`, for the
/// configured `m` and, if different, for `m = k`.
pub(crate) fn run_sinusoid(cfg: &ExperimentConfig, b: &mut Builder) -> Result<()> {
    let phase = cfg.sinusoid_phase()?;
    let mut cases = vec![cfg.m];
    if cfg.m != cfg.k {
        cases.push(cfg.k);
    }
    for (c, &m) in cases.iter().enumerate() {
        let model = cfg.sinusoid_model(m)?;
        let law = plv_asymptotics_sinusoid(cfg.varkappa, m, cfg.k, cfg.phi0, cfg.lambda0, cfg.window)?;
        let numeric = plv_limit_numeric(&phase, &model, cfg.window)?;
        let sampler = PlvSampler::new(&model, &phase, cfg.window, cfg.trials)?;
        let draws = replicates(cfg.master_seed, (c as u64) << 32, cfg.replicates, |rng| Ok(sampler.draw(rng)))?;
        let prefix = format!("m={m}/");
        b.stat(format!("{prefix}numeric_limit_re"), numeric.re);
        b.stat(format!("{prefix}numeric_limit_im"), numeric.im);
        law_checks(
            b,
            cfg,
            &prefix,
            &draws,
            &law,
            LawChecks {
                variance_tolerance: false,
                ks: false,
                null_test: false,
            },
        )?;
        let delta = plv_covariance_delta(&phase, &model, cfg.window, cfg.phi0)?;
        b.stat(format!("{prefix}cov_delta_re_re"), delta[0][0]);
        b.stat(format!("{prefix}cov_delta_im_im"), delta[1][1]);
    }
    Ok(())
}
