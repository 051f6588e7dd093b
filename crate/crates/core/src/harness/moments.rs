use super::config::ExperimentConfig;
use super::report::{Builder, Table, Verdict};
use super::replicates;
use crate::error::Result;
use crate::pointproc::{fourth_moment_oracle, simulate_trial_into, CompensatedTrial, IntensityModel};
use crate::stats::{mean, std_error};
use std::f64::consts::PI;

type Integrand = Box<dyn Fn(f64) -> f64 + Sync>;

struct MomentSet {
    name: &'static str,
    integrands: [Integrand; 4],
    model: IntensityModel,
}

fn sets(cfg: &ExperimentConfig) -> Result<Vec<MomentSet>> {
    let t = cfg.window;
    let w = 2.0 * PI / t;
    let one = || -> Integrand { Box::new(|_| 1.0) };
    let cos = move || -> Integrand { Box::new(move |s: f64| (w * s).cos()) };
    let sin = move || -> Integrand { Box::new(move |s: f64| (w * s).sin()) };
    let flat = IntensityModel::homogeneous(cfg.lambda0)?;
    Ok(vec![
        MomentSet {
            name: "constant",
            integrands: [one(), one(), one(), one()],
            model: flat.clone(),
        },
        MomentSet {
            name: "cos_cos_sin_sin",
            integrands: [cos(), cos(), sin(), sin()],
            model: flat,
        },
        MomentSet {
            name: "cos_modulated_rate",
            integrands: [cos(), cos(), cos(), cos()],
            model: cfg.sinusoid_model(1)?,
        },
    ])
}

/// Monte Carlo `E[W X Y Z]` of four compensated stochastic integrals against
/// the closed-form fourth moment.
pub(crate) fn run(cfg: &ExperimentConfig, b: &mut Builder) -> Result<()> {
    let tol = &cfg.tolerances;
    let window = cfg.window;
    let q = (window / cfg.dt).round() as usize;
    let grid: Vec<f64> = (0..=q).map(|i| window * i as f64 / q as f64).collect();
    let mut table = Table::new(&["set", "oracle", "monte_carlo_mean", "standard_error", "z"]);
    for (s, set) in sets(cfg)?.into_iter().enumerate() {
        let sample = |f: &Integrand| grid.iter().map(|&t| f(t)).collect::<Vec<f64>>();
        let [a, bb, c, d] = &set.integrands;
        let rate: Vec<f64> = grid.iter().map(|&t| set.model.evaluate(t)).collect();
        let oracle = fourth_moment_oracle(&sample(a), &sample(bb), &sample(c), &sample(d), &rate, cfg.dt)?;

        // compensators are deterministic: integrate them once
        let empty = CompensatedTrial::new(&[], window, &set.model)?;
        let comp: Vec<f64> = set.integrands.iter().map(|f| empty.compensator_integral(f)).collect();
        let bound = set.model.upper_bound()?;
        let products = replicates(cfg.master_seed, (s as u64) << 32, cfg.replicates, |rng| {
            let mut times = Vec::new();
            simulate_trial_into(&set.model, bound, window, rng, &mut times);
            Ok(set
                .integrands
                .iter()
                .zip(&comp)
                .map(|(f, c)| times.iter().map(|&t| f(t)).sum::<f64>() - c)
                .product::<f64>())
        })?;
        let (m, se) = (mean(&products), std_error(&products));
        b.target(format!("{}/oracle", set.name), oracle);
        b.stat(format!("{}/monte_carlo_mean", set.name), m);
        b.stat(format!("{}/standard_error", set.name), se);
        b.verdict(Verdict::within_se(set.name, "mean_se", tol.mean_se, m, se, oracle));
        table.push(vec![s as f64, oracle, m, se, (m - oracle) / se]);
    }
    b.table("moments", table);
    Ok(())
}
