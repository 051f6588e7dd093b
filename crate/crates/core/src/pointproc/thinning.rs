use super::{IntensityModel, SpikeData, Unit};
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::Exp1;

fn check_window(model: &IntensityModel, window: f64) -> Result<()> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::domain(format!("window must be > 0, got {window}")));
    }
    if let IntensityModel::VonMisesExp { phase, .. } = model {
        let w = phase.window();
        if window > w * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "simulation window {window} exceeds the phase window {w}"
            )));
        }
    }
    Ok(())
}

/// Appends one trial of the inhomogeneous Poisson process with intensity
/// `model` on `[0, window]` to `out`, by thinning a homogeneous process of
/// rate `bound`.
///
/// `bound` must dominate `model` on the window; [`IntensityModel::upper_bound`]
/// provides one.
pub fn simulate_trial_into<R: Rng + ?Sized>(
    model: &IntensityModel,
    bound: f64,
    window: f64,
    rng: &mut R,
    out: &mut Vec<f64>,
) {
    let constant = model.is_constant();
    let start = out.len();
    let mut t = 0.0;
    loop {
        let gap: f64 = rng.sample::<f64, _>(Exp1) / bound;
        let next = t + gap;
        if next > window {
            break;
        }
        // a zero gap would repeat a time; draw again
        if out.len() > start && next <= t {
            continue;
        }
        t = next;
        if constant || rng.random::<f64>() * bound < model.evaluate(t) {
            out.push(t);
        }
    }
}

/// Simulates `trials` independent trials of one unit.
pub fn simulate_poisson<R: Rng + ?Sized>(
    model: &IntensityModel,
    window: f64,
    trials: usize,
    rng: &mut R,
) -> Result<SpikeData> {
    simulate_population(std::slice::from_ref(model), window, trials, rng)
}

/// Simulates independent units (ids `0..models.len()`), unit by unit, each
/// over `trials` trials.
pub fn simulate_population<R: Rng + ?Sized>(
    models: &[IntensityModel],
    window: f64,
    trials: usize,
    rng: &mut R,
) -> Result<SpikeData> {
    if trials == 0 {
        return Err(Error::domain("trial count K must be >= 1"));
    }
    let mut bounds = Vec::with_capacity(models.len());
    for m in models {
        m.validate()?;
        check_window(m, window)?;
        bounds.push(m.upper_bound()?);
    }
    let units = models
        .iter()
        .zip(bounds)
        .enumerate()
        .map(|(id, (model, bound))| {
            let trials = (0..trials)
                .map(|_| {
                    let mut times = Vec::new();
                    simulate_trial_into(model, bound, window, rng, &mut times);
                    times
                })
                .collect();
            Unit { id: id as u64, trials }
        })
        .collect();
    Ok(SpikeData { window, units })
}
