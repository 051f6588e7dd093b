use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Phase function `phi(t)` of the reference oscillation on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseSpec {
    /// `phi(t) = 2 pi f t`.
    Linear { frequency: f64, window: f64 },
    /// Piecewise-linear interpolation of `(times, phases)`; `times[0] = 0`
    /// and the last time is the window length.
    Tabulated { times: Vec<f64>, phases: Vec<f64> },
}

impl PhaseSpec {
    pub fn linear(frequency: f64, window: f64) -> Result<Self> {
        let p = PhaseSpec::Linear { frequency, window };
        p.validate()?;
        Ok(p)
    }

    pub fn tabulated(times: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        let p = PhaseSpec::Tabulated { times, phases };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PhaseSpec::Linear { frequency, window } => {
                if !(frequency.is_finite() && *frequency > 0.0) {
                    return Err(Error::domain(format!("linear phase: frequency must be > 0, got {frequency}")));
                }
                if !(window.is_finite() && *window > 0.0) {
                    return Err(Error::domain(format!("linear phase: window must be > 0, got {window}")));
                }
            }
            PhaseSpec::Tabulated { times, phases } => {
                if times.len() < 2 || times.len() != phases.len() {
                    return Err(Error::domain(format!(
                        "tabulated phase: need >= 2 matching samples, got {} times and {} phases",
                        times.len(),
                        phases.len()
                    )));
                }
                if times[0] != 0.0 {
                    return Err(Error::domain("tabulated phase: first grid time must be 0"));
                }
                for (i, w) in times.windows(2).enumerate() {
                    if !(w[1] > w[0]) || !w[1].is_finite() {
                        return Err(Error::domain(format!(
                            "tabulated phase: times not strictly increasing at index {}",
                            i + 1
                        )));
                    }
                }
                for (i, w) in phases.windows(2).enumerate() {
                    if !(w[1] >= w[0]) || !w[1].is_finite() || !w[0].is_finite() {
                        return Err(Error::domain(format!(
                            "tabulated phase: phase decreases or is not finite at index {}",
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn window(&self) -> f64 {
        match self {
            PhaseSpec::Linear { window, .. } => *window,
            PhaseSpec::Tabulated { times, .. } => *times.last().unwrap(),
        }
    }

    /// Number of oscillation periods in the window, `(phi(T) - phi(0)) / 2 pi`.
    pub fn periods(&self) -> f64 {
        match self {
            PhaseSpec::Linear { frequency, window } => frequency * window,
            PhaseSpec::Tabulated { phases, .. } => {
                (phases.last().unwrap() - phases[0]) / (2.0 * PI)
            }
        }
    }

    /// Phase at `t`, rejecting times outside `[0, T]`.
    pub fn phase(&self, t: f64) -> Result<f64> {
        let w = self.window();
        if !(0.0..=w).contains(&t) {
            return Err(Error::domain(format!("time {t} outside [0, {w}]")));
        }
        Ok(self.phase_at(t))
    }

    /// Phase at `t` without the domain check; tabulated phases are held
    /// constant outside the grid.
    pub fn phase_at(&self, t: f64) -> f64 {
        match self {
            PhaseSpec::Linear { frequency, .. } => 2.0 * PI * frequency * t,
            PhaseSpec::Tabulated { times, phases } => {
                let (k, w) = locate(times, t);
                phases[k] + w * (phases[k + 1] - phases[k])
            }
        }
    }

    /// `phi'(t)`; right derivative at tabulated grid points.
    pub fn derivative_at(&self, t: f64) -> f64 {
        match self {
            PhaseSpec::Linear { frequency, .. } => 2.0 * PI * frequency,
            PhaseSpec::Tabulated { times, phases } => {
                let (k, _) = locate(times, t);
                (phases[k + 1] - phases[k]) / (times[k + 1] - times[k])
            }
        }
    }

    pub fn max_derivative(&self) -> f64 {
        match self {
            PhaseSpec::Linear { frequency, .. } => 2.0 * PI * frequency,
            PhaseSpec::Tabulated { times, phases } => times
                .windows(2)
                .zip(phases.windows(2))
                .map(|(t, p)| (p[1] - p[0]) / (t[1] - t[0]))
                .fold(0.0, f64::max),
        }
    }

    /// `e^{i phi(t)}`.
    pub fn phasor_at(&self, t: f64) -> Complex64 {
        let (s, c) = self.phase_at(t).sin_cos();
        Complex64::new(c, s)
    }

    /// Breakpoints splitting `[0, T]` into pieces on which the phase is smooth
    /// and turns by at most a quarter period.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            PhaseSpec::Linear { frequency, window } => {
                let pieces = (4.0 * frequency * window).ceil().clamp(1.0, 1e6) as usize;
                crate::quad::uniform_breaks(0.0, *window, pieces)
            }
            PhaseSpec::Tabulated { times, .. } => times.clone(),
        }
    }
}

// Interval index k with times[k] <= t <= times[k+1] and the fractional
// position within it, clamped to the grid.
fn locate(times: &[f64], t: f64) -> (usize, f64) {
    let n = times.len();
    if t <= times[0] {
        return (0, 0.0);
    }
    if t >= times[n - 1] {
        return (n - 2, 1.0);
    }
    let k = times.partition_point(|&x| x <= t) - 1;
    let k = k.min(n - 2);
    (k, (t - times[k]) / (times[k + 1] - times[k]))
}
