use super::PhaseSpec;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// How a sampled signal is read between grid points.
///
/// `Linear` interpolates between neighbouring samples. `Hold` treats sample
/// `k` as the value on `[k dt, (k+1) dt)`; under that reading the sampled
/// Gram matrix and channel integrals are exact integrals of the
/// continuous-time signal, which is what the coupling-matrix normalization
/// relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
    Hold,
}

/// A complex signal that can be evaluated anywhere on `[0, window]`.
pub trait Signal {
    fn window(&self) -> f64;
    /// Value at `t`; callers guarantee `0 <= t <= window`.
    fn value_at(&self, t: f64) -> Complex64;
}

impl Signal for PhaseSpec {
    fn window(&self) -> f64 {
        PhaseSpec::window(self)
    }
    fn value_at(&self, t: f64) -> Complex64 {
        self.phasor_at(t)
    }
}

/// Closure-backed signal.
pub struct FnSignal<F> {
    pub window: f64,
    pub f: F,
}

impl<F: Fn(f64) -> Complex64> Signal for FnSignal<F> {
    fn window(&self) -> f64 {
        self.window
    }
    fn value_at(&self, t: f64) -> Complex64 {
        (self.f)(t)
    }
}

/// `p` complex channels sampled at `t_k = k dt`, `k = 0..q`, covering the
/// window `T = q dt`. Samples are stored time-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    dt: f64,
    channels: usize,
    samples: usize,
    data: Vec<Complex64>,
    whitened: bool,
}

impl SignalMatrix {
    /// `data[k * channels + c]` is channel `c` at sample `k`.
    pub fn from_time_major(dt: f64, channels: usize, data: Vec<Complex64>, whitened: bool) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain(format!("signal matrix: dt must be > 0, got {dt}")));
        }
        if channels == 0 || data.is_empty() || data.len() % channels != 0 {
            return Err(Error::domain(format!(
                "signal matrix: {} values do not form a non-empty grid of {channels} channels",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain(format!(
                "signal matrix: non-finite value at sample {}, channel {}",
                i / channels,
                i % channels
            )));
        }
        Ok(SignalMatrix {
            dt,
            channels,
            samples: data.len() / channels,
            data,
            whitened,
        })
    }

    pub fn from_channels(dt: f64, channels: &[Vec<Complex64>]) -> Result<Self> {
        let p = channels.len();
        let q = channels.first().map_or(0, Vec::len);
        if channels.iter().any(|c| c.len() != q) {
            return Err(Error::domain("signal matrix: channels have different lengths"));
        }
        let mut data = Vec::with_capacity(p * q);
        for k in 0..q {
            data.extend(channels.iter().map(|c| c[k]));
        }
        Self::from_time_major(dt, p, data, false)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn channel_count(&self) -> usize {
        self.channels
    }

    pub fn sample_count(&self) -> usize {
        self.samples
    }

    pub fn window(&self) -> f64 {
        self.samples as f64 * self.dt
    }

    pub fn is_whitened(&self) -> bool {
        self.whitened
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn sample(&self, channel: usize, k: usize) -> Complex64 {
        self.data[k * self.channels + channel]
    }

    /// All channels at sample `k`.
    pub fn samples_at(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.channels..(k + 1) * self.channels]
    }

    pub fn channel(&self, c: usize) -> Vec<Complex64> {
        (0..self.samples).map(|k| self.sample(c, k)).collect()
    }

    pub fn as_time_major(&self) -> &[Complex64] {
        &self.data
    }

    pub fn channel_signal(&self, channel: usize, interpolation: Interpolation) -> Channel<'_> {
        Channel {
            matrix: self,
            channel,
            interpolation,
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let w = self.window();
        if !(0.0..=w).contains(&t) {
            return Err(Error::domain(format!("time {t} outside [0, {w}]")));
        }
        Ok(())
    }

    // Grid position of t: index k and weight of sample k+1. Positions within
    // 1e-9 of a grid point snap onto it.
    fn position(&self, t: f64) -> (usize, f64) {
        let s = t / self.dt;
        let r = s.round();
        let s = if (s - r).abs() < 1e-9 { r } else { s };
        let k = (s.floor().max(0.0) as usize).min(self.samples - 1);
        (k, (s - k as f64).clamp(0.0, 1.0))
    }

    /// Evaluates all channels at `t` into `out` (no domain check).
    pub fn eval_all_into(&self, t: f64, interpolation: Interpolation, out: &mut [Complex64]) {
        let (k, w) = self.position(t);
        let here = self.samples_at(k);
        match interpolation {
            Interpolation::Linear if k + 1 < self.samples && w > 0.0 => {
                let next = self.samples_at(k + 1);
                for ((o, a), b) in out.iter_mut().zip(here).zip(next) {
                    *o = a * (1.0 - w) + b * w;
                }
            }
            _ => out.copy_from_slice(here),
        }
    }

    /// Channel `c` at time `t`.
    pub fn eval(&self, c: usize, t: f64, interpolation: Interpolation) -> Result<Complex64> {
        if c >= self.channels {
            return Err(Error::domain(format!("channel {c} out of range (p = {})", self.channels)));
        }
        self.check_time(t)?;
        Ok(self.eval_unchecked(c, t, interpolation))
    }

    fn eval_unchecked(&self, c: usize, t: f64, interpolation: Interpolation) -> Complex64 {
        let (k, w) = self.position(t);
        let a = self.sample(c, k);
        match interpolation {
            Interpolation::Linear if k + 1 < self.samples && w > 0.0 => {
                a * (1.0 - w) + self.sample(c, k + 1) * w
            }
            _ => a,
        }
    }

    /// Time-averaged Gram matrix `G_jl = (1/T) sum_k conj(x_j[k]) x_l[k] dt`.
    pub fn gram(&self) -> CMatrix {
        let p = self.channels;
        let mut acc = vec![Complex64::new(0.0, 0.0); p * p];
        for k in 0..self.samples {
            let x = self.samples_at(k);
            for j in 0..p {
                let xj = x[j].conj();
                let row = &mut acc[j * p..(j + 1) * p];
                for l in j..p {
                    row[l] += xj * x[l];
                }
            }
        }
        let q = self.samples as f64;
        CMatrix::from_fn(p, p, |j, l| {
            if j <= l {
                acc[j * p + l] / q
            } else {
                acc[l * p + j].conj() / q
            }
        })
    }

    /// `int_0^T x_c(t) dt` for every channel, under the given reading of the
    /// samples.
    pub fn channel_integrals(&self, interpolation: Interpolation) -> Vec<Complex64> {
        let p = self.channels;
        let q = self.samples;
        let mut out = vec![Complex64::new(0.0, 0.0); p];
        for k in 0..q {
            let weight = match interpolation {
                Interpolation::Hold => 1.0,
                // trapezoid on [0, (q-1) dt], then the last sample held
                Interpolation::Linear if q == 1 => 1.0,
                Interpolation::Linear if k == 0 => 0.5,
                Interpolation::Linear if k == q - 1 => 1.5,
                Interpolation::Linear => 1.0,
            };
            for (o, x) in out.iter_mut().zip(self.samples_at(k)) {
                *o += x * weight;
            }
        }
        out.iter().map(|z| z * self.dt).collect()
    }

    /// Linear recombination of channels: output channel `i` is
    /// `sum_c mixing[i, c] x_c`.
    pub fn mix(&self, mixing: &CMatrix) -> Result<SignalMatrix> {
        if mixing.cols() != self.channels {
            return Err(Error::domain(format!(
                "mixing matrix has {} columns for {} channels",
                mixing.cols(),
                self.channels
            )));
        }
        let p_out = mixing.rows();
        let mut data = vec![Complex64::new(0.0, 0.0); p_out * self.samples];
        for (k, out) in data.chunks_mut(p_out).enumerate() {
            mixing.mul_vec(self.samples_at(k), out);
        }
        SignalMatrix::from_time_major(self.dt, p_out, data, false)
    }

    pub(crate) fn set_whitened(&mut self, whitened: bool) {
        self.whitened = whitened;
    }
}

/// One channel of a [`SignalMatrix`] viewed as a [`Signal`].
#[derive(Clone, Copy)]
pub struct Channel<'a> {
    matrix: &'a SignalMatrix,
    channel: usize,
    interpolation: Interpolation,
}

impl Signal for Channel<'_> {
    fn window(&self) -> f64 {
        self.matrix.window()
    }
    fn value_at(&self, t: f64) -> Complex64 {
        self.matrix.eval_unchecked(self.channel, t, self.interpolation)
    }
}

/// Evaluates a signal at a batch of event times, rejecting any time outside
/// its window.
pub fn eval_at_spike_times<S: Signal + ?Sized>(signal: &S, times: &[f64]) -> Result<Vec<Complex64>> {
    let w = signal.window();
    times
        .iter()
        .map(|&t| {
            if (0.0..=w).contains(&t) {
                Ok(signal.value_at(t))
            } else {
                Err(Error::domain(format!("time {t} outside [0, {w}]")))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn exponential(f: f64, dt: f64, q: usize) -> Vec<Complex64> {
        (0..q)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * f * k as f64 * dt))
            .collect()
    }

    #[test]
    fn grid_lookup_returns_stored_sample() {
        let dt = 0.1;
        let m = SignalMatrix::from_channels(dt, &[exponential(1.0, dt, 10)]).unwrap();
        for k in 0..10 {
            let t = k as f64 * dt;
            for interp in [Interpolation::Linear, Interpolation::Hold] {
                assert_eq!(m.eval(0, t, interp).unwrap(), m.sample(0, k));
            }
        }
    }

    #[test]
    fn linear_interpolation_error_small() {
        let dt = 1e-3;
        let q = 1000;
        let m = SignalMatrix::from_channels(dt, &[exponential(1.0, dt, q)]).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..5000 {
            let t = (q - 1) as f64 * dt * i as f64 / 4999.0;
            let exact = Complex64::from_polar(1.0, 2.0 * PI * t);
            worst = worst.max((m.eval(0, t, Interpolation::Linear).unwrap() - exact).norm());
        }
        assert!(worst < 1e-4, "worst {worst}");
    }

    #[test]
    fn out_of_window_rejected() {
        let m = SignalMatrix::from_channels(0.5, &[vec![Complex64::new(1.0, 0.0); 4]]).unwrap();
        assert_eq!(m.window(), 2.0);
        assert!(m.eval(0, 2.0, Interpolation::Hold).is_ok());
        assert!(m.eval(0, 2.01, Interpolation::Hold).is_err());
        assert!(eval_at_spike_times(&m.channel_signal(0, Interpolation::Linear), &[0.1, -0.1]).is_err());
    }

    #[test]
    fn gram_of_orthogonal_exponentials_is_identity() {
        let dt = 0.01;
        let q = 100;
        let m = SignalMatrix::from_channels(dt, &[exponential(1.0, dt, q), exponential(2.0, dt, q)]).unwrap();
        assert!(m.gram().max_abs_diff(&CMatrix::identity(2)) < 1e-12);
        let ints = m.channel_integrals(Interpolation::Hold);
        assert!(ints.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn rejects_non_finite() {
        let bad = vec![Complex64::new(f64::NAN, 0.0)];
        assert!(SignalMatrix::from_channels(0.1, &[bad]).is_err());
        assert!(SignalMatrix::from_time_major(0.0, 1, vec![Complex64::new(1.0, 0.0)], false).is_err());
    }
}
