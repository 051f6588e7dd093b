use super::SignalMatrix;
use crate::error::{Error, Result};
use crate::specfun::von_mises_sample;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

pub const MIN_SAMPLES_PER_PERIOD: f64 = 8.0;

/// Frequency carried by each channel: channel `c` gets component
/// `c mod components.len()`.
pub fn oscillation_channels(components: &[f64], channels: usize) -> Vec<f64> {
    (0..channels).map(|c| components[c % components.len()]).collect()
}

/// Checks the synthesis preconditions and returns the sample count
/// `q = T / dt`.
pub fn check_synthesis(components: &[f64], window: f64, dt: f64, kappa_noise: f64, channels: usize) -> Result<usize> {
    if components.is_empty() {
        return Err(Error::config("at least one oscillatory component is required"));
    }
    if channels == 0 {
        return Err(Error::config("channel count must be >= 1"));
    }
    if !(dt.is_finite() && dt > 0.0) || !(window.is_finite() && window > 0.0) {
        return Err(Error::config(format!("window ({window}) and dt ({dt}) must be positive")));
    }
    if !(kappa_noise.is_finite() && kappa_noise >= 0.0) {
        return Err(Error::config(format!("phase-noise concentration must be >= 0, got {kappa_noise}")));
    }
    let q = (window / dt).round();
    if q < 1.0 || (q * dt - window).abs() > 1e-9 * window {
        return Err(Error::config(format!(
            "window {window} is not a whole number of samples of dt = {dt}"
        )));
    }
    for &f in components {
        if !(f.is_finite() && f > 0.0) {
            return Err(Error::config(format!("component frequency must be > 0, got {f}")));
        }
        if 1.0 / (f * dt) < MIN_SAMPLES_PER_PERIOD {
            return Err(Error::config(format!(
                "component {f} Hz is undersampled at dt = {dt}: {:.2} samples per period, need >= {MIN_SAMPLES_PER_PERIOD}",
                1.0 / (f * dt)
            )));
        }
    }
    Ok(q as usize)
}

/// Samples `channels` noisy analytic oscillations `e^{2 pi i f t} e^{i eta[t]}`
/// on `t = k dt`, `k = 0..T/dt`, with `eta` drawn i.i.d. per channel and
/// sample from a zero-mean von Mises law of concentration `kappa_noise`.
/// `kappa_noise = 0` switches the noise off.
pub fn synthesize_oscillations<R: Rng + ?Sized>(
    components: &[f64],
    window: f64,
    dt: f64,
    kappa_noise: f64,
    channels: usize,
    rng: &mut R,
) -> Result<SignalMatrix> {
    let q = check_synthesis(components, window, dt, kappa_noise, channels)?;
    let freqs = oscillation_channels(components, channels);
    let mut data = Vec::with_capacity(q * channels);
    for k in 0..q {
        let t = k as f64 * dt;
        for &f in &freqs {
            let eta = if kappa_noise > 0.0 {
                von_mises_sample(0.0, kappa_noise, rng)?
            } else {
                0.0
            };
            let (s, c) = (2.0 * PI * f * t + eta).sin_cos();
            data.push(Complex64::new(c, s));
        }
    }
    SignalMatrix::from_time_major(dt, channels, data, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use crate::specfun::bessel_ratio;
    use crate::stats;

    #[test]
    fn noiseless_single_channel_is_exact() {
        let mut rng = rng_from_seed(1);
        let m = synthesize_oscillations(&[1.0], 2.0, 0.01, 0.0, 1, &mut rng).unwrap();
        assert_eq!(m.sample_count(), 200);
        for k in 0..200 {
            let want = Complex64::from_polar(1.0, 2.0 * PI * k as f64 * 0.01);
            assert!((m.sample(0, k) - want).norm() < 1e-12);
            assert!((m.sample(0, k).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn noisy_channels_keep_unit_modulus() {
        let mut rng = rng_from_seed(2);
        let m = synthesize_oscillations(&[11.0, 12.0, 13.0], 1.0, 1e-3, 10.0, 7, &mut rng).unwrap();
        assert!(m
            .as_time_major()
            .iter()
            .all(|z| (z.norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn phase_deviation_resultant_matches_bessel_ratio() {
        let mut rng = rng_from_seed(3);
        let dt = 1e-3;
        let m = synthesize_oscillations(&[5.0], 100.0, dt, 10.0, 1, &mut rng).unwrap();
        let cosines: Vec<f64> = (0..m.sample_count())
            .map(|k| {
                let clean = Complex64::from_polar(1.0, 2.0 * PI * 5.0 * k as f64 * dt);
                (m.sample(0, k) * clean.conj()).re
            })
            .collect();
        let target = bessel_ratio(1, 0, 10.0).unwrap();
        let err = (stats::mean(&cosines) - target).abs();
        assert!(err < 3.0 * stats::std_error(&cosines), "err {err}");
    }

    #[test]
    fn configuration_errors() {
        let mut rng = rng_from_seed(4);
        // 15 Hz at dt = 0.01 is 6.7 samples per period
        assert!(matches!(
            synthesize_oscillations(&[15.0], 1.0, 0.01, 0.0, 1, &mut rng),
            Err(Error::Config(_))
        ));
        assert!(synthesize_oscillations(&[], 1.0, 0.01, 0.0, 1, &mut rng).is_err());
        assert!(synthesize_oscillations(&[1.0], 1.0, 0.01, 0.0, 0, &mut rng).is_err());
        assert!(synthesize_oscillations(&[1.0], 1.0, 0.3, 0.0, 1, &mut rng).is_err());
    }

    #[test]
    fn round_robin_assignment() {
        assert_eq!(oscillation_channels(&[1.0, 2.0], 5), vec![1.0, 2.0, 1.0, 2.0, 1.0]);
    }
}
