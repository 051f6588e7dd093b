use crate::error::{Error, Result};
use rand::Rng;
use std::f64::consts::PI;

/// Draws one angle in `[-pi, pi)` from the von Mises distribution with mean
/// direction `mu` and concentration `kappa`, using the Best-Fisher wrapped
/// Cauchy rejection sampler. `kappa = 0` gives the uniform distribution.
pub fn von_mises_sample<R: Rng + ?Sized>(mu: f64, kappa: f64, rng: &mut R) -> Result<f64> {
    if kappa.is_nan() || kappa < 0.0 || !kappa.is_finite() {
        return Err(Error::domain(format!("von_mises_sample: kappa must be finite and >= 0, got {kappa}")));
    }
    if !mu.is_finite() {
        return Err(Error::domain(format!("von_mises_sample: mu must be finite, got {mu}")));
    }
    if kappa == 0.0 {
        return Ok(-PI + 2.0 * PI * rng.random::<f64>());
    }
    let r = envelope_parameter(kappa);
    loop {
        let z = (PI * rng.random::<f64>()).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        let u2: f64 = rng.random();
        if c * (2.0 - c) > u2 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let theta = f.clamp(-1.0, 1.0).acos();
            let signed = if rng.random::<f64>() < 0.5 { -theta } else { theta };
            return Ok(wrap(mu + signed));
        }
    }
}

// r = (1 + rho^2) / (2 rho) with rho = (tau - sqrt(2 tau)) / (2 kappa),
// tau = 1 + sqrt(1 + 4 kappa^2); rho rewritten to avoid cancellation for
// small kappa.
fn envelope_parameter(kappa: f64) -> f64 {
    let s = (1.0 + 4.0 * kappa * kappa).sqrt();
    let tau = 1.0 + s;
    let rho = 2.0 * kappa * tau / ((s + 1.0) * (tau + (2.0 * tau).sqrt()));
    (1.0 + rho * rho) / (2.0 * rho)
}

/// Wraps an angle into `[-pi, pi)`.
pub(crate) fn wrap(theta: f64) -> f64 {
    let w = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use crate::specfun::bessel_ratio;
    use crate::stats;

    fn draws(mu: f64, kappa: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        (0..n).map(|_| von_mises_sample(mu, kappa, &mut rng).unwrap()).collect()
    }

    #[test]
    fn envelope_matches_textbook_form() {
        for kappa in [0.1, 1.0, 10.0] {
            let tau = 1.0 + (1.0 + 4.0 * kappa * kappa as f64).sqrt();
            let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
            let r = (1.0 + rho * rho) / (2.0 * rho);
            assert!((envelope_parameter(kappa) - r).abs() < 1e-12 * r);
        }
        assert!(envelope_parameter(1e-9).is_finite());
    }

    #[test]
    fn uniform_when_kappa_zero() {
        let xs = draws(0.3, 0.0, 100_000, 1);
        assert!(xs.iter().all(|&x| (-PI..PI).contains(&x)));
        let d = stats::ks_statistic(&xs, |x| (x + PI) / (2.0 * PI));
        assert!(d < 0.01, "KS = {d}");
    }

    #[test]
    fn concentrated_mean_direction() {
        let mu = 1.0;
        let xs = draws(mu, 10.0, 100_000, 2);
        let (s, c) = xs.iter().fold((0.0, 0.0), |(s, c), x| (s + x.sin(), c + x.cos()));
        let mean_dir = s.atan2(c);
        assert!((mean_dir - mu).abs() < 0.02, "mean direction {mean_dir}");
    }

    #[test]
    fn resultant_length_matches_bessel_ratio() {
        let n = 100_000;
        let xs = draws(0.0, 2.0, n, 3);
        let cosines: Vec<f64> = xs.iter().map(|x| x.cos()).collect();
        let target = bessel_ratio(1, 0, 2.0).unwrap();
        let se = stats::std_error(&cosines);
        assert!((stats::mean(&cosines) - target).abs() < 3.0 * se);
    }

    #[test]
    fn mirror_symmetry() {
        let bins = 36;
        let hist = |mu: f64, seed: u64| {
            let mut h = vec![0u64; bins];
            for x in draws(mu, 1.5, 100_000, seed) {
                let b = (((x + PI) / (2.0 * PI)) * bins as f64) as usize;
                h[b.min(bins - 1)] += 1;
            }
            h
        };
        let plus = hist(0.7, 4);
        let minus = hist(-0.7, 5);
        // bin b for +mu mirrors bin bins-1-b for -mu
        let mirrored: Vec<u64> = minus.iter().rev().copied().collect();
        let (_, p) = stats::chi_square_two_sample(&plus, &mirrored);
        assert!(p > 0.001, "p = {p}");
    }

    #[test]
    fn negative_kappa_rejected() {
        let mut rng = rng_from_seed(0);
        assert!(matches!(von_mises_sample(0.0, -1.0, &mut rng), Err(Error::Domain(_))));
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap(PI), -PI);
        assert!((wrap(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap(-7.0) - (-7.0 + 2.0 * PI)).abs() < 1e-15);
    }
}
