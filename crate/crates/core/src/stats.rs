//! Small descriptive statistics used by tests and the harness.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    covariance(xs, xs)
}

/// Unbiased sample covariance of paired samples.
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "covariance of unequal-length samples");
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let (mx, my) = (mean(xs), mean(ys));
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / (n - 1) as f64
}

/// Standard error of the sample mean.
pub fn std_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Summary of a two-dimensional sample: mean vector and covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Moments2 {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
    pub n: usize,
}

impl Moments2 {
    pub fn from_pairs(xs: &[f64], ys: &[f64]) -> Self {
        let c01 = covariance(xs, ys);
        Moments2 {
            mean: [mean(xs), mean(ys)],
            cov: [[variance(xs), c01], [c01, variance(ys)]],
            n: xs.len(),
        }
    }

    /// Standard errors of the two mean components.
    pub fn mean_se(&self) -> [f64; 2] {
        let n = self.n as f64;
        [(self.cov[0][0] / n).sqrt(), (self.cov[1][1] / n).sqrt()]
    }

    /// Approximate standard error of the off-diagonal sample covariance
    /// when the true covariance is zero (Gaussian fourth moments).
    pub fn cross_cov_se(&self) -> f64 {
        (self.cov[0][0] * self.cov[1][1] / self.n as f64).sqrt()
    }
}

/// One-sample Kolmogorov-Smirnov statistic `sup |F_n - F|` for a continuous
/// reference CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    Normal::new(mean, sd)
        .map(|d| d.cdf(x))
        .unwrap_or(f64::NAN)
}

/// Pearson chi-square goodness of fit; returns `(statistic, p_value)`.
pub fn chi_square_test(observed: &[u64], expected: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected.len());
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = (observed.len() - 1) as f64;
    let p = ChiSquared::new(dof).map(|d| 1.0 - d.cdf(stat)).unwrap_or(f64::NAN);
    (stat, p)
}

/// Chi-square homogeneity test of two histograms with equal totals;
/// returns `(statistic, p_value)`.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> (f64, f64) {
    assert_eq!(a.len(), b.len());
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        if x + y > 0 {
            stat += (x as f64 - y as f64).powi(2) / (x + y) as f64;
            bins += 1;
        }
    }
    let dof = bins.saturating_sub(1).max(1) as f64;
    let p = ChiSquared::new(dof).map(|d| 1.0 - d.cdf(stat)).unwrap_or(f64::NAN);
    (stat, p)
}

/// Lag-one sample autocorrelation.
pub fn lag1_autocorrelation(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 3 {
        return f64::NAN;
    }
    let m = mean(xs);
    let denom: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    let num: f64 = xs.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    num / denom
}
