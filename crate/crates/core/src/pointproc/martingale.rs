use super::model::merge_breaks;
use super::IntensityModel;
use crate::error::{Error, Result};
use crate::quad;

#[derive(Debug, Clone, Copy)]
enum Rate<'a> {
    Constant(f64),
    Model(&'a IntensityModel),
}

/// One trial of a counting process paired with its compensator, so that
/// `int x dM = sum_j x(t_j) - int x lambda dt` can be formed explicitly.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedTrial<'a> {
    jumps: &'a [f64],
    window: f64,
    rate: Rate<'a>,
}

// Number of sample points used to check that a model rate is nonnegative.
const RATE_CHECK_POINTS: usize = 4096;
// Minimum number of quadrature pieces for integrands of unknown shape.
const MIN_PIECES: usize = 64;

impl<'a> CompensatedTrial<'a> {
    /// Pairs event times with the intensity `model`.
    pub fn new(jumps: &'a [f64], window: f64, model: &'a IntensityModel) -> Result<Self> {
        check_jumps(jumps, window)?;
        for i in 0..=RATE_CHECK_POINTS {
            let t = window * i as f64 / RATE_CHECK_POINTS as f64;
            let r = model.evaluate(t);
            if !(r >= 0.0) {
                return Err(Error::domain(format!("rate {r} at t = {t} is negative")));
            }
        }
        Ok(CompensatedTrial {
            jumps,
            window,
            rate: Rate::Model(model),
        })
    }

    /// Pairs event times with a constant (for example, estimated) rate.
    pub fn constant(jumps: &'a [f64], window: f64, rate: f64) -> Result<Self> {
        check_jumps(jumps, window)?;
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::domain(format!("rate {rate} is negative or not finite")));
        }
        Ok(CompensatedTrial {
            jumps,
            window,
            rate: Rate::Constant(rate),
        })
    }

    pub fn jumps(&self) -> &[f64] {
        self.jumps
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn rate(&self, t: f64) -> f64 {
        match self.rate {
            Rate::Constant(r) => r,
            Rate::Model(m) => m.evaluate(t),
        }
    }

    fn breaks(&self, t: f64) -> Vec<f64> {
        let uniform = quad::uniform_breaks(0.0, t, MIN_PIECES);
        match self.rate {
            Rate::Constant(_) => uniform,
            Rate::Model(m) => merge_breaks(&m.breakpoints(self.window), &uniform, t),
        }
    }

    /// Compensator `int_0^t lambda(s) ds`.
    pub fn compensator(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.window);
        match self.rate {
            Rate::Constant(r) => r * t,
            Rate::Model(m) => quad::integrate_pieces(|s| m.evaluate(s), &self.breaks(t), 0.0, 1e-12),
        }
    }

    /// `int x dN = sum_j x(t_j)`.
    pub fn jump_sum<F: FnMut(f64) -> f64>(&self, mut x: F) -> f64 {
        self.jumps.iter().map(|&t| x(t)).sum()
    }

    /// `int_0^T x(t) lambda(t) dt`.
    pub fn compensator_integral<F: FnMut(f64) -> f64>(&self, mut x: F) -> f64 {
        let breaks = self.breaks(self.window);
        quad::integrate_pieces(|t| x(t) * self.rate(t), &breaks, 1e-14, 1e-12)
    }

    /// `int_0^T x dM = sum_j x(t_j) - int_0^T x lambda dt`.
    pub fn stochastic_integral<F: FnMut(f64) -> f64>(&self, mut x: F) -> f64 {
        let jumps = self.jump_sum(&mut x);
        jumps - self.compensator_integral(x)
    }
}

fn check_jumps(jumps: &[f64], window: f64) -> Result<()> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::domain(format!("window must be > 0, got {window}")));
    }
    if let Some(&t) = jumps.iter().find(|t| !(0.0..=window).contains(*t)) {
        return Err(Error::domain(format!("event time {t} outside [0, {window}]")));
    }
    if jumps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("event times are not strictly increasing"));
    }
    Ok(())
}

/// Closed-form `E[W X Y Z]` for `W = int A dM`, `X = int B dM`,
/// `Y = int C dM`, `Z = int D dM` of a Poisson martingale:
///
/// `int ABCD lambda + int AB lambda int CD lambda + int AC lambda int BD lambda
///  + int AD lambda int BC lambda`,
///
/// with every integral taken by the trapezoid rule on a common grid of
/// spacing `dt`.
pub fn fourth_moment_oracle(a: &[f64], b: &[f64], c: &[f64], d: &[f64], rate: &[f64], dt: f64) -> Result<f64> {
    let n = rate.len();
    if [a.len(), b.len(), c.len(), d.len()].iter().any(|&l| l != n) {
        return Err(Error::domain(format!(
            "integrand grids differ in length: {}, {}, {}, {}, rate {n}",
            a.len(),
            b.len(),
            c.len(),
            d.len()
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::domain(format!("grid step must be > 0, got {dt}")));
    }
    if let Some(r) = rate.iter().find(|r| !(**r >= 0.0)) {
        return Err(Error::domain(format!("rate sample {r} is negative")));
    }
    let pair = |x: &[f64], y: &[f64]| {
        let s: Vec<f64> = (0..n).map(|i| x[i] * y[i] * rate[i]).collect();
        quad::trapezoid(&s, dt)
    };
    let all: Vec<f64> = (0..n).map(|i| a[i] * b[i] * c[i] * d[i] * rate[i]).collect();
    Ok(quad::trapezoid(&all, dt) + pair(a, b) * pair(c, d) + pair(a, c) * pair(b, d) + pair(a, d) * pair(b, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointproc::simulate_poisson;
    use crate::seed::rng_from_seed;
    use crate::stats::{mean, std_error, variance};

    #[test]
    fn empty_trial_is_pure_compensator() {
        let tr = CompensatedTrial::constant(&[], 5.0, 20.0).unwrap();
        assert_eq!(tr.stochastic_integral(|_| 1.0), -100.0);
        let m = IntensityModel::homogeneous(20.0).unwrap();
        let tr = CompensatedTrial::new(&[], 5.0, &m).unwrap();
        assert!((tr.stochastic_integral(|_| 1.0) + 100.0).abs() < 1e-9);
        assert!((tr.compensator(2.5) - 50.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_negative_rate_and_bad_jumps() {
        assert!(CompensatedTrial::constant(&[], 1.0, -1.0).is_err());
        assert!(CompensatedTrial::constant(&[0.5, 0.2], 1.0, 1.0).is_err());
        assert!(CompensatedTrial::constant(&[1.5], 1.0, 1.0).is_err());
    }

    #[test]
    fn martingale_mean_and_variance() {
        let m = IntensityModel::homogeneous(20.0).unwrap();
        let d = simulate_poisson(&m, 5.0, 20_000, &mut rng_from_seed(11)).unwrap();
        let w: Vec<f64> = d.units[0]
            .trials
            .iter()
            .map(|t| CompensatedTrial::new(t, 5.0, &m).unwrap().stochastic_integral(|_| 1.0))
            .collect();
        let first = &w[..2000];
        assert!(mean(first).abs() < 3.0 * std_error(first));
        assert!((variance(&w) / 100.0 - 1.0).abs() < 0.05);
    }

    #[test]
    fn oracle_special_cases() {
        let n = 1001;
        let dt = 5.0 / (n - 1) as f64;
        let ones = vec![1.0; n];
        let rate = vec![20.0; n];
        let v = fourth_moment_oracle(&ones, &ones, &ones, &ones, &rate, dt).unwrap();
        assert!((v - (100.0 + 3.0 * 100.0 * 100.0)).abs() < 1e-8);
        let zeros = vec![0.0; n];
        assert_eq!(fourth_moment_oracle(&zeros, &ones, &ones, &ones, &rate, dt).unwrap(), 0.0);
        assert!(fourth_moment_oracle(&ones[..10], &ones, &ones, &ones, &rate, dt).is_err());
    }
}
