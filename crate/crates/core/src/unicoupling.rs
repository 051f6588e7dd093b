//! Univariate spike-field coupling: the coupling estimator, the multi-trial
//! PLV, their asymptotic laws and a null test.

use crate::error::{Error, Result};
use crate::pointproc::{IntensityModel, SpikeData};
use crate::quad;
use crate::signals::{PhaseSpec, Signal};
use crate::specfun::bessel_i;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Gaussian limit of a scaled estimator residual.
///
/// `cov` is the covariance of `(Re, Im)` of `sqrt(K) (estimate - limit)`
/// after rotation by `e^{-i rotation}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticLaw {
    pub limit: Complex64,
    pub cov: [[f64; 2]; 2],
    /// Expected events per trial, `Lambda(T)`.
    pub lambda_t: f64,
    pub rotation: f64,
}

impl AsymptoticLaw {
    /// `z e^{-i rotation}`.
    pub fn rotate(&self, z: Complex64) -> Complex64 {
        z * Complex64::from_polar(1.0, -self.rotation)
    }

    /// Rotated scaled residual `sqrt(K) (estimate - limit) e^{-i rotation}`.
    pub fn scaled_residual(&self, estimate: Complex64, trials: usize) -> Complex64 {
        self.rotate(estimate - self.limit) * (trials as f64).sqrt()
    }
}

fn trial_sum<S: Signal + ?Sized>(x: &S, times: &[f64]) -> Complex64 {
    times
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &t| acc + x.value_at(t))
}

fn check_times(data: &SpikeData, window: f64) -> Result<()> {
    if data.window > window * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "spike window {} exceeds the signal window {window}",
            data.window
        )));
    }
    Ok(())
}

/// `c_K = (1/K) sum_k sum_j x(t_j^k)` for a single unit; no compensator is
/// subtracted.
pub fn estimate_coupling<S: Signal + ?Sized>(x: &S, spikes: &SpikeData) -> Result<Complex64> {
    let unit = spikes.single_unit()?;
    let k = unit.trials.len();
    if k == 0 {
        return Err(Error::domain("coupling estimate needs at least one trial"));
    }
    spikes.validate()?;
    check_times(spikes, x.window())?;
    let total = unit
        .trials
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, times| acc + trial_sum(x, times));
    Ok(total / k as f64)
}

/// `sum_j e^{i phi(t_j)}` and the event count over a set of trials.
pub fn phase_sum(phase: &PhaseSpec, trials: &[Vec<f64>]) -> (Complex64, usize) {
    trials.iter().fold((Complex64::new(0.0, 0.0), 0), |(s, n), times| {
        (s + trial_sum(phase, times), n + times.len())
    })
}

/// Multi-trial PLV `sum_k sum_j e^{i phi(t_j^k)} / sum_k N_k`.
pub fn estimate_plv(phase: &PhaseSpec, spikes: &SpikeData) -> Result<Complex64> {
    let unit = spikes.single_unit()?;
    spikes.validate()?;
    check_times(spikes, phase.window())?;
    let (sum, n) = phase_sum(phase, &unit.trials);
    plv_from_sum(sum, n)
}

/// `sum / n`, with the modulus capped at 1 against rounding.
pub fn plv_from_sum(sum: Complex64, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::UndefinedPlv);
    }
    let plv = sum / n as f64;
    let r = plv.norm();
    Ok(if r > 1.0 { plv / r } else { plv })
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::domain(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

/// Limit law of the PLV for `lambda(t) = lambda0 exp(kappa cos(phi(t) - phi0))`
/// with linear phase over an integer number of periods.
pub fn plv_asymptotics_vonmises(kappa: f64, phi0: f64, lambda0: f64, window: f64) -> Result<AsymptoticLaw> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::domain(format!("kappa must be >= 0, got {kappa}")));
    }
    check_positive("lambda0", lambda0)?;
    check_positive("T", window)?;
    let i0 = bessel_i(0, kappa)?;
    let i1 = bessel_i(1, kappa)?;
    let i2 = bessel_i(2, kappa)?;
    let denom = 2.0 * lambda0 * window * i0 * i0;
    Ok(AsymptoticLaw {
        limit: Complex64::from_polar(i1 / i0, phi0),
        cov: [[(i0 + i2) / denom, 0.0], [0.0, (i0 - i2) / denom]],
        lambda_t: lambda0 * window * i0,
        rotation: phi0,
    })
}

/// Limit law of the PLV against phase `2 pi k t / T` when the rate is
/// `lambda0 (1 + varkappa cos(2 pi m t / T - phi0))`.
pub fn plv_asymptotics_sinusoid(
    varkappa: f64,
    m: u32,
    k: u32,
    phi0: f64,
    lambda0: f64,
    window: f64,
) -> Result<AsymptoticLaw> {
    if !(0.0..=1.0).contains(&varkappa) {
        return Err(Error::domain(format!(
            "modulation depth varkappa must satisfy 0 <= varkappa <= 1, got {varkappa}"
        )));
    }
    if m == 0 || k == 0 {
        return Err(Error::domain("harmonics m and k must be positive integers"));
    }
    check_positive("lambda0", lambda0)?;
    check_positive("T", window)?;
    let limit = if m == k {
        Complex64::from_polar(varkappa / 2.0, phi0)
    } else {
        Complex64::new(0.0, 0.0)
    };
    let v = 1.0 / (2.0 * lambda0 * window);
    Ok(AsymptoticLaw {
        limit,
        cov: [[v, 0.0], [0.0, v]],
        lambda_t: lambda0 * window,
        rotation: phi0,
    })
}

fn quadrature_breaks(phase: &PhaseSpec, model: &IntensityModel, window: f64) -> Vec<f64> {
    let mut b: Vec<f64> = phase
        .breakpoints()
        .into_iter()
        .chain(model.breakpoints(window))
        .filter(|&t| (0.0..=window).contains(&t))
        .chain([0.0, window])
        .collect();
    b.sort_by(f64::total_cmp);
    b.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * window);
    b
}

const REL_TOL: f64 = 1e-12;

fn check_window(phase: &PhaseSpec, window: f64) -> Result<()> {
    check_positive("T", window)?;
    if window > phase.window() * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "window {window} exceeds the phase window {}",
            phase.window()
        )));
    }
    Ok(())
}

/// `PLV* = int_0^T e^{i phi} lambda dt / int_0^T lambda dt` by adaptive
/// quadrature.
pub fn plv_limit_numeric(phase: &PhaseSpec, model: &IntensityModel, window: f64) -> Result<Complex64> {
    check_window(phase, window)?;
    model.validate()?;
    let breaks = quadrature_breaks(phase, model, window);
    let mass = quad::integrate_pieces(|t| model.evaluate(t), &breaks, 0.0, REL_TOL);
    if !(mass > 0.0) {
        return Err(Error::DegenerateRate(format!("int_0^{window} lambda dt = {mass}")));
    }
    let num = quad::integrate_pieces_complex(
        |t| phase.phasor_at(t) * model.evaluate(t),
        &breaks,
        mass * REL_TOL,
        REL_TOL,
    );
    Ok(num / mass)
}

/// Covariance of `(Re, Im)` of `sqrt(K) (c_K - c*)` for `x = e^{i phi}`,
/// rotated by `e^{-i rotation}`: `int [[cos^2, cos sin], [cos sin, sin^2]] lambda`
/// with the rotated phase.
pub fn coupling_covariance(
    phase: &PhaseSpec,
    model: &IntensityModel,
    window: f64,
    rotation: f64,
) -> Result<[[f64; 2]; 2]> {
    check_window(phase, window)?;
    model.validate()?;
    let breaks = quadrature_breaks(phase, model, window);
    let moment = |g: &dyn Fn(f64, f64) -> f64| {
        quad::integrate_pieces(
            |t| {
                let (s, c) = (phase.phase_at(t) - rotation).sin_cos();
                g(c, s) * model.evaluate(t)
            },
            &breaks,
            1e-14,
            REL_TOL,
        )
    };
    let cc = moment(&|c, _| c * c);
    let cs = moment(&|c, s| c * s);
    let ss = moment(&|_, s| s * s);
    Ok([[cc, cs], [cs, ss]])
}

/// Delta-method covariance of `(Re, Im)` of `sqrt(K) (PLV_K - PLV*)`,
/// rotated by `e^{-i rotation}`.
///
/// Unlike the closed-form law this accounts for the random denominator
/// `sum_k N_k`: with `u(t) = e^{i (phi(t) - rotation)} - PLV* e^{-i rotation}`
/// the covariance is `int u u^T lambda dt / Lambda(T)^2`.
pub fn plv_covariance_delta(
    phase: &PhaseSpec,
    model: &IntensityModel,
    window: f64,
    rotation: f64,
) -> Result<[[f64; 2]; 2]> {
    let limit = plv_limit_numeric(phase, model, window)? * Complex64::from_polar(1.0, -rotation);
    let breaks = quadrature_breaks(phase, model, window);
    let mass = quad::integrate_pieces(|t| model.evaluate(t), &breaks, 0.0, REL_TOL);
    let moment = |g: &dyn Fn(f64, f64) -> f64| {
        quad::integrate_pieces(
            |t| {
                let (s, c) = (phase.phase_at(t) - rotation).sin_cos();
                g(c - limit.re, s - limit.im) * model.evaluate(t)
            },
            &breaks,
            1e-14,
            REL_TOL,
        ) / (mass * mass)
    };
    let cc = moment(&|a, _| a * a);
    let cs = moment(&|a, b| a * b);
    let ss = moment(&|_, b| b * b);
    Ok([[cc, cs], [cs, ss]])
}

/// Null-hypothesis p-value `exp(-N |PLV|^2)` with `N` the total spike count.
pub fn plv_null_test(plv_hat: Complex64, total_spikes: usize) -> Result<f64> {
    if total_spikes == 0 {
        return Err(Error::domain("null test needs at least one spike"));
    }
    Ok((-(total_spikes as f64) * plv_hat.norm_sqr()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointproc::{simulate_poisson, Unit};
    use crate::seed::rng_from_seed;
    use crate::signals::FnSignal;
    use crate::stats::{mean, std_error};
    use std::f64::consts::PI;

    fn one_unit(window: f64, trials: Vec<Vec<f64>>) -> SpikeData {
        SpikeData::new(window, vec![Unit { id: 0, trials }]).unwrap()
    }

    #[test]
    fn coupling_basics() {
        let ones = FnSignal { window: 1.0, f: |_| Complex64::new(1.0, 0.0) };
        let empty = one_unit(1.0, vec![vec![], vec![]]);
        assert_eq!(estimate_coupling(&ones, &empty).unwrap(), Complex64::new(0.0, 0.0));
        let d = one_unit(1.0, vec![vec![0.1, 0.2], vec![0.5]]);
        assert_eq!(estimate_coupling(&ones, &d).unwrap(), Complex64::new(1.5, 0.0));
        let none = SpikeData { window: 1.0, units: vec![Unit { id: 0, trials: vec![] }] };
        assert!(matches!(estimate_coupling(&ones, &none), Err(Error::Domain(_))));
    }

    #[test]
    fn plv_basics() {
        let phase = PhaseSpec::linear(1.0, 2.0).unwrap();
        let locked = one_unit(2.0, vec![vec![0.0, 1.0], vec![2.0]]);
        assert!((estimate_plv(&phase, &locked).unwrap() - 1.0).norm() < 1e-15);
        let opposed = one_unit(2.0, vec![vec![0.0, 0.5]]);
        assert!(estimate_plv(&phase, &opposed).unwrap().norm() < 1e-15);
        let empty = one_unit(2.0, vec![vec![], vec![]]);
        assert!(matches!(estimate_plv(&phase, &empty), Err(Error::UndefinedPlv)));
    }

    #[test]
    fn plv_invariant_to_trial_order_and_split() {
        let phase = PhaseSpec::linear(1.3, 1.0).unwrap();
        let a = one_unit(1.0, vec![vec![0.1, 0.4], vec![0.7], vec![0.2, 0.9]]);
        let b = one_unit(1.0, vec![vec![0.2, 0.9], vec![0.1, 0.4], vec![0.7]]);
        let c = one_unit(1.0, vec![vec![0.1, 0.4, 0.7], vec![0.2, 0.9]]);
        let pa = estimate_plv(&phase, &a).unwrap();
        assert!((pa - estimate_plv(&phase, &b).unwrap()).norm() < 1e-15);
        assert!((pa - estimate_plv(&phase, &c).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn coupling_mean_matches_compensator() {
        let phase = PhaseSpec::linear(1.0, 1.0).unwrap();
        let model = IntensityModel::von_mises(20.0, 1.0, 0.4, phase.clone()).unwrap();
        let mut rng = rng_from_seed(5);
        let (mut re, mut im) = (Vec::new(), Vec::new());
        for _ in 0..2000 {
            let d = simulate_poisson(&model, 1.0, 5, &mut rng).unwrap();
            let c = estimate_coupling(&phase, &d).unwrap();
            re.push(c.re);
            im.push(c.im);
        }
        let want = plv_limit_numeric(&phase, &model, 1.0).unwrap() * model.expected_count(1.0);
        assert!((mean(&re) - want.re).abs() < 3.0 * std_error(&re));
        assert!((mean(&im) - want.im).abs() < 3.0 * std_error(&im));
    }

    #[test]
    fn von_mises_law() {
        let l = plv_asymptotics_vonmises(0.0, 0.0, 20.0, 5.0).unwrap();
        assert_eq!(l.limit, Complex64::new(0.0, 0.0));
        assert!((l.cov[0][0] - 0.005).abs() < 1e-15 && (l.cov[1][1] - 0.005).abs() < 1e-15);
        let l = plv_asymptotics_vonmises(0.5, 0.0, 20.0, 5.0).unwrap();
        let (i0, i2) = (bessel_i(0, 0.5).unwrap(), bessel_i(2, 0.5).unwrap());
        assert!((l.limit.re - bessel_i(1, 0.5).unwrap() / i0).abs() < 1e-15);
        assert!((l.cov[0][0] - (i0 + i2) / (200.0 * i0 * i0)).abs() < 1e-15);
        let r = plv_asymptotics_vonmises(0.5, PI / 2.0, 20.0, 5.0).unwrap();
        assert!(r.limit.re.abs() < 1e-15 && (r.limit.im - l.limit.re).abs() < 1e-15);
        assert!(plv_asymptotics_vonmises(-1.0, 0.0, 20.0, 5.0).is_err());
    }

    #[test]
    fn sinusoid_law() {
        let l = plv_asymptotics_sinusoid(0.3, 5, 5, 0.0, 20.0, 5.0).unwrap();
        assert!((l.limit.re - 0.15).abs() < 1e-15);
        assert_eq!(plv_asymptotics_sinusoid(0.3, 3, 5, 0.0, 20.0, 5.0).unwrap().limit.norm(), 0.0);
        assert!((plv_asymptotics_sinusoid(1.0, 2, 2, 0.0, 20.0, 5.0).unwrap().limit.re - 0.5).abs() < 1e-15);
        assert!(plv_asymptotics_sinusoid(1.5, 2, 2, 0.0, 20.0, 5.0).is_err());
    }

    fn homogeneous_limit(t: f64) -> Complex64 {
        let phase = PhaseSpec::linear(1.0, t).unwrap();
        let model = IntensityModel::homogeneous(30.0).unwrap();
        plv_limit_numeric(&phase, &model, t).unwrap()
    }

    #[test]
    fn numeric_limit_against_closed_forms() {
        for t in [0.5, 0.75, 1.0, 2.3] {
            let w = 2.0 * PI * t;
            let oracle = (Complex64::new(0.0, w).exp() - 1.0) / Complex64::new(0.0, w);
            assert!((homogeneous_limit(t) - oracle).norm() < 1e-10, "T = {t}");
        }
        assert!((homogeneous_limit(0.5).norm() - 2.0 / PI).abs() < 1e-10);
        assert!(homogeneous_limit(1.0).norm() < 1e-12);

        let phase = PhaseSpec::linear(1.0, 5.0).unwrap();
        let model = IntensityModel::von_mises(20.0, 0.5, 0.7, phase.clone()).unwrap();
        let closed = plv_asymptotics_vonmises(0.5, 0.7, 20.0, 5.0).unwrap().limit;
        assert!((plv_limit_numeric(&phase, &model, 5.0).unwrap() - closed).norm() < 1e-6);

        let phase = PhaseSpec::linear(1.0, 5.0).unwrap();
        let model = IntensityModel::sinusoid(20.0, 0.3, 5, 0.4, 5.0).unwrap();
        let closed = plv_asymptotics_sinusoid(0.3, 5, 5, 0.4, 20.0, 5.0).unwrap().limit;
        assert!((plv_limit_numeric(&phase, &model, 5.0).unwrap() - closed).norm() < 1e-6);
    }

    #[test]
    fn covariance_diagnostics() {
        // constant rate: coupling covariance is lambda0 T / 2 on each axis
        let phase = PhaseSpec::linear(1.0, 5.0).unwrap();
        let flat = IntensityModel::homogeneous(20.0).unwrap();
        let c = coupling_covariance(&phase, &flat, 5.0, 0.0).unwrap();
        assert!((c[0][0] - 50.0).abs() < 1e-9 && (c[1][1] - 50.0).abs() < 1e-9 && c[0][1].abs() < 1e-9);
        let d = plv_covariance_delta(&phase, &flat, 5.0, 0.0).unwrap();
        assert!((d[0][0] - 0.005).abs() < 1e-12 && (d[1][1] - 0.005).abs() < 1e-12);
        // von Mises: the delta-method variance of the real part drops by I1^2 / (lambda0 T I0^3)
        let vm = IntensityModel::von_mises(20.0, 0.5, 0.0, phase.clone()).unwrap();
        let d = plv_covariance_delta(&phase, &vm, 5.0, 0.0).unwrap();
        let law = plv_asymptotics_vonmises(0.5, 0.0, 20.0, 5.0).unwrap();
        let (i0, i1) = (bessel_i(0, 0.5).unwrap(), bessel_i(1, 0.5).unwrap());
        assert!((d[0][0] - (law.cov[0][0] - i1 * i1 / (100.0 * i0.powi(3)))).abs() < 1e-10);
        assert!((d[1][1] - law.cov[1][1]).abs() < 1e-10);
    }

    #[test]
    fn null_test_formula() {
        assert_eq!(plv_null_test(Complex64::new(0.0, 0.0), 10).unwrap(), 1.0);
        let p = plv_null_test(Complex64::from_polar(0.3, 1.0), 100).unwrap();
        assert!((p - (-9.0f64).exp()).abs() < 1e-15);
        assert!(plv_null_test(Complex64::new(0.1, 0.0), 0).is_err());
    }
}
