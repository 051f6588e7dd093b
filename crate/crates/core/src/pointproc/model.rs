use crate::error::{Error, Result};
use crate::quad;
use crate::signals::PhaseSpec;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Deterministic, bounded firing-rate law `lambda(t)` in events per second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntensityModel {
    /// `lambda(t) = rate`.
    Homogeneous { rate: f64 },
    /// `lambda(t) = rate * exp(kappa cos(phi(t) - phi0))`, times `phi'(t)`
    /// when `include_phase_derivative` is set.
    VonMisesExp {
        rate: f64,
        kappa: f64,
        phi0: f64,
        phase: PhaseSpec,
        include_phase_derivative: bool,
    },
    /// `lambda(t) = rate * (1 + depth cos(2 pi m t / window - phi0))`.
    SinusoidMod {
        rate: f64,
        depth: f64,
        harmonic: u32,
        phi0: f64,
        window: f64,
    },
}

impl IntensityModel {
    pub fn homogeneous(rate: f64) -> Result<Self> {
        let m = IntensityModel::Homogeneous { rate };
        m.validate()?;
        Ok(m)
    }

    pub fn von_mises(rate: f64, kappa: f64, phi0: f64, phase: PhaseSpec) -> Result<Self> {
        let m = IntensityModel::VonMisesExp {
            rate,
            kappa,
            phi0,
            phase,
            include_phase_derivative: false,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn sinusoid(rate: f64, depth: f64, harmonic: u32, phi0: f64, window: f64) -> Result<Self> {
        let m = IntensityModel::SinusoidMod {
            rate,
            depth,
            harmonic,
            phi0,
            window,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn base_rate(&self) -> f64 {
        match self {
            IntensityModel::Homogeneous { rate }
            | IntensityModel::VonMisesExp { rate, .. }
            | IntensityModel::SinusoidMod { rate, .. } => *rate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rate = self.base_rate();
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::Model(format!("base rate lambda0 must be > 0, got {rate}")));
        }
        match self {
            IntensityModel::Homogeneous { .. } => {}
            IntensityModel::VonMisesExp { kappa, phi0, phase, .. } => {
                if !(kappa.is_finite() && *kappa >= 0.0) {
                    return Err(Error::Model(format!("kappa must be >= 0, got {kappa}")));
                }
                if !phi0.is_finite() {
                    return Err(Error::Model(format!("phi0 must be finite, got {phi0}")));
                }
                phase.validate().map_err(|e| Error::Model(format!("phase: {e}")))?;
            }
            IntensityModel::SinusoidMod {
                depth,
                harmonic,
                phi0,
                window,
                ..
            } => {
                if !(0.0..=1.0).contains(depth) {
                    return Err(Error::Model(format!(
                        "modulation depth varkappa must satisfy 0 <= varkappa <= 1, got {depth}"
                    )));
                }
                if *harmonic == 0 {
                    return Err(Error::Model("modulation harmonic m must be a positive integer".into()));
                }
                if !phi0.is_finite() {
                    return Err(Error::Model(format!("phi0 must be finite, got {phi0}")));
                }
                if !(window.is_finite() && *window > 0.0) {
                    return Err(Error::Model(format!("modulation window must be > 0, got {window}")));
                }
            }
        }
        self.upper_bound().map(|_| ())
    }

    /// `lambda(t)`.
    pub fn evaluate(&self, t: f64) -> f64 {
        match self {
            IntensityModel::Homogeneous { rate } => *rate,
            IntensityModel::VonMisesExp {
                rate,
                kappa,
                phi0,
                phase,
                include_phase_derivative,
            } => {
                let base = rate * (kappa * (phase.phase_at(t) - phi0).cos()).exp();
                if *include_phase_derivative {
                    base * phase.derivative_at(t)
                } else {
                    base
                }
            }
            IntensityModel::SinusoidMod {
                rate,
                depth,
                harmonic,
                phi0,
                window,
            } => rate * (1.0 + depth * (2.0 * PI * *harmonic as f64 * t / window - phi0).cos()),
        }
    }

    /// Finite `lambda_max >= sup lambda(t)` used as the thinning envelope.
    pub fn upper_bound(&self) -> Result<f64> {
        let bound = match self {
            IntensityModel::Homogeneous { rate } => *rate,
            IntensityModel::VonMisesExp {
                rate,
                kappa,
                phase,
                include_phase_derivative,
                ..
            } => {
                let b = rate * kappa.exp();
                if *include_phase_derivative {
                    b * phase.max_derivative()
                } else {
                    b
                }
            }
            IntensityModel::SinusoidMod { rate, depth, .. } => rate * (1.0 + depth),
        };
        if !bound.is_finite() {
            return Err(Error::Model(format!("rate upper bound is not finite ({bound})")));
        }
        Ok(bound)
    }

    /// True when `lambda(t)` is constant, so thinning accepts every candidate.
    pub fn is_constant(&self) -> bool {
        match self {
            IntensityModel::Homogeneous { .. } => true,
            IntensityModel::VonMisesExp {
                kappa,
                phase,
                include_phase_derivative,
                ..
            } => *kappa == 0.0 && (!include_phase_derivative || matches!(phase, PhaseSpec::Linear { .. })),
            IntensityModel::SinusoidMod { depth, .. } => *depth == 0.0,
        }
    }

    /// Breakpoints on `[0, window]` between which `lambda` is smooth and
    /// varies by at most a quarter cycle.
    pub fn breakpoints(&self, window: f64) -> Vec<f64> {
        match self {
            IntensityModel::Homogeneous { .. } => vec![0.0, window],
            IntensityModel::VonMisesExp { phase, .. } => {
                let mut b: Vec<f64> = phase.breakpoints().into_iter().filter(|&t| t < window).collect();
                b.push(window);
                b
            }
            IntensityModel::SinusoidMod {
                harmonic,
                window: w,
                ..
            } => {
                let pieces = (4.0 * *harmonic as f64 * window / w).ceil().clamp(1.0, 1e6) as usize;
                quad::uniform_breaks(0.0, window, pieces)
            }
        }
    }

    /// `Lambda(T) = int_0^T lambda(t) dt` by adaptive quadrature.
    pub fn expected_count(&self, window: f64) -> f64 {
        quad::integrate_pieces(|t| self.evaluate(t), &self.breakpoints(window), 0.0, 1e-12)
    }
}

/// Union of two breakpoint sets on `[0, window]`.
pub(crate) fn merge_breaks(a: &[f64], b: &[f64], window: f64) -> Vec<f64> {
    let mut all: Vec<f64> = a
        .iter()
        .chain(b)
        .copied()
        .filter(|&t| (0.0..=window).contains(&t))
        .chain([0.0, window])
        .collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * window);
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_i;

    #[test]
    fn bounds() {
        let p = PhaseSpec::linear(1.0, 5.0).unwrap();
        let vm = IntensityModel::von_mises(20.0, 0.5, 0.0, p.clone()).unwrap();
        assert!((vm.upper_bound().unwrap() - 20.0 * 0.5f64.exp()).abs() < 1e-12);
        let with_deriv = IntensityModel::VonMisesExp {
            rate: 20.0,
            kappa: 0.5,
            phi0: 0.0,
            phase: p,
            include_phase_derivative: true,
        };
        assert!((with_deriv.upper_bound().unwrap() - 20.0 * 0.5f64.exp() * 2.0 * PI).abs() < 1e-10);
        let s = IntensityModel::sinusoid(30.0, 0.3, 1, 0.0, 1.0).unwrap();
        assert!((s.upper_bound().unwrap() - 39.0).abs() < 1e-12);
    }

    #[test]
    fn rate_nonnegative_and_below_bound() {
        let models = [
            IntensityModel::von_mises(20.0, 2.0, 1.0, PhaseSpec::linear(3.0, 2.0).unwrap()).unwrap(),
            IntensityModel::sinusoid(10.0, 1.0, 3, 0.4, 2.0).unwrap(),
        ];
        for m in &models {
            let b = m.upper_bound().unwrap();
            for i in 0..=1000 {
                let v = m.evaluate(2.0 * i as f64 / 1000.0);
                assert!(v >= 0.0 && v <= b * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn validation_messages() {
        let err = IntensityModel::sinusoid(30.0, 1.5, 1, 0.0, 1.0).unwrap_err().to_string();
        assert!(err.contains("0 <= varkappa <= 1"), "{err}");
        assert!(IntensityModel::homogeneous(0.0).is_err());
        assert!(IntensityModel::von_mises(1.0, -0.1, 0.0, PhaseSpec::linear(1.0, 1.0).unwrap()).is_err());
        assert!(IntensityModel::sinusoid(1.0, 0.5, 0, 0.0, 1.0).is_err());
        let huge = IntensityModel::VonMisesExp {
            rate: 1.0,
            kappa: 1e6,
            phi0: 0.0,
            phase: PhaseSpec::Linear { frequency: 1.0, window: 1.0 },
            include_phase_derivative: false,
        };
        assert!(matches!(huge.validate(), Err(Error::Model(_))));
    }

    #[test]
    fn expected_count_integer_cycles() {
        let m = IntensityModel::von_mises(20.0, 0.5, 0.3, PhaseSpec::linear(1.0, 5.0).unwrap()).unwrap();
        let want = 20.0 * 5.0 * bessel_i(0, 0.5).unwrap();
        assert!((m.expected_count(5.0) - want).abs() < 1e-9 * want);
        let s = IntensityModel::sinusoid(30.0, 0.3, 1, 0.0, 1.0).unwrap();
        assert!((s.expected_count(1.0) - 30.0).abs() < 1e-10);
    }
}
