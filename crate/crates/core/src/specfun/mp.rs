use crate::error::{Error, Result};
use crate::quad;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Marchenko-Pastur law with unit variance and dimension ratio `alpha = p/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpLaw {
    pub alpha: f64,
    pub lower_edge: f64,
    pub upper_edge: f64,
    /// Point mass at zero, `max(0, 1 - 1/alpha)`.
    pub zero_atom: f64,
}

pub fn mp_law(alpha: f64) -> Result<MpLaw> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("mp_law: alpha must be a positive finite number, got {alpha}")));
    }
    let s = alpha.sqrt();
    Ok(MpLaw {
        alpha,
        lower_edge: (1.0 - s).powi(2),
        upper_edge: (1.0 + s).powi(2),
        zero_atom: (1.0 - 1.0 / alpha).max(0.0),
    })
}

/// Density of the continuous part.
pub fn mp_density(law: &MpLaw, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("mp_density: NaN argument"));
    }
    if x <= law.lower_edge || x >= law.upper_edge || x <= 0.0 {
        return Ok(0.0);
    }
    let v = (law.upper_edge - x) * (x - law.lower_edge);
    Ok(v.max(0.0).sqrt() / (2.0 * PI * law.alpha * x))
}

/// Cumulative distribution including the zero atom; right-continuous.
pub fn mp_cdf(law: &MpLaw, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("mp_cdf: NaN argument"));
    }
    if x < 0.0 {
        return Ok(0.0);
    }
    if x <= law.lower_edge {
        return Ok(law.zero_atom);
    }
    if x >= law.upper_edge {
        return Ok(1.0);
    }
    Ok((law.zero_atom + law.continuous_mass_below(x)).min(1.0))
}

/// Smallest `x` with `mp_cdf(x) >= q`, by bisection.
pub fn mp_quantile(law: &MpLaw, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!("mp_quantile: level {q} outside [0, 1]")));
    }
    if q <= law.zero_atom {
        return Ok(if law.zero_atom > 0.0 { 0.0 } else { law.lower_edge });
    }
    let (mut lo, mut hi) = (law.lower_edge, law.upper_edge);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mp_cdf(law, mid)? < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(hi)
}

impl MpLaw {
    /// Mass of the continuous part on `[lower_edge, x]`, via the substitution
    /// `x = a + (b - a)(1 - cos u)/2`, which removes both square-root
    /// singularities at the edges.
    fn continuous_mass_below(&self, x: f64) -> f64 {
        let (a, b) = (self.lower_edge, self.upper_edge);
        let w = b - a;
        let u_max = (1.0 - 2.0 * (x - a) / w).clamp(-1.0, 1.0).acos();
        let c = w * w / (8.0 * PI * self.alpha);
        quad::integrate(
            |u| {
                let s = u.sin();
                let xu = a + 0.5 * w * (1.0 - u.cos());
                if xu <= 0.0 {
                    // only reachable for alpha = 1 at u = 0, where the limit is c
                    return c;
                }
                c * s * s / xu
            },
            0.0,
            u_max,
            1e-13,
            1e-13,
        )
    }
}
