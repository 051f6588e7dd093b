use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Arguments up to this value use the power series; larger ones use the
/// Hankel asymptotic expansion, whose smallest term is below 1e-12 relative
/// from here on.
pub const SERIES_LIMIT: f64 = 15.0;

/// Largest argument accepted before `I_0` overflows `f64`.
const MAX_ARG: f64 = 700.0;

/// Modified Bessel function of the first kind `I_order(x)` for integer order
/// and `x >= 0`.
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("bessel_i: argument must be >= 0, got {x}")));
    }
    if x > MAX_ARG {
        return Err(Error::Range(format!(
            "bessel_i: argument {x} exceeds {MAX_ARG}, I_{order} overflows"
        )));
    }
    Ok(if x <= SERIES_LIMIT {
        series(order, x)
    } else {
        hankel(order, x)
    })
}

/// `I_num(x) / I_den(x)`; for `x -> 0` and `num > den` this tends to 0.
pub fn bessel_ratio(num: u32, den: u32, x: f64) -> Result<f64> {
    Ok(bessel_i(num, x)? / bessel_i(den, x)?)
}

// sum_m (x/2)^(2m+k) / (m! (m+k)!), all terms positive.
fn series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let k = order as f64;
    let mut term = 1.0;
    for j in 1..=order {
        term *= half / j as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut sum = term;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * (m + k));
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum
}

// e^x / sqrt(2 pi x) * sum_j (-1)^j prod_{i<=j} (4k^2 - (2i-1)^2) / (j! (8x)^j),
// truncated at the smallest term.
fn hankel(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order as f64).powi(2);
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut j = 0.0_f64;
    loop {
        j += 1.0;
        let next = -term * (mu - (2.0 * j - 1.0).powi(2)) / (j * 8.0 * x);
        if next.abs() >= term.abs() || next.abs() <= 1e-17 * sum.abs() {
            if next.abs() < term.abs() {
                sum += next;
            }
            break;
        }
        term = next;
        sum += term;
    }
    // Split the exponential to stay finite up to MAX_ARG.
    let half = (0.5 * x).exp();
    half * (half * sum / (2.0 * PI * x).sqrt())
}
