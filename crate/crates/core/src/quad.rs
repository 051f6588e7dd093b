//! Adaptive Gauss-Kronrod (7/15) quadrature.

use num_complex::Complex64;

// Kronrod abscissae on [0, 1]; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 30;

// (estimate, error estimate, estimate of the integral of |f|)
fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (lo, hi) = (f(c - dx), f(c + dx));
        k += WGK[j] * (lo + hi);
        abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (lo + hi);
        }
    }
    (k * h, ((k - g) * h).abs(), abs * h.abs())
}

fn recurse<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: (f64, f64, f64),
    tol: f64,
    depth: u32,
) -> f64 {
    let (value, err, abs) = whole;
    // below this the error estimate is dominated by rounding
    let floor = 50.0 * f64::EPSILON * abs;
    if err <= tol.max(floor) || depth >= MAX_DEPTH || (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
        return value;
    }
    let m = 0.5 * (a + b);
    let left = kronrod(f, a, m);
    let right = kronrod(f, m, b);
    recurse(f, a, m, left, 0.5 * tol, depth + 1) + recurse(f, m, b, right, 0.5 * tol, depth + 1)
}

/// Integrates `f` over `[a, b]` to an error estimate below `abs_tol`, or
/// `rel_tol` times the magnitude of a first coarse estimate, whichever is
/// larger.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let first = kronrod(&mut f, a, b);
    let tol = abs_tol.max(rel_tol * first.0.abs());
    recurse(&mut f, a, b, first, tol, 0)
}

/// Integrates over consecutive breakpoints, each piece adaptively.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], abs_tol: f64, rel_tol: f64) -> f64 {
    breaks
        .windows(2)
        .map(|w| integrate(&mut f, w[0], w[1], abs_tol, rel_tol))
        .sum()
}

/// Complex-valued variant of [`integrate_pieces`]; real and imaginary parts
/// are refined independently.
pub fn integrate_pieces_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Complex64 {
    let re = integrate_pieces(|t| f(t).re, breaks, abs_tol, rel_tol);
    let im = integrate_pieces(|t| f(t).im, breaks, abs_tol, rel_tol);
    Complex64::new(re, im)
}

/// `pieces + 1` equally spaced breakpoints spanning `[a, b]`.
pub fn uniform_breaks(a: f64, b: f64, pieces: usize) -> Vec<f64> {
    let pieces = pieces.max(1);
    let mut out: Vec<f64> = (0..pieces)
        .map(|i| a + (b - a) * i as f64 / pieces as f64)
        .collect();
    out.push(b);
    out
}

/// Composite trapezoid rule on a uniform grid with spacing `dt`.
pub fn trapezoid(samples: &[f64], dt: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => dt * (samples[1..n - 1].iter().sum::<f64>() + 0.5 * (samples[0] + samples[n - 1])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0, 1e-14, 0.0);
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 9.0 + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn smooth_transcendental() {
        let v = integrate(|x| (x.cos()).exp(), 0.0, PI, 1e-14, 0.0);
        // pi * I0(1)
        assert!((v - PI * 1.266_065_877_752_008_4).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let v = integrate(|x| x.sqrt(), 0.0, 1.0, 1e-12, 0.0);
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let s: Vec<f64> = (0..11).map(|i| 2.0 * i as f64 * 0.1 + 1.0).collect();
        assert!((trapezoid(&s, 0.1) - 2.0).abs() < 1e-14);
    }
}
