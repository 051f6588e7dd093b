//! Coupling matrices between many channels and many units, the spectrum of
//! their normalized Gram matrix, and Marchenko-Pastur edge thresholding.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::pointproc::SpikeData;
use crate::signals::{Interpolation, SignalMatrix};
use crate::specfun::{mp_cdf, mp_density, mp_law, MpLaw};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `p x n` matrix of coupling estimates, raw or normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    /// Row `i` is channel `i`, column `j` is unit `j`.
    pub entries: CMatrix,
    pub unit_ids: Vec<u64>,
    /// Total events per unit over all trials.
    pub counts: Vec<u64>,
    pub trials: usize,
    pub window: f64,
    /// `int_0^T x_i dt` under `interpolation`.
    pub channel_integrals: Vec<Complex64>,
    pub interpolation: Interpolation,
    pub normalized: bool,
}

impl CouplingMatrix {
    pub fn channels(&self) -> usize {
        self.entries.rows()
    }

    pub fn units(&self) -> usize {
        self.entries.cols()
    }

    /// Pooled rate estimates `N_j / (K T)`.
    pub fn rates(&self) -> Vec<f64> {
        let kt = self.trials as f64 * self.window;
        self.counts.iter().map(|&n| n as f64 / kt).collect()
    }
}

/// Coupling matrix with spike-time values read by sample-and-hold, which
/// makes the normalization's channel integrals exact for the sampled signal.
pub fn build_coupling_matrix(signals: &SignalMatrix, spikes: &SpikeData) -> Result<CouplingMatrix> {
    build_coupling_matrix_with(signals, spikes, Interpolation::Hold)
}

/// `C_ij = (1/K) sum_k sum_{t in unit j, trial k} x_i(t)`.
pub fn build_coupling_matrix_with(
    signals: &SignalMatrix,
    spikes: &SpikeData,
    interpolation: Interpolation,
) -> Result<CouplingMatrix> {
    let window = signals.window();
    if (window - spikes.window).abs() > 1e-9 * window {
        return Err(Error::domain(format!(
            "signal window {window} and spike window {} differ",
            spikes.window
        )));
    }
    if spikes.units.is_empty() {
        return Err(Error::domain("coupling matrix needs at least one unit"));
    }
    spikes.validate()?;
    let trials = spikes.trials();
    if trials == 0 {
        return Err(Error::domain("coupling matrix needs at least one trial"));
    }
    let p = signals.channel_count();
    let n = spikes.unit_count();
    let zero = Complex64::new(0.0, 0.0);
    let mut entries = CMatrix::zeros(p, n);
    let mut value = vec![zero; p];
    let mut trial_sum = vec![zero; p];
    let mut total = vec![zero; p];
    for (j, unit) in spikes.units.iter().enumerate() {
        total.fill(zero);
        for times in &unit.trials {
            trial_sum.fill(zero);
            for &t in times {
                signals.eval_all_into(t, interpolation, &mut value);
                for (s, v) in trial_sum.iter_mut().zip(&value) {
                    *s += v;
                }
            }
            for (a, s) in total.iter_mut().zip(&trial_sum) {
                *a += s;
            }
        }
        for (i, a) in total.iter().enumerate() {
            entries[(i, j)] = a / trials as f64;
        }
    }
    Ok(CouplingMatrix {
        entries,
        unit_ids: spikes.units.iter().map(|u| u.id).collect(),
        counts: spikes.units.iter().map(|u| u.total_count() as u64).collect(),
        trials,
        window,
        channel_integrals: signals.channel_integrals(interpolation),
        interpolation,
        normalized: false,
    })
}

/// Compensates and scales each column:
/// `Y_ij = (K C_ij - (N_j / T) int x_i dt) / sqrt(N_j)`, which equals
/// `(1 / sqrt(K l_j T)) sum_k [sum_t x_i(t) - l_j int x_i dt]` with
/// `l_j = N_j / (K T)`.
pub fn normalize(raw: &CouplingMatrix) -> Result<CouplingMatrix> {
    if raw.normalized {
        return Err(Error::domain("coupling matrix is already normalized"));
    }
    let zero_units: Vec<u64> = raw
        .unit_ids
        .iter()
        .zip(&raw.counts)
        .filter(|(_, &c)| c == 0)
        .map(|(&id, _)| id)
        .collect();
    if !zero_units.is_empty() {
        return Err(Error::ZeroRateUnits(zero_units));
    }
    let k = raw.trials as f64;
    let mut out = raw.clone();
    for (j, &count) in raw.counts.iter().enumerate() {
        let nj = count as f64;
        let scale = 1.0 / nj.sqrt();
        let comp = nj / raw.window;
        for (i, integral) in raw.channel_integrals.iter().enumerate() {
            out.entries[(i, j)] = (raw.entries[(i, j)] * k - integral * comp) * scale;
        }
    }
    out.normalized = true;
    Ok(out)
}

/// Spectrum of `S = (1/n) Y Y^H` and its comparison with the MP law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Nonincreasing; values below `1e-10 ||S||` are set to exactly 0.
    pub eigenvalues: Vec<f64>,
    /// `sqrt(n l_k)`.
    pub singular_values: Vec<f64>,
    pub alpha: f64,
    pub p: usize,
    pub n: usize,
    pub mp: MpLaw,
    pub margin: f64,
    /// Eigenvalues above `upper_edge (1 + margin)`.
    pub n_significant: usize,
    pub ks_distance: f64,
    /// Largest `||S v - l v|| / ||S||` over the eigenpairs.
    pub max_residual: f64,
}

/// Relative eigenpair residual the solver must reach.
pub const RESIDUAL_TOL: f64 = 1e-8;
const ZERO_CLAMP: f64 = 1e-10;

pub fn spectrum(normalized: &CouplingMatrix) -> Result<SpectrumReport> {
    spectrum_with_margin(normalized, 0.0)
}

pub fn spectrum_with_margin(normalized: &CouplingMatrix, margin: f64) -> Result<SpectrumReport> {
    if !normalized.normalized {
        return Err(Error::domain("spectrum needs a normalized coupling matrix"));
    }
    if !(margin.is_finite() && margin >= 0.0) {
        return Err(Error::domain(format!("margin must be >= 0, got {margin}")));
    }
    spectrum_of(&normalized.entries, margin)
}

/// Spectrum report for an arbitrary `p x n` matrix `Y`.
pub fn spectrum_of(y: &CMatrix, margin: f64) -> Result<SpectrumReport> {
    let (p, n) = (y.rows(), y.cols());
    let s = y.gram_rows(n as f64);
    let norm = s.frobenius_norm();
    let eig = hermitian_eigen(&s)?;
    let mut max_residual: f64 = 0.0;
    let mut sv = vec![Complex64::new(0.0, 0.0); p];
    for (k, &l) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        s.mul_vec(&v, &mut sv);
        let r = sv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * l).norm_sqr())
            .sum::<f64>()
            .sqrt();
        max_residual = max_residual.max(if norm > 0.0 { r / norm } else { r });
    }
    if max_residual > RESIDUAL_TOL {
        return Err(Error::NoConvergence {
            sweeps: 0,
            off_norm: max_residual * norm,
            norm,
        });
    }
    let mut eigenvalues: Vec<f64> = eig
        .values
        .iter()
        .rev()
        .map(|&l| if l <= ZERO_CLAMP * norm { 0.0 } else { l })
        .collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let singular_values = eigenvalues.iter().map(|l| (n as f64 * l).sqrt()).collect();
    let alpha = p as f64 / n as f64;
    let mp = mp_law(alpha)?;
    let threshold = mp.upper_edge * (1.0 + margin);
    let n_significant = eigenvalues.iter().filter(|&&l| l > threshold).count();
    let ks_distance = if p >= 2 { ks_distance_values(&eigenvalues, &mp)? } else { f64::NAN };
    Ok(SpectrumReport {
        eigenvalues,
        singular_values,
        alpha,
        p,
        n,
        mp,
        margin,
        n_significant,
        ks_distance,
        max_residual,
    })
}

/// Kolmogorov-Smirnov distance between the ESD of the report and its MP law.
pub fn ks_distance_esd(report: &SpectrumReport) -> Result<f64> {
    ks_distance_values(&report.eigenvalues, &report.mp)
}

/// `sup_x |F_emp(x) - F_MP(x)|` for the empirical distribution of `values`,
/// with the zero atom of the law included.
pub fn ks_distance_values(values: &[f64], law: &MpLaw) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::domain("KS distance needs at least two eigenvalues"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let p = v.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < v.len() {
        let x = v[i];
        let mut j = i;
        while j < v.len() && v[j] == x {
            j += 1;
        }
        let f = mp_cdf(law, x)?;
        // left limit of the law: the atom sits at 0
        let f_left = if x <= 0.0 { 0.0 } else { f };
        d = d.max((j as f64 / p - f).abs()).max((i as f64 / p - f_left).abs());
        i = j;
    }
    Ok(d)
}

/// Row of an ESD histogram against the MP density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EsdBin {
    pub lower: f64,
    pub upper: f64,
    /// Empirical density of the nonzero eigenvalues, as a fraction of all.
    pub empirical: f64,
    /// MP density at the bin centre.
    pub mp: f64,
}

/// Histogram of the positive eigenvalues over `[0, max(upper_edge, l_1)]`
/// with `bins` bins, next to the MP density.
pub fn esd_histogram(values: &[f64], law: &MpLaw, bins: usize) -> Result<Vec<EsdBin>> {
    if bins == 0 || values.is_empty() {
        return Err(Error::domain("histogram needs values and at least one bin"));
    }
    let top = values.iter().copied().fold(law.upper_edge, f64::max) * 1.05;
    let width = top / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in values.iter().filter(|&&x| x > 0.0) {
        counts[((x / width) as usize).min(bins - 1)] += 1;
    }
    let total = values.len() as f64;
    (0..bins)
        .map(|b| {
            let lower = b as f64 * width;
            Ok(EsdBin {
                lower,
                upper: lower + width,
                empirical: counts[b] as f64 / (total * width),
                mp: mp_density(law, lower + 0.5 * width)?,
            })
        })
        .collect()
}
