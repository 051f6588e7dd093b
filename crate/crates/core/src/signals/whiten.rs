use super::SignalMatrix;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use num_complex::Complex64;

/// Gram matrices with condition number above this are treated as singular.
pub const CONDITION_LIMIT: f64 = 1e10;

/// `G^{-1/2}` for the time-averaged Gram matrix `G` of `signals`.
pub fn whitening_transform(signals: &SignalMatrix) -> Result<CMatrix> {
    let gram = signals.gram();
    let eig = hermitian_eigen(&gram)?;
    let p = eig.values.len();
    let largest = eig.values[p - 1];
    let smallest = eig.values[0];
    let null_dims = eig
        .values
        .iter()
        .filter(|&&v| v <= largest / CONDITION_LIMIT)
        .count();
    if largest <= 0.0 || null_dims > 0 {
        return Err(Error::Singular {
            dim: p,
            null_dims: null_dims.max(1),
            smallest,
            largest,
        });
    }
    let v = &eig.vectors;
    let scale: Vec<f64> = eig.values.iter().map(|l| 1.0 / l.sqrt()).collect();
    // W_ic = sum_k V_ik s_k conj(V_ck)
    Ok(CMatrix::from_fn(p, p, |i, c| {
        (0..p)
            .map(|k| v[(i, k)] * scale[k] * v[(c, k)].conj())
            .sum::<Complex64>()
    }))
}

/// Symmetric whitening: channels are recombined by `G^{-1/2}` so that the
/// time-averaged Gram matrix of the output is the identity.
///
/// `G` is built as `conj(x_j) x_l`, so the transform is applied with its
/// conjugate to keep the output Gram equal to `W^* G W^T = I`.
pub fn whiten(signals: &SignalMatrix) -> Result<SignalMatrix> {
    let w = whitening_transform(signals)?;
    let w_conj = CMatrix::from_fn(w.rows(), w.cols(), |i, j| w[(i, j)].conj());
    let mut out = signals.mix(&w_conj)?;
    out.set_whitened(true);
    Ok(out)
}
