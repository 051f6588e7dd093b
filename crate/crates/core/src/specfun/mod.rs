//! Special functions: modified Bessel functions of integer order, the
//! Marchenko-Pastur law and a von Mises sampler.

mod bessel;
mod mp;
mod vonmises;

pub use bessel::{bessel_i, bessel_ratio, SERIES_LIMIT};
pub use mp::{mp_cdf, mp_density, mp_law, mp_quantile, MpLaw};
pub use vonmises::von_mises_sample;
