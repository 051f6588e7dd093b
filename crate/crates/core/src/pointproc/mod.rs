//! Intensity models, spike data, exact Poisson simulation by thinning, and
//! compensated counting-process integrals.

mod martingale;
mod model;
mod spikes;
mod thinning;

pub use martingale::{fourth_moment_oracle, CompensatedTrial};
pub use model::IntensityModel;
pub use spikes::{SpikeData, Unit};
pub use thinning::{simulate_poisson, simulate_population, simulate_trial_into};
