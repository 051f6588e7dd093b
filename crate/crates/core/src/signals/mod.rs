//! Phase models, multichannel analytic signals, phase-noise synthesis and
//! whitening.

mod matrix;
mod phase;
mod synth;
mod whiten;

pub use matrix::{eval_at_spike_times, Channel, FnSignal, Interpolation, Signal, SignalMatrix};
pub use phase::PhaseSpec;
pub use synth::{check_synthesis, oscillation_channels, synthesize_oscillations, MIN_SAMPLES_PER_PERIOD};
pub use whiten::{whiten, whitening_transform, CONDITION_LIMIT};
