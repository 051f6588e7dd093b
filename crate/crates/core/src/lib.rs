//! Spike-field coupling between point processes and continuous oscillatory
//! signals.
//!
//! The crate covers the whole chain from simulation to inference:
//!
//! - [`specfun`]: modified Bessel functions of integer order, the
//!   Marchenko-Pastur law and a von Mises sampler.
//! - [`pointproc`]: intensity models, exact inhomogeneous Poisson simulation
//!   by thinning, compensated counting-process integrals.
//! - [`signals`]: phase models, analytic multichannel oscillations with von
//!   Mises phase noise, whitening.
//! - [`unicoupling`]: the coupling estimator, the multi-trial PLV, their
//!   closed-form asymptotic laws and a null test.
//! - [`multicoupling`]: coupling matrices, their normalized Gram spectrum and
//!   Marchenko-Pastur edge thresholding.
//! - [`harness`]: seeded Monte Carlo experiments with verdicts against the
//!   closed-form laws.
//! - [`io`]: spike/signal file formats and experiment configuration files.

pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod multicoupling;
pub mod pointproc;
pub mod quad;
pub mod seed;
pub mod signals;
pub mod specfun;
pub mod stats;
pub mod unicoupling;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use harness::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport, Verdict};
pub use multicoupling::{
    build_coupling_matrix, ks_distance_esd, normalize, spectrum, CouplingMatrix, SpectrumReport,
};
pub use pointproc::{simulate_poisson, CompensatedTrial, IntensityModel, SpikeData, Unit};
pub use signals::{
    synthesize_oscillations, whiten, Interpolation, PhaseSpec, Signal, SignalMatrix,
};
pub use specfun::{bessel_i, mp_law, von_mises_sample, MpLaw};
pub use unicoupling::{
    estimate_coupling, estimate_plv, plv_asymptotics_sinusoid, plv_asymptotics_vonmises,
    plv_limit_numeric, plv_null_test, AsymptoticLaw,
};
