//! Numerical laboratory for quantum Zeno subspaces.
//!
//! A register of up to four spin-1/2 systems dephases under quasi-static
//! Gaussian detunings while a joint Pauli observable is repeatedly projected.
//! The crate provides
//!
//! * a dense density-matrix kernel ([`pauli`], [`state`]),
//! * the non-selective projection channel and its ancilla-mediated
//!   realization ([`channel`]),
//! * closed-form decay predictions ([`analytic`]),
//! * a reproducible Monte-Carlo ensemble simulator ([`ensemble`]),
//! * logical-qubit encodings inside the protected subspaces ([`logical`]),
//! * least-squares analysis of decay curves and the projection-count
//!   scaling law ([`fit`]).
//!
//! Times are in milliseconds and detunings in rad/ms throughout.

pub mod analytic;
pub mod channel;
pub mod ensemble;
mod error;
pub mod fit;
pub mod lm;
pub mod logical;
pub mod pauli;
pub mod rng;
pub mod state;

pub use error::{Result, ZenoError};

pub use analytic::{
    decay_value, effective_t2, odd_n_asymptote, single_shot_expectation, sqrt_e_time, DecayParams,
};
pub use channel::{ancilla_project, project, projectors, ProjectorPair};
pub use ensemble::{
    run_ensemble, run_shot, sample_detunings, DecayCurve, ExperimentPlan, InitialState,
    NoiseModel, Readout,
};
pub use fit::{
    apply_readout_correction, fit_decay, fit_gaussian, fit_scaling, CorrectedValue, DecayGuess,
    FitResult, ScalingFit,
};
pub use logical::{
    logical_fidelity, logical_state_2spin, logical_state_3spin, thresholds, LogicalLabel,
    LogicalSpec, ThresholdFlags,
};
pub use pauli::{Pauli, PauliString, SignedPauli};
pub use state::{
    evolve_dephasing, expectation, product_state, state_fidelity, DensityMatrix, DetuningVector,
    SpinLabel, StateVector,
};

/// Upper bound on the register size handled by the dense kernel.
pub const MAX_SPINS: usize = 4;
