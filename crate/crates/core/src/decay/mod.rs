//! Discretized evolution of two decaying emitters coupled to a timer machine,
//! control qubit, and system, with its continuum limit.
//!
//! Two paths compute the same physics:
//!
//! - [`BranchState`] enumerates every decay history explicitly — the oracle
//!   path, quadratic in the step count;
//! - [`AggregateState`] tracks the five history classes (undecayed, A-only,
//!   B-only, A-first, B-first) in O(1) per step — the production path.
//!
//! Their agreement to near machine precision is asserted in the test suites.

mod aggregate;
mod branch;
mod continuum;
mod gates;
mod grid;
mod params;

pub use aggregate::{AggregateState, RecordMode};
pub use branch::{BranchState, OrderProbabilities, ReducedScState, TimerRecord};
pub use continuum::{chi_continuous, chi_deviation, convergence_order, discrete_continuum_check};
pub use gates::{GateSet, OrderKets};
pub use grid::{
    joint_amplitude_analysis, mprime_states, JointAmplitudeGrid, JointAnalysis, MPrimePair,
    MPrimeState, OrderRegion,
};
pub use params::{
    delta_p, jump_amplitude, survival_amplitude, DecayParams, DEFAULT_INCOMPLETE_THRESHOLD,
    DEFAULT_MAX_BRANCHES, MAX_DELTA_P,
};
