//! Simulation and certification toolkit for quantum SWITCH constructions that
//! arise from events superposed in time.
//!
//! Two decaying emitters trigger unitaries `U_A` (paired with a Hadamard on a
//! control qubit) and `U_B` (paired with a Pauli-Z) on a system register. A
//! timer machine records the trigger instants. Evolving the whole arrangement
//! through discretized steps produces a superposition of decay histories; when
//! the timer record is made order-blind the reduced system-control state
//! collapses onto the coherent order superposition
//! `(|0>_C U_B U_A + |1>_C U_A U_B)|phi>/sqrt(2)` — the quantum SWITCH.
//!
//! The crate is organized as:
//!
//! - [`linalg`] — dense complex kets, operators, density matrices, gates, and
//!   a Hermitian eigensolver sized for small Hilbert spaces;
//! - [`decay`] — the discretized two-emitter evolution, both as an exact
//!   branch enumeration and as an O(N) aggregated recurrence, plus the
//!   continuum-limit amplitudes and ordered-time quadrature;
//! - [`realizations`] — the time-bin photon construction and the
//!   symmetrized-timer (order-blind) construction;
//! - [`switch`] — the ideal SWITCH reference state and certification helpers.

pub mod decay;
pub mod error;
pub mod linalg;
pub mod realizations;
pub mod switch;

pub use error::{Error, Result};

/// Tolerance for exact structural checks (normalization, unitarity, Hermiticity).
pub const STRICT_TOL: f64 = 1e-12;

/// Default tolerance for numeric comparisons between computed quantities.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Eigenvalues of a density matrix may dip this far below zero before the
/// matrix is rejected as non-positive.
pub const PSD_TOL: f64 = 1e-10;
