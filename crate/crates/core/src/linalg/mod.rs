//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here is sized for registers of a few dozen dimensions at most:
//! dense storage, no sparsity, pure functions over immutable values.

mod density;
mod eigen;
mod fidelity;
mod ket;
mod operator;

pub use density::{DensityMatrix, ProjectorAccumulator};
pub use eigen::{hermitian_eigen, matrix_sqrt, HermitianEigen};
pub use fidelity::{fidelity, fidelity_ket_density, fidelity_kets, State};
pub use ket::Ket;
pub use operator::{hadamard, haar_random_unitary, identity, pauli_x, pauli_z, Operator};
