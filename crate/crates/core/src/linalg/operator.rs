use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::Ket;
use crate::STRICT_TOL;

/// A dense linear map between finite Hilbert spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    entries: Array2<Complex64>,
}

impl Operator {
    pub fn new(entries: Array2<Complex64>) -> Self {
        Self { entries }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim_out = rows.len();
        let dim_in = rows.first().map(|r| r.len()).unwrap_or(0);
        if dim_out == 0 || dim_in == 0 {
            return Err(Error::InvalidParameter("operator must be non-empty".into()));
        }
        if rows.iter().any(|r| r.len() != dim_in) {
            return Err(Error::InvalidParameter("ragged operator rows".into()));
        }
        let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
        let entries = Array2::from_shape_vec((dim_out, dim_in), flat)
            .expect("shape checked above");
        Ok(Self { entries })
    }

    pub fn dim_in(&self) -> usize {
        self.entries.ncols()
    }

    pub fn dim_out(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.t().mapv(|z| z.conj()),
        }
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim_in() != other.dim_out() {
            return Err(Error::DimensionMismatch {
                context: "operator composition".into(),
                expected: self.dim_in(),
                actual: other.dim_out(),
            });
        }
        Ok(Self {
            entries: self.entries.dot(&other.entries),
        })
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            entries: self.entries.mapv(|z| z * factor),
        }
    }

    /// Max-norm deviation of `U^dag U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let product = self.adjoint().entries.dot(&self.entries);
        let n = product.nrows();
        let mut max = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                max = max.max((product[(i, j)] - target).norm());
            }
        }
        max
    }

    pub fn is_unitary(&self) -> bool {
        self.dim_in() == self.dim_out() && self.unitarity_deviation() <= STRICT_TOL
    }

    pub fn assert_unitary(&self) -> Result<()> {
        let deviation = if self.dim_in() == self.dim_out() {
            self.unitarity_deviation()
        } else {
            f64::INFINITY
        };
        if deviation > STRICT_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(())
    }

    /// Apply to a bare vector of matching dimension.
    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        if ket.total_dim() != self.dim_in() {
            return Err(Error::DimensionMismatch {
                context: "operator application".into(),
                expected: self.dim_in(),
                actual: ket.total_dim(),
            });
        }
        let out = self.entries.dot(ket.amplitudes());
        Ket::new(vec![self.dim_out()], out.to_vec())
    }

    /// Apply as `I (x) ... (x) op (x) ... (x) I` on subsystem `target` of a
    /// composite ket. Norm is preserved whenever the operator is unitary.
    pub fn apply_on(&self, target: usize, state: &Ket) -> Result<Ket> {
        let dims = state.dims();
        if target >= dims.len() {
            return Err(Error::InvalidSubsystems {
                reason: format!("subsystem {target} out of range for {} subsystems", dims.len()),
            });
        }
        if dims[target] != self.dim_in() {
            return Err(Error::SubsystemMismatch {
                subsystem: target,
                subsystem_dim: dims[target],
                op_dim: self.dim_in(),
            });
        }
        let left: usize = dims[..target].iter().product();
        let mid_in = dims[target];
        let mid_out = self.dim_out();
        let right: usize = dims[target + 1..].iter().product();

        let amps = state.amplitudes();
        let mut out = vec![Complex64::ZERO; left * mid_out * right];
        for l in 0..left {
            for r in 0..right {
                for i in 0..mid_out {
                    let mut acc = Complex64::ZERO;
                    for j in 0..mid_in {
                        acc += self.entries[(i, j)] * amps[(l * mid_in + j) * right + r];
                    }
                    out[(l * mid_out + i) * right + r] = acc;
                }
            }
        }
        let mut new_dims = dims.to_vec();
        new_dims[target] = mid_out;
        Ket::new(new_dims, out)
    }
}

pub fn identity(dim: usize) -> Result<Operator> {
    if dim == 0 {
        return Err(Error::InvalidParameter("identity of dimension 0".into()));
    }
    Ok(Operator::new(Array2::from_diag_elem(dim, Complex64::ONE)))
}

pub fn hadamard() -> Operator {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Operator::new(
        Array2::from_shape_vec((2, 2), vec![h, h, h, -h]).expect("2x2"),
    )
}

pub fn pauli_x() -> Operator {
    Operator::new(
        Array2::from_shape_vec(
            (2, 2),
            vec![Complex64::ZERO, Complex64::ONE, Complex64::ONE, Complex64::ZERO],
        )
        .expect("2x2"),
    )
}

pub fn pauli_z() -> Operator {
    Operator::new(
        Array2::from_shape_vec(
            (2, 2),
            vec![Complex64::ONE, Complex64::ZERO, Complex64::ZERO, -Complex64::ONE],
        )
        .expect("2x2"),
    )
}

/// Haar-distributed random unitary, deterministic per seed.
///
/// A seeded complex-Gaussian matrix is orthonormalized by modified
/// Gram-Schmidt; each column is then rephased so the R-diagonal of the
/// implicit QR factorization is real positive, which makes the distribution
/// Haar rather than merely unitary.
pub fn haar_random_unitary(dim: usize, seed: u64) -> Result<Operator> {
    if dim == 0 {
        return Err(Error::InvalidParameter("haar unitary of dimension 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect();

    for j in 0..dim {
        let (done, rest) = columns.split_at_mut(j);
        let current = &mut rest[0];
        for prev in done.iter() {
            let proj: Complex64 = prev
                .iter()
                .zip(current.iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            for (c, p) in current.iter_mut().zip(prev.iter()) {
                *c -= proj * p;
            }
        }
        let norm: f64 = current.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // The diagonal phase before normalization fixes the R factor.
        let pivot = current[j];
        let phase = if pivot.norm() > 0.0 {
            pivot / pivot.norm()
        } else {
            Complex64::ONE
        };
        let scale = phase.conj() / norm;
        for z in current.iter_mut() {
            *z *= scale;
        }
    }

    let mut entries = Array2::from_elem((dim, dim), Complex64::ZERO);
    for (j, col) in columns.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            entries[(i, j)] = *z;
        }
    }
    Ok(Operator::new(entries))
}
