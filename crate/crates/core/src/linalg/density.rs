use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::eigen::hermitian_eigen;
use crate::linalg::Ket;
use crate::{PSD_TOL, STRICT_TOL};

/// A density matrix over a tensor product of finite subsystems.
///
/// Construction validates Hermiticity, unit trace, and positive
/// semidefiniteness (eigenvalues above `-PSD_TOL`).
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    entries: Array2<Complex64>,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, entries: Array2<Complex64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidDensity {
                reason: "need at least one subsystem of dimension >= 1".into(),
            });
        }
        if entries.nrows() != total || entries.ncols() != total {
            return Err(Error::InvalidDensity {
                reason: format!(
                    "entries are {}x{}, dims imply {total}x{total}",
                    entries.nrows(),
                    entries.ncols()
                ),
            });
        }
        let mut herm_dev = 0.0_f64;
        for i in 0..total {
            for j in i..total {
                herm_dev = herm_dev.max((entries[(i, j)] - entries[(j, i)].conj()).norm());
            }
        }
        if herm_dev > STRICT_TOL {
            return Err(Error::InvalidDensity {
                reason: format!("not Hermitian (max deviation {herm_dev:e})"),
            });
        }
        let trace: Complex64 = (0..total).map(|i| entries[(i, i)]).sum();
        if (trace.re - 1.0).abs() > STRICT_TOL || trace.im.abs() > STRICT_TOL {
            return Err(Error::InvalidDensity {
                reason: format!("trace is {trace}, expected 1"),
            });
        }
        let eig = hermitian_eigen(&entries)?;
        if let Some(&min) = eig.values.first() {
            if min < -PSD_TOL {
                return Err(Error::InvalidDensity {
                    reason: format!("negative eigenvalue {min:e}"),
                });
            }
        }
        Ok(Self { dims, entries })
    }

    /// `|psi><psi|` for a normalized ket.
    pub fn from_ket(ket: &Ket) -> Result<Self> {
        ket.assert_normalized()?;
        let n = ket.total_dim();
        let mut entries = Array2::from_elem((n, n), Complex64::ZERO);
        for i in 0..n {
            for j in 0..n {
                entries[(i, j)] = ket.amplitude(i) * ket.amplitude(j).conj();
            }
        }
        Self::new(ket.dims().to_vec(), entries)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.total_dim()).map(|i| self.entries[(i, i)]).sum()
    }

    /// `Tr(rho^2)`; equals 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        let sq = self.entries.dot(&self.entries);
        (0..self.total_dim()).map(|i| sq[(i, i)].re).sum()
    }

    /// Expectation value `<psi| rho |psi>`.
    pub fn expectation(&self, ket: &Ket) -> Result<f64> {
        if ket.total_dim() != self.total_dim() {
            return Err(Error::DimensionMismatch {
                context: "density expectation".into(),
                expected: self.total_dim(),
                actual: ket.total_dim(),
            });
        }
        let n = self.total_dim();
        let mut acc = Complex64::ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += ket.amplitude(i).conj() * self.entries[(i, j)] * ket.amplitude(j);
            }
        }
        Ok(acc.re)
    }

    /// Trace out every subsystem not listed in `keep`; the result keeps the
    /// retained subsystems in their original order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n_sub = self.dims.len();
        if keep.is_empty() {
            return Err(Error::InvalidSubsystems {
                reason: "keep set must be nonempty".into(),
            });
        }
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.len() != keep.len() {
            return Err(Error::InvalidSubsystems {
                reason: "keep set contains duplicates".into(),
            });
        }
        if let Some(&bad) = keep_sorted.iter().find(|&&k| k >= n_sub) {
            return Err(Error::InvalidSubsystems {
                reason: format!("subsystem {bad} out of range for {n_sub} subsystems"),
            });
        }

        let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| self.dims[k]).collect();
        let kept_total: usize = kept_dims.iter().product();
        let total = self.total_dim();

        // Row-major strides of the full index.
        let mut strides = vec![1usize; n_sub];
        for i in (0..n_sub.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        let keep_mask: Vec<bool> = (0..n_sub).map(|i| keep_sorted.contains(&i)).collect();

        let decompose = |index: usize| -> (usize, usize) {
            let mut kept = 0usize;
            let mut traced = 0usize;
            for s in 0..n_sub {
                let digit = (index / strides[s]) % self.dims[s];
                if keep_mask[s] {
                    kept = kept * self.dims[s] + digit;
                } else {
                    traced = traced * self.dims[s] + digit;
                }
            }
            (kept, traced)
        };

        let mut out = Array2::from_elem((kept_total, kept_total), Complex64::ZERO);
        for row in 0..total {
            let (row_keep, row_trace) = decompose(row);
            for col in 0..total {
                let (col_keep, col_trace) = decompose(col);
                if row_trace == col_trace {
                    out[(row_keep, col_keep)] += self.entries[(row, col)];
                }
            }
        }
        DensityMatrix::new(kept_dims, out)
    }

    /// Trace distance `Tr|rho - sigma| / 2`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.total_dim() != other.total_dim() {
            return Err(Error::DimensionMismatch {
                context: "trace distance".into(),
                expected: self.total_dim(),
                actual: other.total_dim(),
            });
        }
        let diff = &self.entries - &other.entries;
        let eig = hermitian_eigen(&diff)?;
        Ok(eig.values.iter().map(|v| v.abs()).sum::<f64>() / 2.0)
    }

    /// Eigenvector of the largest eigenvalue, with the gap to the next one.
    pub fn dominant_eigenvector(&self) -> Result<(f64, Ket, f64)> {
        let eig = hermitian_eigen(&self.entries)?;
        let n = self.total_dim();
        let top = eig.values[n - 1];
        let gap = if n > 1 { top - eig.values[n - 2] } else { top };
        let amps: Vec<Complex64> = (0..n).map(|i| eig.vectors[(i, n - 1)]).collect();
        let ket = Ket::new(self.dims.clone(), amps)?;
        Ok((top, ket, gap))
    }
}

/// Accumulates unnormalized projector sums, then closes into a density matrix.
#[derive(Clone, Debug)]
pub struct ProjectorAccumulator {
    dims: Vec<usize>,
    entries: Array2<Complex64>,
    weight: f64,
}

impl ProjectorAccumulator {
    pub fn new(dims: Vec<usize>) -> Self {
        let total: usize = dims.iter().product();
        Self {
            dims,
            entries: Array2::from_elem((total, total), Complex64::ZERO),
            weight: 0.0,
        }
    }

    /// Add `|ket><ket|` at the ket's own (possibly sub-unit) weight.
    pub fn add_ket(&mut self, ket: &Ket) {
        debug_assert_eq!(ket.dims(), &self.dims[..]);
        let n = ket.total_dim();
        for i in 0..n {
            let ai = ket.amplitude(i);
            if ai == Complex64::ZERO {
                continue;
            }
            for j in 0..n {
                self.entries[(i, j)] += ai * ket.amplitude(j).conj();
            }
        }
        self.weight += ket.norm_sqr();
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Normalize by the accumulated weight and validate.
    pub fn into_density(self) -> Result<DensityMatrix> {
        if self.weight <= 0.0 {
            return Err(Error::InvalidDensity {
                reason: "no weight accumulated".into(),
            });
        }
        let scale = Complex64::new(1.0 / self.weight, 0.0);
        DensityMatrix::new(self.dims, self.entries.mapv(|z| z * scale))
    }
}
