use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::STRICT_TOL;

/// A pure state over a tensor product of finite subsystems.
///
/// `dims` lists the subsystem dimensions in tensor order; `amplitudes` is the
/// dense coefficient vector of length `dims.iter().product()`, indexed
/// row-major (the last subsystem varies fastest). Kets are not forced to unit
/// norm — branch bookkeeping folds amplitudes into the norm — so callers that
/// need a normalized state must check or call [`Ket::normalized`] explicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    dims: Vec<usize>,
    amplitudes: Array1<Complex64>,
}

impl Ket {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidParameter(
                "ket needs at least one subsystem of dimension >= 1".into(),
            ));
        }
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "ket amplitudes".into(),
                expected,
                actual: amplitudes.len(),
            });
        }
        Ok(Self {
            dims,
            amplitudes: Array1::from_vec(amplitudes),
        })
    }

    /// Computational basis state `|index>` of a single `dim`-level subsystem.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("basis ket of dimension 0".into()));
        }
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[index] = Complex64::ONE;
        Self::new(vec![dim], amplitudes)
    }

    /// `(|0> + |1>)/sqrt(2)` — the ready state of the control qubit.
    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(vec![2], vec![h, h]).expect("static qubit state")
    }

    /// `(|0> - |1>)/sqrt(2)`.
    pub fn minus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(vec![2], vec![h, -h]).expect("static qubit state")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= STRICT_TOL
    }

    pub fn assert_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > STRICT_TOL {
            return Err(Error::NotNormalized {
                norm_sqr,
                tol: STRICT_TOL,
            });
        }
        Ok(())
    }

    /// Unit-norm copy. Normalization is always this deliberate call, never a
    /// side effect of another operation.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("cannot normalize the zero ket".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            dims: self.dims.clone(),
            amplitudes: self.amplitudes.mapv(|a| a * factor),
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.total_dim() != other.total_dim() {
            return Err(Error::DimensionMismatch {
                context: "inner product".into(),
                expected: self.total_dim(),
                actual: other.total_dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Coherent sum of two kets over identical subsystem structure.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                context: "ket sum".into(),
                expected: self.total_dim(),
                actual: other.total_dim(),
            });
        }
        Ok(Self {
            dims: self.dims.clone(),
            amplitudes: &self.amplitudes + &other.amplitudes,
        })
    }

    /// Kronecker product; `dims` concatenate, norms multiply.
    pub fn tensor(&self, other: &Self) -> Self {
        let n = other.total_dim();
        let mut amplitudes = Vec::with_capacity(self.total_dim() * n);
        for a in self.amplitudes.iter() {
            for b in other.amplitudes.iter() {
                amplitudes.push(a * b);
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            amplitudes: Array1::from_vec(amplitudes),
        }
    }

    /// Squared overlap `|<self|other>|^2 / (|self|^2 |other|^2)`: 1 means equal
    /// up to a global phase.
    pub fn overlap_sqr(&self, other: &Self) -> Result<f64> {
        let ip = self.inner(other)?;
        Ok(ip.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_tensor_basis() {
        let zero = Ket::basis(2, 0).unwrap();
        let out = zero.tensor(&zero);
        assert_eq!(out.dims(), &[2, 2]);
        let expect = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        for (a, e) in out.amplitudes().iter().zip(expect.iter()) {
            assert!((a - e).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_norm_multiplies() {
        let plus = Ket::plus();
        let phi = Ket::new(vec![2], vec![c(0.3, 0.1), c(-0.2, 0.7)]).unwrap();
        let out = plus.tensor(&phi);
        assert!((out.norm_sqr() - phi.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn hadamard_zero_tensor_one() {
        // H|0> (x) |1> = (0, 1/sqrt2, 0, 1/sqrt2), frozen from a hand Kronecker.
        let h0 = Ket::new(
            vec![2],
            vec![
                c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        let one = Ket::basis(2, 1).unwrap();
        let out = h0.tensor(&one);
        let expect = [
            c(0.0, 0.0),
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(0.0, 0.0),
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ];
        for (a, e) in out.amplitudes().iter().zip(expect.iter()) {
            assert!((a - e).norm() < 1e-12);
        }
    }

    #[test]
    fn normalization_is_checked_not_enforced() {
        let k = Ket::new(vec![2], vec![c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(!k.is_normalized());
        assert!(k.assert_normalized().is_err());
        let n = k.normalized().unwrap();
        assert!(n.is_normalized());
    }

    #[test]
    fn rejects_length_mismatch() {
        let err = Ket::new(vec![2, 2], vec![c(1.0, 0.0); 3]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
