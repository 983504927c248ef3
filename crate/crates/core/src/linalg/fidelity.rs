use crate::error::{Error, Result};
use crate::linalg::eigen::{hermitian_eigen, matrix_sqrt};
use crate::linalg::{DensityMatrix, Ket};

/// Pure or mixed state, for operations accepting either.
#[derive(Clone, Debug)]
pub enum State {
    Pure(Ket),
    Mixed(DensityMatrix),
}

impl State {
    pub fn total_dim(&self) -> usize {
        match self {
            State::Pure(k) => k.total_dim(),
            State::Mixed(r) => r.total_dim(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        match self {
            State::Pure(k) => k.dims(),
            State::Mixed(r) => r.dims(),
        }
    }
}

impl From<Ket> for State {
    fn from(k: Ket) -> Self {
        State::Pure(k)
    }
}

impl From<DensityMatrix> for State {
    fn from(r: DensityMatrix) -> Self {
        State::Mixed(r)
    }
}

/// `|<a|b>|^2` for normalized kets.
pub fn fidelity_kets(a: &Ket, b: &Ket) -> Result<f64> {
    a.assert_normalized()?;
    b.assert_normalized()?;
    Ok(a.inner(b)?.norm_sqr())
}

/// `<psi| rho |psi>` — fidelity between a pure and a mixed state.
pub fn fidelity_ket_density(psi: &Ket, rho: &DensityMatrix) -> Result<f64> {
    psi.assert_normalized()?;
    rho.expectation(psi)
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
fn fidelity_densities(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.total_dim() != sigma.total_dim() {
        return Err(Error::DimensionMismatch {
            context: "fidelity".into(),
            expected: rho.total_dim(),
            actual: sigma.total_dim(),
        });
    }
    let root = matrix_sqrt(rho.entries())?;
    let inner = root.dot(sigma.entries()).dot(&root);
    let eig = hermitian_eigen(&inner)?;
    let trace_root: f64 = eig.values.iter().map(|&v| if v > 0.0 { v.sqrt() } else { 0.0 }).sum();
    Ok((trace_root * trace_root).clamp(0.0, 1.0))
}

/// Fidelity between any two states, in `[0, 1]`, symmetric in its arguments.
/// Pure-pure reduces to the squared overlap.
pub fn fidelity(a: &State, b: &State) -> Result<f64> {
    if a.total_dim() != b.total_dim() {
        return Err(Error::DimensionMismatch {
            context: "fidelity".into(),
            expected: a.total_dim(),
            actual: b.total_dim(),
        });
    }
    match (a, b) {
        (State::Pure(x), State::Pure(y)) => fidelity_kets(x, y),
        (State::Pure(x), State::Mixed(y)) => fidelity_ket_density(x, y),
        (State::Mixed(x), State::Pure(y)) => fidelity_ket_density(y, x),
        (State::Mixed(x), State::Mixed(y)) => fidelity_densities(x, y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fidelity_with_self_is_one() {
        let rho = DensityMatrix::new(
            vec![2],
            Array2::from_shape_vec(
                (2, 2),
                vec![c(0.5, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.5, 0.0)],
            )
            .unwrap(),
        )
        .unwrap();
        let f = fidelity(&rho.clone().into(), &rho.into()).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn orthogonal_kets_have_zero_fidelity() {
        let f = fidelity_kets(&Ket::basis(2, 0).unwrap(), &Ket::basis(2, 1).unwrap()).unwrap();
        assert!(f.abs() < 1e-14);
    }

    #[test]
    fn plus_zero_half() {
        let f = fidelity_kets(&Ket::plus(), &Ket::basis(2, 0).unwrap()).unwrap();
        assert!((f - 0.5).abs() < 1e-14);
    }

    #[test]
    fn commuting_mixed_states_match_classical_formula() {
        // diag(3/4, 1/4) vs diag(1/4, 3/4): (2 sqrt(3)/4)^2 = 3/4.
        let a = DensityMatrix::new(
            vec![2],
            Array2::from_shape_vec((2, 2), vec![c(0.75, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.25, 0.0)])
                .unwrap(),
        )
        .unwrap();
        let b = DensityMatrix::new(
            vec![2],
            Array2::from_shape_vec((2, 2), vec![c(0.25, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.75, 0.0)])
                .unwrap(),
        )
        .unwrap();
        let f = fidelity(&a.clone().into(), &b.clone().into()).unwrap();
        assert!((f - 0.75).abs() < 1e-10);
        let g = fidelity(&b.into(), &a.into()).unwrap();
        assert!((f - g).abs() < 1e-12);
    }

    #[test]
    fn mixed_vs_pure_matches_expectation() {
        let mixed = DensityMatrix::new(
            vec![2],
            Array2::from_shape_vec((2, 2), vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)])
                .unwrap(),
        )
        .unwrap();
        let pure = Ket::basis(2, 0).unwrap();
        let f1 = fidelity(&pure.clone().into(), &mixed.clone().into()).unwrap();
        let f2 = fidelity(&mixed.into(), &pure.into()).unwrap();
        assert!((f1 - 0.5).abs() < 1e-12);
        assert!((f1 - f2).abs() < 1e-12);
    }
}
