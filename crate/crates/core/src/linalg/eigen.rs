use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigendecomposition of a Hermitian matrix: `matrix = V diag(values) V^dag`.
///
/// Eigenvalues are sorted ascending; `vectors` holds the matching
/// orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Array2<Complex64>,
}

const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi diagonalization for complex Hermitian matrices.
///
/// Plenty for the register sizes used here (a few dozen dimensions); each
/// rotation annihilates one off-diagonal pair and convergence is quadratic.
pub fn hermitian_eigen(matrix: &Array2<Complex64>) -> Result<HermitianEigen> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "hermitian eigendecomposition".into(),
            expected: n,
            actual: matrix.ncols(),
        });
    }

    let scale: f64 = matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut v = Array2::from_diag_elem(n, Complex64::ONE);
    if scale == 0.0 {
        return Ok(HermitianEigen {
            values: vec![0.0; n],
            vectors: v,
        });
    }

    // Inputs assembled in floating point are Hermitian only up to rounding;
    // fold the asymmetric noise away so rotations can actually finish.
    let mut a = matrix.clone();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let mean = (a[(i, j)] + a[(j, i)].conj()) / 2.0;
            a[(i, j)] = mean;
            a[(j, i)] = mean.conj();
        }
    }

    // Rotations cannot push the off-diagonal mass below the rounding floor.
    let floor = f64::EPSILON * scale * (n as f64);
    let stop = floor * floor;

    let mut sweeps = 0;
    loop {
        let off: f64 = off_diagonal_sqr(&a);
        if off <= stop {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::EigenNoConvergence {
                sweeps,
                off: off.sqrt(),
            });
        }
        sweeps += 1;

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= floor * 1e-2 {
                    // Hard-zero noise-level elements instead of chasing them.
                    a[(p, q)] = Complex64::ZERO;
                    a[(q, p)] = Complex64::ZERO;
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Columns p,q of A and V pick up the rotation
                // G = [[c, s*phase], [-s*conj(phase), c]].
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = phase * s;
                let g_qp = -phase.conj() * s;
                let g_qq = Complex64::new(c, 0.0);

                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * g_pp + aiq * g_qp;
                    a[(i, q)] = aip * g_pq + aiq * g_qq;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = g_pp.conj() * apj + g_qp.conj() * aqj;
                    a[(q, j)] = g_pq.conj() * apj + g_qq.conj() * aqj;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * g_pp + viq * g_qp;
                    v[(i, q)] = vip * g_pq + viq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let raw: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| raw[i].partial_cmp(&raw[j]).expect("finite eigenvalues"));

    let values: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let mut vectors = Array2::from_elem((n, n), Complex64::ZERO);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_col)] = v[(i, old_col)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Slightly negative eigenvalues from rounding are clamped to zero.
pub fn matrix_sqrt(matrix: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let eig = hermitian_eigen(matrix)?;
    let n = matrix.nrows();
    let mut scaled = eig.vectors.clone();
    for (j, &value) in eig.values.iter().enumerate() {
        let root = if value > 0.0 { value.sqrt() } else { 0.0 };
        for i in 0..n {
            scaled[(i, j)] *= root;
        }
    }
    let vdag = eig.vectors.t().mapv(|z| z.conj());
    Ok(scaled.dot(&vdag))
}

fn off_diagonal_sqr(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc
}
