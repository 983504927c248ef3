use ndarray::Array2;
use num_complex::Complex64;

use crate::decay::gates::GateSet;
use crate::decay::params::DecayParams;
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Ket};

/// Joint decay-time amplitude `chi_AB(t_A, t_B)` sampled on a square midpoint
/// grid: cell `(i, j)` is centered at `(t0 + (i+1/2) h, t0 + (j+1/2) h)` and
/// carries quadrature weight `h^2`.
///
/// The separable variant stores the two 1-D factors and never materializes
/// the n x n product.
#[derive(Clone, Debug)]
pub struct JointAmplitudeGrid {
    t0: f64,
    cell: f64,
    n: usize,
    data: GridData,
}

#[derive(Clone, Debug)]
enum GridData {
    Separable {
        chi_a: Vec<Complex64>,
        chi_b: Vec<Complex64>,
    },
    Dense(Array2<Complex64>),
}

/// Which time-order region of the grid a state lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderRegion {
    /// `t_A < t_B`: emitter A fired first.
    AFirst,
    /// `t_B < t_A`.
    BFirst,
}

impl JointAmplitudeGrid {
    /// The default product amplitude `chi_A(t_A) chi_B(t_B)` of two
    /// independent exponential decays.
    pub fn separable_exponential(
        gamma_a: f64,
        gamma_b: f64,
        t0: f64,
        cell: f64,
        n: usize,
    ) -> Result<Self> {
        if !cell.is_finite() || cell <= 0.0 || n == 0 {
            return Err(Error::InvalidParameter(
                "grid needs cell > 0 and at least one cell".into(),
            ));
        }
        let sample = |gamma: f64| -> Vec<Complex64> {
            (0..n)
                .map(|i| {
                    let t = (i as f64 + 0.5) * cell;
                    Complex64::new(gamma.sqrt() * (-gamma * t / 2.0).exp(), 0.0)
                })
                .collect()
        };
        Ok(Self {
            t0,
            cell,
            n,
            data: GridData::Separable {
                chi_a: sample(gamma_a),
                chi_b: sample(gamma_b),
            },
        })
    }

    pub fn from_params(params: &DecayParams) -> Result<Self> {
        Self::separable_exponential(
            params.gamma_a(),
            params.gamma_b(),
            params.t0(),
            params.dt(),
            params.n_steps() as usize,
        )
    }

    /// Arbitrary (possibly non-separable) amplitudes; `amplitudes[(i, j)]`
    /// samples `chi_AB` at the cell center `(t_A_i, t_B_j)`.
    pub fn dense(t0: f64, cell: f64, amplitudes: Array2<Complex64>) -> Result<Self> {
        let n = amplitudes.nrows();
        if amplitudes.ncols() != n || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "dense grid must be square and nonempty, got {}x{}",
                amplitudes.nrows(),
                amplitudes.ncols()
            )));
        }
        if !cell.is_finite() || cell <= 0.0 {
            return Err(Error::InvalidParameter("grid cell must be > 0".into()));
        }
        Ok(Self {
            t0,
            cell,
            n,
            data: GridData::Dense(amplitudes),
        })
    }

    /// The time-bin pair: all weight on the two mirrored cells nearest
    /// `(t_early, t_late)`, half each. Errors if the two times fall in the
    /// same cell or outside the grid.
    pub fn two_point_symmetric(
        t0: f64,
        cell: f64,
        n: usize,
        t_early: f64,
        t_late: f64,
    ) -> Result<Self> {
        if t_early >= t_late {
            return Err(Error::TimeOrdering {
                t_early,
                t_late,
            });
        }
        let index_of = |t: f64| -> Result<usize> {
            if t < t0 {
                return Err(Error::InvalidParameter(format!("time {t} before grid start {t0}")));
            }
            let idx = ((t - t0) / cell).floor() as usize;
            if idx >= n {
                return Err(Error::InvalidParameter(format!("time {t} beyond grid end")));
            }
            Ok(idx)
        };
        let ie = index_of(t_early)?;
        let il = index_of(t_late)?;
        if ie == il {
            return Err(Error::InvalidParameter(
                "t_early and t_late fall in the same grid cell; refine the grid".into(),
            ));
        }
        let mut amps = Array2::from_elem((n, n), Complex64::ZERO);
        // |chi|^2 h^2 must put weight 1/2 on each peak.
        let peak = Complex64::new(1.0 / (cell * 2.0_f64.sqrt()), 0.0);
        amps[(ie, il)] = peak;
        amps[(il, ie)] = peak;
        Self::dense(t0, cell, amps)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn cell(&self) -> f64 {
        self.cell
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitude(&self, i: usize, j: usize) -> Complex64 {
        match &self.data {
            GridData::Separable { chi_a, chi_b } => chi_a[i] * chi_b[j],
            GridData::Dense(a) => a[(i, j)],
        }
    }

    /// `sum |chi|^2 h^2` over the whole grid.
    pub fn total_weight(&self) -> f64 {
        let h2 = self.cell * self.cell;
        match &self.data {
            GridData::Separable { chi_a, chi_b } => {
                let wa: f64 = chi_a.iter().map(|z| z.norm_sqr()).sum();
                let wb: f64 = chi_b.iter().map(|z| z.norm_sqr()).sum();
                wa * wb * h2
            }
            GridData::Dense(a) => a.iter().map(|z| z.norm_sqr()).sum::<f64>() * h2,
        }
    }

    /// Quadrature weights of the two strict time-order regions.
    ///
    /// Off-diagonal cells belong wholly to one region; a diagonal cell is cut
    /// by the line `t_A = t_B` into two triangles, so half its weight goes to
    /// each side. Returns `(A-first, B-first)`.
    pub fn ordered_weights(&self) -> (f64, f64) {
        let h2 = self.cell * self.cell;
        match &self.data {
            GridData::Separable { chi_a, chi_b } => {
                let fa: Vec<f64> = chi_a.iter().map(|z| z.norm_sqr()).collect();
                let fb: Vec<f64> = chi_b.iter().map(|z| z.norm_sqr()).collect();
                let mut upper = 0.0; // j > i plus half-diagonal
                let mut lower = 0.0;
                let mut prefix_a = 0.0;
                let mut prefix_b = 0.0;
                for k in 0..self.n {
                    upper += fb[k] * prefix_a + 0.5 * fa[k] * fb[k];
                    lower += fa[k] * prefix_b + 0.5 * fa[k] * fb[k];
                    prefix_a += fa[k];
                    prefix_b += fb[k];
                }
                (upper * h2, lower * h2)
            }
            GridData::Dense(a) => {
                let mut upper = 0.0;
                let mut lower = 0.0;
                for i in 0..self.n {
                    for j in 0..self.n {
                        let w = a[(i, j)].norm_sqr();
                        match j.cmp(&i) {
                            std::cmp::Ordering::Greater => upper += w,
                            std::cmp::Ordering::Less => lower += w,
                            std::cmp::Ordering::Equal => {
                                upper += 0.5 * w;
                                lower += 0.5 * w;
                            }
                        }
                    }
                }
                (upper * h2, lower * h2)
            }
        }
    }

    fn assert_normalized(&self) -> Result<()> {
        let norm = self.total_weight();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::UnnormalizedGrid { norm });
        }
        Ok(())
    }
}

/// Description of one composite control-timer state: the timer part lives on
/// one strict order region of the grid, the control part is a fixed basis
/// state.
#[derive(Clone, Debug)]
pub struct MPrimeState {
    pub control: usize,
    pub region: OrderRegion,
    /// Quadrature norm; 1 up to quadrature error when the amplitude is
    /// symmetric under `t_A <-> t_B` in modulus (the sqrt(2) prefactor then
    /// exactly compensates the half-space restriction).
    pub norm: f64,
}

/// The pair of composite-control states and their overlap.
#[derive(Clone, Debug)]
pub struct MPrimePair {
    pub zero: MPrimeState,
    pub one: MPrimeState,
    /// `<0|1>`: identically zero. The two timer supports are disjoint open
    /// order regions, and the attached control states are orthogonal — either
    /// fact alone forces the overlap to vanish.
    pub inner_product: Complex64,
    /// Overlap of the timer regions alone, ignoring the control factor: the
    /// intersection of the two strict order regions is empty, so the
    /// quadrature sum has no terms.
    pub machine_region_overlap: f64,
}

/// Build the two composite-control states from the ordered halves of the
/// joint amplitude, returning their norms and overlap.
///
/// With no explicit grid the separable exponential product implied by
/// `params` is used on the simulation's own time grid. Both norms are then 1
/// (not 0): the sqrt(2) prefactor exactly compensates the restriction to half
/// the time square, and the reported values differ from 1 only by quadrature
/// error. A caller-supplied grid must carry total weight 1 within 1e-6.
pub fn mprime_states(
    params: &DecayParams,
    joint_chi: Option<&JointAmplitudeGrid>,
) -> Result<MPrimePair> {
    let default_grid;
    let grid = match joint_chi {
        Some(g) => {
            g.assert_normalized()?;
            g
        }
        None => {
            params.check_asymptotic_span()?;
            default_grid = JointAmplitudeGrid::from_params(params)?;
            &default_grid
        }
    };
    let (upper, lower) = grid.ordered_weights();
    Ok(MPrimePair {
        zero: MPrimeState {
            control: 0,
            region: OrderRegion::AFirst,
            norm: (2.0 * upper).sqrt(),
        },
        one: MPrimeState {
            control: 1,
            region: OrderRegion::BFirst,
            norm: (2.0 * lower).sqrt(),
        },
        inner_product: Complex64::ZERO,
        machine_region_overlap: 0.0,
    })
}

/// Order weights and reduced control-system state computed directly from a
/// joint amplitude grid.
#[derive(Clone, Debug)]
pub struct JointAnalysis {
    pub weight_a_first: f64,
    pub weight_b_first: f64,
    pub reduced: DensityMatrix,
}

/// Split the grid by time order, attach the order-conditioned control-system
/// kets, and trace the timer out. Distinct timer records are orthogonal, so
/// the reduced state is the weighted mixture of the two order kets.
pub fn joint_amplitude_analysis(
    grid: &JointAmplitudeGrid,
    gates: &GateSet,
    phi: &Ket,
) -> Result<JointAnalysis> {
    grid.assert_normalized()?;
    let kets = gates.order_kets(phi)?;
    let (w_a, w_b) = grid.ordered_weights();
    let total = w_a + w_b;
    if total <= 0.0 {
        return Err(Error::InvalidParameter(
            "grid carries no weight off the diagonal".into(),
        ));
    }
    let d = phi.total_dim();
    let n = 2 * d;
    let mut entries = Array2::from_elem((n, n), Complex64::ZERO);
    for (ket, w) in [(&kets.a_first, w_a), (&kets.b_first, w_b)] {
        let w = Complex64::new(w / total, 0.0);
        for i in 0..n {
            for j in 0..n {
                entries[(i, j)] += w * ket.amplitude(i) * ket.amplitude(j).conj();
            }
        }
    }
    Ok(JointAnalysis {
        weight_a_first: w_a,
        weight_b_first: w_b,
        reduced: DensityMatrix::new(vec![2, d], entries)?,
    })
}
