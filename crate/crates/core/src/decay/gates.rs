use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hadamard, pauli_z, Ket, Operator};

/// The triggered gate pairs: emitter A fires `u_a` on the system together
/// with `v_a` on the control, emitter B fires `u_b` with `v_b`.
///
/// The defaults `v_a = H`, `v_b = Z` steer the control from `|+>` to `|0>`
/// along the A-then-B history and to `|1>` along B-then-A, which is what
/// makes the control qubit an order flag.
#[derive(Clone, Debug)]
pub struct GateSet {
    u_a: Operator,
    u_b: Operator,
    v_a: Operator,
    v_b: Operator,
}

impl GateSet {
    pub fn new(u_a: Operator, u_b: Operator) -> Result<Self> {
        Self::with_control_gates(u_a, u_b, hadamard(), pauli_z())
    }

    pub fn with_control_gates(
        u_a: Operator,
        u_b: Operator,
        v_a: Operator,
        v_b: Operator,
    ) -> Result<Self> {
        if u_a.dim_in() != u_b.dim_in() {
            return Err(Error::DimensionMismatch {
                context: "system gates".into(),
                expected: u_a.dim_in(),
                actual: u_b.dim_in(),
            });
        }
        for (name, op, dim) in [
            ("u_a", &u_a, u_a.dim_in()),
            ("u_b", &u_b, u_b.dim_in()),
            ("v_a", &v_a, 2),
            ("v_b", &v_b, 2),
        ] {
            if op.dim_in() != dim || op.dim_out() != dim {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be square of dimension {dim}"
                )));
            }
            op.assert_unitary()?;
        }
        Ok(Self { u_a, u_b, v_a, v_b })
    }

    pub fn system_dim(&self) -> usize {
        self.u_a.dim_in()
    }

    pub fn u_a(&self) -> &Operator {
        &self.u_a
    }

    pub fn u_b(&self) -> &Operator {
        &self.u_b
    }

    pub fn v_a(&self) -> &Operator {
        &self.v_a
    }

    pub fn v_b(&self) -> &Operator {
        &self.v_b
    }

    /// Apply the A trigger `v_a (x) u_a` to raw control-system amplitudes.
    pub(crate) fn apply_a_raw(&self, amps: &[Complex64]) -> Vec<Complex64> {
        apply_joint(self.v_a.entries(), self.u_a.entries(), amps)
    }

    /// Apply the B trigger `v_b (x) u_b` to raw control-system amplitudes.
    pub(crate) fn apply_b_raw(&self, amps: &[Complex64]) -> Vec<Complex64> {
        apply_joint(self.v_b.entries(), self.u_b.entries(), amps)
    }

    /// The control-system kets reached by each decay history, starting from
    /// the ready state `|+> (x) phi`. All histories in the same class share
    /// their ket because free evolution is the identity.
    pub fn order_kets(&self, phi: &Ket) -> Result<OrderKets> {
        if phi.total_dim() != self.system_dim() {
            return Err(Error::DimensionMismatch {
                context: "initial system state".into(),
                expected: self.system_dim(),
                actual: phi.total_dim(),
            });
        }
        phi.assert_normalized()?;
        let d = self.system_dim();
        let ready = Ket::plus().tensor(phi);
        let raw = |v: &[Complex64]| Ket::new(vec![2, d], v.to_vec());
        let ready_raw: Vec<Complex64> = ready.amplitudes().to_vec();
        let a_only = self.apply_a_raw(&ready_raw);
        let b_only = self.apply_b_raw(&ready_raw);
        let a_first = self.apply_b_raw(&a_only);
        let b_first = self.apply_a_raw(&b_only);
        Ok(OrderKets {
            undecayed: ready,
            a_only: raw(&a_only)?,
            b_only: raw(&b_only)?,
            a_first: raw(&a_first)?,
            b_first: raw(&b_first)?,
        })
    }
}

/// Control-system kets per decay-history class.
#[derive(Clone, Debug)]
pub struct OrderKets {
    pub undecayed: Ket,
    pub a_only: Ket,
    pub b_only: Ket,
    /// A decayed first, then B: control steered to `V_B V_A |+>`, system to
    /// `U_B U_A |phi>`.
    pub a_first: Ket,
    /// B decayed first, then A.
    pub b_first: Ket,
}

/// `(ctrl (x) sys) |amps>` on a `[2, d]` register stored row-major.
pub(crate) fn apply_joint(
    ctrl: &Array2<Complex64>,
    sys: &Array2<Complex64>,
    amps: &[Complex64],
) -> Vec<Complex64> {
    let d = sys.nrows();
    debug_assert_eq!(amps.len(), 2 * d);
    let mut mid = vec![Complex64::ZERO; 2 * d];
    // System gate on each control block.
    for c in 0..2 {
        for i in 0..d {
            let mut acc = Complex64::ZERO;
            for j in 0..d {
                acc += sys[(i, j)] * amps[c * d + j];
            }
            mid[c * d + i] = acc;
        }
    }
    // Control gate across blocks.
    let mut out = vec![Complex64::ZERO; 2 * d];
    for s in 0..d {
        for c in 0..2 {
            let mut acc = Complex64::ZERO;
            for c2 in 0..2 {
                acc += ctrl[(c, c2)] * mid[c2 * d + s];
            }
            out[c * d + s] = acc;
        }
    }
    out
}
