//! Ground-truth quantum SWITCH construction and certification.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{fidelity, Ket, Operator, State};

/// The ideal SWITCH state `(|0> U_B U_A + |1> U_A U_B)|phi> / sqrt(2)` over
/// `[control, system]`. Normalized automatically for unitary inputs.
pub fn ideal_switch(u_a: &Operator, u_b: &Operator, phi: &Ket) -> Result<Ket> {
    if u_a.dim_in() != phi.total_dim() || u_b.dim_in() != phi.total_dim() {
        return Err(Error::DimensionMismatch {
            context: "switch unitaries vs state".into(),
            expected: phi.total_dim(),
            actual: u_a.dim_in().max(u_b.dim_in()),
        });
    }
    phi.assert_normalized()?;
    let ab = u_b.compose(u_a)?.apply(phi)?; // U_B U_A |phi>
    let ba = u_a.compose(u_b)?.apply(phi)?; // U_A U_B |phi>
    let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zero = Ket::basis(2, 0)?;
    let one = Ket::basis(2, 1)?;
    zero.tensor(&ab).add(&one.tensor(&ba)).map(|k| k.scaled(half))
}

/// Outcome probabilities of measuring the ideal switch's control in the
/// `|+/->` basis: `p_pm = ||(U_B U_A pm U_A U_B)|phi>||^2 / 4`. The minus
/// outcome witnesses non-commutativity on `|phi>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutationStats {
    pub p_plus: f64,
    pub p_minus: f64,
}

pub fn commutation_task(u_a: &Operator, u_b: &Operator, phi: &Ket) -> Result<CommutationStats> {
    if u_a.dim_in() != phi.total_dim() || u_b.dim_in() != phi.total_dim() {
        return Err(Error::DimensionMismatch {
            context: "commutation task".into(),
            expected: phi.total_dim(),
            actual: u_a.dim_in().max(u_b.dim_in()),
        });
    }
    phi.assert_normalized()?;
    let ab = u_b.compose(u_a)?.apply(phi)?;
    let ba = u_a.compose(u_b)?.apply(phi)?;
    let plus = ab.add(&ba)?;
    let minus = ab.add(&ba.scaled(Complex64::new(-1.0, 0.0)))?;
    Ok(CommutationStats {
        p_plus: plus.norm_sqr() / 4.0,
        p_minus: minus.norm_sqr() / 4.0,
    })
}

/// A certification record: the ideal target, what was achieved, their
/// fidelity, and the achieved state's control statistics in the `|+/->`
/// basis.
#[derive(Clone, Debug)]
pub struct SwitchResult {
    pub ideal: Ket,
    pub achieved: State,
    pub fidelity: f64,
    pub control_outcome_probs: (f64, f64),
}

/// Probabilities of finding the control (first factor) of a `[2, d]` state in
/// `|+>` and `|->`.
pub fn control_plus_minus_probs(state: &State) -> Result<(f64, f64)> {
    let dims = state.dims();
    if dims.len() != 2 || dims[0] != 2 {
        return Err(Error::InvalidSubsystems {
            reason: format!("expected a [2, d] control-system state, got {dims:?}"),
        });
    }
    let d = dims[1];
    match state {
        State::Pure(ket) => {
            let mut p_plus = 0.0;
            let mut p_minus = 0.0;
            for s in 0..d {
                let a0 = ket.amplitude(s);
                let a1 = ket.amplitude(d + s);
                p_plus += (a0 + a1).norm_sqr() / 2.0;
                p_minus += (a0 - a1).norm_sqr() / 2.0;
            }
            Ok((p_plus, p_minus))
        }
        State::Mixed(rho) => {
            let e = rho.entries();
            let mut p_plus = 0.0;
            for s in 0..d {
                // <+,s| rho |+,s> summed over s.
                p_plus += 0.5
                    * (e[(s, s)].re
                        + e[(d + s, d + s)].re
                        + 2.0 * e[(s, d + s)].re);
            }
            let p_minus = 1.0 - p_plus;
            Ok((p_plus, p_minus))
        }
    }
}

/// Bind a simulated state to the ideal switch for the same gates and input.
pub fn compare(achieved: State, u_a: &Operator, u_b: &Operator, phi: &Ket) -> Result<SwitchResult> {
    let ideal = ideal_switch(u_a, u_b, phi)?;
    let fid = fidelity(&State::Pure(ideal.clone()), &achieved)?;
    let probs = control_plus_minus_probs(&achieved)?;
    Ok(SwitchResult {
        ideal,
        achieved,
        fidelity: fid,
        control_outcome_probs: probs,
    })
}
