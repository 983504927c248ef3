//! The two physical routes from superposed decay times to the quantum SWITCH:
//! time-bin entangled photon pairs, and identical decaying emitters whose
//! timer is made order-blind.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::decay::{
    AggregateState, BranchState, DecayParams, GateSet, JointAmplitudeGrid, OrderProbabilities,
    RecordMode, ReducedScState, DEFAULT_INCOMPLETE_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::linalg::{fidelity_kets, Ket};
use crate::switch::ideal_switch;

/// Configuration of the time-bin photon construction.
#[derive(Clone, Debug)]
pub struct TimeBinConfig {
    pub t_early: f64,
    pub t_late: f64,
    pub gates: GateSet,
    pub phi: Ket,
}

impl TimeBinConfig {
    pub fn new(t_early: f64, t_late: f64, gates: GateSet, phi: Ket) -> Result<Self> {
        if !t_early.is_finite() || !t_late.is_finite() || t_early >= t_late {
            return Err(Error::TimeOrdering { t_early, t_late });
        }
        Ok(Self {
            t_early,
            t_late,
            gates,
            phi,
        })
    }
}

/// The state produced by a time-bin entangled pair, over `[machine, system]`.
///
/// The joint decay-time amplitude is the symmetric two-peak distribution: A
/// early and B late, or B early and A late, with equal weight. Integrating
/// each ordered half against its trigger history leaves a two-valued machine
/// register (which photon came early) entangled with the operation order:
/// exactly the SWITCH with the machine playing the control.
pub fn time_bin_state(cfg: &TimeBinConfig) -> Result<Ket> {
    let span = cfg.t_late - cfg.t_early;
    let t0 = cfg.t_early - span;
    let cell = span / 8.0;
    let n = 24;
    let grid =
        JointAmplitudeGrid::two_point_symmetric(t0, cell, n, cfg.t_early, cfg.t_late)?;
    let (w_early_a, w_early_b) = grid.ordered_weights();

    cfg.phi.assert_normalized()?;
    let ab = cfg.gates.u_b().compose(cfg.gates.u_a())?.apply(&cfg.phi)?;
    let ba = cfg.gates.u_a().compose(cfg.gates.u_b())?.apply(&cfg.phi)?;
    // Amplitudes sqrt(2 w) / sqrt(2) = sqrt(w) on each machine branch.
    let zero = Ket::basis(2, 0)?.tensor(&ab).scaled(w_early_a.sqrt().into());
    let one = Ket::basis(2, 1)?.tensor(&ba).scaled(w_early_b.sqrt().into());
    let state = zero.add(&one)?;
    state.assert_normalized()?;
    Ok(state)
}

/// Erase the arrival order from the timer: every complete record `(k, l)` is
/// replaced by the canonical unordered pair, and branches that collapse onto
/// the same record merge coherently. Total norm is preserved because the
/// merged components carry orthogonal control states.
pub fn symmetrize_timer(state: &BranchState) -> BranchState {
    let mut merged: BTreeMap<_, Vec<Complex64>> = BTreeMap::new();
    for (record, amps) in state.iter_branches() {
        let target = record.symmetrized();
        match merged.get_mut(&target) {
            Some(existing) => {
                for (e, a) in existing.iter_mut().zip(amps.iter()) {
                    *e += a;
                }
            }
            None => {
                merged.insert(target, amps.to_vec());
            }
        }
    }
    state.replace_branches(merged)
}

/// Result of recovering the SWITCH from two equal-rate decaying emitters.
#[derive(Clone, Debug)]
pub struct DecaySwitchOutcome {
    /// The extracted pure control-system ket.
    pub sc_state: Ket,
    pub fidelity_to_ideal: f64,
    /// Incomplete-decay weight that was discarded before reduction.
    pub truncation_weight: f64,
    /// Weight lost to dropped simultaneous double decays.
    pub dropped_weight: f64,
    /// Largest eigenvalue of the reduced state; 1 up to truncation.
    pub dominant_eigenvalue: f64,
}

const EIGENVALUE_GAP_LIMIT: f64 = 1e-9;

/// Evolve, symmetrize the timer, discard the machine, and certify the
/// remaining pure control-system state against the ideal SWITCH.
///
/// Exact machine decoupling requires equal rates; unequal rates are refused
/// here and served by [`unequal_rate_diagnostic`] instead.
pub fn switch_from_decays(
    params: DecayParams,
    gates: &GateSet,
    phi: &Ket,
) -> Result<DecaySwitchOutcome> {
    if params.gamma_a() != params.gamma_b() {
        return Err(Error::UnequalRates {
            gamma_a: params.gamma_a(),
            gamma_b: params.gamma_b(),
        });
    }
    let evolved = AggregateState::evolve(params, gates, phi)?;
    let reduced = evolved.reduced_sc_state(RecordMode::Symmetrized, DEFAULT_INCOMPLETE_THRESHOLD)?;
    let (eigenvalue, sc_state, gap) = reduced.density.dominant_eigenvector()?;
    if gap < EIGENVALUE_GAP_LIMIT {
        return Err(Error::DegenerateDominantEigenvalue { gap });
    }
    let ideal = ideal_switch(gates.u_a(), gates.u_b(), phi)?;
    let fidelity_to_ideal = fidelity_kets(&sc_state, &ideal)?;
    Ok(DecaySwitchOutcome {
        sc_state,
        fidelity_to_ideal,
        truncation_weight: reduced.discarded_weight,
        dropped_weight: reduced.dropped_weight,
        dominant_eigenvalue: eigenvalue,
    })
}

/// What symmetrization achieves when the rates differ: the machine only
/// partially decouples, so the reduced state stays mixed.
#[derive(Clone, Debug)]
pub struct UnequalRateDiagnostic {
    pub reduced: ReducedScState,
    pub order: OrderProbabilities,
    /// Purity of the reduced control-system state after symmetrization.
    pub purity: f64,
    /// `1 - purity`: the linear entropy left behind by the residual
    /// machine-side entanglement.
    pub residual_entanglement: f64,
    /// Overlap with the ideal SWITCH state, necessarily below one.
    pub fidelity_to_ideal: f64,
}

pub fn unequal_rate_diagnostic(
    params: DecayParams,
    gates: &GateSet,
    phi: &Ket,
) -> Result<UnequalRateDiagnostic> {
    let evolved = AggregateState::evolve(params, gates, phi)?;
    let order = evolved.order_probabilities();
    let reduced = evolved.reduced_sc_state(RecordMode::Symmetrized, DEFAULT_INCOMPLETE_THRESHOLD)?;
    let purity = reduced.density.purity();
    let ideal = ideal_switch(gates.u_a(), gates.u_b(), phi)?;
    let fidelity_to_ideal = reduced.density.expectation(&ideal)?;
    Ok(UnequalRateDiagnostic {
        purity,
        residual_entanglement: 1.0 - purity,
        fidelity_to_ideal,
        order,
        reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_random_unitary, identity, pauli_x, pauli_z, DensityMatrix};
    use crate::switch::compare;

    fn xz_gates() -> GateSet {
        GateSet::new(pauli_x(), pauli_z()).unwrap()
    }

    #[test]
    fn time_bin_is_normalized_and_matches_ideal() {
        let cfg = TimeBinConfig::new(1.0, 2.5, xz_gates(), Ket::basis(2, 0).unwrap()).unwrap();
        let state = time_bin_state(&cfg).unwrap();
        let ideal = ideal_switch(&pauli_x(), &pauli_z(), &Ket::basis(2, 0).unwrap()).unwrap();
        assert!((fidelity_kets(&state, &ideal).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn time_bin_identity_gates() {
        let id_gates = GateSet::new(identity(2).unwrap(), identity(2).unwrap()).unwrap();
        let phi = Ket::plus();
        let cfg = TimeBinConfig::new(0.0, 1.0, id_gates, phi.clone()).unwrap();
        let state = time_bin_state(&cfg).unwrap();
        let expect = Ket::plus().tensor(&phi);
        assert!((fidelity_kets(&state, &expect).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn time_bin_rejects_bad_ordering() {
        assert!(matches!(
            TimeBinConfig::new(2.0, 1.0, xz_gates(), Ket::basis(2, 0).unwrap()),
            Err(Error::TimeOrdering { .. })
        ));
    }

    #[test]
    fn time_bin_machine_marginal() {
        // Non-phase-related orders: H/Z on |0> gives orthogonal order images,
        // so the machine marginal is exactly maximally mixed.
        let hz = GateSet::new(crate::linalg::hadamard(), pauli_z()).unwrap();
        let cfg = TimeBinConfig::new(0.0, 1.0, hz, Ket::basis(2, 0).unwrap()).unwrap();
        let state = time_bin_state(&cfg).unwrap();
        let rho = DensityMatrix::from_ket(&state).unwrap();
        let machine = rho.partial_trace(&[0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert!((machine.entries()[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
        // The diagonal is half/half for any gates.
        let cfg = TimeBinConfig::new(0.0, 1.0, xz_gates(), Ket::basis(2, 0).unwrap()).unwrap();
        let rho = DensityMatrix::from_ket(&time_bin_state(&cfg).unwrap()).unwrap();
        let machine = rho.partial_trace(&[0]).unwrap();
        assert!((machine.entries()[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((machine.entries()[(1, 1)].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn symmetrize_preserves_norm_and_merges_only_complete_records() {
        let params = DecayParams::new(1.0, 1.0, 0.0, 0.02, 120).unwrap();
        let phi = Ket::basis(2, 0).unwrap();
        let state = BranchState::evolve(params, &xz_gates(), &phi).unwrap();
        let sym = symmetrize_timer(&state);
        assert!((sym.norm_sqr() - state.norm_sqr()).abs() < 1e-12);

        let complete_before = state
            .iter_branches()
            .filter(|(r, _)| r.is_complete())
            .count();
        let complete_after = sym
            .iter_branches()
            .filter(|(r, _)| r.is_complete())
            .count();
        assert_eq!(complete_after * 2, complete_before);

        let singles_before = state
            .iter_branches()
            .filter(|(r, _)| !r.is_complete())
            .count();
        let singles_after = sym
            .iter_branches()
            .filter(|(r, _)| !r.is_complete())
            .count();
        assert_eq!(singles_before, singles_after);
        for (record, _) in sym.iter_branches() {
            if record.is_complete() {
                assert!(!record.is_ordered());
                assert!(record.step_a().unwrap() < record.step_b().unwrap());
            }
        }
    }

    #[test]
    fn symmetrized_enumeration_gives_pure_reduced_state() {
        let params = DecayParams::new(1.0, 1.0, 0.0, 0.02, 600).unwrap();
        let phi = Ket::basis(2, 0).unwrap();
        let state = BranchState::evolve(params, &xz_gates(), &phi).unwrap();
        let reduced = symmetrize_timer(&state).reduced_sc_state(1e-4).unwrap();
        assert!((reduced.density.purity() - 1.0).abs() < 1e-8);
        // |-> (x) |1> up to global phase.
        let expect = Ket::minus().tensor(&Ket::basis(2, 1).unwrap());
        let f = reduced.density.expectation(&expect).unwrap();
        assert!((f - 1.0).abs() < 1e-8, "fidelity {f}");
    }

    #[test]
    fn switch_from_decays_recovers_the_switch() {
        let params = DecayParams::new(1.0, 1.0, 0.0, 1e-3, 10_000).unwrap();
        let phi = Ket::basis(2, 0).unwrap();
        let outcome = switch_from_decays(params, &xz_gates(), &phi).unwrap();
        assert!(outcome.fidelity_to_ideal >= 1.0 - 1e-6);
        let expect = Ket::minus().tensor(&Ket::basis(2, 1).unwrap());
        assert!((outcome.sc_state.overlap_sqr(&expect).unwrap() - 1.0).abs() < 1e-9);
        assert!(outcome.truncation_weight < 1e-4);
    }

    #[test]
    fn commuting_gates_leave_plus_control() {
        let params = DecayParams::new(1.0, 1.0, 0.0, 1e-3, 10_000).unwrap();
        let zz = GateSet::new(pauli_z(), pauli_z()).unwrap();
        let phi = Ket::plus();
        let outcome = switch_from_decays(params, &zz, &phi).unwrap();
        // Z Z |phi> = |phi>, so the switch state is |+> (x) |phi>.
        let expect = Ket::plus().tensor(&phi);
        assert!((outcome.sc_state.overlap_sqr(&expect).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unequal_rates_are_refused_and_diagnosed() {
        let params = DecayParams::new(2.0, 1.0, 0.0, 1e-3, 14_000).unwrap();
        let phi = Ket::basis(2, 0).unwrap();
        assert!(matches!(
            switch_from_decays(params, &xz_gates(), &phi),
            Err(Error::UnequalRates { .. })
        ));
        let diag = unequal_rate_diagnostic(params, &xz_gates(), &phi).unwrap();
        assert!(diag.purity < 1.0);
        assert!(diag.purity > 0.5);
        assert!((diag.residual_entanglement - (1.0 - diag.purity)).abs() < 1e-15);
        assert!(diag.fidelity_to_ideal < 1.0);
    }

    #[test]
    fn unequal_rate_purity_matches_enumeration() {
        let params = DecayParams::new(2.0, 1.0, 0.0, 0.01, 1400).unwrap();
        let phi = Ket::basis(2, 0).unwrap();
        let diag = unequal_rate_diagnostic(params, &xz_gates(), &phi).unwrap();
        let state = BranchState::evolve(params, &xz_gates(), &phi).unwrap();
        let reduced = symmetrize_timer(&state).reduced_sc_state(1e-3).unwrap();
        // Same truncation threshold for the aggregate side.
        let agg = AggregateState::evolve(params, &xz_gates(), &phi).unwrap();
        let agg_reduced = agg
            .reduced_sc_state(RecordMode::Symmetrized, 1e-3)
            .unwrap();
        assert!(
            agg_reduced
                .density
                .trace_distance(&reduced.density)
                .unwrap()
                < 1e-12
        );
        assert!((diag.purity - 1.0).abs() > 1e-4 || params.gamma_a() == params.gamma_b());
    }

    #[test]
    fn global_phase_on_gates_does_not_move_the_fidelity() {
        let params = DecayParams::new(1.0, 1.0, 0.0, 1e-3, 10_000).unwrap();
        let phi = Ket::basis(2, 0).unwrap();
        let base = switch_from_decays(params, &xz_gates(), &phi).unwrap();

        let phase = Complex64::from_polar(1.0, 0.7);
        let u_a = pauli_x().scaled(phase);
        let gates = GateSet::new(u_a, pauli_z()).unwrap();
        let shifted = switch_from_decays(params, &gates, &phi).unwrap();
        assert!((base.fidelity_to_ideal - shifted.fidelity_to_ideal).abs() < 1e-10);
    }

    #[test]
    fn haar_gates_recover_the_switch() {
        let params = DecayParams::new(1.0, 1.0, 0.0, 1e-3, 10_000).unwrap();
        let phi = Ket::basis(2, 0).unwrap();
        for seed in 0..10_u64 {
            let gates = GateSet::new(
                haar_random_unitary(2, 2 * seed).unwrap(),
                haar_random_unitary(2, 2 * seed + 1).unwrap(),
            )
            .unwrap();
            let outcome = switch_from_decays(params, &gates, &phi).unwrap();
            assert!(
                outcome.fidelity_to_ideal >= 1.0 - 1e-6,
                "seed {seed}: {}",
                outcome.fidelity_to_ideal
            );
        }
    }

    #[test]
    fn cross_realization_equivalence() {
        let phi = Ket::basis(2, 0).unwrap();
        let gates = xz_gates();
        let cfg = TimeBinConfig::new(0.5, 2.0, gates.clone(), phi.clone()).unwrap();
        let bin = time_bin_state(&cfg).unwrap();
        let params = DecayParams::new(1.0, 1.0, 0.0, 1e-3, 10_000).unwrap();
        let decays = switch_from_decays(params, &gates, &phi).unwrap();
        let f = fidelity_kets(&bin, &decays.sc_state).unwrap();
        assert!(f >= 1.0 - 1e-6, "cross fidelity {f}");
        // And both certify identically against the ideal target.
        let result = compare(bin.into(), &pauli_x(), &pauli_z(), &phi).unwrap();
        assert!((result.fidelity - 1.0).abs() < 1e-12);
    }
}
