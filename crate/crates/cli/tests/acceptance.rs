//! Acceptance suite: one test per release criterion, each printing a
//! `[PASS] criterion N` line with the measured values. Run with
//! `cargo test -p tswitch-cli --test acceptance -- --nocapture` to see them.

use std::time::Instant;

use tswitch_core::decay::{
    chi_deviation, convergence_order, jump_amplitude, mprime_states, AggregateState, BranchState,
    DecayParams, GateSet, RecordMode,
};
use tswitch_core::linalg::{
    fidelity_kets, haar_random_unitary, pauli_x, pauli_z, DensityMatrix, Ket,
};
use tswitch_core::realizations::{switch_from_decays, time_bin_state, TimeBinConfig};
use tswitch_core::switch::{commutation_task, ideal_switch};

use num_complex::Complex64;

fn xz_gates() -> GateSet {
    GateSet::new(pauli_x(), pauli_z()).unwrap()
}

fn phi0() -> Ket {
    Ket::basis(2, 0).unwrap()
}

/// Criterion 1: norm conservation over 10^4 steps at gamma = 1, dt = 1e-3,
/// within 1e-10 at every step, in under 10 seconds on the aggregated path.
#[test]
fn c01_norm_conservation() {
    let started = Instant::now();
    let params = DecayParams::new(1.0, 1.0, 0.0, 1e-3, 10_000).unwrap();
    let evolved = AggregateState::evolve(params, &xz_gates(), &phi0()).unwrap();
    let drift = evolved.max_accounting_drift();
    let elapsed = started.elapsed().as_secs_f64();
    assert!(drift <= 1e-10, "max per-step drift {drift:e}");
    assert!(elapsed < 10.0, "took {elapsed}s");
    println!("[PASS] criterion 1: norm conservation (max drift {drift:.3e}, {elapsed:.3}s)");
}

/// Criterion 2: the cumulative decay probability is exactly the geometric
/// law and tracks the exponential within 2*gamma*dt, at every step.
#[test]
fn c02_decay_law() {
    let gamma = 1.0;
    let dt = 1e-3;
    let params = DecayParams::new(gamma, gamma, 0.0, dt, 10_000).unwrap();
    let gates = xz_gates();
    let mut state = AggregateState::initial(params, &gates, &phi0()).unwrap();
    let mut max_exact = 0.0_f64;
    let mut max_exp = 0.0_f64;
    for k in 1..=params.n_steps() {
        state.step();
        let cum = state.cumulative_decay_a();
        let geometric = 1.0 - (1.0 - gamma * dt).powi(k as i32);
        let exponential = 1.0 - (-gamma * (k as f64) * dt).exp();
        max_exact = max_exact.max((cum - geometric).abs());
        max_exp = max_exp.max((cum - exponential).abs());
    }
    assert!(max_exact <= 1e-12, "geometric-law deviation {max_exact:e}");
    assert!(
        max_exp <= 2.0 * gamma * dt,
        "exponential-law deviation {max_exp:e}"
    );
    println!(
        "[PASS] criterion 2: decay law (geometric dev {max_exact:.3e}, exponential dev {max_exp:.3e})"
    );
}

/// Criterion 3: discrete-to-continuum amplitude consistency below 5e-3 at
/// dt = 1e-3, with measured convergence order 1.0 +/- 0.2.
#[test]
fn c03_discrete_continuum() {
    let deviation = chi_deviation(1.0, 1e-3, 5000, 0.0).unwrap();
    assert!(deviation < 5e-3, "deviation {deviation:e}");
    let points: Vec<(f64, f64)> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| {
            let n = (8.0 / dt) as u32;
            (dt, chi_deviation(1.0, dt, n, 0.0).unwrap())
        })
        .collect();
    let order = convergence_order(&points).unwrap();
    assert!(
        (order - 1.0).abs() <= 0.2,
        "convergence order {order}, points {points:?}"
    );
    println!(
        "[PASS] criterion 3: discrete-continuum (max deviation {deviation:.3e}, order {order:.3})"
    );
}

/// Criterion 4: asymptotic A-first probability matches gamma_a/(gamma_a +
/// gamma_b) within 3 dt max(gamma) for three rate pairs, and the aggregated
/// weights match a literal double-sum oracle to 1e-12 at N = 500.
#[test]
fn c04_order_statistics() {
    for (gamma_a, gamma_b) in [(1.0_f64, 1.0_f64), (2.0, 1.0), (5.0, 1.0)] {
        let dt = 2e-3 / gamma_a.max(gamma_b);
        let span_steps = (14.0 / (gamma_a.min(gamma_b) * dt)).ceil() as u32;
        let params = DecayParams::new(gamma_a, gamma_b, 0.0, dt, span_steps).unwrap();
        let evolved = AggregateState::evolve(params, &xz_gates(), &phi0()).unwrap();
        let stats = evolved.order_probabilities();
        let analytic = gamma_a / (gamma_a + gamma_b);
        let tol = 3.0 * dt * gamma_a.max(gamma_b);
        assert!(
            (stats.p_a_first - analytic).abs() <= tol,
            "rates {gamma_a}/{gamma_b}: p_a_first {} vs {analytic} (tol {tol:e})",
            stats.p_a_first
        );

        // Double-sum oracle at N = 500.
        let dt500 = 0.02 / gamma_a.max(gamma_b);
        let params = DecayParams::new(gamma_a, gamma_b, 0.0, dt500, 500).unwrap();
        let agg = AggregateState::evolve(params, &xz_gates(), &phi0()).unwrap();
        let (dp_a, dp_b) = (params.delta_p_a(), params.delta_p_b());
        let mut w_af = 0.0;
        let mut w_bf = 0.0;
        for k in 1..500_u32 {
            for l in (k + 1)..=500 {
                w_af +=
                    (jump_amplitude(dp_a, k).unwrap() * jump_amplitude(dp_b, l).unwrap()).powi(2);
                w_bf +=
                    (jump_amplitude(dp_b, k).unwrap() * jump_amplitude(dp_a, l).unwrap()).powi(2);
            }
        }
        let (_, _, _, got_af, got_bf) = agg.class_weights();
        assert!((got_af - w_af).abs() <= 1e-12, "rates {gamma_a}/{gamma_b}");
        assert!((got_bf - w_bf).abs() <= 1e-12, "rates {gamma_a}/{gamma_b}");
    }
    println!("[PASS] criterion 4: order statistics for (1,1), (2,1), (5,1) + double-sum oracle");
}

/// Criterion 5: with equal rates, symmetrization on, and truncation below
/// 1e-4, the reduced state hits the ideal switch at fidelity >= 1 - 1e-6 for
/// X/Z, Z/Z, and 50 seeded Haar pairs.
#[test]
fn c05_switch_recovery() {
    let params = DecayParams::new(1.0, 1.0, 0.0, 1e-3, 10_000).unwrap();
    let phi = phi0();

    let mut worst: f64 = 1.0;
    let mut gate_pairs: Vec<(String, GateSet)> = vec![
        ("x/z".into(), xz_gates()),
        (
            "z/z".into(),
            GateSet::new(pauli_z(), pauli_z()).unwrap(),
        ),
    ];
    for seed in 0..50_u64 {
        gate_pairs.push((
            format!("haar seed {seed}"),
            GateSet::new(
                haar_random_unitary(2, 2 * seed).unwrap(),
                haar_random_unitary(2, 2 * seed + 1).unwrap(),
            )
            .unwrap(),
        ));
    }
    for (label, gates) in &gate_pairs {
        let outcome = switch_from_decays(params, gates, &phi).unwrap();
        assert!(
            outcome.truncation_weight <= 1e-4,
            "{label}: truncation {}",
            outcome.truncation_weight
        );
        assert!(
            outcome.fidelity_to_ideal >= 1.0 - 1e-6,
            "{label}: fidelity {}",
            outcome.fidelity_to_ideal
        );
        worst = worst.min(outcome.fidelity_to_ideal);
    }
    println!(
        "[PASS] criterion 5: switch recovery over {} gate pairs (worst fidelity {worst:.9})",
        gate_pairs.len()
    );
}

/// Criterion 6: without symmetrization the X/Z run stays the classical order
/// mixture; aggregated and brute-force reduced states agree within trace
/// distance 1e-6 and match the hand-derived matrix.
#[test]
fn c06_no_symmetrization_control() {
    let params = DecayParams::new(1.0, 1.0, 0.0, 0.02, 500).unwrap();
    let phi = phi0();
    let gates = xz_gates();

    let aggregated = AggregateState::evolve(params, &gates, &phi)
        .unwrap()
        .reduced_sc_state(RecordMode::Ordered, 1e-4)
        .unwrap();
    let brute = BranchState::evolve(params, &gates, &phi)
        .unwrap()
        .reduced_sc_state(1e-4)
        .unwrap();
    let distance = aggregated
        .density
        .trace_distance(&brute.density)
        .unwrap();
    assert!(distance <= 1e-6, "aggregated vs brute force: {distance:e}");

    // 1/2 (|0><0| + |1><1|)_C (x) |1><1|_S = diag(0, 1/2, 0, 1/2).
    let mut entries = ndarray::Array2::from_elem((4, 4), Complex64::ZERO);
    entries[(1, 1)] = Complex64::new(0.5, 0.0);
    entries[(3, 3)] = Complex64::new(0.5, 0.0);
    let analytic = DensityMatrix::new(vec![2, 2], entries).unwrap();
    let to_analytic = brute.density.trace_distance(&analytic).unwrap();
    assert!(to_analytic <= 1e-6, "brute force vs analytic: {to_analytic:e}");
    println!(
        "[PASS] criterion 6: ordered-mode control (paths agree to {distance:.3e}, analytic {to_analytic:.3e})"
    );
}

/// Criterion 7: the two composite-control states are orthogonal by support
/// disjointness and each normalized to 1 within quadrature error 1e-6 (the
/// construction's sqrt(2) prefactor compensates the half-space weight; the
/// norms are 1, not 0).
#[test]
fn c07_mprime_construction() {
    let params = DecayParams::new(1.0, 1.0, 0.0, 1e-3, 18_000).unwrap();
    let pair = mprime_states(&params, None).unwrap();
    assert_eq!(pair.machine_region_overlap, 0.0);
    assert_eq!(pair.inner_product, Complex64::ZERO);
    assert!(
        (pair.zero.norm - 1.0).abs() <= 1e-6,
        "norm of |0'>: {}",
        pair.zero.norm
    );
    assert!(
        (pair.one.norm - 1.0).abs() <= 1e-6,
        "norm of |1'>: {}",
        pair.one.norm
    );
    println!(
        "[PASS] criterion 7: composite-control states (overlap 0, norms {:.9}/{:.9})",
        pair.zero.norm, pair.one.norm
    );
}

/// Criterion 8: the time-bin construction reproduces the target state with
/// at most 1e-12 fidelity deficit and the right commutation statistics.
#[test]
fn c08_time_bin_realization() {
    let phi = phi0();
    let cfg = TimeBinConfig::new(1.0, 2.0, xz_gates(), phi.clone()).unwrap();
    let state = time_bin_state(&cfg).unwrap();
    let ideal = ideal_switch(&pauli_x(), &pauli_z(), &phi).unwrap();
    let fidelity = fidelity_kets(&state, &ideal).unwrap();
    assert!(fidelity >= 1.0 - 1e-12, "fidelity {fidelity}");

    let anti = commutation_task(&pauli_x(), &pauli_z(), &phi).unwrap();
    assert!((anti.p_minus - 1.0).abs() <= 1e-10);
    let comm = commutation_task(&pauli_z(), &pauli_z(), &Ket::plus()).unwrap();
    assert!((comm.p_plus - 1.0).abs() <= 1e-10);
    println!(
        "[PASS] criterion 8: time-bin realization (fidelity deficit {:.3e}, p_minus {}, p_plus {})",
        1.0 - fidelity,
        anti.p_minus,
        comm.p_plus
    );
}

/// Criterion 9: both realizations produce the same state for the same gates.
#[test]
fn c09_cross_realization_equivalence() {
    let params = DecayParams::new(1.0, 1.0, 0.0, 1e-3, 10_000).unwrap();
    let mut worst: f64 = 1.0;
    for (label, gates, phi) in [
        ("x/z", xz_gates(), phi0()),
        (
            "haar",
            GateSet::new(
                haar_random_unitary(2, 101).unwrap(),
                haar_random_unitary(2, 102).unwrap(),
            )
            .unwrap(),
            Ket::plus(),
        ),
    ] {
        let cfg = TimeBinConfig::new(0.5, 2.0, gates.clone(), phi.clone()).unwrap();
        let bin = time_bin_state(&cfg).unwrap();
        let decay = switch_from_decays(params, &gates, &phi).unwrap();
        let fidelity = fidelity_kets(&bin, &decay.sc_state).unwrap();
        assert!(fidelity >= 1.0 - 1e-6, "{label}: {fidelity}");
        worst = worst.min(fidelity);
    }
    println!("[PASS] criterion 9: cross-realization equivalence (worst fidelity {worst:.9})");
}

/// Criterion 10: fixed config and seed produce byte-identical reports.
#[test]
fn c10_deterministic_reports() {
    let bin = env!("CARGO_BIN_EXE_tswitch");
    let tmp = std::env::temp_dir();
    let mut compared = 0;
    for (name, args) in [
        (
            "sim",
            vec![
                "simulate",
                "--symmetrize",
                "--ua",
                "haar",
                "--ub",
                "haar",
                "--seed",
                "42",
            ],
        ),
        ("conv", vec!["converge", "--dt", "4e-3,2e-3,1e-3"]),
        ("verify", vec!["verify", "--seed", "3"]),
    ] {
        let file_a = tmp.join(format!("tswitch-acc-{}-{name}-a", std::process::id()));
        let file_b = tmp.join(format!("tswitch-acc-{}-{name}-b", std::process::id()));
        for file in [&file_a, &file_b] {
            let status = std::process::Command::new(bin)
                .args(&args)
                .arg("--out")
                .arg(file)
                .status()
                .expect("binary runs");
            assert!(status.success(), "{name} failed");
        }
        let a = std::fs::read(&file_a).unwrap();
        let b = std::fs::read(&file_b).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} report differs between identical runs");
        compared += 1;
        std::fs::remove_file(&file_a).ok();
        std::fs::remove_file(&file_b).ok();
    }
    println!("[PASS] criterion 10: determinism ({compared} report kinds byte-identical)");
}
