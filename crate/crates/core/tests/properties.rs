//! Property tests over the linear-algebra layer and the step bookkeeping.

use num_complex::Complex64;
use proptest::prelude::*;

use tswitch_core::decay::{delta_p, DecayParams, GateSet};
use tswitch_core::linalg::{
    fidelity, fidelity_kets, haar_random_unitary, DensityMatrix, Ket, State,
};
use tswitch_core::switch::commutation_task;

fn raw_amplitudes(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len)
        .prop_map(|pairs| pairs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
        .prop_filter("needs usable norm", |amps: &Vec<Complex64>| {
            amps.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-2
        })
}

fn normalized_ket(dims: Vec<usize>) -> impl Strategy<Value = Ket> {
    let len = dims.iter().product();
    raw_amplitudes(len).prop_map(move |amps| {
        Ket::new(dims.clone(), amps).unwrap().normalized().unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitaries_preserve_norm(seed in 0u64..1000, ket in normalized_ket(vec![2, 3])) {
        let u = haar_random_unitary(3, seed).unwrap();
        let out = u.apply_on(1, &ket).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_is_associative(
        a in normalized_ket(vec![2]),
        b in normalized_ket(vec![3]),
        c in normalized_ket(vec![2]),
    ) {
        let left = a.tensor(&b).tensor(&c);
        let right = a.tensor(&b.tensor(&c));
        prop_assert_eq!(left.dims(), right.dims());
        for (x, y) in left.amplitudes().iter().zip(right.amplitudes().iter()) {
            prop_assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn fidelity_is_symmetric(
        a in normalized_ket(vec![4]),
        b in normalized_ket(vec![4]),
    ) {
        let f_ab = fidelity_kets(&a, &b).unwrap();
        let f_ba = fidelity_kets(&b, &a).unwrap();
        prop_assert!((f_ab - f_ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f_ab));

        let rho = DensityMatrix::from_ket(&a).unwrap();
        let f_pm = fidelity(&State::Pure(b.clone()), &State::Mixed(rho.clone())).unwrap();
        let f_mp = fidelity(&State::Mixed(rho), &State::Pure(b)).unwrap();
        prop_assert!((f_pm - f_mp).abs() < 1e-12);
        prop_assert!((f_pm - f_ab).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity(ket in normalized_ket(vec![2, 2, 2])) {
        let rho = DensityMatrix::from_ket(&ket).unwrap();
        for keep in [vec![0usize], vec![1], vec![2], vec![0, 2]] {
            // Construction re-validates: trace 1, Hermitian, eigenvalues >= -1e-10.
            let reduced = rho.partial_trace(&keep).unwrap();
            prop_assert!((reduced.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn commutation_probabilities_sum_to_one(
        sa in 0u64..500,
        sb in 500u64..1000,
        phi in normalized_ket(vec![2]),
    ) {
        let u = haar_random_unitary(2, sa).unwrap();
        let v = haar_random_unitary(2, sb).unwrap();
        let stats = commutation_task(&u, &v, &phi).unwrap();
        prop_assert!((stats.p_plus + stats.p_minus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step_accounting_is_conserved(
        gamma_a in 0.2..3.0f64,
        gamma_b in 0.2..3.0f64,
        dt_scale in 0.01..1.0f64,
        seed in 0u64..100,
    ) {
        // Keep both dp values inside the accepted window.
        let dt = dt_scale * 0.1 / gamma_a.max(gamma_b);
        prop_assume!(delta_p(gamma_a, dt).is_ok() && delta_p(gamma_b, dt).is_ok());
        let params = DecayParams::new(gamma_a, gamma_b, 0.0, dt, 40).unwrap();
        let gates = GateSet::new(
            haar_random_unitary(2, seed).unwrap(),
            haar_random_unitary(2, seed + 1000).unwrap(),
        ).unwrap();
        let mut state = tswitch_core::decay::BranchState::initial(
            params,
            &Ket::basis(2, 0).unwrap(),
        ).unwrap();
        for _ in 0..40 {
            state = state.step(&gates).unwrap();
            prop_assert!(state.accounting_drift() < 1e-10);
        }
    }
}
