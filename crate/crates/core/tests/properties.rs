use proptest::prelude::*;
use qrms_core::estimators::{wjd_exact, EstimatorConfig, Method};
use qrms_core::fixtures::{random_instrument, random_mixed_state, random_observable};
use qrms_core::harness::stats;
use qrms_core::linalg::{
    c, dagger, hermitian_expm, hs_norm_sq, kron, partial_trace, trace, CMatrix,
};
use qrms_core::metrics::{indirect_disturbance, qrms_disturbance_exact, three_state_disturbance};
use qrms_core::mitigation::{
    fold_circuit, fold_gates_at_random, rem_apply, richardson_coefficients, ConfusionMatrix,
};
use qrms_core::quantum::builders::{dec_slots, tsm_slots, wmm_slots};
use qrms_core::quantum::circuit::Gate;
use qrms_core::quantum::model::IndirectModel;
use qrms_core::quantum::noise::depolarize;
use qrms_core::quantum::sim::{
    evolve, exact_distribution, rng_from_seed, unitary_of_circuit, Distribution,
};
use qrms_core::{Circuit, DensityOperator, Pauli};

fn matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |v| {
        CMatrix::from_vec(n, n, v.chunks(2).map(|p| c(p[0], p[1])).collect()).unwrap()
    })
}

fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
    matrix(n).prop_map(|a| &a + &dagger(&a))
}

fn gate() -> impl Strategy<Value = (Gate, Vec<usize>)> {
    prop_oneof![
        (0usize..3).prop_map(|w| (Gate::H, vec![w])),
        (0usize..3).prop_map(|w| (Gate::S, vec![w])),
        (0usize..3).prop_map(|w| (Gate::Y, vec![w])),
        (0usize..3, -3.0f64..3.0).prop_map(|(w, a)| (Gate::Rx(a), vec![w])),
        (0usize..3, -3.0f64..3.0).prop_map(|(w, a)| (Gate::Rz(a), vec![w])),
        (0usize..3, 1usize..3).prop_map(|(a, d)| (Gate::Cnot, vec![a, (a + d) % 3])),
    ]
}

fn circuit() -> impl Strategy<Value = Circuit> {
    prop::collection::vec(gate(), 1..12).prop_map(|gates| {
        let mut c = Circuit::new(3);
        for (g, w) in gates {
            c.push_gate(g, &w).unwrap();
        }
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(a in matrix(2), b in matrix(2), d in matrix(2)) {
        let left = kron(&kron(&a, &b), &d);
        let right = kron(&a, &kron(&b, &d));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn dagger_is_an_involutive_antihomomorphism(a in matrix(3), b in matrix(3)) {
        prop_assert!(dagger(&dagger(&a)).max_abs_diff(&a) < 1e-12);
        prop_assert!(dagger(&(&a * &b)).max_abs_diff(&(&dagger(&b) * &dagger(&a))) < 1e-12);
    }

    #[test]
    fn partial_trace_keeps_trace(a in matrix(4)) {
        let reduced = partial_trace(&a, &[2, 2], &[0]).unwrap();
        prop_assert!((trace(&reduced).unwrap() - trace(&a).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn expm_pairs_to_identity(h in hermitian(4), t in -4.0f64..4.0) {
        let prod = &hermitian_expm(&h, t).unwrap() * &hermitian_expm(&h, -t).unwrap();
        prop_assert!(prod.max_abs_diff(&CMatrix::identity(4)) < 1e-10);
    }

    #[test]
    fn hs_norm_is_entry_sum(a in matrix(3)) {
        let direct: f64 = a.data().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((hs_norm_sq(&a) - direct).abs() < 1e-12);
    }

    #[test]
    fn rmse_decomposes(values in prop::collection::vec(-3.0f64..3.0, 1..40), theoretical in -3.0f64..3.0) {
        let s = stats(&values, theoretical).unwrap();
        prop_assert!((s.rmse.powi(2) - s.sd.powi(2) - s.bias.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn rem_output_is_a_distribution(flip0 in 0.0f64..0.2, flip1 in 0.0f64..0.2, raw in prop::collection::vec(0.0f64..1.0, 4)) {
        let cm = |f: f64| ConfusionMatrix::new(vec![vec![1.0 - f, f], vec![f, 1.0 - f]]).unwrap();
        let total: f64 = raw.iter().sum::<f64>().max(1e-9);
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let q = rem_apply(&cm(flip0).kron(&cm(flip1)), &p).unwrap();
        prop_assert!(q.iter().all(|&x| x >= 0.0));
        prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rem_round_trip(flip in 0.0f64..0.2, raw in prop::collection::vec(0.05f64..1.0, 4)) {
        let one = ConfusionMatrix::new(vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]]).unwrap();
        let cmat = one.kron(&one);
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let back = rem_apply(&cmat, &cmat.apply(&p)).unwrap();
        prop_assert!(back.iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-8));
    }

    #[test]
    fn richardson_moments(mut nodes in prop::collection::btree_set(1u32..40, 2..6)) {
        let xs: Vec<f64> = std::mem::take(&mut nodes).into_iter().map(|n| n as f64 / 4.0).collect();
        let w = richardson_coefficients(&xs).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for k in 1..xs.len() as i32 {
            let m: f64 = w.iter().zip(&xs).map(|(wi, x)| wi * x.powi(k)).sum();
            let scale: f64 = w.iter().zip(&xs).map(|(wi, x)| (wi * x.powi(k)).abs()).sum::<f64>().max(1.0);
            prop_assert!(m.abs() / scale < 1e-10, "k = {}: {}", k, m);
        }
    }

    #[test]
    fn folding_keeps_the_unitary(c in circuit(), s in prop::sample::select(vec![3u32, 5, 7, 9]), seed in any::<u64>()) {
        let u = unitary_of_circuit(&c).unwrap();
        prop_assert!(unitary_of_circuit(&fold_circuit(&c, s, seed).unwrap()).unwrap().max_abs_diff(&u) < 1e-10);
        prop_assert!(unitary_of_circuit(&fold_gates_at_random(&c, 2.4, seed).unwrap()).unwrap().max_abs_diff(&u) < 1e-10);
    }

    #[test]
    fn noiseless_evolution_is_conjugation(c in circuit()) {
        let rho = DensityOperator::zero_state(3);
        let out = evolve(&c, &rho, None).unwrap().state().unwrap();
        let want = unitary_of_circuit(&c).unwrap().conjugate(rho.matrix());
        prop_assert!(out.matrix().max_abs_diff(&want) < 1e-10);
        prop_assert!((trace(out.matrix()).unwrap().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn folded_circuits_keep_the_distribution(c in circuit(), s in prop::sample::select(vec![3u32, 5])) {
        let mut c = c;
        for w in 0..3 {
            c.measure(w, w).unwrap();
        }
        let rho = DensityOperator::zero_state(3);
        let d = exact_distribution(&c, &rho, None).unwrap();
        let f = exact_distribution(&fold_circuit(&c, s, 1).unwrap(), &rho, None).unwrap();
        prop_assert!(d.total_variation(&f.conditional()) < 1e-10);
    }

    #[test]
    fn depolarizing_keeps_trace_and_zero_is_identity(seed in any::<u64>(), p in 0.0f64..1.0, wire in 0usize..2) {
        let rho = random_mixed_state(&mut rng_from_seed(seed), 4);
        let out = depolarize(rho.matrix(), p, &[wire], 2).unwrap();
        prop_assert!((trace(&out).unwrap().re - 1.0).abs() < 1e-12);
        prop_assert!(out.is_hermitian(1e-12));
        prop_assert!(depolarize(rho.matrix(), 0.0, &[wire], 2).unwrap().max_abs_diff(rho.matrix()) < 1e-14);
    }

    #[test]
    fn formalisms_agree_on_random_instruments(seed in any::<u64>(), n_out in 2usize..4) {
        let mut rng = rng_from_seed(seed);
        let model = random_instrument(&mut rng, 2, n_out).unwrap();
        let rho = random_mixed_state(&mut rng, 2);
        let b = random_observable(&mut rng, 2);
        let exact = qrms_disturbance_exact(&model, &b, &rho).unwrap();
        prop_assert!(exact >= -1e-12);
        let dilation = IndirectModel::stinespring(&model).unwrap();
        prop_assert!((indirect_disturbance(&dilation, &b, &rho).unwrap() - exact).abs() < 1e-10);
        prop_assert!((three_state_disturbance(&model, &b, &rho).unwrap() - exact).abs() < 1e-10);
        let wjd: f64 = wjd_exact(&dilation, &b, &rho).unwrap().iter().map(|e| (e.b_f - e.b_i).powi(2) * e.value.re).sum();
        prop_assert!((wjd - exact).abs() < 1e-10);
    }

    #[test]
    fn estimates_ignore_apparatus_labels(method in prop::sample::select(Method::ALL.to_vec()), which in prop::sample::select(Pauli::MEASURABLE.to_vec()), seed in any::<u64>()) {
        let cfg = EstimatorConfig::new(method, which).with_seed(seed);
        let m_slot = match method {
            Method::Tsm => tsm_slots::M,
            Method::Wmm => wmm_slots::M,
            Method::Dec => dec_slots::M,
        };
        let dists = cfg.distributions().unwrap();
        let relabeled: Vec<Distribution> = dists
            .iter()
            .map(|d| Distribution {
                probs: d
                    .probs
                    .iter()
                    .map(|(k, &p)| {
                        let mut bits: Vec<u8> = k.bytes().collect();
                        bits[m_slot] = if bits[m_slot] == b'0' { b'1' } else { b'0' };
                        (String::from_utf8(bits).unwrap(), p)
                    })
                    .collect(),
                discarded: d.discarded,
            })
            .collect();
        // sampled runs walk registers in key order, so only the law is invariant
        prop_assert!((cfg.estimate_exact(&dists).unwrap() - cfg.estimate_exact(&relabeled).unwrap()).abs() < 1e-12);
    }
}
