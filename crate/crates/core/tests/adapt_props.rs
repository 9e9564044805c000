mod common;

use adapt_qsci::adapt::{
    build_pool, exact_pool_gradient, optimal_angle, pool_gradients, rank_and_select, run_adapt_qsci,
    subspace_gradient, AdaptConfig, NoiselessSource,
};
use adapt_qsci::pauli::{PauliSum, PauliTerm, Phase, SparseStateVec};
use adapt_qsci::qsci::{exact_ground_state, SelectionPolicy};
use adapt_qsci::sim::StateVector;
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

/// `⟨c|e^{−iθP} H e^{iθP}|c⟩` by explicit rotation of a dense copy of `c`.
fn rotated_energy(h: &PauliSum, p: &PauliTerm, c: &SparseStateVec, theta: f64) -> f64 {
    let mut sv = StateVector::from_sparse(c).unwrap();
    sv.apply_pauli_rotation(p, theta).unwrap();
    sv.expectation(h).unwrap()
}

fn arb_sparse_state(n: usize) -> impl Strategy<Value = SparseStateVec> {
    let dim = 1u64 << n;
    prop::collection::btree_map(0..dim, (-1.0f64..1.0, -1.0f64..1.0), 1..=8).prop_filter_map("zero vector", move |m| {
        let norm: f64 = m.values().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        if norm < 1e-3 {
            return None;
        }
        SparseStateVec::new(n, m.into_iter().map(|(k, (a, b))| (k, Complex64::new(a / norm, b / norm)))).ok()
    })
}

fn arb_case() -> impl Strategy<Value = (PauliSum, PauliTerm, SparseStateVec)> {
    (2usize..=6).prop_flat_map(|n| {
        (
            arb_hermitian_sum(n, 10),
            arb_term(n).prop_filter("identity", |t| !t.is_identity()).prop_map(|t| t.with_phase(Phase::ONE)),
            arb_sparse_state(n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn gradient_is_derivative_of_rotated_energy((h, p, c) in arb_case()) {
        let eps = 1e-5;
        let fd = (rotated_energy(&h, &p, &c, eps) - rotated_energy(&h, &p, &c, -eps)) / (2.0 * eps);
        let g = subspace_gradient(&h, &p, &c).unwrap();
        prop_assert!((g - fd).abs() < 1e-6, "g = {g}, fd = {fd}");
        let sv = StateVector::from_sparse(&c).unwrap();
        prop_assert!((exact_pool_gradient(&h, &p, &sv).unwrap() - g).abs() < 1e-10);
    }

    #[test]
    fn angle_formula_matches_rotation_and_is_global_minimum((h, p, c) in arb_case()) {
        let opt = optimal_angle(&h, &p, &c).unwrap();
        prop_assert!(opt.theta > -std::f64::consts::FRAC_PI_2 && opt.theta <= std::f64::consts::FRAC_PI_2);
        prop_assert!((opt.value - rotated_energy(&h, &p, &c, opt.theta)).abs() < 1e-10);
        for k in 0..64 {
            let th = -std::f64::consts::PI + k as f64 * std::f64::consts::PI / 32.0;
            prop_assert!(opt.value <= rotated_energy(&h, &p, &c, th) + 1e-10);
        }
        let probes = [0.0, std::f64::consts::FRAC_PI_4, -std::f64::consts::FRAC_PI_4];
        prop_assert!(probes.iter().all(|&t| opt.value <= opt.f(t) + 1e-12));
    }

    #[test]
    fn selection_invariant_under_positive_scaling((h, _, c) in arb_case(), scale in 0.01f64..100.0) {
        let n = h.n_qubits();
        prop_assume!(n >= 4 && n % 2 == 0);
        let pool = build_pool(n).unwrap();
        let a = rank_and_select(&h, &pool, &c).unwrap();
        let b = rank_and_select(&h.scale(Complex64::new(scale, 0.0)), &pool, &c).unwrap();
        let grads = pool_gradients(&h, &pool, &c).unwrap();
        let near_tie = grads.iter().enumerate().any(|(i, g)| i != a.index && (g.abs() - a.max_abs).abs() < 1e-9 * a.max_abs.max(1.0));
        prop_assume!(!near_tie);
        prop_assert_eq!(a.index, b.index);
    }
}

#[test]
fn pool_terms_flip_spin_balanced_bits() {
    for n in [4, 8, 12] {
        for p in build_pool(n).unwrap().terms() {
            let flipped: Vec<usize> = (0..n).filter(|q| p.x_mask() >> q & 1 == 1).collect();
            match flipped.len() {
                2 => assert_eq!(flipped[0] % 2, flipped[1] % 2, "{p}"),
                4 => assert_eq!(flipped.iter().sum::<usize>() % 2, 0, "{p}"),
                w => panic!("{p} has weight {w}"),
            }
            assert_eq!(p.x_mask(), p.x_mask() | p.z_mask());
        }
    }
}

#[test]
fn exact_gradient_matches_finite_difference_on_h4() {
    let sys = h4();
    let h = sys.hamiltonian();
    let pool = build_pool(8).unwrap();
    let mut sv = StateVector::basis(8, sys.reference_cfg()).unwrap();
    sv.apply_pauli_rotation(&pool.terms()[3], 0.21).unwrap();
    sv.apply_pauli_rotation(&pool.terms()[90], -0.13).unwrap();
    let eps = 1e-5;
    for p in pool.terms().iter().step_by(7) {
        let energy = |th: f64| {
            let mut s = sv.clone();
            s.apply_pauli_rotation(p, th).unwrap();
            s.expectation(h).unwrap()
        };
        let fd = (energy(eps) - energy(-eps)) / (2.0 * eps);
        let g = exact_pool_gradient(h, p, &sv).unwrap();
        assert!((g - fd).abs() < 1e-6, "{p}: {g} vs {fd}");
    }
}

#[test]
fn h4_trace_invariants() {
    let sys = h4();
    let (e0, _) = exact_ground_state(&sys).unwrap();
    let pool = build_pool(8).unwrap();
    let cfg = AdaptConfig::new(SelectionPolicy::for_system(&sys, 14).unwrap(), 40);
    for seed in 0..3 {
        let mut src = NoiselessSource { shots: 100_000, seed };
        let out = run_adapt_qsci(&sys, &pool, &cfg, &mut src).unwrap();
        let mut prev = None;
        for r in &out.records {
            assert!(r.energy >= e0 - 1e-10, "variational bound broken at k = {}", r.k);
            if let Some(f) = r.predicted_energy {
                assert!(f <= r.energy + 1e-12);
            }
            if let Some((cnots, shots)) = prev {
                assert!(r.cnots >= cnots && r.shots >= shots);
            }
            prev = Some((r.cnots, r.shots));
        }
        assert_eq!(out.records.len(), out.program.len() + usize::from(out.records.last().unwrap().selected.is_none()));
    }
}

#[test]
fn h6_short_run_is_variational() {
    let sys = h6();
    let (e0, _) = exact_ground_state(&sys).unwrap();
    let pool = build_pool(12).unwrap();
    assert_eq!(pool.len(), 1050);
    let mut cfg = AdaptConfig::new(SelectionPolicy::for_system(&sys, 40).unwrap(), 4);
    cfg.track_state_energy = true;
    let mut src = NoiselessSource { shots: 20_000, seed: 5 };
    let out = run_adapt_qsci(&sys, &pool, &cfg, &mut src).unwrap();
    assert!(out.records.len() <= 5);
    for r in &out.records {
        assert!(r.energy >= e0 - 1e-10);
        if let Some(s) = r.state_energy {
            assert!(s >= e0 - 1e-10);
        }
    }
}
