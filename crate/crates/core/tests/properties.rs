//! Property suites for the constrained-generator machinery and the small
//! algebraic invariants that guard the math core.

mod common;

use common::*;
use proptest::prelude::*;
use qugal_core::circuit::{build_generator_layout, generated_state, CnotRestriction, ParameterVector};
use qugal_core::entanglement::{
    constrain_product, run_entanglement_qmmw, BipartiteSplit, Decision, Threshold,
};
use qugal_core::experiment::trace_io::fmt_f64;
use qugal_core::linalg::{fidelity, herm_eig, tensor_product, DensityMatrix, PureState};
use qugal_core::qmmw::QmmwConfig;
use qugal_core::qugan::compute_weights;
use rand::Rng;

#[test]
fn constrain_product_matches_composed_oracle() {
    let mut rng = rng(401);
    for _ in 0..20 {
        let sigma = random_density(&mut rng, 2);
        let out = constrain_product(&sigma, &BipartiteSplit::new(1, 1)).unwrap();
        let on_a = partial_trace_oracle(sigma.matrix(), &[1, 1], 0);
        let on_b = partial_trace_oracle(sigma.matrix(), &[1, 1], 1);
        let expect = kron_oracle(&on_a, &on_b);
        assert!((out.matrix() - &expect).norm() < 1e-10);
    }
}

#[test]
fn constrain_product_idempotent_and_valid() {
    let mut rng = rng(402);
    for n in [2usize, 4] {
        let split = BipartiteSplit::new(n / 2, n / 2);
        for _ in 0..10 {
            let sigma = random_density(&mut rng, n);
            let once = constrain_product(&sigma, &split).unwrap();
            let twice = constrain_product(&once, &split).unwrap();
            assert!((once.matrix() - twice.matrix()).norm() < 1e-10, "idempotence");
            assert!((once.trace() - 1.0).abs() < 1e-9, "trace preserved");
            let (eigs, _) = herm_eig(once.hermitian());
            assert!(eigs[0] > -1e-9, "positivity preserved");
        }
    }
}

#[test]
fn restricted_generator_fidelity_to_own_projection_is_one() {
    // 100 parameter draws: the restricted ansatz output equals its own
    // marginal product.
    let mut rng = rng(403);
    let split = BipartiteSplit::new(2, 2);
    let layout =
        build_generator_layout(4, 0, 7, CnotRestriction::Bipartite { n_a: 2, n_b: 2 }).unwrap();
    for _ in 0..100 {
        let theta = ParameterVector::new(
            (0..layout.n_params)
                .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                .collect(),
        )
        .unwrap();
        let sigma = generated_state(&layout, &theta, 4, 0).unwrap();
        let projected = constrain_product(&sigma, &split).unwrap();
        let f = fidelity(&sigma, &projected).unwrap();
        assert!((f - 1.0).abs() < 1e-9, "fidelity {f}");
    }
}

#[test]
fn ghz_product_overlap_capped_at_half() {
    // No product state across the 2|2 cut beats fidelity ½ with the GHZ
    // state; the restricted generator therefore never can either.
    let mut rng = rng(404);
    let ghz = {
        let mut amps = qugal_core::linalg::ComplexVector::zeros(16);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = qugal_core::linalg::C64::new(r, 0.0);
        amps[15] = qugal_core::linalg::C64::new(r, 0.0);
        PureState::new(amps).unwrap().density()
    };
    let layout =
        build_generator_layout(4, 0, 7, CnotRestriction::Bipartite { n_a: 2, n_b: 2 }).unwrap();
    let mut best = 0.0f64;
    for _ in 0..100 {
        let theta = ParameterVector::new(
            (0..layout.n_params)
                .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                .collect(),
        )
        .unwrap();
        let sigma = generated_state(&layout, &theta, 4, 0).unwrap();
        let f = fidelity(&sigma, &ghz).unwrap();
        best = best.max(f);
        assert!(f <= 0.5 + 1e-9, "restricted output beat the analytic cap: {f}");
    }
    assert!(best > 0.0);
}

#[test]
fn constrained_qmmw_verdicts_on_two_qubit_states() {
    // 1|1-split version of the entanglement test: products land under the
    // auto threshold, clearly entangled states over it.
    let mut rng = rng(405);
    let split = BipartiteSplit::new(1, 1);
    let config = {
        let mut c = QmmwConfig::canonical(2, 400);
        c.epsilon = qugal_core::qmmw::Epsilon::Auto { scale: 3.0 };
        c.record_interval = 400;
        c
    };
    for i in 0..5 {
        let psi = random_product_pure(&mut rng, 1, 1);
        let v = run_entanglement_qmmw(&psi, &split, &config, Threshold::Auto).unwrap();
        assert_eq!(v.decision, Decision::Separable, "product case {i}: gap {}", v.terminal_gap);
    }
    for i in 0..5 {
        let psi = random_entangled_pure(&mut rng, 1, 1, 0.9);
        let v = run_entanglement_qmmw(&psi, &split, &config, Threshold::Auto).unwrap();
        assert_eq!(
            v.decision,
            Decision::Entangled,
            "entangled case {i}: gap {} threshold {}",
            v.terminal_gap,
            v.threshold_used
        );
    }
}

#[test]
fn constrained_losses_stay_in_unit_interval() {
    let mut rng = rng(406);
    let psi = random_entangled_pure(&mut rng, 1, 1, 0.95);
    let config = QmmwConfig::canonical(2, 100);
    let v = run_entanglement_qmmw(&psi, &BipartiteSplit::new(1, 1), &config, Threshold::Auto)
        .unwrap();
    v.trace.validate().unwrap();
    for e in &v.trace.entries {
        assert!((0.0..=1.0).contains(&e.loss));
    }
}

#[test]
fn product_marginal_recovery_via_tensor() {
    // partial_trace(ρ_A ⊗ ρ_B)[keep A] = ρ_A to 1e-10 for random products.
    let mut rng = rng(407);
    for _ in 0..20 {
        let a = random_density(&mut rng, 1);
        let b = random_density(&mut rng, 1);
        let prod = tensor_product(a.matrix(), b.matrix());
        let prod = DensityMatrix::new(
            qugal_core::linalg::HermitianMatrix::new(prod).unwrap(),
        )
        .unwrap();
        let back = qugal_core::linalg::partial_trace(&prod, &[1, 1], 0).unwrap();
        assert!((back.matrix() - a.matrix()).norm() < 1e-10);
    }
}

proptest! {
    #[test]
    fn weights_sum_to_eta_and_stay_nonnegative(
        losses in proptest::collection::vec(0.0f64..1.0, 1..12),
        eta in 0.01f64..1.0,
    ) {
        let w = compute_weights(&losses, eta).unwrap();
        prop_assert_eq!(w.len(), losses.len());
        let sum: f64 = w.iter().sum();
        prop_assert!((sum - eta).abs() < 1e-9);
        prop_assert!(w.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn float_format_round_trips_any_finite(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        let s = fmt_f64(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn built_layouts_round_trip_text(
        qubits in 1usize..5,
        blocks in 0usize..4,
    ) {
        let layout = build_generator_layout(qubits, 0, blocks, CnotRestriction::None).unwrap();
        let parsed = qugal_core::circuit::CircuitLayout::from_text(&layout.to_text()).unwrap();
        prop_assert_eq!(parsed, layout);
    }
}
