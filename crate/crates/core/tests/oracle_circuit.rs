//! Oracle checks for the circuit simulator: gate-by-gate state evolution is
//! compared against dense unitaries assembled from explicit tensor
//! products, and parameter-shift gradients against finite differences.

mod common;

use common::*;
use qugal_core::circuit::{
    apply_circuit, build_discriminator_layout, build_generator_layout, discriminator_accept_prob,
    generated_state, parameter_shift_gradient, qugan_loss, CircuitLayout, CnotRestriction, Gate,
    GanProblem, ParameterVector,
};
use qugal_core::linalg::{
    partial_trace, tensor_product, ComplexMatrix, ComplexVector, DensityMatrix, HermitianMatrix,
    PureState, C64,
};
use rand::Rng;
use rand_chacha::ChaCha12Rng;

fn rot_matrix(kind: &str, theta: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = match kind {
        "RX" => [
            C64::new(c, 0.0),
            C64::new(0.0, -s),
            C64::new(0.0, -s),
            C64::new(c, 0.0),
        ],
        "RY" => [
            C64::new(c, 0.0),
            C64::new(-s, 0.0),
            C64::new(s, 0.0),
            C64::new(c, 0.0),
        ],
        "RZ" => [
            C64::new(c, -s),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(c, s),
        ],
        _ => unreachable!(),
    };
    ComplexMatrix::from_row_slice(2, 2, &e)
}

/// Dense matrix for one gate on an `n`-qubit register (qubit 0 is the most
/// significant bit), built from explicit tensor products and, for CNOT, the
/// basis permutation it defines.
fn gate_matrix(gate: &Gate, params: &ParameterVector, n: usize) -> ComplexMatrix {
    match *gate {
        Gate::Cnot { control, target } => {
            let dim = 1usize << n;
            let mut m = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                let cbit = (i >> (n - 1 - control)) & 1;
                let j = if cbit == 1 { i ^ (1 << (n - 1 - target)) } else { i };
                m[(j, i)] = C64::new(1.0, 0.0);
            }
            m
        }
        _ => {
            let q = gate.target();
            let theta = params.values()[gate.param_index().unwrap()];
            let mut m = ComplexMatrix::identity(1, 1);
            for k in 0..n {
                let factor = if k == q {
                    rot_matrix(gate.kind(), theta)
                } else {
                    ComplexMatrix::identity(2, 2)
                };
                m = tensor_product(&m, &factor);
            }
            m
        }
    }
}

/// Full circuit unitary: product of the per-gate dense matrices.
fn circuit_unitary(layout: &CircuitLayout, params: &ParameterVector) -> ComplexMatrix {
    let dim = 1usize << layout.n_qubits;
    let mut u = ComplexMatrix::identity(dim, dim);
    for gate in &layout.gates {
        u = gate_matrix(gate, params, layout.n_qubits) * u;
    }
    u
}

/// Random layout of `len` gates over `n` qubits.
fn random_layout(rng: &mut ChaCha12Rng, n: usize, len: usize) -> (CircuitLayout, ParameterVector) {
    let mut gates = Vec::new();
    let mut param = 0usize;
    for _ in 0..len {
        match rng.gen_range(0..4) {
            0 => {
                gates.push(Gate::Rx { qubit: rng.gen_range(0..n), param });
                param += 1;
            }
            1 => {
                gates.push(Gate::Ry { qubit: rng.gen_range(0..n), param });
                param += 1;
            }
            2 => {
                gates.push(Gate::Rz { qubit: rng.gen_range(0..n), param });
                param += 1;
            }
            _ if n >= 2 => {
                let control = rng.gen_range(0..n);
                let mut target = rng.gen_range(0..n);
                while target == control {
                    target = rng.gen_range(0..n);
                }
                gates.push(Gate::Cnot { control, target });
            }
            _ => {
                gates.push(Gate::Rx { qubit: 0, param });
                param += 1;
            }
        }
    }
    let layout = CircuitLayout {
        n_qubits: n,
        gates,
        n_params: param,
        block_starts: vec![0],
    };
    layout.validate().unwrap();
    let values = (0..param).map(|_| rng.gen_range(-3.2..3.2)).collect();
    (layout, ParameterVector::new(values).unwrap())
}

#[test]
fn apply_circuit_matches_dense_unitary() {
    let mut rng = rng(201);
    for _ in 0..20 {
        let (layout, params) = random_layout(&mut rng, 3, 12);
        let input = random_pure(&mut rng, 3);
        let fast = apply_circuit(&layout, &params, &input).unwrap();
        let u = circuit_unitary(&layout, &params);
        let expect = &u * input.amplitudes();
        let diff: f64 = (fast.amplitudes() - &expect).norm();
        assert!(diff < 1e-10, "dense oracle mismatch {diff}");
        assert!((fast.amplitudes().norm_squared() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn built_layouts_are_unitary() {
    let mut rng = rng(202);
    for (layout, label) in [
        (build_generator_layout(3, 0, 2, CnotRestriction::None).unwrap(), "gen"),
        (
            build_generator_layout(4, 0, 2, CnotRestriction::Bipartite { n_a: 2, n_b: 2 }).unwrap(),
            "gen-restricted",
        ),
        (build_discriminator_layout(2, 2).unwrap(), "disc"),
    ] {
        let params = ParameterVector::new(
            (0..layout.n_params).map(|_| rng.gen_range(-3.0..3.0)).collect(),
        )
        .unwrap();
        let u = circuit_unitary(&layout, &params);
        let dim = u.nrows();
        let dev = (u.adjoint() * &u - ComplexMatrix::identity(dim, dim)).norm();
        assert!(dev < 1e-9, "{label}: unitarity deviation {dev}");
    }
}

#[test]
fn generated_state_matches_composed_oracle() {
    let mut rng = rng(203);
    for _ in 0..10 {
        let (layout, params) = random_layout(&mut rng, 3, 10);
        let sigma = generated_state(&layout, &params, 2, 1).unwrap();
        // oracle: dense unitary on |0⟩, projector, digit-matching trace
        let u = circuit_unitary(&layout, &params);
        let psi = u.column(0).clone_owned();
        let full = &psi * psi.adjoint();
        let mut expect = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..2 {
                    expect[(i, j)] += full[(2 * i + k, 2 * j + k)];
                }
            }
        }
        assert!((sigma.matrix() - &expect).norm() < 1e-10);
    }
}

#[test]
fn accept_prob_matches_dense_measurement() {
    let mut rng = rng(204);
    for _ in 0..10 {
        let (layout, gamma) = random_layout(&mut rng, 3, 10);
        let input = random_density(&mut rng, 2);
        let p = discriminator_accept_prob(&layout, &gamma, &input).unwrap();

        // oracle: M_D = U†(I ⊗ |0⟩⟨0|)U evaluated on input ⊗ |0⟩⟨0|
        let u = circuit_unitary(&layout, &gamma);
        let e0 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        );
        let proj = tensor_product(&ComplexMatrix::identity(4, 4), &e0);
        let m_d = u.adjoint() * proj * &u;
        let zero = PureState::basis_state(1, 0).density();
        let lifted = tensor_product(input.matrix(), zero.matrix());
        let expect = (m_d * lifted).trace().re;
        assert!((p - expect).abs() < 1e-10, "{p} vs {expect}");
    }
}

#[test]
fn qugan_loss_matches_composed_oracle() {
    let mut rng = rng(205);
    for _ in 0..10 {
        let gen = build_generator_layout(2, 0, 2, CnotRestriction::None).unwrap();
        let disc = build_discriminator_layout(2, 1).unwrap();
        let theta = ParameterVector::new(
            (0..gen.n_params).map(|_| rng.gen_range(-3.0..3.0)).collect(),
        )
        .unwrap();
        let gamma = ParameterVector::new(
            (0..disc.n_params).map(|_| rng.gen_range(-3.0..3.0)).collect(),
        )
        .unwrap();
        let target = random_density(&mut rng, 2);
        let problem = GanProblem::new(target.clone(), 0).unwrap();
        let loss = qugan_loss(&gen, &theta, &disc, &gamma, &problem).unwrap();

        // oracle: both terms from dense unitaries
        let ug = circuit_unitary(&gen, &theta);
        let psi_g = ug.column(0).clone_owned();
        let sigma_g = &psi_g * psi_g.adjoint();
        let ud = circuit_unitary(&disc, &gamma);
        let e0 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        );
        let proj = tensor_product(&ComplexMatrix::identity(4, 4), &e0);
        let m_d = ud.adjoint() * proj * &ud;
        let zero = PureState::basis_state(1, 0).density();
        let acc_rho = (&m_d * tensor_product(target.matrix(), zero.matrix())).trace().re;
        let acc_gen = (&m_d * tensor_product(&sigma_g, zero.matrix())).trace().re;
        let expect = 0.5 * acc_rho + 0.5 * (1.0 - acc_gen);
        assert!((loss - expect).abs() < 1e-10, "{loss} vs {expect}");
    }
}

#[test]
fn parameter_shift_matches_finite_differences_100_cases() {
    let mut rng = rng(206);
    let h = 1e-5;
    for case in 0..100 {
        let n = 2 + case % 2;
        let (layout, params) = random_layout(&mut rng, n, 8);
        if layout.n_params == 0 {
            continue;
        }
        let observable = random_hermitian(&mut rng, 1 << n, 1.0);
        let eval = |p: &ParameterVector| -> Result<f64, qugal_core::Error> {
            let out = apply_circuit(&layout, p, &PureState::basis_state(n, 0))?;
            let v = out.amplitudes();
            Ok((v.adjoint() * observable.matrix() * v)[(0, 0)].re)
        };
        let index = rng.gen_range(0..layout.n_params);
        let exact = parameter_shift_gradient(eval, &params, index).unwrap();
        let fplus = eval(&params.shifted(index, h).unwrap()).unwrap();
        let fminus = eval(&params.shifted(index, -h).unwrap()).unwrap();
        let approx = (fplus - fminus) / (2.0 * h);
        assert!(
            (exact - approx).abs() < 1e-6,
            "case {case}: parameter-shift {exact} vs finite difference {approx}"
        );
    }
}

#[test]
fn restricted_generator_output_is_product() {
    // Every parameter draw of the cut-restricted ansatz yields a state
    // whose marginals reassemble it exactly.
    let mut rng = rng(207);
    let layout =
        build_generator_layout(4, 0, 3, CnotRestriction::Bipartite { n_a: 2, n_b: 2 }).unwrap();
    for _ in 0..25 {
        let theta = ParameterVector::new(
            (0..layout.n_params)
                .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                .collect(),
        )
        .unwrap();
        let sigma = generated_state(&layout, &theta, 4, 0).unwrap();
        let a = partial_trace(&sigma, &[2, 2], 0).unwrap();
        let b = partial_trace(&sigma, &[2, 2], 1).unwrap();
        let rebuilt = tensor_product(a.matrix(), b.matrix());
        assert!(
            (sigma.matrix() - &rebuilt).norm() < 1e-9,
            "restricted output must factor across the cut"
        );
    }
}

#[test]
fn width_and_param_mismatches_rejected() {
    let layout = build_generator_layout(2, 0, 1, CnotRestriction::None).unwrap();
    let bad_width = PureState::basis_state(3, 0);
    assert!(apply_circuit(&layout, &ParameterVector::zeros(layout.n_params), &bad_width).is_err());
    let bad_params = ParameterVector::zeros(layout.n_params + 1);
    assert!(apply_circuit(&layout, &bad_params, &PureState::basis_state(2, 0)).is_err());
    let mixed = DensityMatrix::maximally_mixed(2);
    let disc = build_discriminator_layout(1, 1).unwrap();
    assert!(discriminator_accept_prob(&disc, &ParameterVector::zeros(disc.n_params), &mixed).is_err());
    let _ = HermitianMatrix::identity(2);
    let _ = ComplexVector::zeros(2);
}
