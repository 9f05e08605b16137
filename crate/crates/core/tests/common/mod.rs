//! Shared random-input generators for the oracle test suites. The oracles
//! themselves live in the suites that use them and are kept independent of
//! the library's computation paths.

use nalgebra::DVector;
use qugal_core::linalg::{ComplexMatrix, ComplexVector, DensityMatrix, HermitianMatrix, PureState, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

pub fn random_complex_matrix(rng: &mut ChaCha12Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Random Hermitian matrix with spectral radius roughly `scale` (bounded
/// above by it after rescaling via the Frobenius norm).
pub fn random_hermitian(rng: &mut ChaCha12Rng, dim: usize, scale: f64) -> HermitianMatrix {
    let a = random_complex_matrix(rng, dim);
    let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    let norm = h.norm().max(1e-12);
    HermitianMatrix::new(h * C64::new(scale / norm, 0.0)).expect("hermitian by construction")
}

/// Random full-rank density matrix `AA†/Tr(AA†)`.
pub fn random_density(rng: &mut ChaCha12Rng, n_qubits: usize) -> DensityMatrix {
    let dim = 1usize << n_qubits;
    let a = random_complex_matrix(rng, dim);
    let m = &a * a.adjoint();
    let trace: f64 = m.diagonal().iter().map(|c| c.re).sum();
    let m = m / C64::new(trace, 0.0);
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::new(HermitianMatrix::new(m).unwrap()).unwrap()
}

pub fn random_pure(rng: &mut ChaCha12Rng, n_qubits: usize) -> PureState {
    let dim = 1usize << n_qubits;
    let mut v = ComplexVector::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    v /= C64::new(v.norm(), 0.0);
    PureState::new(v).unwrap()
}

/// Haar-like random unitary from the QR decomposition of a Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha12Rng, dim: usize) -> ComplexMatrix {
    let a = random_complex_matrix(rng, dim);
    let qr = a.qr();
    qr.q()
}

/// Random product state across an `na|nb` cut.
pub fn random_product_pure(rng: &mut ChaCha12Rng, na: usize, nb: usize) -> PureState {
    random_pure(rng, na).tensor(&random_pure(rng, nb))
}

/// Schmidt coefficients (descending singular values) of a bipartite pure
/// state, from the SVD of its amplitude matrix.
pub fn schmidt_coefficients(psi: &PureState, na: usize, nb: usize) -> Vec<f64> {
    assert_eq!(psi.n_qubits(), na + nb);
    let (da, db) = (1usize << na, 1usize << nb);
    let m = ComplexMatrix::from_fn(da, db, |i, j| psi.amplitudes()[i * db + j]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Haar-random entangled state with the largest Schmidt coefficient capped.
pub fn random_entangled_pure(
    rng: &mut ChaCha12Rng,
    na: usize,
    nb: usize,
    max_schmidt: f64,
) -> PureState {
    loop {
        let psi = random_pure(rng, na + nb);
        let sv = schmidt_coefficients(&psi, na, nb);
        if sv[0] <= max_schmidt && sv[1] > 1e-6 {
            return psi;
        }
    }
}

pub fn dvector_close(a: &DVector<f64>, b: &DVector<f64>, tol: f64) -> bool {
    a.len() == b.len() && (a - b).amax() <= tol
}

/// Index-formula Kronecker product, four nested loops.
pub fn kron_oracle(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rb, cb) = (b.nrows(), b.ncols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Partial trace by digit matching over full basis indices: entry (I, J)
/// contributes to the reduced (i, j) when every non-kept digit of I and J
/// agrees.
pub fn partial_trace_oracle(m: &ComplexMatrix, dims: &[usize], keep: usize) -> ComplexMatrix {
    let sizes: Vec<usize> = dims.iter().map(|&q| 1usize << q).collect();
    let total: usize = sizes.iter().product();
    assert_eq!(m.nrows(), total);
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0; sizes.len()];
        for s in (0..sizes.len()).rev() {
            out[s] = idx % sizes[s];
            idx /= sizes[s];
        }
        out
    };
    let dk = sizes[keep];
    let mut out = ComplexMatrix::zeros(dk, dk);
    for row in 0..total {
        for col in 0..total {
            let dr = digits(row);
            let dc = digits(col);
            let mut traced_match = true;
            for s in 0..sizes.len() {
                if s != keep && dr[s] != dc[s] {
                    traced_match = false;
                    break;
                }
            }
            if traced_match {
                out[(dr[keep], dc[keep])] += m[(row, col)];
            }
        }
    }
    out
}

