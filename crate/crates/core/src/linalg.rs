//! Dense complex linear algebra for small multi-qubit systems: Hermitian
//! eigendecomposition, Gibbs-form matrix exponentials, tensor products,
//! partial traces, trace inner products, and fidelity.
//!
//! All values are immutable after construction; every operation is a pure
//! function of its inputs. Dimensions stay small (2^n with n ≤ 8), so
//! everything is dense and exact up to floating point.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::LinalgError;

pub type C64 = Complex64;
/// Carrier type for all operators.
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Maximum allowed deviation from `A = A†`.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Maximum allowed deviation of a density-matrix trace from one.
pub const TRACE_TOL: f64 = 1e-9;
/// Smallest eigenvalue a density matrix may carry; values below are errors.
pub const PSD_TOL: f64 = -1e-9;
/// Maximum allowed deviation of a pure-state squared norm from one.
pub const NORM_TOL: f64 = 1e-10;

fn check_finite(m: &ComplexMatrix) -> Result<(), LinalgError> {
    for (i, v) in m.iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(LinalgError::NonFinite { index: i });
        }
    }
    Ok(())
}

fn is_power_of_two(dim: usize) -> bool {
    dim != 0 && dim & (dim - 1) == 0
}

fn qubits_for_dim(dim: usize) -> Result<usize, LinalgError> {
    if !is_power_of_two(dim) {
        return Err(LinalgError::NonQubitDimension { dim });
    }
    Ok(dim.trailing_zeros() as usize)
}

/// A square complex matrix validated to satisfy `A = A†` within
/// [`HERMITICITY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self, LinalgError> {
        if m.nrows() != m.ncols() {
            return Err(LinalgError::DimensionMismatch {
                left: m.nrows(),
                right: m.ncols(),
            });
        }
        check_finite(&m)?;
        let mut max_dev = 0.0f64;
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
                if dev > max_dev {
                    max_dev = dev;
                }
            }
        }
        if max_dev > HERMITICITY_TOL {
            return Err(LinalgError::NotHermitian { max_dev });
        }
        Ok(Self { m })
    }

    /// Wraps a matrix that is Hermitian by construction. Checked in debug
    /// builds only.
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        debug_assert!(Self::new(m.clone()).is_ok());
        Self { m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    /// Scales by a real factor; Hermiticity is preserved exactly.
    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: &self.m * C64::new(s, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(Self {
            m: &self.m + &other.m,
        })
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|c| c.re).sum()
    }
}

/// Hermitian, positive-semidefinite, unit-trace matrix of dimension
/// `2^n_qubits`: the state type for all mixed states.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    m: HermitianMatrix,
}

impl DensityMatrix {
    /// Full validation: qubit dimension, unit trace, positive semidefinite
    /// up to [`PSD_TOL`].
    pub fn new(m: HermitianMatrix) -> Result<Self, LinalgError> {
        let n_qubits = qubits_for_dim(m.dim())?;
        let dev = (m.trace() - 1.0).abs();
        if dev > TRACE_TOL {
            return Err(LinalgError::NotUnitTrace { dev });
        }
        let (eigs, _) = herm_eig(&m);
        let min_eig = eigs[0];
        if min_eig < PSD_TOL {
            return Err(LinalgError::NotPositiveSemidefinite { min_eig });
        }
        Ok(Self { n_qubits, m })
    }

    /// Wraps a matrix whose density invariants hold by construction
    /// (e.g. Gibbs normalization, partial traces of valid states).
    pub(crate) fn new_unchecked(m: HermitianMatrix) -> Self {
        let n_qubits = qubits_for_dim(m.dim()).expect("dimension must be 2^n");
        debug_assert!((m.trace() - 1.0).abs() < 1e-7);
        Self { n_qubits, m }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let m = ComplexMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0);
        Self {
            n_qubits,
            m: HermitianMatrix::new_unchecked(m),
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        let m = v * v.adjoint();
        Self {
            n_qubits: psi.n_qubits(),
            m: HermitianMatrix::new_unchecked(m),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.m
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.m.matrix()
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Tensor product of two states, in left-to-right subsystem order.
    pub fn tensor(&self, other: &Self) -> Self {
        let m = tensor_product(self.matrix(), other.matrix());
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            m: HermitianMatrix::new_unchecked(m),
        }
    }
}

/// Normalized complex amplitude vector over `2^n_qubits` basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: ComplexVector,
}

impl PureState {
    pub fn new(amps: ComplexVector) -> Result<Self, LinalgError> {
        let n_qubits = qubits_for_dim(amps.len())?;
        for (i, v) in amps.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(LinalgError::NonFinite { index: i });
            }
        }
        let dev = (amps.norm_squared() - 1.0).abs();
        if dev > NORM_TOL {
            return Err(LinalgError::NotNormalized { dev });
        }
        Ok(Self { n_qubits, amps })
    }

    pub(crate) fn new_unchecked(amps: ComplexVector) -> Self {
        let n_qubits = qubits_for_dim(amps.len()).expect("dimension must be 2^n");
        debug_assert!((amps.norm_squared() - 1.0).abs() < 1e-8);
        Self { n_qubits, amps }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        assert!(index < dim, "basis index {index} out of range for {dim}");
        let mut amps = ComplexVector::zeros(dim);
        amps[index] = C64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amps
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// Tensor product `self ⊗ other` (self on the left / most significant).
    pub fn tensor(&self, other: &Self) -> Self {
        let n = self.amps.len() * other.amps.len();
        let mut amps = ComplexVector::zeros(n);
        for i in 0..self.amps.len() {
            for j in 0..other.amps.len() {
                amps[i * other.amps.len() + j] = self.amps[i] * other.amps[j];
            }
        }
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        }
    }

    pub fn overlap(&self, other: &Self) -> C64 {
        self.amps.dotc(&other.amps)
    }
}

/// Kronecker product: `(A ⊗ B)[(i·db+k),(j·db+l)] = A[i,j]·B[k,l]`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Reduced density matrix on subsystem `keep`, with `dims` giving the qubit
/// count of each subsystem in left-to-right tensor order.
pub fn partial_trace(
    rho: &DensityMatrix,
    dims: &[usize],
    keep: usize,
) -> Result<DensityMatrix, LinalgError> {
    let total: usize = dims.iter().sum();
    if total != rho.n_qubits() {
        return Err(LinalgError::BadSplit(format!(
            "subsystem qubits sum to {total}, state has {}",
            rho.n_qubits()
        )));
    }
    if keep >= dims.len() {
        return Err(LinalgError::BadSplit(format!(
            "keep index {keep} out of range for {} subsystems",
            dims.len()
        )));
    }
    let left_qubits: usize = dims[..keep].iter().sum();
    let keep_qubits = dims[keep];
    let right_qubits: usize = dims[keep + 1..].iter().sum();
    let (dl, dk, dr) = (1usize << left_qubits, 1usize << keep_qubits, 1usize << right_qubits);

    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..dl {
                for r in 0..dr {
                    let row = (l * dk + i) * dr + r;
                    let col = (l * dk + j) * dr + r;
                    acc += m[(row, col)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    // Hermiticity and unit trace carry over from the input exactly, up to
    // floating-point roundoff; symmetrize to keep the invariant tight.
    let out = (&out + out.adjoint()) * C64::new(0.5, 0.0);
    Ok(DensityMatrix::new_unchecked(HermitianMatrix::new_unchecked(out)))
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues ascending, with the
/// matching unitary of column eigenvectors, so that `h = V diag(λ) V†`.
pub fn herm_eig(h: &HermitianMatrix) -> (DVector<f64>, ComplexMatrix) {
    let se = h.m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let dim = h.dim();
    let mut eigs = DVector::zeros(dim);
    let mut vecs = ComplexMatrix::zeros(dim, dim);
    for (new_col, &old_col) in order.iter().enumerate() {
        eigs[new_col] = se.eigenvalues[old_col];
        vecs.set_column(new_col, &se.eigenvectors.column(old_col));
    }
    (eigs, vecs)
}

/// Gibbs normalization `exp(h)/Tr(exp(h))`, computed through the Hermitian
/// eigendecomposition with a max-eigenvalue shift so the exponentials never
/// overflow. Output is positive definite with unit trace.
pub fn gibbs_normalize(h: &HermitianMatrix) -> Result<DensityMatrix, LinalgError> {
    qubits_for_dim(h.dim())?;
    let (eigs, v) = herm_eig(h);
    let shift = eigs[eigs.len() - 1];
    let weights: Vec<f64> = eigs.iter().map(|&w| (w - shift).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut scaled = v.clone();
    for (c, &w) in weights.iter().enumerate() {
        let mut col = scaled.column_mut(c);
        col *= C64::new(w / total, 0.0);
    }
    let m = &scaled * v.adjoint();
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    Ok(DensityMatrix::new_unchecked(HermitianMatrix::new_unchecked(m)))
}

/// Real trace inner product `Re Tr(a·b)` of two Hermitian matrices. The
/// imaginary part vanishes analytically and is asserted small.
pub fn trace_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64, LinalgError> {
    if a.dim() != b.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let (ma, mb) = (a.matrix(), b.matrix());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..ma.nrows() {
        for j in 0..ma.ncols() {
            acc += ma[(i, j)] * mb[(j, i)];
        }
    }
    assert!(
        acc.im.abs() <= 1e-10 * (1.0 + acc.re.abs()),
        "trace inner product of Hermitian matrices must be real, got imag {}",
        acc.im
    );
    Ok(acc.re)
}

// Eigenvalues of unit-trace PSD matrices below this are roundoff dust;
// square roots would amplify them from ~1e-16 to ~1e-8.
const SQRT_EIG_CUTOFF: f64 = 1e-13;

fn clamped_sqrt(w: f64) -> f64 {
    if w <= SQRT_EIG_CUTOFF {
        0.0
    } else {
        w.sqrt()
    }
}

fn sqrt_psd(rho: &DensityMatrix) -> ComplexMatrix {
    let (eigs, v) = herm_eig(rho.hermitian());
    let mut scaled = v.clone();
    for (c, &w) in eigs.iter().enumerate() {
        let mut col = scaled.column_mut(c);
        col *= C64::new(clamped_sqrt(w), 0.0);
    }
    &scaled * v.adjoint()
}

/// Square-root (unsquared) Uhlmann fidelity `Tr √(√ρ σ √ρ)`, clamped to [0,1].
pub fn sqrt_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, LinalgError> {
    if rho.dim() != sigma.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let s = sqrt_psd(rho);
    let inner = &s * sigma.matrix() * &s;
    let inner = (&inner + inner.adjoint()) * C64::new(0.5, 0.0);
    let (eigs, _) = herm_eig(&HermitianMatrix::new_unchecked(inner));
    let total: f64 = eigs.iter().map(|&w| clamped_sqrt(w)).sum();
    Ok(total.clamp(0.0, 1.0))
}

/// Squared Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`, clamped to [0,1]. Equals
/// `⟨ψ|σ|ψ⟩` when `ρ = |ψ⟩⟨ψ|` and `|⟨ψ|φ⟩|²` for two pure states.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, LinalgError> {
    let root = sqrt_fidelity(rho, sigma)?;
    Ok((root * root).clamp(0.0, 1.0))
}

/// Which end of the spectrum [`extreme_eig_projector`] selects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    Min,
    Max,
}

/// Rank-1 projector `vv†` onto a unit eigenvector of the requested extreme
/// eigenvalue. Degeneracies resolve deterministically to the lowest
/// eigenvector index produced by [`herm_eig`].
pub fn extreme_eig_projector(
    h: &HermitianMatrix,
    which: Extreme,
) -> Result<DensityMatrix, LinalgError> {
    qubits_for_dim(h.dim())?;
    let (_, v) = herm_eig(h);
    let col = match which {
        Extreme::Min => 0,
        Extreme::Max => h.dim() - 1,
    };
    let vec = v.column(col).clone_owned();
    let m = &vec * vec.adjoint();
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    Ok(DensityMatrix::new_unchecked(HermitianMatrix::new_unchecked(m)))
}
