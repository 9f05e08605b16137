//! Bipartite pure-state entanglement test built on the constrained QMMW
//! loop: each generator iterate is projected onto the product of its two
//! marginals, so the generator can only ever present separable (product)
//! states. If the target is separable the loss still converges to the
//! equilibrium value ½; if it is entangled the discriminator keeps finding
//! the gap and the terminal loss stays away from ½.

use crate::error::LinalgError;
use crate::linalg::{partial_trace, DensityMatrix, PureState};
use crate::qmmw::{run_qmmw_constrained, theorem1_bound, QmmwConfig, QmmwRun, TrainingTrace};

/// Bipartition of a register into leading (`n_a`) and trailing (`n_b`)
/// qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteSplit {
    pub n_a: usize,
    pub n_b: usize,
}

impl BipartiteSplit {
    pub fn new(n_a: usize, n_b: usize) -> Self {
        Self { n_a, n_b }
    }

    pub fn total(&self) -> usize {
        self.n_a + self.n_b
    }
}

/// Decision threshold on the terminal loss gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    /// `theorem1_bound(N, T) + 0.05`: separable targets provably land
    /// within the bound, the margin absorbs finite-T noise.
    Auto,
    Fixed(f64),
}

impl Threshold {
    pub fn resolve(self, n_qubits: usize, rounds: usize) -> f64 {
        match self {
            Threshold::Auto => theorem1_bound(n_qubits, rounds) + 0.05,
            Threshold::Fixed(v) => v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Separable,
    Entangled,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decision::Separable => write!(f, "separable"),
            Decision::Entangled => write!(f, "entangled"),
        }
    }
}

/// Outcome of one constrained run: the verdict plus the evidence behind it.
#[derive(Clone, Debug)]
pub struct EntanglementVerdict {
    pub decision: Decision,
    /// `|L(σ̄_G, σ̄_D) − ½|` at the end of the run.
    pub terminal_gap: f64,
    pub threshold_used: f64,
    pub trace: TrainingTrace,
}

/// Projects a state onto the product of its marginals,
/// `(state on A) ⊗ (state on B)`, in A-then-B tensor order. Idempotent, and
/// the identity on product inputs.
pub fn constrain_product(
    sigma: &DensityMatrix,
    split: &BipartiteSplit,
) -> Result<DensityMatrix, LinalgError> {
    if sigma.n_qubits() != split.total() {
        return Err(LinalgError::BadSplit(format!(
            "state has {} qubits, split covers {}",
            sigma.n_qubits(),
            split.total()
        )));
    }
    let dims = [split.n_a, split.n_b];
    let on_a = partial_trace(sigma, &dims, 0)?;
    let on_b = partial_trace(sigma, &dims, 1)?;
    Ok(on_a.tensor(&on_b))
}

/// Runs the QMMW loop with the product constraint applied to every
/// generator iterate and decides separability from the terminal loss gap.
pub fn run_entanglement_qmmw(
    psi: &PureState,
    split: &BipartiteSplit,
    config: &QmmwConfig,
    threshold: Threshold,
) -> Result<EntanglementVerdict, crate::Error> {
    if psi.n_qubits() != split.total() {
        return Err(LinalgError::BadSplit(format!(
            "state has {} qubits, split covers {}",
            psi.n_qubits(),
            split.total()
        ))
        .into());
    }
    let rho = psi.density();
    let split = *split;
    let QmmwRun { trace, .. } = run_qmmw_constrained(&rho, config, |sigma_g| {
        Ok(constrain_product(&sigma_g, &split)?)
    })?;

    let threshold_used = threshold.resolve(config.n_qubits, config.rounds);
    let terminal_gap = (trace.final_loss - 0.5).abs();
    let decision = if terminal_gap <= threshold_used {
        Decision::Separable
    } else {
        Decision::Entangled
    };
    Ok(EntanglementVerdict {
        decision,
        terminal_gap,
        threshold_used,
        trace,
    })
}
