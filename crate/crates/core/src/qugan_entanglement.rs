//! Bipartite pure-state entanglement test driven by adversarial circuit
//! training: the generator's CNOTs never cross the A|B cut, so it can only
//! prepare product states. Separable targets let the loss settle at the
//! equilibrium value ½; entangled targets leave a gap the discriminator
//! keeps exploiting, and the verdict reads that gap off the post-burn-in
//! loss.

use crate::circuit::{
    build_discriminator_layout, build_generator_layout, CnotRestriction, GanProblem,
};
use crate::entanglement::{BipartiteSplit, Decision, Threshold};
use crate::error::{ConfigError, LinalgError};
use crate::linalg::PureState;
use crate::qugan::{mw_train, GanTrainingTrace, TrainerConfig};

/// Auto decision threshold on `|mean loss − ½|`.
pub const AUTO_THRESHOLD: f64 = 0.1;

/// Verdict plus the convergence evidence it was read from.
#[derive(Clone, Debug)]
pub struct QuganEntanglementReport {
    pub decision: Decision,
    /// Loss extremes over the post-burn-in window.
    pub terminal_loss_band: (f64, f64),
    pub post_burn_in_mean_loss: f64,
    pub terminal_fidelity: f64,
    /// First recorded round from which the loss stays inside its terminal
    /// band.
    pub burn_in: usize,
    pub threshold: f64,
    pub trace: GanTrainingTrace,
}

/// Detects the burn-in point: the terminal band is the loss range over the
/// last 40% of recorded rounds, and burn-in is the earliest recorded round
/// from which every later loss stays inside that band.
pub(crate) fn detect_burn_in(losses: &[f64]) -> (usize, (f64, f64)) {
    assert!(!losses.is_empty());
    let tail_start = (losses.len() * 3) / 5;
    let tail = &losses[tail_start.min(losses.len() - 1)..];
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min) - 1e-12;
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1e-12;
    let mut burn_in_idx = losses.len() - 1;
    for i in (0..losses.len()).rev() {
        if losses[i] < lo || losses[i] > hi {
            break;
        }
        burn_in_idx = i;
    }
    (burn_in_idx, (lo + 1e-12, hi - 1e-12))
}

fn resolve_threshold(threshold: Threshold) -> f64 {
    match threshold {
        Threshold::Auto => AUTO_THRESHOLD,
        Threshold::Fixed(v) => v,
    }
}

/// Trains a connectivity-restricted generator against `psi` and decides
/// separability from where the post-burn-in loss settles relative to ½.
pub fn run_entanglement_qugan(
    psi: &PureState,
    split: &BipartiteSplit,
    trainer: &TrainerConfig,
    blocks: (usize, usize),
    threshold: Threshold,
) -> Result<QuganEntanglementReport, crate::Error> {
    if psi.n_qubits() != split.total() {
        return Err(LinalgError::BadSplit(format!(
            "state has {} qubits, split covers {}",
            psi.n_qubits(),
            split.total()
        ))
        .into());
    }
    let (l1, l2) = blocks;
    let gen_layout = build_generator_layout(
        split.total(),
        0,
        l1,
        CnotRestriction::Bipartite {
            n_a: split.n_a,
            n_b: split.n_b,
        },
    )?;
    let disc_layout = build_discriminator_layout(split.total(), l2)?;
    let problem = GanProblem::new(psi.density(), 0)?;
    let outcome = mw_train(&problem, &gen_layout, &disc_layout, trainer)?;

    let losses = outcome.trace.losses();
    if losses.is_empty() {
        return Err(ConfigError("training recorded no rounds".into()).into());
    }
    let (burn_in_idx, _) = detect_burn_in(&losses);
    let window = &losses[burn_in_idx..];
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    let band = (
        window.iter().cloned().fold(f64::INFINITY, f64::min),
        window.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let threshold = resolve_threshold(threshold);
    let decision = if (mean - 0.5).abs() <= threshold {
        Decision::Separable
    } else {
        Decision::Entangled
    };
    Ok(QuganEntanglementReport {
        decision,
        terminal_loss_band: band,
        post_burn_in_mean_loss: mean,
        terminal_fidelity: outcome.trace.final_fidelity,
        burn_in: outcome.trace.entries[burn_in_idx].round,
        threshold,
        trace: outcome.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burn_in_detects_plateau_entry() {
        // Rises for 6 rounds, then sits in a narrow band.
        let losses = vec![0.9, 0.8, 0.7, 0.65, 0.6, 0.55, 0.5, 0.51, 0.49, 0.5];
        let (idx, band) = detect_burn_in(&losses);
        assert_eq!(idx, 6);
        assert!(band.0 <= 0.49 && band.1 >= 0.51);
    }

    #[test]
    fn burn_in_with_flat_series_is_zero() {
        let losses = vec![0.5; 20];
        let (idx, _) = detect_burn_in(&losses);
        assert_eq!(idx, 0);
    }

    #[test]
    fn burn_in_single_entry() {
        let (idx, _) = detect_burn_in(&[0.42]);
        assert_eq!(idx, 0);
    }

    #[test]
    fn basis_product_state_is_separable() {
        // |0000⟩ with a 2|2 split is generator-reachable.
        let psi = PureState::basis_state(4, 0);
        let split = BipartiteSplit::new(2, 2);
        let trainer = TrainerConfig::canonical(200, 1);
        let report =
            run_entanglement_qugan(&psi, &split, &trainer, (7, 3), Threshold::Auto).unwrap();
        assert_eq!(report.decision, Decision::Separable);
        assert!(
            report.terminal_fidelity > 0.9,
            "fidelity {} too low for a reachable target",
            report.terminal_fidelity
        );
    }

    #[test]
    fn split_mismatch_rejected() {
        let psi = PureState::basis_state(3, 0);
        let split = BipartiteSplit::new(2, 2);
        let trainer = TrainerConfig::canonical(5, 1);
        assert!(run_entanglement_qugan(&psi, &split, &trainer, (1, 1), Threshold::Auto).is_err());
    }
}
