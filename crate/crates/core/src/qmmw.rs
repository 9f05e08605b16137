//! Online matrix-multiplicative-weights training loop over density
//! matrices.
//!
//! Each round the generator produces a Gibbs state from the accumulated
//! discriminator iterates, the zero-sum loss is evaluated, and the
//! discriminator produces a Gibbs state from the accumulated target/generator
//! gaps. The averaged iterates approach the game's equilibrium at value ½,
//! within [`theorem1_bound`] of it after `T` rounds, and empirical regret
//! auditors certify the per-player no-regret bounds on any finished run.

use crate::error::{ConfigError, LinalgError};
use crate::linalg::{
    extreme_eig_projector, fidelity, gibbs_normalize, trace_inner, ComplexMatrix, DensityMatrix,
    Extreme, HermitianMatrix, C64,
};

/// Sign applied inside a Gibbs-update exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Step-size choice: `Auto { scale }` resolves to `scale·√(N/T)`, `Fixed`
/// is used as given.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Epsilon {
    Auto { scale: f64 },
    Fixed(f64),
}

impl Epsilon {
    pub const AUTO: Epsilon = Epsilon::Auto { scale: 1.0 };
}

/// Configuration for one QMMW run.
///
/// `new` uses the exponent signs as printed in the update rules (both
/// `Minus`); `canonical` uses the signs selected by the sign-resolution
/// experiment (both `Plus`), under which the averaged generator converges
/// to the target with loss approaching ½ from above. Run the CLI's
/// `sign-resolve` experiment to reproduce that selection.
#[derive(Clone, Debug)]
pub struct QmmwConfig {
    pub n_qubits: usize,
    pub rounds: usize,
    pub epsilon: Epsilon,
    pub generator_sign: Sign,
    pub discriminator_sign: Sign,
    pub record_interval: usize,
    /// Retain enough per-round information to record regret rates.
    pub audit_regret: bool,
}

impl QmmwConfig {
    /// Printed-form defaults: both exponent signs negative, auto ε.
    pub fn new(n_qubits: usize, rounds: usize) -> Self {
        Self {
            n_qubits,
            rounds,
            epsilon: Epsilon::AUTO,
            generator_sign: Sign::Minus,
            discriminator_sign: Sign::Minus,
            record_interval: 1,
            audit_regret: false,
        }
    }

    /// Resolved sign combination (both exponents ascending).
    pub fn canonical(n_qubits: usize, rounds: usize) -> Self {
        Self {
            generator_sign: Sign::Plus,
            discriminator_sign: Sign::Plus,
            ..Self::new(n_qubits, rounds)
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_qubits == 0 {
            return Err(ConfigError("n_qubits must be positive".into()));
        }
        if self.rounds == 0 {
            return Err(ConfigError("rounds must be positive".into()));
        }
        if self.record_interval == 0 {
            return Err(ConfigError("record_interval must be positive".into()));
        }
        self.effective_epsilon().map(|_| ())
    }

    /// Resolves ε. Auto requires `√(N/T) ≤ ½`: larger values mean the round
    /// budget is too small for the qubit count.
    pub fn effective_epsilon(&self) -> Result<f64, ConfigError> {
        let eps = match self.epsilon {
            Epsilon::Auto { scale } => {
                if scale <= 0.0 || !scale.is_finite() {
                    return Err(ConfigError(format!("epsilon scale {scale} must be positive")));
                }
                let base = (self.n_qubits as f64 / self.rounds as f64).sqrt();
                if base > 0.5 {
                    return Err(ConfigError(format!(
                        "rounds={} too small for n_qubits={}: auto epsilon {base:.4} exceeds 1/2",
                        self.rounds, self.n_qubits
                    )));
                }
                scale * base
            }
            Epsilon::Fixed(e) => e,
        };
        if !(eps > 0.0 && eps < 1.0) {
            return Err(ConfigError(format!("epsilon {eps} outside (0, 1)")));
        }
        Ok(eps)
    }
}

/// Running Hermitian sum used inside a Gibbs-update exponent.
#[derive(Clone, Debug)]
pub struct HermitianAccumulator {
    sum: HermitianMatrix,
}

impl HermitianAccumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            sum: HermitianMatrix::zeros(dim),
        }
    }

    pub fn add(&mut self, term: &HermitianMatrix) -> Result<(), LinalgError> {
        self.sum = self.sum.add(term)?;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.sum.dim()
    }

    pub fn sum(&self) -> &HermitianMatrix {
        &self.sum
    }

    pub fn trace(&self) -> f64 {
        self.sum.trace()
    }
}

/// Mutable loop state: exponent sums driving the two Gibbs updates plus
/// running sums of the iterates for the averaged output.
#[derive(Clone, Debug)]
pub struct QmmwState {
    round: usize,
    disc_exponent_sum: HermitianAccumulator,
    gen_exponent_sum: HermitianAccumulator,
    gen_running_sum: ComplexMatrix,
    disc_running_sum: ComplexMatrix,
}

impl QmmwState {
    pub fn new(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            round: 0,
            disc_exponent_sum: HermitianAccumulator::new(dim),
            gen_exponent_sum: HermitianAccumulator::new(dim),
            gen_running_sum: ComplexMatrix::zeros(dim, dim),
            disc_running_sum: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn disc_exponent_sum(&self) -> &HermitianAccumulator {
        &self.disc_exponent_sum
    }

    pub fn gen_exponent_sum(&self) -> &HermitianAccumulator {
        &self.gen_exponent_sum
    }

    /// Folds the round-`t` discriminator into the sums, making the state
    /// ready for the round-`t` generator update.
    pub fn push_discriminator(&mut self, sigma_d: &DensityMatrix) -> Result<(), LinalgError> {
        self.disc_exponent_sum.add(sigma_d.hermitian())?;
        self.disc_running_sum += sigma_d.matrix();
        self.round += 1;
        Ok(())
    }

    /// Folds the round-`t` generator iterate into the sums.
    pub fn push_generator(
        &mut self,
        sigma_g: &DensityMatrix,
        rho: &DensityMatrix,
    ) -> Result<(), LinalgError> {
        let gap = HermitianMatrix::new_unchecked(rho.matrix() - sigma_g.matrix());
        self.gen_exponent_sum.add(&gap)?;
        self.gen_running_sum += sigma_g.matrix();
        Ok(())
    }

    fn averaged(&self, sum: &ComplexMatrix) -> DensityMatrix {
        let m = sum / C64::new(self.round as f64, 0.0);
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        DensityMatrix::new_unchecked(HermitianMatrix::new_unchecked(m))
    }

    pub fn averaged_generator(&self) -> DensityMatrix {
        self.averaged(&self.gen_running_sum)
    }

    pub fn averaged_discriminator(&self) -> DensityMatrix {
        self.averaged(&self.disc_running_sum)
    }
}

/// Zero-sum loss `½(Tr(σ_D ρ) − Tr(σ_D σ_G)) + ½`, always in [0, 1].
pub fn qmmw_loss(
    sigma_g: &DensityMatrix,
    sigma_d: &DensityMatrix,
    rho: &DensityMatrix,
) -> Result<f64, LinalgError> {
    let on_target = trace_inner(sigma_d.hermitian(), rho.hermitian())?;
    let on_generated = trace_inner(sigma_d.hermitian(), sigma_g.hermitian())?;
    let loss = 0.5 * (on_target - on_generated) + 0.5;
    debug_assert!((-1e-9..=1.0 + 1e-9).contains(&loss));
    Ok(loss.clamp(0.0, 1.0))
}

/// Generator update: Gibbs state of `sign·ε·Σ_τ σ_D^(τ)` over the pushed
/// discriminator history.
pub fn update_generator(
    state: &QmmwState,
    config: &QmmwConfig,
) -> Result<DensityMatrix, crate::Error> {
    let eps = config.effective_epsilon()?;
    let exponent = state
        .disc_exponent_sum
        .sum()
        .scale(config.generator_sign.factor() * eps);
    Ok(gibbs_normalize(&exponent)?)
}

/// Discriminator update: Gibbs state of `sign·ε·Σ_τ (ρ − σ_G^(τ))`. With an
/// empty history this is the maximally mixed initial discriminator.
pub fn update_discriminator(
    state: &QmmwState,
    rho: &DensityMatrix,
    config: &QmmwConfig,
) -> Result<DensityMatrix, crate::Error> {
    if rho.dim() != state.gen_exponent_sum.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: rho.dim(),
            right: state.gen_exponent_sum.dim(),
        }
        .into());
    }
    let eps = config.effective_epsilon()?;
    let exponent = state
        .gen_exponent_sum
        .sum()
        .scale(config.discriminator_sign.factor() * eps);
    Ok(gibbs_normalize(&exponent)?)
}

/// Convergence bound on the averaged-state loss gap: `3√(N/T)`.
pub fn theorem1_bound(n_qubits: usize, rounds: usize) -> f64 {
    3.0 * (n_qubits as f64 / rounds as f64).sqrt()
}

/// One recorded round of a training run.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub round: usize,
    pub loss: f64,
    /// Fidelity between the running averaged generator and the target.
    pub fidelity: f64,
    pub gen_regret_rate: Option<f64>,
    pub disc_regret_rate: Option<f64>,
}

/// Per-round records plus the terminal averaged-state readouts.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingTrace {
    pub entries: Vec<TraceEntry>,
    /// Loss of the averaged pair `L(σ̄_G, σ̄_D)`.
    pub final_loss: f64,
    /// Fidelity between `σ̄_G` and the target.
    pub final_fidelity: f64,
}

impl TrainingTrace {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut prev = 0usize;
        for e in &self.entries {
            if e.round <= prev && prev != 0 {
                return Err(ConfigError(format!("rounds not increasing at {}", e.round)));
            }
            if !(0.0..=1.0).contains(&e.loss) {
                return Err(ConfigError(format!("loss {} outside [0,1]", e.loss)));
            }
            prev = e.round;
        }
        Ok(())
    }
}

/// Finished run: the trace plus both averaged states.
#[derive(Clone, Debug)]
pub struct QmmwRun {
    pub trace: TrainingTrace,
    pub sigma_g_bar: DensityMatrix,
    pub sigma_d_bar: DensityMatrix,
}

/// Runs the full training loop against `rho`.
pub fn run_qmmw(rho: &DensityMatrix, config: &QmmwConfig) -> Result<QmmwRun, crate::Error> {
    run_qmmw_constrained(rho, config, |sigma_g| Ok(sigma_g))
}

/// Training loop with a hook applied to each generator iterate right after
/// its Gibbs update; the loss and the discriminator update then see the
/// constrained iterate.
pub fn run_qmmw_constrained<F>(
    rho: &DensityMatrix,
    config: &QmmwConfig,
    mut constrain: F,
) -> Result<QmmwRun, crate::Error>
where
    F: FnMut(DensityMatrix) -> Result<DensityMatrix, crate::Error>,
{
    config.validate()?;
    if rho.n_qubits() != config.n_qubits {
        return Err(LinalgError::DimensionMismatch {
            left: rho.n_qubits(),
            right: config.n_qubits,
        }
        .into());
    }

    let mut state = QmmwState::new(config.n_qubits);
    let mut sigma_d = DensityMatrix::maximally_mixed(config.n_qubits);
    let mut entries = Vec::new();
    // Running sums for the incremental regret audit: Σ_t L_t and
    // Σ_t (½Tr(σ_D^(t)ρ) + ½), the generator-independent part of the loss.
    let mut loss_sum = 0.0;
    let mut const_sum = 0.0;

    for t in 1..=config.rounds {
        state.push_discriminator(&sigma_d)?;
        let sigma_g = constrain(update_generator(&state, config)?)?;
        let loss = qmmw_loss(&sigma_g, &sigma_d, rho)?;
        state.push_generator(&sigma_g, rho)?;

        loss_sum += loss;
        const_sum += 0.5 * trace_inner(sigma_d.hermitian(), rho.hermitian())? + 0.5;

        if t % config.record_interval == 0 || t == config.rounds {
            let fid = fidelity(&state.averaged_generator(), rho)?;
            let (gen_rate, disc_rate) = if config.audit_regret {
                let (g, d) = audit_rates(&state, loss_sum, const_sum, t)?;
                (Some(g), Some(d))
            } else {
                (None, None)
            };
            entries.push(TraceEntry {
                round: t,
                loss,
                fidelity: fid,
                gen_regret_rate: gen_rate,
                disc_regret_rate: disc_rate,
            });
        }

        if t < config.rounds {
            sigma_d = update_discriminator(&state, rho, config)?;
        }
    }

    let sigma_g_bar = state.averaged_generator();
    let sigma_d_bar = state.averaged_discriminator();
    let final_loss = qmmw_loss(&sigma_g_bar, &sigma_d_bar, rho)?;
    let final_fidelity = fidelity(&sigma_g_bar, rho)?;
    Ok(QmmwRun {
        trace: TrainingTrace {
            entries,
            final_loss,
            final_fidelity,
        },
        sigma_g_bar,
        sigma_d_bar,
    })
}

/// Incremental regret rates from the running sums. The best fixed generator
/// maximizes `Tr(σ_G Σσ_D)` (top eigenvalue of the discriminator sum); the
/// best fixed discriminator minimizes `Tr(σ_D Σ(ρ−σ_G))` (bottom eigenvalue
/// of the gap sum).
fn audit_rates(
    state: &QmmwState,
    loss_sum: f64,
    const_sum: f64,
    t: usize,
) -> Result<(f64, f64), crate::Error> {
    let (disc_eigs, _) = crate::linalg::herm_eig(state.disc_exponent_sum.sum());
    let best_fixed_gen = const_sum - 0.5 * disc_eigs[disc_eigs.len() - 1];
    let gen_regret = -loss_sum + best_fixed_gen;

    let (gap_eigs, _) = crate::linalg::herm_eig(state.gen_exponent_sum.sum());
    let best_fixed_disc = 0.5 * t as f64 + 0.5 * gap_eigs[0];
    let disc_regret = loss_sum - best_fixed_disc;
    Ok((gen_regret / t as f64, disc_regret / t as f64))
}

/// Exact regret of the generator sequence against the best fixed generator
/// in hindsight: `−Σ_t L(σ_G^(t),σ_D^(t)) + min_{σ_G} Σ_t L(σ_G,σ_D^(t))`.
pub fn empirical_generator_regret(
    history: &[(DensityMatrix, DensityMatrix)],
    rho: &DensityMatrix,
) -> Result<f64, crate::Error> {
    assert!(!history.is_empty(), "history must be nonempty");
    let dim = history[0].1.dim();
    let mut disc_sum = HermitianAccumulator::new(dim);
    let mut actual = 0.0;
    for (g, d) in history {
        actual += qmmw_loss(g, d, rho)?;
        disc_sum.add(d.hermitian())?;
    }
    // Loss decreases in Tr(σ_G σ_D): the minimizing comparator is the top
    // eigenvector projector of the accumulated discriminator.
    let comparator = extreme_eig_projector(disc_sum.sum(), Extreme::Max)?;
    let mut best = 0.0;
    for (_, d) in history {
        best += qmmw_loss(&comparator, d, rho)?;
    }
    Ok(-actual + best)
}

/// Exact regret of the discriminator sequence:
/// `Σ_t L(σ_G^(t),σ_D^(t)) − min_{σ_D} Σ_t L(σ_G^(t),σ_D)`.
pub fn empirical_discriminator_regret(
    history: &[(DensityMatrix, DensityMatrix)],
    rho: &DensityMatrix,
) -> Result<f64, crate::Error> {
    assert!(!history.is_empty(), "history must be nonempty");
    let dim = history[0].0.dim();
    let mut gap_sum = HermitianAccumulator::new(dim);
    let mut actual = 0.0;
    for (g, d) in history {
        actual += qmmw_loss(g, d, rho)?;
        gap_sum.add(&HermitianMatrix::new_unchecked(rho.matrix() - g.matrix()))?;
    }
    let comparator = extreme_eig_projector(gap_sum.sum(), Extreme::Min)?;
    let mut best = 0.0;
    for (g, _) in history {
        best += qmmw_loss(g, &comparator, rho)?;
    }
    Ok(actual - best)
}

/// Regret-rate bound for the generator: `(ε²T + N)/(2εT)`.
pub fn generator_regret_bound(epsilon: f64, rounds: usize, n_qubits: usize) -> f64 {
    let t = rounds as f64;
    (epsilon * epsilon * t + n_qubits as f64) / (2.0 * epsilon * t)
}

/// Regret-rate bound for the discriminator: `(ε²T + N + 1)/(2εT)`.
pub fn discriminator_regret_bound(epsilon: f64, rounds: usize, n_qubits: usize) -> f64 {
    let t = rounds as f64;
    (epsilon * epsilon * t + n_qubits as f64 + 1.0) / (2.0 * epsilon * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexVector, PureState};
    use approx::assert_abs_diff_eq;

    fn rho_from_diag(probs: &[f64]) -> DensityMatrix {
        let dim = probs.len();
        let diag = ComplexVector::from_iterator(dim, probs.iter().map(|&p| C64::new(p, 0.0)));
        DensityMatrix::new(HermitianMatrix::new(ComplexMatrix::from_diagonal(&diag)).unwrap())
            .unwrap()
    }

    #[test]
    fn loss_at_equilibrium_is_half() {
        let rho = rho_from_diag(&[0.3, 0.7]);
        for sigma_d in [
            DensityMatrix::maximally_mixed(1),
            PureState::basis_state(1, 0).density(),
        ] {
            assert_abs_diff_eq!(
                qmmw_loss(&rho, &sigma_d, &rho).unwrap(),
                0.5,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn loss_perfect_discrimination() {
        let rho = PureState::basis_state(1, 0).density();
        let sigma_g = PureState::basis_state(1, 1).density();
        let sigma_d = PureState::basis_state(1, 0).density();
        assert_abs_diff_eq!(qmmw_loss(&sigma_g, &sigma_d, &rho).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn generator_update_first_round_mixed() {
        let config = QmmwConfig::new(1, 4);
        let mut state = QmmwState::new(1);
        state
            .push_discriminator(&DensityMatrix::maximally_mixed(1))
            .unwrap();
        let g = update_generator(&state, &config).unwrap();
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!((g.matrix() - mixed.matrix()).norm() < 1e-12);
    }

    #[test]
    fn generator_update_closed_form() {
        // one round of |0⟩⟨0| discriminator, ε = 0.5, printed sign
        let mut config = QmmwConfig::new(1, 4);
        config.epsilon = Epsilon::Fixed(0.5);
        let mut state = QmmwState::new(1);
        state
            .push_discriminator(&PureState::basis_state(1, 0).density())
            .unwrap();
        let g = update_generator(&state, &config).unwrap();
        let z = (-0.5f64).exp() + 1.0;
        assert_abs_diff_eq!(g.matrix()[(0, 0)].re, (-0.5f64).exp() / z, epsilon = 1e-12);
        assert_abs_diff_eq!(g.matrix()[(1, 1)].re, 1.0 / z, epsilon = 1e-12);
    }

    #[test]
    fn discriminator_update_empty_history_is_mixed() {
        let config = QmmwConfig::new(2, 16);
        let state = QmmwState::new(2);
        let rho = DensityMatrix::maximally_mixed(2);
        let d = update_discriminator(&state, &rho, &config).unwrap();
        assert!((d.matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm() < 1e-12);
    }

    #[test]
    fn discriminator_update_zero_gap_is_mixed() {
        let config = QmmwConfig::new(1, 4);
        let rho = PureState::basis_state(1, 0).density();
        let mut state = QmmwState::new(1);
        state.push_discriminator(&DensityMatrix::maximally_mixed(1)).unwrap();
        state.push_generator(&rho, &rho).unwrap();
        let d = update_discriminator(&state, &rho, &config).unwrap();
        assert!((d.matrix() - DensityMatrix::maximally_mixed(1).matrix()).norm() < 1e-12);
    }

    #[test]
    fn discriminator_update_closed_form() {
        let mut config = QmmwConfig::new(1, 4);
        config.epsilon = Epsilon::Fixed(0.2);
        let rho = PureState::basis_state(1, 0).density();
        let mut state = QmmwState::new(1);
        state.push_discriminator(&DensityMatrix::maximally_mixed(1)).unwrap();
        state
            .push_generator(&DensityMatrix::maximally_mixed(1), &rho)
            .unwrap();
        // exponent: −0.2·diag(1/2, −1/2)
        let d = update_discriminator(&state, &rho, &config).unwrap();
        let z = (-0.1f64).exp() + (0.1f64).exp();
        assert_abs_diff_eq!(d.matrix()[(0, 0)].re, (-0.1f64).exp() / z, epsilon = 1e-12);
        assert_abs_diff_eq!(d.matrix()[(1, 1)].re, (0.1f64).exp() / z, epsilon = 1e-12);
    }

    #[test]
    fn theorem1_bound_values() {
        assert_abs_diff_eq!(theorem1_bound(4, 1600), 0.15, epsilon = 1e-12);
        assert_abs_diff_eq!(theorem1_bound(4, 400), 0.30, epsilon = 1e-12);
        for n in [1usize, 3, 7] {
            assert_abs_diff_eq!(theorem1_bound(n, n), 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn auto_epsilon_rejects_small_rounds() {
        let config = QmmwConfig::new(4, 8); // √(4/8) ≈ 0.707 > 1/2
        assert!(config.effective_epsilon().is_err());
        let config = QmmwConfig::new(4, 16); // √(4/16) = 0.5 allowed
        assert_abs_diff_eq!(config.effective_epsilon().unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn maximally_mixed_target_is_fixed_point() {
        for sign in [Sign::Plus, Sign::Minus] {
            let mut config = QmmwConfig::new(2, 40);
            config.generator_sign = sign;
            config.discriminator_sign = sign;
            let rho = DensityMatrix::maximally_mixed(2);
            let run = run_qmmw(&rho, &config).unwrap();
            for e in &run.trace.entries {
                assert_abs_diff_eq!(e.loss, 0.5, epsilon = 1e-10);
            }
            assert!(
                (run.sigma_g_bar.matrix() - rho.matrix()).norm() < 1e-9,
                "averaged generator must stay maximally mixed"
            );
        }
    }

    #[test]
    fn zero_regret_when_generator_matches_comparator() {
        // Discriminator constant: the best fixed generator is the top
        // eigenvector of σ_D; play exactly that every round.
        let rho = PureState::basis_state(1, 0).density();
        let sigma_d = rho_from_diag(&[0.8, 0.2]);
        let best = PureState::basis_state(1, 0).density();
        let history = vec![(best.clone(), sigma_d.clone()), (best.clone(), sigma_d)];
        let r = empirical_generator_regret(&history, &rho).unwrap();
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_discriminator_regret_at_equilibrium() {
        let rho = rho_from_diag(&[0.5, 0.5]);
        let history = vec![
            (rho.clone(), DensityMatrix::maximally_mixed(1)),
            (rho.clone(), PureState::basis_state(1, 1).density()),
        ];
        let r = empirical_discriminator_regret(&history, &rho).unwrap();
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn state_trace_invariants_hold() {
        let config = QmmwConfig::canonical(2, 30);
        let rho = rho_from_diag(&[0.4, 0.3, 0.2, 0.1]);
        let mut state = QmmwState::new(2);
        let mut sigma_d = DensityMatrix::maximally_mixed(2);
        for t in 1..=10usize {
            state.push_discriminator(&sigma_d).unwrap();
            let g = update_generator(&state, &config).unwrap();
            state.push_generator(&g, &rho).unwrap();
            assert_abs_diff_eq!(state.disc_exponent_sum().trace(), t as f64, epsilon = 1e-7);
            assert_abs_diff_eq!(state.gen_exponent_sum().trace(), 0.0, epsilon = 1e-7);
            sigma_d = update_discriminator(&state, &rho, &config).unwrap();
        }
    }

    #[test]
    fn trace_validates() {
        let trace = TrainingTrace {
            entries: vec![
                TraceEntry { round: 1, loss: 0.5, fidelity: 0.1, gen_regret_rate: None, disc_regret_rate: None },
                TraceEntry { round: 2, loss: 0.6, fidelity: 0.2, gen_regret_rate: None, disc_regret_rate: None },
            ],
            final_loss: 0.5,
            final_fidelity: 1.0,
        };
        trace.validate().unwrap();
    }
}
