use std::time::Instant;
use qugal_core::entanglement::{BipartiteSplit, Threshold};
use qugal_core::linalg::{ComplexVector, PureState, C64};
use qugal_core::qugan::TrainerConfig;
use qugal_core::qugan_entanglement::run_entanglement_qugan;

fn main() {
    let mut amps = ComplexVector::zeros(16);
    amps[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[15] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ghz = PureState::new(amps).unwrap();
    let split = BipartiteSplit::new(2, 2);
    let t0 = Instant::now();
    let trainer = TrainerConfig::canonical(500, 1);
    let r = run_entanglement_qugan(&ghz, &split, &trainer, (7, 3), Threshold::Auto).unwrap();
    println!(
        "ghz T=500 seed=1: {:?} mean={:.3} band=({:.3},{:.3}) fid={:.3} burn_in={} elapsed={:.1?}",
        r.decision, r.post_burn_in_mean_loss, r.terminal_loss_band.0, r.terminal_loss_band.1,
        r.terminal_fidelity, r.burn_in, t0.elapsed()
    );
}
