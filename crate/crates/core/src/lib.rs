//! Classical simulation of adversarial learning on quantum states.
//!
//! Two trainers share a zero-sum game in which a generator reproduces a
//! target state and a discriminator distinguishes its output from the
//! target:
//!
//! * [`qmmw`] — an online matrix-multiplicative-weights loop over density
//!   matrices, with Gibbs-form updates, an averaged-state output, a
//!   convergence bound, and empirical regret auditors;
//! * [`qugan`] — an adversarial trainer for parameterized quantum circuits
//!   using a multiplicative-weight gradient schedule, on top of the
//!   state-vector simulator in [`circuit`].
//!
//! Both carry constrained variants ([`entanglement`],
//! [`qugan_entanglement`]) that decide bipartite pure-state entanglement
//! from the convergence behaviour of the training loss. The [`experiment`]
//! module packages named experiment presets with seeded, byte-reproducible
//! CSV/JSON trace output; the `qugal` binary exposes them on the command
//! line.

pub mod circuit;
pub mod entanglement;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod qmmw;
pub mod qugan;
pub mod qugan_entanglement;

pub use error::Error;
