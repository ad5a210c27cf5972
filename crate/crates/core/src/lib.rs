//! Eavesdropping statistics and secret-key-rate bounds for qubit key
//! distribution with the trine (an equiangular spherical code) and with
//! BB84.
//!
//! * [`frames`]: signal ensembles, Gram matrices, frame potentials, POVMs.
//! * [`info`]: joint distributions, entropies and the key-rate bounds.
//! * [`attacks`]: intercept-resend and cloning attacks, cloner optimization.
//! * [`rates`]: rate-vs-error sweeps, tolerable-error thresholds, comparison.
//! * [`cli`]: the `escqkd` command-line front end.

pub mod attacks;
pub mod cli;
pub mod error;
pub mod frames;
pub mod info;
pub mod matrix_text;
pub mod protocol;
pub mod rates;

pub use error::{Error, Result};
pub use protocol::Protocol;
