//! # infobound
//!
//! A numerical laboratory for the trade-off between dissipated work and the
//! precision of parameter estimation:
//!
//! ```text
//! Δ$ · ΔI_φ ≥ k_B / 2,    Δ$ = ⟨W_D⟩ / T,    ΔI_φ = (Δφ / δ_φ)²
//! ```
//!
//! The crate is organised bottom-up:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`prob`] | finite distributions, joints, parameterised families |
//! | [`info`] | entropy, KL / Jeffreys divergence, mutual information, Fisher information, Ω |
//! | [`maxent`] | maximum-information joint under an energy constraint, Lagrange multiplier solve |
//! | [`tpm`] | two-point-measurement work statistics and the Jarzynski functional |
//! | [`piston`] | staged isothermal expansion of an ideal gas under a piston |
//! | [`phase`] | qubit interferometer: quantised encoder, ML read-out, Cramér–Rao |
//! | [`report`] | the assembled trade-off report shared by both models |
//!
//! All quantities are in natural units unless a [`PhysicalContext`] says
//! otherwise. Information is measured in nats.

pub mod info;
pub mod maxent;
pub mod phase;
pub mod piston;
pub mod prob;
pub mod report;
pub mod stats;
pub mod tpm;

mod error;

pub use error::{Error, Result};
pub use prob::{DiscreteDist, JointDist, ParamFamily, PhysicalContext};
pub use report::{TradeoffReport, Verdict};
