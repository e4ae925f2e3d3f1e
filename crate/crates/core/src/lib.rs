//! Upper bounds on the secret key rate of the Coherent-One-Way (COW) and
//! Differential-Phase-Shift (DPS) protocols and their modified versions,
//! under beam-splitting and collective one- and two-pulse attacks.
//!
//! Numerical kernels are generic over [`scalar::Real`]; sweeps, searches and
//! the CLI run in `f64`.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod bsa;
pub mod channel;
pub mod cow;
pub mod dps;
pub mod error;
pub mod linalg;
pub mod optim;
pub mod quantum;
pub mod scalar;
pub mod sweep;
pub mod variants;
pub mod verify;

pub use bounds::{evaluate_attack, optimize_mu, AttackEvaluation, AttackOptions, KeyRateResult};
pub use bsa::{bsa_asymptote, optimize_bsa, rate_bsa};
pub use channel::{Attack, ChannelModel, PairingBy, Protocol, ProtocolConfig};
pub use error::{BoundsError, Result};
pub use scalar::Real;
pub use verify::{run_verify, VerifyReport, VerifyRequest};

pub type ChannelModel64 = channel::ChannelModel<f64>;
pub type ChannelModel32 = channel::ChannelModel<f32>;
pub type ProtocolConfig64 = channel::ProtocolConfig<f64>;
pub type ProtocolConfig32 = channel::ProtocolConfig<f32>;
pub type DensityMatrix64 = quantum::DensityMatrix<f64>;
pub type DensityMatrix32 = quantum::DensityMatrix<f32>;
pub type StateVector64 = quantum::StateVector<f64>;
pub type StateVector32 = quantum::StateVector<f32>;
pub type BsaPoint64 = bsa::BsaPoint<f64>;
pub type BsaPoint32 = bsa::BsaPoint<f32>;
pub type Dps1paAttack64 = dps::Dps1paAttack<f64>;
pub type Dps2paAttack64 = dps::Dps2paAttack<f64>;
pub type CowM1Attack64 = cow::CowM1Attack<f64>;
