//! Bandit-guided style-manipulation attacks on black-box LLM judges, plus
//! the simulation, analysis, and defense machinery to study them offline.
//!
//! The numeric core (linear algebra, bandit, regressions, regret lab) is
//! generic over [`scalar::Scalar`]; the attack pipeline and all serialized
//! artifacts use the `f64` aliases exported below.

pub mod actions;
pub mod analysis;
pub mod attack;
pub mod bandit;
pub mod corpus;
pub mod defense;
pub mod embed;
pub mod error;
pub mod hash;
pub mod judges;
pub mod linalg;
pub mod regret;
pub mod remote;
pub mod runlog;
pub mod scalar;
pub mod stats;
pub mod stylometry;

pub use error::{Error, Result};

/// Context vector at pipeline precision.
pub type Context = bandit::ContextVector<f64>;
/// Per-arm ridge state at pipeline precision.
pub type Arm = bandit::ArmState<f64>;
/// Bandit configuration at pipeline precision.
pub type Config = bandit::BanditConfig<f64>;
