//! Command implementations behind the `stylebandit` binary, exposed as a
//! library so integration tests can drive whole experiments in-process.

pub mod commands {
    pub mod analyze;
    pub mod attack;
    pub mod defend;
    pub mod fingerprint;
    pub mod regret;
}
pub mod config;
pub mod dataset;
pub mod report;
pub mod svg;

pub use commands::analyze::cmd_analyze;
pub use commands::attack::cmd_attack;
pub use commands::defend::{cmd_defend, TrainOn};
pub use commands::fingerprint::cmd_fingerprint;
pub use commands::regret::{cmd_regret, load_sweep_config};
