//! Batch front-end: scenario configuration, build orchestration, report
//! aggregation, exports and reproducibility manifests.

pub mod runner;
pub mod scenario;

pub use runner::{run, RunOutput};
pub use scenario::{preset, preset_names, ExportConfig, Manifest, Scenario, SurfaceKind};

/// Exit codes of the command-line tool.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const CHECK_FAILURE: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
    pub const IO_ERROR: i32 = 3;
}
