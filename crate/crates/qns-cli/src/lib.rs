//! Configuration, orchestration, and verification for the qudit noise
//! spectroscopy library: parse a scenario config, build the switching
//! tables, simulate or ingest the measurement records, invert for the
//! spectra, and emit CSVs plus a run report.

pub mod config;
pub mod parallel;
pub mod records;
pub mod report;
pub mod runner;
pub mod verify;

/// Process exit codes of the `qns` binary.
pub mod exit_codes {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
    pub const NUMERICAL_ERROR: i32 = 3;
}
