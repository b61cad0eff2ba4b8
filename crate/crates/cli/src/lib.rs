//! Batch front end for the outage engines: configuration files, bundled
//! parameter sets and SNR sweeps written as CSV.

pub mod config;
pub mod presets;
pub mod sweep;

pub use config::{parse_config, ConfigError, RunConfig};
pub use presets::{load_preset, preset_text, PRESETS};
pub use sweep::{run_sweep, Row, SweepOutput};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const ENGINE: i32 = 2;
    pub const CHECK: i32 = 3;
}
