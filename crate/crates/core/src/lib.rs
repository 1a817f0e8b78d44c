//! Behavioral simulator of a digital beamforming uplink.
//!
//! K single-antenna transmitters (optionally one of them a strong
//! interferer) reach an M-element uniform linear array. Every element has a
//! thermal noise source, a VGA and a B-bit ADC, and the digitized streams are
//! combined by a conjugate or zero-force beamformer. The [`pipeline`] module
//! runs one such point; [`sweep`] evaluates grids of them.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod beamformer;
pub mod channel;
pub mod config;
pub mod error;
pub mod frontend;
pub mod metrics;
pub mod output;
pub mod pipeline;
pub mod plot;
pub mod presets;
pub mod rng;
pub mod signal;
pub mod specfile;
pub mod sweep;
pub mod tx;

pub use config::{validate_config, ConfigWarning, MetricsRecord, SystemConfig};
pub use error::{ConfigError, HarnessError, SimError};
pub use metrics::SirMin;
pub use pipeline::run_single;
pub use signal::SignalBlock;
pub use sweep::{run_sweep, ResultGrid, SweepSpec};
pub use output::{emit_results, load_results_json, OutputFormat};
pub use plot::emit_plot;
pub use presets::{load_preset, PRESET_NAMES};
pub use specfile::{parse_sweep_toml, parse_sweep_toml_over};
