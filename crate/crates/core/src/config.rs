//! Simulation point parameters and their validation.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::place_users;
use crate::error::ConfigError;

/// Symbols per simulation point for SNDR/EVM sweeps.
pub const DEFAULT_SYMBOLS: usize = 10_000;
/// Symbols per simulation point for BER sweeps.
pub const BER_SYMBOLS: usize = 100_000;
pub const MAX_ADC_BITS: u32 = 52;
pub const DEFAULT_SEED: u64 = 0x00db_f5ee_d000_0001;

/// Full parameterization of one simulation point.
///
/// Angles are in degrees. `users` counts every transmitter, so with the
/// blocker enabled there are `users - 1` users of interest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    /// Base station elements, M.
    #[serde(alias = "M")]
    pub elements: usize,
    /// Transmitters including the interferer, K.
    #[serde(alias = "K")]
    pub users: usize,
    /// ADC resolution, B.
    #[serde(alias = "B")]
    pub adc_bits: u32,
    /// Per-user signal to thermal noise ratio at the LNA output.
    pub snr_therm_db: f64,
    /// Nominal user power over interferer power.
    pub sir_db: f64,
    pub user_angle_spacing_deg: f64,
    pub blocker_angle_deg: f64,
    pub enable_blocker: bool,
    /// Zero-force when true, conjugate otherwise.
    pub zf_on: bool,
    pub add_therm_noise: bool,
    pub n_symbols: usize,
    pub seed: u64,
    /// Half-width of the lag search used by the correlation estimator.
    pub max_lag: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            elements: 16,
            users: 1,
            adc_bits: 5,
            snr_therm_db: 20.0,
            sir_db: 0.0,
            user_angle_spacing_deg: 22.5,
            blocker_angle_deg: 78.5,
            enable_blocker: false,
            zf_on: true,
            add_therm_noise: true,
            n_symbols: DEFAULT_SYMBOLS,
            seed: DEFAULT_SEED,
            max_lag: 0,
        }
    }
}

/// Soft problems that do not stop a simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigWarning {
    /// Zero-force is on and two transmitters are closer than pi/M rad.
    UsersTooClose {
        separation_rad: f64,
        threshold_rad: f64,
    },
    /// Both angle sweep flags were set; only the interferer angle is swept.
    AngleSweepConflict,
}

impl fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigWarning::UsersTooClose {
                separation_rad,
                threshold_rad,
            } => write!(
                f,
                "transmitters {separation_rad:.4} rad apart, below the pi/M = {threshold_rad:.4} rad zero-force rule of thumb"
            ),
            ConfigWarning::AngleSweepConflict => {
                write!(f, "both user and blocker angle sweeps requested; sweeping the blocker angle only")
            }
        }
    }
}

/// Checks hard constraints and returns the soft warnings.
pub fn validate_config(cfg: &SystemConfig) -> Result<Vec<ConfigWarning>, ConfigError> {
    for (field, value) in [
        ("elements", cfg.elements),
        ("users", cfg.users),
        ("adc_bits", cfg.adc_bits as usize),
        ("n_symbols", cfg.n_symbols),
    ] {
        if value == 0 {
            return Err(ConfigError::NotPositive { field });
        }
    }
    for (field, value) in [
        ("snr_therm_db", cfg.snr_therm_db),
        ("sir_db", cfg.sir_db),
        ("user_angle_spacing_deg", cfg.user_angle_spacing_deg),
        ("blocker_angle_deg", cfg.blocker_angle_deg),
    ] {
        if !value.is_finite() {
            return Err(ConfigError::NotFinite { field, value });
        }
    }
    if cfg.enable_blocker && cfg.users < 2 {
        return Err(ConfigError::BlockerNeedsTwoUsers { users: cfg.users });
    }
    if cfg.zf_on && cfg.elements < cfg.users {
        return Err(ConfigError::TooFewElements {
            elements: cfg.elements,
            users: cfg.users,
        });
    }
    // level indices stay exact in f64 up to 2^52
    if cfg.adc_bits > MAX_ADC_BITS {
        return Err(ConfigError::TooManyBits { bits: cfg.adc_bits });
    }

    let placement = place_users(
        cfg.users,
        cfg.user_angle_spacing_deg,
        cfg.blocker_angle_deg,
        cfg.enable_blocker,
    )?;

    let mut warnings = Vec::new();
    if cfg.zf_on && placement.angles_deg.len() > 1 {
        let threshold_rad = PI / cfg.elements as f64;
        let separation_rad = min_pairwise_separation(&placement.angles_deg).to_radians();
        if separation_rad < threshold_rad {
            warnings.push(ConfigWarning::UsersTooClose {
                separation_rad,
                threshold_rad,
            });
        }
    }
    Ok(warnings)
}

fn min_pairwise_separation(angles_deg: &[f64]) -> f64 {
    let mut min = f64::INFINITY;
    for (i, a) in angles_deg.iter().enumerate() {
        for b in &angles_deg[i + 1..] {
            min = min.min((a - b).abs());
        }
    }
    min
}

/// Measured quality of one reconstructed user stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub user_index: usize,
    pub ber: f64,
    pub evm_rms_pct: f64,
    pub sndr_db: f64,
    pub enob: f64,
    pub array_gain_db: f64,
}
