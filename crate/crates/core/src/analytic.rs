//! Closed-form SQNR and SNDR under interference and multi-user loading.
//!
//! All users and the interferer share one ADC full scale, so the quantization
//! noise seen by a single user grows with the total input power.

use serde::{Deserialize, Serialize};

use crate::error::SimError;

fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn lin_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Nominal SQNR of a full-scale input, `6.02 B - 1.76`.
pub fn sqnr_nom(bits: u32) -> f64 {
    6.02 * bits as f64 - 1.76
}

/// SQNR of one user sharing the full scale with an interferer at `sir_db`.
///
/// `sir_db = +inf` means no interferer.
pub fn sqnr_degraded(bits: u32, sir_db: f64) -> f64 {
    sqnr_nom(bits) - lin_to_db(1.0 + db_to_lin(-sir_db))
}

/// SQNR per user with `users` transmitters in total.
///
/// With `sir_db = None` all users have equal power. Otherwise the last
/// transmitter is an interferer at `sir_db` below the others.
pub fn sqnr_multiuser(bits: u32, users: usize, sir_db: Option<f64>) -> Result<f64, SimError> {
    if users == 0 {
        return Err(crate::ConfigError::NotPositive { field: "users" }.into());
    }
    let load = match sir_db {
        None => users as f64,
        Some(_) if users < 2 => return Err(SimError::InterfererNeedsTwoUsers),
        Some(sir) => (users - 1) as f64 + db_to_lin(-sir),
    };
    Ok(sqnr_nom(bits) - lin_to_db(load))
}

/// Parallel combination of independent impairments given as dB ratios.
pub fn sndr_parallel(sqnr_db: f64, sir_db: f64) -> f64 {
    sndr_parallel_with_thermal(sqnr_db, sir_db, None)
}

pub fn sndr_parallel_with_thermal(sqnr_db: f64, sir_db: f64, snr_therm_db: Option<f64>) -> f64 {
    let mut noise = db_to_lin(-sqnr_db) + db_to_lin(-sir_db);
    if let Some(snr) = snr_therm_db {
        noise += db_to_lin(-snr);
    }
    -lin_to_db(noise)
}

/// Operating point for the closed-form model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticPoint {
    pub bits: u32,
    /// `+inf` when there is no interferer.
    pub sir_db: f64,
    pub users: usize,
    pub snr_therm_db: Option<f64>,
}

impl AnalyticPoint {
    /// Quantization-limited SQNR of one user at this point.
    pub fn sqnr(&self) -> Result<f64, SimError> {
        if self.bits == 0 {
            return Err(crate::ConfigError::NotPositive { field: "adc_bits" }.into());
        }
        let sir = if self.sir_db.is_finite() { Some(self.sir_db) } else { None };
        sqnr_multiuser(self.bits, self.users, sir)
    }

    /// SQNR combined with the thermal noise, if any.
    pub fn sndr(&self) -> Result<f64, SimError> {
        Ok(sndr_parallel_with_thermal(self.sqnr()?, f64::INFINITY, self.snr_therm_db))
    }
}
