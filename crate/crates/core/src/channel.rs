//! Line-of-sight uniform linear array channel.
//!
//! Every transmitter is in the far field at unit path gain, so column `k` of
//! `H` is just the steering vector of transmitter `k`'s angle of arrival.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ConfigError, SimError};
use crate::signal::{common_len, SignalBlock};

/// Element spacing in wavelengths.
pub const ELEMENT_SPACING: f64 = 0.5;

/// `exp(-j 2 pi d m sin(theta))` for `m = 0..elements`.
pub fn steering_vector(theta_deg: f64, elements: usize) -> Vec<Complex64> {
    let phase_step = -2.0 * PI * ELEMENT_SPACING * theta_deg.to_radians().sin();
    (0..elements)
        .map(|m| Complex64::from_polar(1.0, phase_step * m as f64))
        .collect()
}

/// Angles of arrival of every transmitter.
#[derive(Debug, Clone, PartialEq)]
pub struct UserPlacement {
    pub angles_deg: Vec<f64>,
    pub interferer: Option<usize>,
}

/// Places users alternately around broadside, never at it.
///
/// With spacing `s` the users of interest sit at `-s/2, +s/2, -3s/2, +3s/2, ...`.
/// When the blocker is enabled it is the last transmitter and sits at
/// `blocker_angle_deg`.
pub fn place_users(
    users: usize,
    spacing_deg: f64,
    blocker_angle_deg: f64,
    blocker_enabled: bool,
) -> Result<UserPlacement, ConfigError> {
    if users == 0 {
        return Err(ConfigError::NotPositive { field: "users" });
    }
    if blocker_enabled && users < 2 {
        return Err(ConfigError::BlockerNeedsTwoUsers { users });
    }
    let desired = if blocker_enabled { users - 1 } else { users };
    let mut angles_deg: Vec<f64> = (0..desired)
        .map(|i| {
            let ring = (2 * (i / 2) + 1) as f64;
            let side = if i % 2 == 0 { -1.0 } else { 1.0 };
            side * ring * spacing_deg / 2.0
        })
        .collect();
    let interferer = if blocker_enabled {
        angles_deg.push(blocker_angle_deg);
        Some(users - 1)
    } else {
        None
    };
    if let Some(&bad) = angles_deg.iter().find(|a| !(a.abs() < 90.0)) {
        return Err(ConfigError::AngleOutOfRange { angle_deg: bad });
    }
    Ok(UserPlacement {
        angles_deg,
        interferer,
    })
}

/// M x K channel matrix with the angles it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: DMatrix<Complex64>,
    pub angles_deg: Vec<f64>,
}

impl ChannelMatrix {
    pub fn elements(&self) -> usize {
        self.entries.nrows()
    }

    pub fn users(&self) -> usize {
        self.entries.ncols()
    }
}

pub fn build_channel(angles_deg: &[f64], elements: usize) -> Result<ChannelMatrix, SimError> {
    if elements == 0 {
        return Err(ConfigError::NotPositive { field: "elements" }.into());
    }
    if angles_deg.is_empty() {
        return Err(ConfigError::NotPositive { field: "users" }.into());
    }
    if let Some(&bad) = angles_deg.iter().find(|a| !(a.abs() < 90.0)) {
        return Err(ConfigError::AngleOutOfRange { angle_deg: bad }.into());
    }
    let mut entries = DMatrix::zeros(elements, angles_deg.len());
    for (k, &theta) in angles_deg.iter().enumerate() {
        for (m, a) in steering_vector(theta, elements).into_iter().enumerate() {
            entries[(m, k)] = a;
        }
    }
    Ok(ChannelMatrix {
        entries,
        angles_deg: angles_deg.to_vec(),
    })
}

/// Antenna signals `S_rx = H S_tx`, sample by sample.
pub fn apply_channel(h: &ChannelMatrix, tx: &[SignalBlock]) -> Result<Vec<SignalBlock>, SimError> {
    if tx.len() != h.users() {
        return Err(SimError::DimensionMismatch {
            expected: h.users(),
            actual: tx.len(),
        });
    }
    mix(&h.entries, tx)
}

/// `out[r] = sum_c w[(r, c)] * input[c]` for every sample.
pub(crate) fn mix(weights: &DMatrix<Complex64>, input: &[SignalBlock]) -> Result<Vec<SignalBlock>, SimError> {
    let n = common_len(input)?;
    (0..weights.nrows())
        .map(|r| {
            let mut acc = vec![Complex64::new(0.0, 0.0); n];
            for (c, stream) in input.iter().enumerate() {
                let w = weights[(r, c)];
                for (a, &x) in acc.iter_mut().zip(stream.iter()) {
                    *a += w * x;
                }
            }
            SignalBlock::new(acc)
        })
        .collect()
}
