//! Digital combining with the ideal channel estimate.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{mix, ChannelMatrix};
use crate::error::SimError;
use crate::signal::SignalBlock;

/// Largest accepted condition number of the Gram matrix `H^H H`.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamformerKind {
    Conjugate,
    ZeroForce,
}

/// K x M combining matrix `G`, with `R = G S`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerMatrix {
    pub entries: DMatrix<Complex64>,
    pub kind: BeamformerKind,
}

impl BeamformerMatrix {
    /// Largest entry magnitude of `G H - I`.
    pub fn residual_max(&self, h: &ChannelMatrix) -> f64 {
        let gh = &self.entries * &h.entries;
        let k = gh.nrows();
        (&gh - DMatrix::<Complex64>::identity(k, gh.ncols()))
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }
}

/// `G = H^H`.
pub fn conjugate_matrix(h: &ChannelMatrix) -> BeamformerMatrix {
    BeamformerMatrix {
        entries: h.entries.adjoint(),
        kind: BeamformerKind::Conjugate,
    }
}

/// `G = (H^H H)^-1 H^H`, obtained by a Cholesky solve of the Gram system.
pub fn zeroforce_matrix(h: &ChannelMatrix) -> Result<BeamformerMatrix, SimError> {
    if h.elements() < h.users() {
        return Err(SimError::DimensionMismatch {
            expected: h.users(),
            actual: h.elements(),
        });
    }
    let h_adj = h.entries.adjoint();
    let gram = &h_adj * &h.entries;

    let sv = gram.singular_values();
    let s_max = sv.max();
    let s_min = sv.min();
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(SimError::IllConditioned { condition });
    }

    let chol = gram
        .cholesky()
        .ok_or(SimError::IllConditioned { condition })?;
    Ok(BeamformerMatrix {
        entries: chol.solve(&h_adj),
        kind: BeamformerKind::ZeroForce,
    })
}

/// Per-sample `R = G S`; output `k` reconstructs transmitter `k`.
pub fn apply_beamformer(g: &BeamformerMatrix, antenna_streams: &[SignalBlock]) -> Result<Vec<SignalBlock>, SimError> {
    if antenna_streams.len() != g.entries.ncols() {
        return Err(SimError::DimensionMismatch {
            expected: g.entries.ncols(),
            actual: antenna_streams.len(),
        });
    }
    mix(&g.entries, antenna_streams)
}
