//! Transmitters: PRBS bit sources, 16-QAM mapping and PA power scaling.
//!
//! The power amplifier is linear with unity gain apart from the interferer's
//! SIR scaling, so it reduces to a per-stream amplitude factor.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::place_users;
use crate::config::{validate_config, SystemConfig};
use crate::error::SimError;
use crate::rng::{stream_rng, Stream};
use crate::signal::SignalBlock;

/// Per-axis amplitude levels, indexed by the axis' Gray-coded bit pair.
///
/// Bit pairs map as 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3 (before scaling),
/// so horizontally or vertically adjacent points differ in exactly one bit.
const GRAY_LEVEL: [f64; 4] = [-3.0, -1.0, 3.0, 1.0];
const SCALE: f64 = 0.316_227_766_016_837_94; // 1/sqrt(10)

/// Unit mean power 16-QAM with per-axis Gray labels.
///
/// A label is four bits `b3 b2 b1 b0`: `b3 b2` select the in-phase level,
/// `b1 b0` the quadrature level.
pub struct Constellation16Qam;

impl Constellation16Qam {
    pub const PEAK_POWER: f64 = 1.8;

    pub fn point(label: u8) -> Complex64 {
        let i = GRAY_LEVEL[((label >> 2) & 3) as usize];
        let q = GRAY_LEVEL[(label & 3) as usize];
        Complex64::new(i * SCALE, q * SCALE)
    }

    pub fn points() -> [Complex64; 16] {
        std::array::from_fn(|l| Self::point(l as u8))
    }

    /// Minimum-distance decision on one sample (per-axis slicing).
    ///
    /// A NaN component decides to the outermost negative level.
    pub fn demap(sample: Complex64) -> u8 {
        (slice_axis(sample.re) << 2) | slice_axis(sample.im)
    }
}

fn slice_axis(x: f64) -> u8 {
    let threshold = 2.0 * SCALE;
    if x >= threshold {
        0b10
    } else if x >= 0.0 {
        0b11
    } else if x >= -threshold {
        0b01
    } else {
        0b00
    }
}

/// A bit sequence whose length is a positive multiple of four.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitStream(Vec<u8>);

impl BitStream {
    pub fn new(bits: Vec<u8>) -> Result<Self, SimError> {
        if bits.is_empty() || !bits.len().is_multiple_of(4) {
            return Err(SimError::BitCount(bits.len()));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(SimError::BitCount(bits.len()));
        }
        Ok(BitStream(bits))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbol_count(&self) -> usize {
        self.0.len() / 4
    }

    /// Label of symbol `n`, most significant bit first.
    pub fn label(&self, n: usize) -> u8 {
        self.0[4 * n..4 * n + 4]
            .iter()
            .fold(0u8, |acc, &b| (acc << 1) | b)
    }
}

/// Draws `n_bits` i.i.d. equiprobable bits.
pub fn gen_prbs<R: Rng + ?Sized>(n_bits: usize, rng: &mut R) -> Result<BitStream, SimError> {
    if n_bits == 0 || !n_bits.is_multiple_of(4) {
        return Err(SimError::BitCount(n_bits));
    }
    let mut bits = Vec::with_capacity(n_bits);
    while bits.len() < n_bits {
        let word: u64 = rng.random();
        let take = (n_bits - bits.len()).min(64);
        bits.extend((0..take).map(|i| ((word >> i) & 1) as u8));
    }
    Ok(BitStream(bits))
}

pub fn qam16_map(bits: &BitStream) -> SignalBlock {
    let samples = (0..bits.symbol_count())
        .map(|n| Constellation16Qam::point(bits.label(n)))
        .collect();
    SignalBlock::new(samples).expect("bit streams are never empty")
}

/// Hard decisions for every sample, unpacked to bits.
pub fn qam16_demap(samples: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(samples.len() * 4);
    for &s in samples {
        let label = Constellation16Qam::demap(s);
        out.extend((0..4).rev().map(|i| (label >> i) & 1));
    }
    out
}

/// The K transmitted streams of one simulation point.
#[derive(Debug, Clone)]
pub struct TxEnsemble {
    /// Unit-power symbol streams before PA scaling; these are the references
    /// the receiver is measured against.
    pub symbols: Vec<SignalBlock>,
    /// Streams as radiated, `sqrt(powers[k]) * symbols[k]`.
    pub streams: Vec<SignalBlock>,
    pub bit_streams: Vec<BitStream>,
    /// Linear PA power per transmitter.
    pub powers: Vec<f64>,
    /// Index of the interfering transmitter, if any.
    pub interferer: Option<usize>,
}

impl TxEnsemble {
    /// Indices of the users of interest.
    pub fn desired_users(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.streams.len()).filter(move |&k| Some(k) != self.interferer)
    }
}

pub fn build_tx_ensemble(cfg: &SystemConfig) -> Result<TxEnsemble, SimError> {
    validate_config(cfg)?;
    let placement = place_users(
        cfg.users,
        cfg.user_angle_spacing_deg,
        cfg.blocker_angle_deg,
        cfg.enable_blocker,
    )?;

    let mut symbols = Vec::with_capacity(cfg.users);
    let mut streams = Vec::with_capacity(cfg.users);
    let mut bit_streams = Vec::with_capacity(cfg.users);
    let mut powers = Vec::with_capacity(cfg.users);
    for k in 0..cfg.users {
        let mut rng = stream_rng(cfg.seed, Stream::Bits(k));
        let bits = gen_prbs(4 * cfg.n_symbols, &mut rng)?;
        let sym = qam16_map(&bits);
        let power = if placement.interferer == Some(k) {
            10f64.powf(-cfg.sir_db / 10.0)
        } else {
            1.0
        };
        streams.push(sym.scaled(Complex64::new(power.sqrt(), 0.0)));
        symbols.push(sym);
        bit_streams.push(bits);
        powers.push(power);
    }
    Ok(TxEnsemble {
        symbols,
        streams,
        bit_streams,
        powers,
        interferer: placement.interferer,
    })
}
