//! Per-antenna receive chain: LNA noise, VGA, B-bit mid-tread ADC.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::SimError;
use crate::rng::{stream_rng, Stream};
use crate::signal::{common_len, SignalBlock};
use crate::tx::Constellation16Qam;

/// Per-axis ADC full scale after VGA normalization.
///
/// This is the peak envelope of unit-power 16-QAM, so a constellation arriving
/// with any carrier phase fits without clipping.
pub fn default_full_scale() -> f64 {
    Constellation16Qam::PEAK_POWER.sqrt()
}

/// A mid-tread quantizer: levels `i * step` for `i` in `-2^(B-1) ..= 2^(B-1) - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerSpec {
    bits: u32,
    full_scale: f64,
}

impl QuantizerSpec {
    pub fn new(bits: u32, full_scale: f64) -> Result<Self, SimError> {
        if bits == 0 {
            return Err(crate::ConfigError::NotPositive { field: "adc_bits" }.into());
        }
        if bits > crate::config::MAX_ADC_BITS {
            return Err(crate::ConfigError::TooManyBits { bits }.into());
        }
        if !(full_scale.is_finite() && full_scale > 0.0) {
            return Err(crate::ConfigError::NotFinite {
                field: "full_scale",
                value: full_scale,
            }
            .into());
        }
        Ok(QuantizerSpec { bits, full_scale })
    }

    /// Quantizer sized for a VGA-normalized 16-QAM input.
    pub fn for_normalized_qam(bits: u32) -> Result<Self, SimError> {
        Self::new(bits, default_full_scale())
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn full_scale(&self) -> f64 {
        self.full_scale
    }

    pub fn step(&self) -> f64 {
        2.0 * self.full_scale / (1u64 << self.bits) as f64
    }

    fn half_levels(&self) -> f64 {
        (1u64 << (self.bits - 1)) as f64
    }

    pub fn min_level(&self) -> f64 {
        -self.half_levels() * self.step()
    }

    pub fn max_level(&self) -> f64 {
        (self.half_levels() - 1.0) * self.step()
    }

    /// Quantizes one real value.
    pub fn quantize(&self, x: f64) -> f64 {
        let step = self.step();
        (step * (x / step).round()).clamp(self.min_level(), self.max_level())
    }
}

/// Quantizes I and Q independently.
pub fn quantize_midtread(stream: &SignalBlock, spec: &QuantizerSpec) -> SignalBlock {
    let samples = stream
        .iter()
        .map(|x| Complex64::new(spec.quantize(x.re), spec.quantize(x.im)))
        .collect();
    SignalBlock::new(samples).expect("input block is non-empty")
}

/// Adds independent circular complex Gaussian noise to every antenna.
///
/// Noise power is referenced to one nominal user's per-element power (1), so
/// each antenna receives noise of power `10^(-snr_therm_db/10)`. Antenna `m`
/// draws from the noise stream `m` of `seed`.
pub fn add_thermal_noise(
    streams: &[SignalBlock],
    snr_therm_db: f64,
    enabled: bool,
    seed: u64,
) -> Result<Vec<SignalBlock>, SimError> {
    common_len(streams)?;
    if !enabled {
        return Ok(streams.to_vec());
    }
    let sigma = (10f64.powf(-snr_therm_db / 10.0) / 2.0).sqrt();
    streams
        .iter()
        .enumerate()
        .map(|(m, s)| {
            let mut rng = stream_rng(seed, Stream::Noise(m));
            let noisy = s
                .iter()
                .map(|&x| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    x + Complex64::new(sigma * re, sigma * im)
                })
                .collect();
            SignalBlock::new(noisy)
        })
        .collect()
}

/// Scales a stream to unit mean power.
pub fn vga_normalize(stream: &SignalBlock) -> Result<SignalBlock, SimError> {
    let p = stream.mean_power();
    if !(p > 0.0) || !p.is_finite() {
        return Err(SimError::ZeroPower);
    }
    Ok(stream.scaled(Complex64::new(p.sqrt().recip(), 0.0)))
}
