//! Link metrics measured against the transmitted reference.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::signal::{mean_power, variance};
use crate::tx::{qam16_demap, BitStream};

/// Value reported when the residual vanishes.
pub const SNDR_CAP_DB: f64 = 150.0;
/// Offset between SNDR and ENOB for 16-QAM without matched filtering.
pub const ENOB_OFFSET_DB: f64 = 4.36;
pub const DB_PER_BIT: f64 = 6.02;
/// ENOB below which the receiver counts as interference limited.
pub const SIR_MIN_ENOB_THRESHOLD: f64 = 2.0;

const RESIDUAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    /// Normalized cross-correlation coefficient at the best lag.
    pub coeff: Complex64,
    /// `rx(t)` lines up with `ref(t - lag)`.
    pub lag: isize,
}

/// Index ranges of `rx` and `ref` that overlap at `lag`.
fn overlap(len: usize, lag: isize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
    let shift = lag.unsigned_abs();
    if lag >= 0 {
        (shift..len, 0..len - shift)
    } else {
        (0..len - shift, shift..len)
    }
}

/// Finds the lag in `-max_lag..=max_lag` with the largest `|C|`.
///
/// `C(l) = sum rx(t) conj(ref(t - l)) / (|rx| |ref|)`, with the sum over the
/// overlapping samples and the norms over the full blocks. Ties keep the lag
/// closest to zero.
pub fn complex_corr(rx: &[Complex64], reference: &[Complex64], max_lag: usize) -> Result<CorrelationResult, SimError> {
    if rx.len() != reference.len() {
        return Err(SimError::LengthMismatch {
            left: rx.len(),
            right: reference.len(),
        });
    }
    if rx.is_empty() {
        return Err(SimError::EmptyBlock);
    }
    if max_lag > 0 && rx.len() <= 10 * max_lag {
        return Err(SimError::LagWindow {
            max_lag,
            len: rx.len(),
        });
    }
    let norm = (rx.iter().map(|x| x.norm_sqr()).sum::<f64>() * reference.iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(SimError::ZeroPower);
    }

    let max_lag = max_lag as isize;
    let mut best = CorrelationResult {
        coeff: Complex64::new(0.0, 0.0),
        lag: 0,
    };
    let mut best_mag = -1.0;
    let mut lags: Vec<isize> = (-max_lag..=max_lag).collect();
    lags.sort_by_key(|l| l.abs());
    for lag in lags {
        let (r, s) = overlap(rx.len(), lag);
        let c: Complex64 = rx[r].iter().zip(&reference[s]).map(|(a, b)| a * b.conj()).sum::<Complex64>() / norm;
        if c.norm() > best_mag {
            best_mag = c.norm();
            best = CorrelationResult { coeff: c, lag };
        }
    }
    Ok(best)
}

/// SNDR in dB from the correlation against the reference.
///
/// The reference is shifted to the best lag, both overlapping parts are
/// brought to unit power, the reference is rotated by `arg C`, and the result is
/// `|C|^2 var(rx') / var(rx' - |C| ref')`. A residual below `1e-12` of the
/// signal variance reports [`SNDR_CAP_DB`].
pub fn measure_sndr(rx: &[Complex64], reference: &[Complex64], max_lag: usize) -> Result<f64, SimError> {
    let corr = complex_corr(rx, reference, max_lag)?;
    let (r, s) = overlap(rx.len(), corr.lag);
    let (rx, reference) = (&rx[r], &reference[s]);
    let rx_power = mean_power(rx);
    let ref_power = mean_power(reference);
    if !(rx_power > 0.0 && ref_power > 0.0) {
        return Err(SimError::ZeroPower);
    }
    let rx_n: Vec<Complex64> = rx.iter().map(|&x| x / rx_power.sqrt()).collect();
    let ref_n: Vec<Complex64> = reference.iter().map(|&x| x / ref_power.sqrt()).collect();
    let c = overlap_coeff(rx, reference);
    // |C| ref' with ref' rotated by arg C
    let residual: Vec<Complex64> = rx_n.iter().zip(&ref_n).map(|(&x, &y)| x - c * y).collect();

    let signal = c.norm_sqr() * variance(&rx_n);
    let noise = variance(&residual);
    if noise < RESIDUAL_FLOOR * variance(&rx_n) {
        return Ok(SNDR_CAP_DB);
    }
    if !(signal > 0.0) {
        return Err(SimError::ZeroPower);
    }
    Ok((10.0 * (signal / noise).log10()).min(SNDR_CAP_DB))
}

/// Normalized correlation of two equally long blocks at zero lag.
fn overlap_coeff(rx: &[Complex64], reference: &[Complex64]) -> Complex64 {
    let norm = (rx.iter().map(|x| x.norm_sqr()).sum::<f64>() * reference.iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt();
    rx.iter().zip(reference).map(|(a, b)| a * b.conj()).sum::<Complex64>() / norm
}

pub fn sndr_to_enob(sndr_db: f64) -> f64 {
    (sndr_db - ENOB_OFFSET_DB) / DB_PER_BIT
}

/// How a received block was brought onto the reference constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct Aligned {
    /// Received samples overlapping the reference, rescaled.
    pub samples: Vec<Complex64>,
    /// Index of the reference symbol matching `samples[0]`.
    pub ref_offset: usize,
    pub corr: CorrelationResult,
}

/// How the magnitude of an aligned block is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignGain {
    /// Equal mean power to the reference.
    MatchPower,
    /// Signal component on the reference scale (least-squares gain).
    Projection,
}

/// Derotates `rx` by `conj(C)/|C|`, shifts it to the best lag and rescales it.
pub fn align_to_reference(
    rx: &[Complex64],
    reference: &[Complex64],
    max_lag: usize,
    gain: AlignGain,
) -> Result<Aligned, SimError> {
    let corr = complex_corr(rx, reference, max_lag)?;
    let (r, s) = overlap(rx.len(), corr.lag);
    let c = overlap_coeff(&rx[r.clone()], &reference[s.clone()]);
    let mag = c.norm();
    if !(mag > 0.0) {
        return Err(SimError::ZeroPower);
    }
    let power_ratio = (mean_power(&reference[s.clone()]) / mean_power(&rx[r.clone()])).sqrt();
    let scale = match gain {
        AlignGain::MatchPower => power_ratio,
        AlignGain::Projection => power_ratio / mag,
    };
    let rot = c.conj() / mag * scale;
    Ok(Aligned {
        samples: rx[r].iter().map(|&x| x * rot).collect(),
        ref_offset: s.start,
        corr,
    })
}

/// RMS error vector magnitude in percent.
pub fn measure_evm(rx: &[Complex64], reference: &[Complex64], max_lag: usize) -> Result<f64, SimError> {
    let aligned = align_to_reference(rx, reference, max_lag, AlignGain::MatchPower)?;
    let target = &reference[aligned.ref_offset..aligned.ref_offset + aligned.samples.len()];
    let ref_power = mean_power(target);
    if !(ref_power > 0.0) {
        return Err(SimError::ZeroPower);
    }
    let err = aligned
        .samples
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        / aligned.samples.len() as f64;
    Ok(100.0 * (err / ref_power).sqrt())
}

/// Fraction of bits flipped by a minimum-distance decision on `aligned`.
///
/// `aligned` must already be on the unit-power constellation scale, one
/// sample per symbol of `tx_bits`.
pub fn measure_ber(aligned: &[Complex64], tx_bits: &BitStream) -> Result<f64, SimError> {
    if aligned.len() != tx_bits.symbol_count() {
        return Err(SimError::LengthMismatch {
            left: aligned.len(),
            right: tx_bits.symbol_count(),
        });
    }
    let decided = qam16_demap(aligned);
    let errors = decided.iter().zip(tx_bits.bits()).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / tx_bits.len() as f64)
}

/// `SNDR_out - SNDR_in`.
pub fn array_gain(sndr_out_db: f64, sndr_in_db: f64) -> f64 {
    sndr_out_db - sndr_in_db
}

/// Minimum SIR keeping ENOB at the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "sir_db", rename_all = "snake_case")]
pub enum SirMin {
    Crossing(f64),
    /// ENOB never drops below the threshold on the grid (SIR_min = -inf).
    NeverLimited,
    /// ENOB never recovers to the threshold on the grid.
    NeverReached,
}

impl SirMin {
    pub fn value(&self) -> Option<f64> {
        match self {
            SirMin::Crossing(v) => Some(*v),
            _ => None,
        }
    }

    /// Numeric form with `-inf` / `+inf` for the two sentinels.
    pub fn as_f64(&self) -> f64 {
        match self {
            SirMin::Crossing(v) => *v,
            SirMin::NeverLimited => f64::NEG_INFINITY,
            SirMin::NeverReached => f64::INFINITY,
        }
    }
}

/// Interpolates, linearly in dB, the last upward crossing of `threshold`.
///
/// Non-finite ENOB values count as below the threshold.
pub fn extract_sir_min(sir_grid_db: &[f64], enob_values: &[f64], threshold: f64) -> Result<SirMin, SimError> {
    if sir_grid_db.len() != enob_values.len() {
        return Err(SimError::LengthMismatch {
            left: sir_grid_db.len(),
            right: enob_values.len(),
        });
    }
    if sir_grid_db.is_empty() {
        return Err(SimError::EmptyBlock);
    }
    if sir_grid_db.windows(2).any(|w| !(w[1] > w[0])) || sir_grid_db.iter().any(|s| !s.is_finite()) {
        return Err(SimError::NonMonotonicGrid);
    }
    let above = |e: f64| e >= threshold;
    if enob_values.iter().all(|&e| above(e)) {
        return Ok(SirMin::NeverLimited);
    }
    for i in (0..sir_grid_db.len() - 1).rev() {
        let (e0, e1) = (enob_values[i], enob_values[i + 1]);
        if !above(e0) && above(e1) {
            let (s0, s1) = (sir_grid_db[i], sir_grid_db[i + 1]);
            if !e0.is_finite() {
                return Ok(SirMin::Crossing(s1));
            }
            return Ok(SirMin::Crossing(s0 + (threshold - e0) * (s1 - s0) / (e1 - e0)));
        }
    }
    Ok(SirMin::NeverReached)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tx::{gen_prbs, qam16_map};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    fn qam(seed: u64, n: usize) -> (Vec<Complex64>, BitStream) {
        let bits = gen_prbs(4 * n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        (qam16_map(&bits).into_inner(), bits)
    }

    fn with_noise(x: &[Complex64], power: f64, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = (power / 2.0).sqrt();
        x.iter()
            .map(|&s| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                s + sigma * Complex64::new(re, im)
            })
            .collect()
    }

    #[test]
    fn correlation_of_identical_and_rotated_blocks() {
        let (s, _) = qam(1, 1000);
        let c = complex_corr(&s, &s, 0).unwrap();
        assert!((c.coeff - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(c.lag, 0);

        let rot = Complex64::from_polar(1.0, PI / 3.0);
        let r: Vec<_> = s.iter().map(|&x| x * rot).collect();
        let c = complex_corr(&r, &s, 2).unwrap();
        assert!((c.coeff.norm() - 1.0).abs() < 1e-12);
        assert!((c.coeff.arg() - PI / 3.0).abs() < 1e-12);
        assert_eq!(c.lag, 0);
    }

    #[test]
    fn correlation_finds_delay() {
        let (s, _) = qam(2, 2000);
        let mut d = vec![Complex64::new(0.0, 0.0); 2];
        d.extend_from_slice(&s[..s.len() - 2]);
        let c = complex_corr(&d, &s, 3).unwrap();
        assert_eq!(c.lag, 2);
        assert!(c.coeff.norm() > 0.99);
        assert!(measure_sndr(&d, &s, 3).unwrap() > 100.0);
    }

    #[test]
    fn independent_streams_barely_correlate() {
        let (a, _) = qam(3, 100_000);
        let (b, _) = qam(4, 100_000);
        assert!(complex_corr(&a, &b, 0).unwrap().coeff.norm() < 0.02);
    }

    #[test]
    fn correlation_errors() {
        let (s, _) = qam(5, 100);
        let z = vec![Complex64::new(0.0, 0.0); 100];
        assert_eq!(complex_corr(&z, &s, 0), Err(SimError::ZeroPower));
        assert!(matches!(complex_corr(&s[..50], &s, 0), Err(SimError::LengthMismatch { .. })));
        assert!(matches!(complex_corr(&s, &s, 10), Err(SimError::LagWindow { .. })));
    }

    #[test]
    fn sndr_cap_on_identical_blocks() {
        let (s, _) = qam(6, 1000);
        assert_eq!(measure_sndr(&s, &s, 0).unwrap(), SNDR_CAP_DB);
    }

    #[test]
    fn sndr_matches_injected_noise() {
        let (s, _) = qam(7, 100_000);
        for (i, snr) in [10.0, 20.0, 30.0].into_iter().enumerate() {
            let rx = with_noise(&s, 10f64.powf(-snr / 10.0), 100 + i as u64);
            let est = measure_sndr(&rx, &s, 0).unwrap();
            assert!((est - snr).abs() < 0.2, "snr {snr}: {est}");
        }
    }

    #[test]
    fn enob_mapping() {
        assert!(sndr_to_enob(4.36).abs() < 1e-12);
        assert!((sndr_to_enob(16.40) - 2.0).abs() < 1e-12);
        assert!((sndr_to_enob(28.34) - 3.98).abs() < 0.005);
    }

    #[test]
    fn evm_oracle() {
        let (s, _) = qam(8, 100_000);
        assert!(measure_evm(&s, &s, 0).unwrap() < 1e-9);
        let rx = with_noise(&s, 0.01, 1);
        let evm = measure_evm(&rx, &s, 0).unwrap();
        assert!((evm - 10.0).abs() < 0.3, "evm {evm}");
        let rx = with_noise(&s, 10f64.powf(-2.602), 2);
        let evm = measure_evm(&rx, &s, 0).unwrap();
        assert!((evm - 5.0).abs() < 0.2, "evm {evm}");
    }

    #[test]
    fn evm_ignores_phase_and_gain() {
        let (s, _) = qam(9, 1000);
        let g = Complex64::from_polar(3.7, -2.0);
        let rx: Vec<_> = s.iter().map(|&x| x * g).collect();
        assert!(measure_evm(&rx, &s, 0).unwrap() < 1e-9);
    }

    #[test]
    fn ber_of_clean_and_corrupted_blocks() {
        let (s, bits) = qam(10, 1000);
        assert_eq!(measure_ber(&s, &bits).unwrap(), 0.0);

        let mut flipped = s.clone();
        flipped[0] = -flipped[0];
        assert!(measure_ber(&flipped, &bits).unwrap() > 0.0);
        assert!(measure_ber(&s[..10], &bits).is_err());
    }

    #[test]
    fn ber_after_alignment_of_rotated_block() {
        let (s, bits) = qam(11, 5000);
        let g = Complex64::from_polar(0.3, 1.1);
        let rx: Vec<_> = s.iter().map(|&x| x * g).collect();
        let aligned = align_to_reference(&rx, &s, 0, AlignGain::Projection).unwrap();
        assert_eq!(measure_ber(&aligned.samples, &bits).unwrap(), 0.0);
    }

    #[test]
    fn array_gain_is_a_difference() {
        assert_eq!(array_gain(17.0, 17.0), 0.0);
        assert_eq!(array_gain(32.0, 20.0), 12.0);
    }

    #[test]
    fn sir_min_interpolation_and_sentinels() {
        assert_eq!(extract_sir_min(&[-20.0, -10.0], &[1.5, 2.5], 2.0).unwrap(), SirMin::Crossing(-15.0));
        assert_eq!(extract_sir_min(&[-20.0, -10.0, 0.0], &[3.0, 3.5, 4.0], 2.0).unwrap(), SirMin::NeverLimited);
        assert_eq!(extract_sir_min(&[-20.0, -10.0], &[0.5, 1.0], 2.0).unwrap(), SirMin::NeverReached);
        // the last upward crossing wins
        let s = extract_sir_min(&[0.0, 1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 1.0, 1.0, 3.0], 2.0).unwrap();
        assert_eq!(s, SirMin::Crossing(3.5));
        assert_eq!(extract_sir_min(&[0.0, 0.0], &[1.0, 3.0], 2.0), Err(SimError::NonMonotonicGrid));
        assert!(matches!(extract_sir_min(&[0.0], &[1.0, 3.0], 2.0), Err(SimError::LengthMismatch { .. })));
    }

    #[test]
    fn sir_min_serializes_with_tag() {
        let j = serde_json::to_string(&SirMin::Crossing(-12.5)).unwrap();
        assert_eq!(serde_json::from_str::<SirMin>(&j).unwrap(), SirMin::Crossing(-12.5));
        let j = serde_json::to_string(&SirMin::NeverLimited).unwrap();
        assert_eq!(serde_json::from_str::<SirMin>(&j).unwrap(), SirMin::NeverLimited);
    }

    proptest! {
        #[test]
        fn sndr_is_scale_invariant(mag in 1e-3f64..1e3, phase in -PI..PI, seed in 0u64..1000) {
            let (s, _) = qam(seed, 2000);
            let rx = with_noise(&s, 0.05, seed + 1);
            let a = Complex64::from_polar(mag, phase);
            let scaled: Vec<_> = rx.iter().map(|&x| x * a).collect();
            let d = measure_sndr(&scaled, &s, 0).unwrap() - measure_sndr(&rx, &s, 0).unwrap();
            prop_assert!(d.abs() < 1e-9);
        }

        #[test]
        fn enob_is_affine(a in -50.0f64..150.0, b in -50.0f64..150.0) {
            prop_assert_eq!(a < b, sndr_to_enob(a) < sndr_to_enob(b));
            let mid = sndr_to_enob((a + b) / 2.0);
            prop_assert!((mid - (sndr_to_enob(a) + sndr_to_enob(b)) / 2.0).abs() < 1e-9);
        }
    }
}
