//! One simulation point from bits to metrics.

use log::warn;

use crate::beamformer::{apply_beamformer, conjugate_matrix, zeroforce_matrix};
use crate::channel::{apply_channel, build_channel, place_users};
use crate::config::{validate_config, MetricsRecord, SystemConfig};
use crate::error::SimError;
use crate::frontend::{add_thermal_noise, quantize_midtread, vga_normalize, QuantizerSpec};
use crate::metrics::{align_to_reference, array_gain, measure_ber, measure_evm, measure_sndr, sndr_to_enob, AlignGain};
use crate::tx::{build_tx_ensemble, BitStream};

/// Antenna whose LNA output is the single-channel reference for array gain.
pub const REFERENCE_ANTENNA: usize = 0;

/// Runs the full chain for `cfg` and returns one record per user of interest.
///
/// The interferer's reconstructed stream is discarded.
pub fn run_single(cfg: &SystemConfig) -> Result<Vec<MetricsRecord>, SimError> {
    for w in validate_config(cfg)? {
        warn!("{w}");
    }
    let tx = build_tx_ensemble(cfg)?;
    let placement = place_users(
        cfg.users,
        cfg.user_angle_spacing_deg,
        cfg.blocker_angle_deg,
        cfg.enable_blocker,
    )?;
    let h = build_channel(&placement.angles_deg, cfg.elements)?;

    let at_lna = add_thermal_noise(&apply_channel(&h, &tx.streams)?, cfg.snr_therm_db, cfg.add_therm_noise, cfg.seed)?;

    let adc = QuantizerSpec::for_normalized_qam(cfg.adc_bits)?;
    let digitized = at_lna
        .iter()
        .map(|s| vga_normalize(s).map(|v| quantize_midtread(&v, &adc)))
        .collect::<Result<Vec<_>, _>>()?;

    let g = if cfg.zf_on {
        zeroforce_matrix(&h)?
    } else {
        conjugate_matrix(&h)
    };
    let out = apply_beamformer(&g, &digitized)?;

    tx.desired_users()
        .map(|k| {
            let reference = &tx.symbols[k];
            let sndr_in = measure_sndr(&at_lna[REFERENCE_ANTENNA], reference, cfg.max_lag)?;
            let sndr = measure_sndr(&out[k], reference, cfg.max_lag)?;
            let evm = measure_evm(&out[k], reference, cfg.max_lag)?;

            let aligned = align_to_reference(&out[k], reference, cfg.max_lag, AlignGain::Projection)?;
            let bits = &tx.bit_streams[k];
            let ber = if aligned.samples.len() == bits.symbol_count() {
                measure_ber(&aligned.samples, bits)?
            } else {
                let start = 4 * aligned.ref_offset;
                let window = BitStream::new(bits.bits()[start..start + 4 * aligned.samples.len()].to_vec())?;
                measure_ber(&aligned.samples, &window)?
            };

            Ok(MetricsRecord {
                user_index: k,
                ber,
                evm_rms_pct: evm,
                sndr_db: sndr,
                enob: sndr_to_enob(sndr),
                array_gain_db: array_gain(sndr, sndr_in),
            })
        })
        .collect()
}
