//! Built-in sweeps reproducing the reference figure families.

use crate::config::{SystemConfig, BER_SYMBOLS};
use crate::error::HarnessError;
use crate::sweep::{LogScale, OutputMetric, SweepAxis, SweepSpec, SweepVariable as V};

pub const PRESET_NAMES: &[&str] = &[
    "fig7a", "fig7b", "fig7c", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13", "fig14a", "fig14b", "fig15", "fig16",
    "fig17", "fig18",
];

fn base() -> SystemConfig {
    SystemConfig {
        max_lag: 2,
        ..SystemConfig::default()
    }
}

/// One desired user and the blocker, no thermal noise.
fn blocker_base(elements: usize, zf_on: bool) -> SystemConfig {
    SystemConfig {
        elements,
        users: 2,
        enable_blocker: true,
        zf_on,
        add_therm_noise: false,
        ..base()
    }
}

fn ber_base(elements: usize, zf_on: bool) -> SystemConfig {
    SystemConfig {
        elements,
        zf_on,
        n_symbols: BER_SYMBOLS,
        ..base()
    }
}

fn spec(name: &str, base: SystemConfig, axes: Vec<SweepAxis>, output: OutputMetric) -> SweepSpec {
    let log_y = output == OutputMetric::Ber;
    SweepSpec {
        name: name.to_string(),
        base,
        axes,
        output,
        log_scale: LogScale { x: false, y: log_y },
        ..SweepSpec::default()
    }
}

fn list(var: V, values: &[f64]) -> SweepAxis {
    SweepAxis::list(var, values.to_vec())
}

fn sir_vs_bits(name: &str, base: SystemConfig, output: OutputMetric) -> SweepSpec {
    spec(
        name,
        base,
        vec![SweepAxis::linear(V::Sir, -40.0, 40.0, 2.0), SweepAxis::linear(V::B, 2.0, 8.0, 1.0)],
        output,
    )
}

fn ber_vs_snr_and_sir(name: &str, cfg: SystemConfig, family: SweepAxis) -> SweepSpec {
    let cfg = SystemConfig {
        users: 2,
        enable_blocker: true,
        ..cfg
    };
    spec(
        name,
        cfg,
        vec![
            SweepAxis::linear(V::SnrTherm, 0.0, 30.0, 2.0),
            list(V::Sir, &[-10.0, 0.0, 10.0, 20.0]),
            family,
        ],
        OutputMetric::Ber,
    )
}

/// Looks up a preset by name.
pub fn load_preset(name: &str) -> Result<SweepSpec, HarnessError> {
    let thermal_zf16 = SystemConfig {
        add_therm_noise: true,
        snr_therm_db: 20.0,
        ..blocker_base(16, true)
    };
    let quant_only = |users| SystemConfig {
        elements: 16,
        users,
        adc_bits: 5,
        add_therm_noise: false,
        ..base()
    };
    let s = match name {
        "fig7a" => sir_vs_bits(name, blocker_base(1, false), OutputMetric::Sndr),
        "fig7b" => sir_vs_bits(name, blocker_base(16, false), OutputMetric::Sndr),
        "fig7c" => sir_vs_bits(name, blocker_base(16, true), OutputMetric::Sndr),
        "fig8" => sir_vs_bits(name, thermal_zf16, OutputMetric::Sndr),
        "fig9" => sir_vs_bits(name, thermal_zf16, OutputMetric::Enob),
        "fig10" => spec(
            name,
            blocker_base(4, true),
            vec![
                SweepAxis::geometric(V::M, 4.0, 64.0, 2.0),
                SweepAxis::linear(V::B, 2.0, 6.0, 1.0),
                SweepAxis::linear(V::Sir, -70.0, 20.0, 2.0),
            ],
            OutputMetric::SirMin,
        ),
        "fig11" | "fig12" => {
            let elements = if name == "fig11" { 1 } else { 16 };
            spec(
                name,
                ber_base(elements, true),
                vec![SweepAxis::linear(V::SnrTherm, -5.0, 30.0, 1.0), SweepAxis::linear(V::B, 1.0, 6.0, 1.0)],
                OutputMetric::Ber,
            )
        }
        "fig13" => ber_vs_snr_and_sir(name, ber_base(1, false), list(V::B, &[3.0, 4.0, 5.0])),
        "fig14a" => ber_vs_snr_and_sir(name, ber_base(16, false), list(V::B, &[3.0, 4.0, 5.0])),
        "fig14b" => ber_vs_snr_and_sir(name, ber_base(16, true), list(V::B, &[3.0, 4.0, 5.0])),
        "fig15" => spec(
            name,
            SystemConfig {
                adc_bits: 1,
                ..ber_base(16, true)
            },
            vec![SweepAxis::linear(V::SnrTherm, -4.0, 24.0, 2.0), list(V::M, &[4.0, 16.0, 64.0])],
            OutputMetric::Ber,
        ),
        "fig16" => spec(name, quant_only(1), vec![SweepAxis::linear(V::K, 1.0, 8.0, 1.0)], OutputMetric::Sndr),
        "fig17" => spec(
            name,
            quant_only(1),
            vec![SweepAxis::linear(V::K, 1.0, 8.0, 1.0), SweepAxis::linear(V::B, 3.0, 6.0, 1.0)],
            OutputMetric::Enob,
        ),
        "fig18" => spec(
            name,
            SystemConfig {
                users: 2,
                enable_blocker: true,
                ..quant_only(2)
            },
            vec![SweepAxis::linear(V::Sir, -40.0, 20.0, 2.0), list(V::K, &[2.0, 4.0, 8.0])],
            OutputMetric::Sndr,
        ),
        _ => {
            return Err(HarnessError::UnknownPreset {
                name: name.to_string(),
                available: PRESET_NAMES.to_vec(),
            })
        }
    };
    Ok(s)
}
