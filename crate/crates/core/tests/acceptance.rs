//! End-to-end acceptance criteria. Runs without the libtest harness so every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use dbfsim::analytic::{sqnr_degraded, sqnr_nom};
use dbfsim::beamformer::zeroforce_matrix;
use dbfsim::channel::{build_channel, place_users, steering_vector};
use dbfsim::frontend::QuantizerSpec;
use dbfsim::metrics::measure_sndr;
use dbfsim::sweep::{OutputMetric, SweepAxis, SweepVariable};
use dbfsim::tx::{gen_prbs, qam16_map};
use dbfsim::{run_single, run_sweep, MetricsRecord, SirMin, SweepSpec, SystemConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn run(cfg: &SystemConfig) -> Vec<MetricsRecord> {
    run_single(cfg).unwrap_or_else(|e| panic!("run_single failed: {e}"))
}

fn mean_sndr(cfg: &SystemConfig) -> f64 {
    let r = run(cfg);
    r.iter().map(|r| r.sndr_db).sum::<f64>() / r.len() as f64
}

fn base() -> SystemConfig {
    SystemConfig {
        max_lag: 2,
        ..SystemConfig::default()
    }
}

/// One user of interest plus the blocker, no thermal noise.
fn blocker(elements: usize, zf_on: bool, adc_bits: u32, sir_db: f64) -> SystemConfig {
    SystemConfig {
        elements,
        users: 2,
        enable_blocker: true,
        zf_on,
        adc_bits,
        sir_db,
        add_therm_noise: false,
        ..base()
    }
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn quantization_plateau() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for b in 2..=8 {
        let s = run(&blocker(1, false, b, 30.0))[0].sndr_db;
        let dev = s - sqnr_nom(b);
        worst = worst.max(dev.abs());
        parts.push(format!("B{b}:{s:.1}"));
    }
    outcome(worst <= 1.5, format!("max |SNDR - (6.02B-1.76)| = {worst:.2} dB (limit 1.5) [{}]", parts.join(" ")))
}

fn interferer_limb() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..=4 {
        let sir = -30.0 + 5.0 * i as f64;
        let s = run(&blocker(1, false, 8, sir))[0].sndr_db;
        worst = worst.max((s - sir).abs());
    }
    outcome(worst <= 1.5, format!("max |SNDR - SIR| = {worst:.2} dB (limit 1.5)"))
}

fn zf_degradation_law() -> Outcome {
    let mut devs = Vec::new();
    for b in 3..=5 {
        for i in 0..=12 {
            let sir = -30.0 + 5.0 * i as f64;
            let s = run(&blocker(16, true, b, sir))[0].sndr_db;
            devs.push(s - sqnr_degraded(b, sir));
        }
    }
    let worst = devs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let rms = (devs.iter().map(|d| d * d).sum::<f64>() / devs.len() as f64).sqrt();
    outcome(
        worst <= 2.0 && rms <= 1.5,
        format!("max |dev| = {worst:.2} dB (limit 2), RMS = {rms:.2} dB (limit 1.5), mean dev = {:.2} dB", devs.iter().sum::<f64>() / devs.len() as f64),
    )
}

fn zf_vs_conjugate() -> Outcome {
    let zf = run(&blocker(16, true, 5, -20.0))[0].sndr_db;
    let conj = run(&blocker(16, false, 5, -20.0))[0].sndr_db;
    outcome(zf - conj >= 10.0, format!("ZF {zf:.2} dB, conjugate {conj:.2} dB, margin {:.2} dB (need >= 10)", zf - conj))
}

fn thermal_ceiling() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for b in [8, 10, 12] {
        let cfg = SystemConfig {
            add_therm_noise: true,
            snr_therm_db: 20.0,
            ..blocker(16, true, b, 30.0)
        };
        let s = run(&cfg)[0].sndr_db;
        worst = worst.max((s - 32.0).abs());
        parts.push(format!("B{b}:{s:.2}"));
    }
    outcome(worst <= 1.5, format!("max |SNDR - 32| = {worst:.2} dB (limit 1.5) [{}]", parts.join(" ")))
}

fn sir_min_slopes() -> Outcome {
    let ms = [4.0, 8.0, 16.0, 32.0];
    let bs = [3.0, 4.0, 5.0];
    let spec = SweepSpec {
        name: "sir_min_slopes".into(),
        base: blocker(4, true, 3, 0.0),
        axes: vec![
            SweepAxis::list(SweepVariable::M, ms.to_vec()),
            SweepAxis::list(SweepVariable::B, bs.to_vec()),
            SweepAxis::linear(SweepVariable::Sir, -70.0, 20.0, 2.0),
        ],
        output: OutputMetric::SirMin,
        ..SweepSpec::default()
    };
    let grid = run_sweep(&spec, 0).expect("sweep runs");
    let mut table = vec![vec![f64::NAN; bs.len()]; ms.len()];
    for e in &grid.sir_min {
        if let SirMin::Crossing(v) = e.sir_min {
            table[e.index[0]][e.index[1]] = v;
        }
    }
    if table.iter().flatten().any(|v| v.is_nan()) {
        return outcome(false, format!("missing SIR_min values: {table:?}"));
    }
    let per_bit = table.iter().map(|row| slope(&bs, row)).sum::<f64>() / ms.len() as f64;
    let log_m: Vec<f64> = ms.iter().map(|m: &f64| m.log2()).collect();
    let per_doubling = (0..bs.len())
        .map(|j| slope(&log_m, &table.iter().map(|row| row[j]).collect::<Vec<_>>()))
        .sum::<f64>()
        / bs.len() as f64;
    let rows: Vec<String> = table
        .iter()
        .zip(ms)
        .map(|(r, m)| format!("M{m}:{}", r.iter().map(|v| format!("{v:.1}")).collect::<Vec<_>>().join("/")))
        .collect();
    outcome(
        (per_bit + 6.0).abs() <= 1.0 && (per_doubling + 3.0).abs() <= 1.0,
        format!(
            "per-bit slope {per_bit:.2} dB (want -6 +/- 1), per-doubling slope {per_doubling:.2} dB (want -3 +/- 1) [{}]",
            rows.join(" ")
        ),
    )
}

fn minimum_adc_resolution() -> Outcome {
    // thresholds read off waterfall curves, one order of magnitude tolerance
    let single = SystemConfig {
        elements: 1,
        adc_bits: 4,
        snr_therm_db: 25.0,
        n_symbols: 100_000,
        ..base()
    };
    let array = SystemConfig {
        elements: 16,
        adc_bits: 2,
        snr_therm_db: 20.0,
        n_symbols: 100_000,
        ..base()
    };
    let b1 = run(&single)[0].ber;
    let b16 = run(&array)[0].ber;
    outcome(
        b1 <= 1e-4 * 10.0 && b16 <= 1e-3 * 10.0,
        format!("M=1 B=4 @25 dB: BER {b1:.2e} (<= 1e-4, x10 tolerance); M=16 B=2 @20 dB: BER {b16:.2e} (<= 1e-3, x10 tolerance)"),
    )
}

fn one_bit_case_study() -> Outcome {
    let snrs: Vec<f64> = (0..15).map(|i| -4.0 + 2.0 * i as f64).collect();
    let curve = |elements: usize| -> Vec<f64> {
        snrs.par_iter()
            .map(|&snr| {
                let cfg = SystemConfig {
                    elements,
                    adc_bits: 1,
                    snr_therm_db: snr,
                    n_symbols: 250_000,
                    ..base()
                };
                run(&cfg)[0].ber
            })
            .collect()
    };
    let best = |c: &[f64]| c.iter().copied().enumerate().fold((0, f64::INFINITY), |a, (i, v)| if v < a.1 { (i, v) } else { a });
    let c16 = curve(16);
    let c64 = curve(64);
    let (i16, b16) = best(&c16);
    let (i64, b64) = best(&c64);
    let non_monotone = c16.last().copied().unwrap_or(0.0) > b16 && c64.last().copied().unwrap_or(0.0) > b64;
    outcome(
        (3e-4..=3e-3).contains(&b16) && b64 < 1e-5 && non_monotone,
        format!(
            "M=16 best BER {b16:.2e} at {} dB (want [3e-4, 3e-3]); M=64 best BER {b64:.2e} at {} dB (want < 1e-5); high-SNR BER M16 {:.2e}, M64 {:.2e}",
            snrs[i16],
            snrs[i64],
            c16.last().unwrap(),
            c64.last().unwrap()
        ),
    )
}

fn user_count_loading() -> Outcome {
    let ks = [1, 2, 4, 8];
    let sndr: Vec<f64> = ks
        .iter()
        .map(|&k| {
            mean_sndr(&SystemConfig {
                elements: 16,
                users: k,
                adc_bits: 5,
                add_therm_noise: false,
                ..base()
            })
        })
        .collect();
    let drops: Vec<f64> = sndr.windows(2).map(|w| w[0] - w[1]).collect();
    let ok = drops.iter().all(|d| (d - 3.0).abs() <= 0.7);
    outcome(
        ok,
        format!(
            "SNDR K=1/2/4/8: {} dB; drop per doubling {} dB (want 3 +/- 0.7)",
            sndr.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join("/"),
            drops.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join("/")
        ),
    )
}

fn interference_dominance_over_k() -> Outcome {
    let sndr: Vec<f64> = [2, 4, 8]
        .iter()
        .map(|&k| {
            mean_sndr(&SystemConfig {
                users: k,
                ..blocker(16, true, 5, -15.0)
            })
        })
        .collect();
    let spread = sndr.iter().copied().fold(f64::NEG_INFINITY, f64::max) - sndr.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        spread <= 2.0,
        format!(
            "SNDR K=2/4/8: {} dB, spread {spread:.2} dB (limit 2)",
            sndr.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join("/")
        ),
    )
}

fn estimator_oracle() -> Outcome {
    let n = 100_000;
    let s = qam16_map(&gen_prbs(4 * n, &mut ChaCha8Rng::seed_from_u64(11)).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for snr in [10.0, 20.0, 30.0] {
        let sigma = (10f64.powf(-snr / 10.0) / 2.0).sqrt();
        let rx: Vec<Complex64> = s
            .iter()
            .map(|&x| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                x + sigma * Complex64::new(re, im)
            })
            .collect();
        let est = measure_sndr(&rx, &s, 2).unwrap();
        worst = worst.max((est - snr).abs());
    }
    outcome(worst <= 0.2, format!("max |estimate - injected| = {worst:.3} dB (limit 0.2)"))
}

fn exact_algebra() -> Outcome {
    let mut residual: f64 = 0.0;
    for (m, k, blk) in [(16, 4, true), (8, 3, false), (64, 8, false), (4, 4, true)] {
        let p = place_users(k, 22.5, 78.5, blk).unwrap();
        let h = build_channel(&p.angles_deg, m).unwrap();
        residual = residual.max(zeroforce_matrix(&h).unwrap().residual_max(&h));
    }

    let mut norm_err: f64 = 0.0;
    for m in [1, 2, 16, 64] {
        for theta in [-89.0, -33.75, 0.0, 11.25, 78.5] {
            let n2: f64 = steering_vector(theta, m).iter().map(|a| a.norm_sqr()).sum();
            norm_err = norm_err.max((n2 - m as f64).abs());
        }
    }

    let mut quant_ok = true;
    for bits in 1..=8 {
        let q = QuantizerSpec::for_normalized_qam(bits).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..10_000 {
            let x = -2.0 + 4.0 * i as f64 / 9_999.0;
            let y = q.quantize(x);
            quant_ok &= q.quantize(y) == y && y >= prev;
            prev = y;
        }
    }

    let spec = SweepSpec {
        name: "determinism".into(),
        base: SystemConfig {
            users: 3,
            n_symbols: 2_000,
            ..base()
        },
        axes: vec![
            SweepAxis::linear(SweepVariable::SnrTherm, 0.0, 20.0, 10.0),
            SweepAxis::list(SweepVariable::B, vec![2.0, 4.0]),
        ],
        ..SweepSpec::default()
    };
    let reference = run_sweep(&spec, 1).unwrap().cells;
    let deterministic = [1, 2, 8].iter().all(|&jobs| run_sweep(&spec, jobs).unwrap().cells == reference);

    outcome(
        residual < 1e-9 && norm_err < 1e-9 && quant_ok && deterministic,
        format!(
            "ZF residual {residual:.1e}, steering norm error {norm_err:.1e}, quantizer idempotent+monotone {quant_ok}, deterministic over jobs 1/2/8 {deterministic}"
        ),
    )
}

fn array_gain() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for m in [4usize, 16, 64] {
        let cfg = SystemConfig {
            elements: m,
            adc_bits: 14,
            snr_therm_db: 20.0,
            ..base()
        };
        let ag = run(&cfg)[0].array_gain_db;
        let ideal = 10.0 * (m as f64).log10();
        worst = worst.max((ag - ideal).abs());
        parts.push(format!("M{m}:{ag:.2}/{ideal:.2}"));
    }
    outcome(worst <= 0.5, format!("max |AG - 10log10 M| = {worst:.2} dB (limit 0.5) [{}]", parts.join(" ")))
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: &[Criterion] = &[
    (1, "quantization plateau", quantization_plateau),
    (2, "interferer-dominated limb", interferer_limb),
    (3, "ZF degradation law", zf_degradation_law),
    (4, "ZF vs conjugate contrast", zf_vs_conjugate),
    (5, "thermal ceiling", thermal_ceiling),
    (6, "SIR_min slopes", sir_min_slopes),
    (7, "minimum ADC resolution", minimum_adc_resolution),
    (8, "one-bit case study", one_bit_case_study),
    (9, "user-count loading", user_count_loading),
    (10, "interference dominance over K", interference_dominance_over_k),
    (11, "estimator oracle", estimator_oracle),
    (12, "exact algebra and determinism", exact_algebra),
    (13, "array gain", array_gain),
];

fn main() {
    // `cargo test -- --list` and similar harness flags are not supported here
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let results: Vec<Outcome> = CRITERIA
        .par_iter()
        .map(|(_, _, f)| {
            catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                outcome(false, format!("panicked: {msg}"))
            })
        })
        .collect();

    let mut failed = 0;
    for ((id, name, _), r) in CRITERIA.iter().zip(&results) {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id:>2} ({name}): {}", r.detail);
        failed += usize::from(!r.pass);
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
