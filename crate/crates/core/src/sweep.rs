//! Parameter sweeps over grids of simulation points.
//!
//! Axis 0 is the plot abscissa and further axes form curve families. In
//! SIR_min mode the last axis must be SIR; it is collapsed by
//! [`extract_sir_min`] and the remaining axes index the result.

use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{validate_config, ConfigWarning, MetricsRecord, SystemConfig};
use crate::error::{ConfigError, HarnessError};
use crate::metrics::{extract_sir_min, SirMin, SIR_MIN_ENOB_THRESHOLD};
use crate::pipeline::run_single;
use crate::rng::cell_seed;

pub const SCHEMA_VERSION: u32 = 1;
pub const MAX_AXES: usize = 3;
/// Upper bound on points per axis and on grid cells.
pub const MAX_AXIS_POINTS: usize = 10_000;
pub const MAX_CELLS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVariable {
    M,
    K,
    B,
    #[serde(rename = "SNR_therm")]
    SnrTherm,
    #[serde(rename = "SIR")]
    Sir,
    Angle,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::M => "M",
            SweepVariable::K => "K",
            SweepVariable::B => "B",
            SweepVariable::SnrTherm => "SNR_therm",
            SweepVariable::Sir => "SIR",
            SweepVariable::Angle => "Angle",
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, SweepVariable::M | SweepVariable::K | SweepVariable::B)
    }

    /// Axis label with unit.
    pub fn label(self) -> &'static str {
        match self {
            SweepVariable::M => "M",
            SweepVariable::K => "K",
            SweepVariable::B => "B (bits)",
            SweepVariable::SnrTherm => "SNR_therm (dB)",
            SweepVariable::Sir => "SIR (dB)",
            SweepVariable::Angle => "Angle (deg)",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One swept variable. Give either `start`/`stop` with `step` (linear) or
/// `factor` (geometric), or an explicit `values` list.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub variable: Option<SweepVariable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn sweep_err(msg: impl Into<String>) -> ConfigError {
    ConfigError::Sweep(msg.into())
}

impl SweepAxis {
    pub fn linear(variable: SweepVariable, start: f64, stop: f64, step: f64) -> Self {
        SweepAxis {
            variable: Some(variable),
            start: Some(start),
            stop: Some(stop),
            step: Some(step),
            ..Default::default()
        }
    }

    pub fn geometric(variable: SweepVariable, start: f64, stop: f64, factor: f64) -> Self {
        SweepAxis {
            variable: Some(variable),
            start: Some(start),
            stop: Some(stop),
            factor: Some(factor),
            ..Default::default()
        }
    }

    pub fn list(variable: SweepVariable, values: Vec<f64>) -> Self {
        SweepAxis {
            variable: Some(variable),
            values: Some(values),
            ..Default::default()
        }
    }

    pub fn variable(&self) -> Result<SweepVariable, ConfigError> {
        self.variable.ok_or_else(|| sweep_err("axis without a variable"))
    }

    /// Expands the axis into its grid points.
    pub fn points(&self) -> Result<Vec<f64>, ConfigError> {
        let var = self.variable()?;
        let pts = match (self.start, self.stop, self.step, self.factor, &self.values) {
            (None, None, None, None, Some(v)) => v.clone(),
            (Some(a), Some(b), Some(s), None, None) => linear_points(a, b, s)?,
            (Some(a), Some(b), None, Some(f), None) => geometric_points(a, b, f)?,
            _ => {
                return Err(sweep_err(format!(
                    "axis {var}: give start/stop with exactly one of step or factor, or a values list"
                )))
            }
        };
        if pts.is_empty() {
            return Err(sweep_err(format!("axis {var} has no points")));
        }
        if pts.len() > MAX_AXIS_POINTS {
            return Err(sweep_err(format!("axis {var} has more than {MAX_AXIS_POINTS} points")));
        }
        if let Some(&bad) = pts.iter().find(|v| !v.is_finite()) {
            return Err(sweep_err(format!("axis {var} has non-finite value {bad}")));
        }
        if var.is_integer() {
            if let Some(&bad) = pts.iter().find(|&&v| v < 1.0 || (v - v.round()).abs() > 1e-9) {
                return Err(sweep_err(format!("axis {var} needs positive integers, got {bad}")));
            }
            return Ok(pts.iter().map(|v| v.round()).collect());
        }
        Ok(pts)
    }
}

fn linear_points(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, ConfigError> {
    if ![start, stop, step].iter().all(|v| v.is_finite()) {
        return Err(sweep_err("non-finite linear axis bounds"));
    }
    if step == 0.0 && start != stop {
        return Err(sweep_err("linear axis step is zero"));
    }
    if step != 0.0 && (stop - start) * step < 0.0 {
        return Err(sweep_err(format!("step {step} moves away from stop {stop}")));
    }
    if step == 0.0 {
        return Ok(vec![start]);
    }
    let span = (stop - start) / step;
    if span > MAX_AXIS_POINTS as f64 {
        return Err(sweep_err(format!("axis has more than {MAX_AXIS_POINTS} points")));
    }
    // tolerate rounding in the last step
    let n = (span + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

fn geometric_points(start: f64, stop: f64, factor: f64) -> Result<Vec<f64>, ConfigError> {
    if !(start > 0.0 && stop > 0.0 && factor > 0.0) || ![start, stop, factor].iter().all(|v| v.is_finite()) {
        return Err(sweep_err("geometric axis needs positive finite start, stop and factor"));
    }
    if factor == 1.0 {
        return if start == stop {
            Ok(vec![start])
        } else {
            Err(sweep_err("geometric factor of 1 never reaches stop"))
        };
    }
    if (stop / start).ln() * factor.ln() < 0.0 {
        return Err(sweep_err(format!("factor {factor} moves away from stop {stop}")));
    }
    let span = (stop / start).ln() / factor.ln();
    if span > MAX_AXIS_POINTS as f64 {
        return Err(sweep_err(format!("axis has more than {MAX_AXIS_POINTS} points")));
    }
    let n = (span + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start * factor.powi(i as i32)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputMetric {
    #[serde(rename = "BER")]
    Ber,
    #[serde(rename = "EVM")]
    Evm,
    #[serde(rename = "SNDR")]
    Sndr,
    #[serde(rename = "ENOB")]
    Enob,
    #[serde(rename = "SIR_min")]
    SirMin,
    ArrayGain,
}

impl OutputMetric {
    pub fn label(self) -> &'static str {
        match self {
            OutputMetric::Ber => "BER",
            OutputMetric::Evm => "EVM (%)",
            OutputMetric::Sndr => "SNDR (dB)",
            OutputMetric::Enob => "ENOB (bits)",
            OutputMetric::SirMin => "SIR_min (dB)",
            OutputMetric::ArrayGain => "Array gain (dB)",
        }
    }

    /// The plotted quantity of one record; `None` for SIR_min.
    pub fn value(self, r: &MetricsRecord) -> Option<f64> {
        match self {
            OutputMetric::Ber => Some(r.ber),
            OutputMetric::Evm => Some(r.evm_rms_pct),
            OutputMetric::Sndr => Some(r.sndr_db),
            OutputMetric::Enob => Some(r.enob),
            OutputMetric::ArrayGain => Some(r.array_gain_db),
            OutputMetric::SirMin => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogScale {
    pub x: bool,
    pub y: bool,
}

/// Which angle an `Angle` axis drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleMode {
    UserSpacing,
    BlockerAngle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub name: String,
    #[serde(rename = "system")]
    pub base: SystemConfig,
    #[serde(rename = "sweep")]
    pub axes: Vec<SweepAxis>,
    pub sweep_user_angle: bool,
    pub sweep_blocker_angle: bool,
    pub output: OutputMetric,
    pub log_scale: LogScale,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            name: "custom".to_string(),
            base: SystemConfig::default(),
            axes: Vec::new(),
            sweep_user_angle: false,
            sweep_blocker_angle: false,
            output: OutputMetric::Sndr,
            log_scale: LogScale::default(),
        }
    }
}

/// A validated sweep: expanded axes and resolved angle mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub axes: Vec<(SweepVariable, Vec<f64>)>,
    pub angle_mode: AngleMode,
    pub warnings: Vec<ConfigWarning>,
}

impl SweepPlan {
    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    /// Row-major multi-index of linear cell `i` (last axis fastest).
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (d, (_, v)) in self.axes.iter().enumerate().rev() {
            idx[d] = i % v.len();
            i /= v.len();
        }
        idx
    }

    /// Base config with the values of cell `idx` applied.
    pub fn cell_config(&self, base: &SystemConfig, idx: &[usize]) -> SystemConfig {
        let mut cfg = base.clone();
        for ((var, values), &i) in self.axes.iter().zip(idx) {
            let v = values[i];
            match var {
                SweepVariable::M => cfg.elements = v as usize,
                SweepVariable::K => cfg.users = v as usize,
                SweepVariable::B => cfg.adc_bits = v as u32,
                SweepVariable::SnrTherm => cfg.snr_therm_db = v,
                SweepVariable::Sir => cfg.sir_db = v,
                SweepVariable::Angle => match self.angle_mode {
                    AngleMode::UserSpacing => cfg.user_angle_spacing_deg = v,
                    AngleMode::BlockerAngle => cfg.blocker_angle_deg = v,
                },
            }
        }
        cfg
    }
}

impl SweepSpec {
    /// Angle mode implied by the two flags; the blocker wins when both are set.
    pub fn angle_mode(&self) -> (AngleMode, Option<ConfigWarning>) {
        match (self.sweep_user_angle, self.sweep_blocker_angle) {
            (true, true) => (AngleMode::BlockerAngle, Some(ConfigWarning::AngleSweepConflict)),
            (false, true) => (AngleMode::BlockerAngle, None),
            _ => (AngleMode::UserSpacing, None),
        }
    }

    /// Checks the sweep description and expands its axes.
    pub fn plan(&self) -> Result<SweepPlan, ConfigError> {
        if self.axes.is_empty() || self.axes.len() > MAX_AXES {
            return Err(sweep_err(format!("need 1 to {MAX_AXES} swept variables, got {}", self.axes.len())));
        }
        let mut axes = Vec::with_capacity(self.axes.len());
        for a in &self.axes {
            let var = a.variable()?;
            if axes.iter().any(|(v, _)| *v == var) {
                return Err(sweep_err(format!("{var} swept twice")));
            }
            axes.push((var, a.points()?));
        }
        let cells = axes.iter().try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len()));
        if !matches!(cells, Some(n) if n <= MAX_CELLS) {
            return Err(sweep_err(format!("grid exceeds {MAX_CELLS} cells")));
        }

        let (angle_mode, conflict) = self.angle_mode();
        let mut warnings: Vec<ConfigWarning> = conflict.into_iter().collect();
        let sweeps_angle = axes.iter().any(|(v, _)| *v == SweepVariable::Angle);
        if sweeps_angle && angle_mode == AngleMode::BlockerAngle && !self.base.enable_blocker {
            return Err(sweep_err("the blocker must be enabled to sweep the interferer angle"));
        }
        if self.output == OutputMetric::SirMin {
            if axes.last().map(|(v, _)| *v) != Some(SweepVariable::Sir) {
                return Err(sweep_err("SIR_min output needs SIR as the last swept variable"));
            }
            if !self.base.enable_blocker {
                return Err(sweep_err("SIR_min output needs the blocker enabled"));
            }
            let sirs = &axes.last().expect("checked above").1;
            if sirs.len() < 2 || sirs.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(sweep_err("the SIR axis must be strictly ascending with at least 2 points"));
            }
        }
        // only the base itself is checked here; cell-level problems are recorded per cell
        warnings.extend(validate_config(&self.base)?);
        Ok(SweepPlan {
            axes,
            angle_mode,
            warnings,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Ok { records: Vec<MetricsRecord> },
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub index: Vec<usize>,
    pub seed: u64,
    #[serde(flatten)]
    pub outcome: CellOutcome,
}

impl GridCell {
    pub fn records(&self) -> Option<&[MetricsRecord]> {
        match &self.outcome {
            CellOutcome::Ok { records } => Some(records),
            CellOutcome::Failed { .. } => None,
        }
    }
}

/// SIR_min of one user at one point of the outer axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SirMinEntry {
    pub index: Vec<usize>,
    pub user_index: usize,
    pub sir_min: SirMin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub spec: SweepSpec,
    pub seed: u64,
    pub timestamp_unix: u64,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultGrid {
    pub schema_version: u32,
    pub axes: Vec<GridAxis>,
    /// Row-major, last axis fastest.
    pub cells: Vec<GridCell>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sir_min: Vec<SirMinEntry>,
    pub metadata: GridMetadata,
}

impl ResultGrid {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    /// Structural checks for a grid read from outside.
    pub fn check(&self) -> Result<(), HarnessError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::Format(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.axes.is_empty() || self.axes.len() > MAX_AXES {
            return Err(HarnessError::Format(format!("{} axes", self.axes.len())));
        }
        let shape = self.shape();
        let count = shape.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
        if count != Some(self.cells.len()) {
            return Err(HarnessError::Format(format!(
                "{} cells for axes of shape {shape:?}",
                self.cells.len()
            )));
        }
        for (i, cell) in self.cells.iter().enumerate() {
            let mut linear = 0usize;
            if cell.index.len() != shape.len() {
                return Err(HarnessError::Format(format!("cell {i} has a bad index")));
            }
            for (&k, &n) in cell.index.iter().zip(&shape) {
                if k >= n {
                    return Err(HarnessError::Format(format!("cell {i} index out of range")));
                }
                linear = linear * n + k;
            }
            if linear != i {
                return Err(HarnessError::Format(format!("cell {i} out of order")));
            }
        }
        Ok(())
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Evaluates every cell of `spec` on `jobs` worker threads (0 picks the
/// number of CPUs).
///
/// Cell `i` runs with seed `cell_seed(spec.base.seed, i)`, so the grid does
/// not depend on `jobs`. Failing cells are recorded in the grid.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<ResultGrid, HarnessError> {
    let plan = spec.plan()?;
    for w in &plan.warnings {
        warn!("{w}");
    }
    let n = plan.cell_count();
    info!("sweep {:?}: {n} cells", spec.name);

    let eval = |i: usize| {
        let index = plan.multi_index(i);
        let mut cfg = plan.cell_config(&spec.base, &index);
        cfg.seed = cell_seed(spec.base.seed, i as u64);
        let outcome = match run_single(&cfg) {
            Ok(records) => CellOutcome::Ok { records },
            Err(e) => CellOutcome::Failed { error: e.to_string() },
        };
        GridCell {
            index,
            seed: cfg.seed,
            outcome,
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::Io(std::io::Error::other(e)))?;
    let cells: Vec<GridCell> = pool.install(|| (0..n).into_par_iter().map(eval).collect());

    let failed = cells.iter().filter(|c| c.records().is_none()).count();
    if failed > 0 {
        warn!("{failed} of {n} cells failed");
    }

    let axes: Vec<GridAxis> = plan
        .axes
        .iter()
        .map(|(variable, values)| GridAxis {
            variable: *variable,
            values: values.clone(),
        })
        .collect();
    let mut grid = ResultGrid {
        schema_version: SCHEMA_VERSION,
        axes,
        cells,
        sir_min: Vec::new(),
        metadata: GridMetadata {
            spec: spec.clone(),
            seed: spec.base.seed,
            timestamp_unix: unix_now(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    };
    if spec.output == OutputMetric::SirMin {
        grid.sir_min = sir_min_entries(&grid);
    }
    Ok(grid)
}

/// Collapses the last (SIR) axis of `grid` into SIR_min values per user.
///
/// Failed cells are left out of the ENOB curve.
pub fn sir_min_entries(grid: &ResultGrid) -> Vec<SirMinEntry> {
    let Some(inner) = grid.axes.last() else {
        return Vec::new();
    };
    let inner_len = inner.values.len();
    let mut out = Vec::new();
    for group in grid.cells.chunks(inner_len) {
        let outer = group[0].index[..group[0].index.len() - 1].to_vec();
        let users: Vec<usize> = match group.iter().find_map(|c| c.records()) {
            Some(r) => r.iter().map(|r| r.user_index).collect(),
            None => continue,
        };
        for u in users {
            let (sirs, enobs): (Vec<f64>, Vec<f64>) = group
                .iter()
                .filter_map(|c| {
                    let rec = c.records()?.iter().find(|r| r.user_index == u)?;
                    Some((inner.values[*c.index.last()?], rec.enob))
                })
                .unzip();
            match extract_sir_min(&sirs, &enobs, SIR_MIN_ENOB_THRESHOLD) {
                Ok(sir_min) => out.push(SirMinEntry {
                    index: outer.clone(),
                    user_index: u,
                    sir_min,
                }),
                Err(e) => warn!("no SIR_min at {outer:?} user {u}: {e}"),
            }
        }
    }
    out
}
