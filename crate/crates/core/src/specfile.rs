//! TOML sweep description files.
//!
//! A file holds the fields of [`SweepSpec`] at top level, the base point in a
//! `[system]` table and one `[[sweep]]` table per axis:
//!
//! ```toml
//! preset = "fig7c"      # optional starting point
//! output = "ENOB"
//!
//! [system]
//! B = 4
//! n_symbols = 20000
//! ```
//!
//! With a preset, `[system]` keys override single fields of the preset's
//! base, any `[[sweep]]` replaces the preset's axes, and the remaining
//! top-level keys replace the preset's values.

use crate::error::ConfigError;
use crate::presets::load_preset;
use crate::sweep::SweepSpec;

fn parse_err(e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Parse(e.to_string())
}

/// Long field name for the short aliases accepted in `[system]`.
fn canonical_key(key: &str) -> &str {
    match key {
        "M" => "elements",
        "K" => "users",
        "B" => "adc_bits",
        other => other,
    }
}

pub fn parse_sweep_toml(text: &str) -> Result<SweepSpec, ConfigError> {
    parse_sweep_toml_over(text, None)
}

/// Like [`parse_sweep_toml`], with `default_preset` used when the file names
/// no preset of its own.
pub fn parse_sweep_toml_over(text: &str, default_preset: Option<&str>) -> Result<SweepSpec, ConfigError> {
    let mut table: toml::Table = text.parse().map_err(parse_err)?;
    let preset = match table.remove("preset") {
        None => default_preset.map(str::to_string),
        Some(toml::Value::String(name)) => Some(name),
        Some(other) => return Err(ConfigError::Parse(format!("preset must be a string, got {}", other.type_str()))),
    };
    let Some(name) = preset else {
        return toml::Value::Table(table).try_into().map_err(parse_err);
    };

    let base_spec = load_preset(&name).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let mut merged = toml::Table::try_from(&base_spec).map_err(parse_err)?;
    for (key, value) in table {
        if key == "system" {
            let toml::Value::Table(overrides) = value else {
                return Err(ConfigError::Parse("[system] must be a table".into()));
            };
            let Some(toml::Value::Table(system)) = merged.get_mut("system") else {
                return Err(ConfigError::Parse("preset without a system table".into()));
            };
            for (k, v) in overrides {
                system.insert(canonical_key(&k).to_string(), v);
            }
        } else {
            merged.insert(key, value);
        }
    }
    toml::Value::Table(merged).try_into().map_err(parse_err)
}
