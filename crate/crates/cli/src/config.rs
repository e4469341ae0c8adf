//! Settings resolution: preset defaults, then the config file, then flags.

use hiflab_core::{Preset, Settings};
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Outcome of loading a config: the settings and any keys nothing consumed.
#[derive(Debug)]
pub struct Loaded {
    pub settings: Settings,
    pub unknown_keys: Vec<String>,
}

/// Overrides coming from the command line.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
}

fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

pub fn read_table(path: &Path) -> CliResult<toml::Table> {
    let text = std::fs::read_to_string(path).map_err(|e| crate::error::io_error(path, e))?;
    parse_table(&text, path)
}

fn parse_table(text: &str, path: &Path) -> CliResult<toml::Table> {
    text.parse::<toml::Table>().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Resolve settings from an optional parsed config file and flag overrides.
pub fn resolve(file: Option<(toml::Table, &Path)>, over: Overrides) -> CliResult<Loaded> {
    let (table, origin) = match file {
        Some((t, p)) => (t, p.display().to_string()),
        None => (toml::Table::new(), "<defaults>".to_string()),
    };
    let file_preset = match table.get("preset") {
        Some(toml::Value::String(s)) => Some(s.parse::<Preset>().map_err(|e| CliError::Usage(format!("{origin}: {e}")))?),
        Some(other) => return Err(CliError::Usage(format!("{origin}: `preset` must be a string, got {other}"))),
        None => None,
    };
    let preset = over.preset.or(file_preset).unwrap_or_default();
    let mut value = toml::Value::try_from(Settings::preset(preset))
        .map_err(|e| CliError::Internal(format!("serializing preset: {e}")))?;
    merge(&mut value, toml::Value::Table(table));
    if let toml::Value::Table(t) = &mut value {
        t.insert("preset".into(), toml::Value::String(preset.to_string()));
    }

    let mut unknown_keys = Vec::new();
    let settings: Settings = serde_ignored::deserialize(value, |path| unknown_keys.push(path.to_string()))
        .map_err(|e| CliError::Usage(format!("{origin}: {e}")))?;
    let seed = over.seed.unwrap_or(settings.seed);
    if i64::try_from(seed).is_err() {
        return Err(CliError::Usage(format!("seed {seed} exceeds {}", i64::MAX)));
    }
    let settings = settings.with_seed(seed);
    settings.validate().map_err(|e| CliError::Usage(format!("{origin}: {e}")))?;
    Ok(Loaded { settings, unknown_keys })
}

/// Load and check a config file; unknown keys fail only under `strict`.
pub fn load(path: Option<&Path>, over: Overrides, strict: bool) -> CliResult<Loaded> {
    let file = match path {
        Some(p) => Some((read_table(p)?, p)),
        None => None,
    };
    let loaded = resolve(file, over)?;
    if !loaded.unknown_keys.is_empty() {
        let list = loaded.unknown_keys.join(", ");
        if strict {
            return Err(CliError::Usage(format!("unknown config keys: {list}")));
        }
        eprintln!("warning: ignoring unknown config keys: {list}");
    }
    Ok(loaded)
}

/// Full settings dump, usable as a config file.
pub fn dump(settings: &Settings) -> CliResult<String> {
    toml::to_string(settings).map_err(|e| CliError::Internal(format!("serializing settings: {e}")))
}

/// Parse settings text directly, as stored in a run manifest.
pub fn from_str(text: &str) -> CliResult<Settings> {
    toml::from_str(text).map_err(|e| CliError::Usage(e.to_string()))
}
