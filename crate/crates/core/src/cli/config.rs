//! Run configuration files.
//!
//! The format is TOML restricted to `key = value` lines, `[section]`
//! headers and `#` comments:
//!
//! ```text
//! runs = 50
//! master_seed = 7
//! sparsity_levels = [1, 4]
//! algorithms = ["lms", "lp_like_llms"]
//!
//! # applies to every sparsity level of the variant
//! [schedule.lp_like_llms]
//! leak_sign = "minus"
//!
//! # applies to one nonzero-tap count
//! [schedule.lp_like_llms.4]
//! rho_pl = 0.0025
//! ```
//!
//! Anything not given keeps the default experiment value. A schedule entry
//! exists for a level when it has a tabulated default or when the
//! overrides supply every field its variant reads.

use std::collections::BTreeMap;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::experiment::{table_entry, ExperimentConfig, Schedule};
use crate::filter::{AlgorithmConfig, LeakSign, Variant};

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Syntax(e.to_string()))?;
    let mut config = ExperimentConfig::default();

    for (key, value) in &table {
        match key.as_str() {
            "n_taps" => config.n_taps = positive_int(key, value)?,
            "iterations" => config.iterations = positive_int(key, value)?,
            "runs" => config.runs = positive_int(key, value)?,
            "steady_state_window" => config.steady_state_window = positive_int(key, value)?,
            "ar_coeff" => config.ar_coeff = real(key, value)?,
            "drive_variance" => config.drive_variance = real(key, value)?,
            "noise_variance" => config.noise_variance = real(key, value)?,
            "master_seed" => config.master_seed = seed(key, value)?,
            "sparsity_levels" => {
                config.sparsity_levels = array(key, value)?
                    .iter()
                    .map(|v| positive_int(key, v))
                    .collect::<Result<_>>()?
            }
            "algorithms" => {
                config.algorithms = array(key, value)?
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => s.parse::<Variant>(),
                        _ => Err(type_error(key, "a list of algorithm names")),
                    })
                    .collect::<Result<_>>()?
            }
            "schedule" => {}
            _ => return Err(Error::UnknownKey(key.clone())),
        }
    }

    if !table.contains_key("steady_state_window") {
        config.steady_state_window = config.steady_state_window.min(config.iterations);
    }

    let overrides = match table.get("schedule") {
        Some(Value::Table(t)) => parse_schedule(t)?,
        Some(_) => return Err(type_error("schedule", "a table")),
        None => BTreeMap::new(),
    };
    config.schedule = resolve_schedule(config.n_taps, &overrides)?;
    config.validate()?;
    Ok(config)
}

/// Field overrides for one schedule section. `None` keeps the base value.
#[derive(Debug, Default, Clone, Copy, PartialEq)]
struct Overlay {
    mu: Option<f64>,
    gamma: Option<f64>,
    rho_pl: Option<f64>,
    epsilon_pl: Option<f64>,
    p: Option<f64>,
    leak_sign: Option<LeakSign>,
}

impl Overlay {
    fn from_config(cfg: &AlgorithmConfig) -> Self {
        Self {
            mu: Some(cfg.mu),
            gamma: Some(cfg.gamma),
            rho_pl: Some(cfg.rho_pl),
            epsilon_pl: Some(cfg.epsilon_pl),
            p: Some(cfg.p),
            leak_sign: Some(cfg.leak_sign),
        }
    }

    /// Values that do not depend on the sparsity level.
    fn level_independent(variant: Variant) -> Self {
        let template = table_entry(variant, 1).expect("tabulated level");
        Self {
            gamma: None,
            rho_pl: None,
            ..Self::from_config(&template)
        }
    }

    fn then(self, top: &Overlay) -> Self {
        Self {
            mu: top.mu.or(self.mu),
            gamma: top.gamma.or(self.gamma),
            rho_pl: top.rho_pl.or(self.rho_pl),
            epsilon_pl: top.epsilon_pl.or(self.epsilon_pl),
            p: top.p.or(self.p),
            leak_sign: top.leak_sign.or(self.leak_sign),
        }
    }

    /// The first field `variant` reads that is still unset.
    fn missing_field(&self, variant: Variant) -> Option<&'static str> {
        let mut needed = vec![("mu", self.mu.is_some())];
        if variant.uses_leak() {
            needed.push(("gamma", self.gamma.is_some()));
        }
        if variant.uses_constraint() {
            needed.push(("rho_pl", self.rho_pl.is_some()));
            needed.push(("epsilon_pl", self.epsilon_pl.is_some()));
            needed.push(("p", self.p.is_some()));
        }
        needed.into_iter().find(|(_, set)| !set).map(|(name, _)| name)
    }

    fn build(&self, variant: Variant) -> AlgorithmConfig {
        AlgorithmConfig {
            variant,
            mu: self.mu.unwrap_or(0.0),
            gamma: self.gamma.unwrap_or(0.0),
            rho_pl: self.rho_pl.unwrap_or(0.0),
            epsilon_pl: self.epsilon_pl.unwrap_or(0.0),
            p: self.p.unwrap_or(0.0),
            leak_sign: self.leak_sign.unwrap_or(LeakSign::Minus),
        }
    }
}

#[derive(Debug, Default)]
struct VariantOverrides {
    all_levels: Overlay,
    per_level: BTreeMap<usize, Overlay>,
}

fn parse_schedule(table: &Table) -> Result<BTreeMap<Variant, VariantOverrides>> {
    let mut out = BTreeMap::new();
    for (name, section) in table {
        let path = format!("schedule.{name}");
        let variant: Variant = name.parse().map_err(|_| Error::UnknownKey(path.clone()))?;
        let Value::Table(section) = section else {
            return Err(type_error(&path, "a table"));
        };
        let mut overrides = VariantOverrides::default();
        for (key, value) in section {
            let key_path = format!("{path}.{key}");
            match value {
                Value::Table(level_table) => {
                    let level: usize = key.parse().map_err(|_| Error::UnknownKey(key_path.clone()))?;
                    let mut overlay = Overlay::default();
                    for (field, v) in level_table {
                        set_field(&mut overlay, &format!("{key_path}.{field}"), field, v)?;
                    }
                    overrides.per_level.insert(level, overlay);
                }
                _ => set_field(&mut overrides.all_levels, &key_path, key, value)?,
            }
        }
        out.insert(variant, overrides);
    }
    Ok(out)
}

fn set_field(overlay: &mut Overlay, path: &str, field: &str, value: &Value) -> Result<()> {
    match field {
        "mu" => overlay.mu = Some(real(path, value)?),
        "gamma" => overlay.gamma = Some(real(path, value)?),
        "rho_pl" => overlay.rho_pl = Some(real(path, value)?),
        "epsilon_pl" => overlay.epsilon_pl = Some(real(path, value)?),
        "p" => overlay.p = Some(real(path, value)?),
        "leak_sign" => match value {
            Value::String(s) => {
                overlay.leak_sign = Some(
                    s.parse()
                        .map_err(|e: Error| Error::Validation(format!("{path}: {e}")))?,
                )
            }
            _ => return Err(type_error(path, "\"plus\" or \"minus\"")),
        },
        _ => return Err(Error::UnknownKey(path.to_string())),
    }
    Ok(())
}

fn resolve_schedule(n_taps: usize, overrides: &BTreeMap<Variant, VariantOverrides>) -> Result<Schedule> {
    let empty = VariantOverrides::default();
    let mut schedule = Schedule::new();
    for variant in Variant::ALL {
        let ov = overrides.get(&variant).unwrap_or(&empty);
        if let Some(&level) = ov.per_level.keys().find(|&&l| l == 0 || l > n_taps) {
            return Err(Error::Validation(format!(
                "schedule.{variant}.{level}: level must satisfy 1 <= level <= n_taps ({n_taps})"
            )));
        }
        for level in 1..=n_taps {
            let base = match table_entry(variant, level) {
                Some(cfg) => Overlay::from_config(&cfg),
                None => Overlay::level_independent(variant),
            };
            let level_ov = ov.per_level.get(&level);
            let merged = base.then(&ov.all_levels).then(&level_ov.copied().unwrap_or_default());
            match (merged.missing_field(variant), level_ov) {
                (None, _) => {
                    schedule.insert((variant, level), merged.build(variant));
                }
                (Some(field), Some(_)) => {
                    return Err(Error::Validation(format!(
                        "schedule.{variant}.{level}: `{field}` has no default at this level and must be set"
                    )));
                }
                (Some(_), None) => {}
            }
        }
    }
    Ok(schedule)
}

fn type_error(key: &str, expected: &str) -> Error {
    Error::Validation(format!("`{key}` must be {expected}"))
}

fn positive_int(key: &str, value: &Value) -> Result<usize> {
    match value {
        Value::Integer(i) if *i >= 1 => Ok(*i as usize),
        Value::Integer(i) => Err(Error::Validation(format!("`{key}` must be >= 1, got {i}"))),
        _ => Err(type_error(key, "a positive integer")),
    }
}

fn real(key: &str, value: &Value) -> Result<f64> {
    match value {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(type_error(key, "a number")),
    }
}

fn seed(key: &str, value: &Value) -> Result<u64> {
    match value {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| type_error(key, "an unsigned 64-bit integer")),
        _ => Err(type_error(key, "an unsigned 64-bit integer")),
    }
}

fn array<'a>(key: &str, value: &'a Value) -> Result<&'a [Value]> {
    match value {
        Value::Array(a) => Ok(a.as_slice()),
        _ => Err(type_error(key, "a list")),
    }
}
