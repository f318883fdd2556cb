use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// Failure while reading or validating the run configuration.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// The config file (or `{}`) with `--set` overrides applied, before typing.
pub fn raw_config(path: Option<&Path>, overrides: &[String]) -> Result<Value> {
    let mut v = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Map::new()),
    };
    if !v.is_object() {
        bail!(ConfigError("top level must be a JSON object".into()));
    }
    for o in overrides {
        let (key, value) = o.split_once('=').ok_or_else(|| ConfigError(format!("--set expects key=value, got `{o}`")))?;
        set_path(&mut v, key, parse_value(value))?;
    }
    Ok(v)
}

/// JSON when it parses, otherwise a plain string.
fn parse_value(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string()))
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        bail!(ConfigError(format!("bad key `{key}`")));
    }
    let mut cur = root;
    for p in &parts[..parts.len() - 1] {
        let obj = cur.as_object_mut().ok_or_else(|| ConfigError(format!("`{key}`: `{p}` is not inside an object")))?;
        cur = obj.entry(p.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    let obj = cur.as_object_mut().ok_or_else(|| ConfigError(format!("`{key}` does not name an object field")))?;
    obj.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Typed config plus the reserved `seed` field, which no command consumes.
#[derive(Debug, Clone)]
pub struct Resolved<T> {
    pub config: T,
    pub seed: Option<u64>,
}

impl<T: Serialize> Resolved<T> {
    /// Fully resolved config, defaults included, as one line of JSON.
    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(&self.config).expect("config serializes");
        if let (Some(seed), Some(obj)) = (self.seed, v.as_object_mut()) {
            obj.insert("seed".into(), seed.into());
        }
        v
    }

    pub fn header(&self) -> String {
        format!("config={}", self.to_json())
    }
}

pub fn resolve<T: DeserializeOwned>(mut raw: Value) -> Result<Resolved<T>> {
    let seed = match raw.as_object_mut().and_then(|o| o.remove("seed")) {
        None | Some(Value::Null) => None,
        Some(s) => Some(s.as_u64().ok_or_else(|| ConfigError(format!("seed must be a non-negative integer, got {s}")))?),
    };
    let config = serde_json::from_value(raw).map_err(|e| ConfigError(e.to_string()))?;
    Ok(Resolved { config, seed })
}
