//! Flag values with a `key = value` config file underneath.

use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use usnc_core::adversary::{builtin_code, Descriptor};
use usnc_core::gf2::LinearCode;

#[derive(Default)]
pub struct Settings {
    file: Descriptor,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let file = Descriptor::parse(&text).with_context(|| format!("parsing config {}", path.display()))?;
        Ok(Self { file })
    }

    /// Flag if given, else the config entry, else `default`. Config keys may
    /// use either `-` or `_`.
    pub fn get<T: FromStr>(&self, key: &str, flag: Option<T>, default: Option<T>) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        let alt = key.replace('-', "_");
        if let Some(raw) = self.file.get(key).or_else(|| self.file.get(&alt)) {
            return raw
                .parse()
                .map_err(|_| anyhow!("config value for '{key}' is not valid: {raw}"));
        }
        default.ok_or_else(|| anyhow!("missing --{key} (flag or config entry)"))
    }
}

/// Built-in code name or path to a code file.
pub fn load_code(spec: &str) -> Result<LinearCode> {
    if let Some(code) = builtin_code(spec)? {
        return Ok(code);
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("reading code file {spec}"))?;
    Ok(LinearCode::from_text(&text).with_context(|| format!("parsing code file {spec}"))?)
}

pub fn require_positive(name: &str, v: usize) -> Result<usize> {
    if v == 0 {
        bail!("--{name} must be positive");
    }
    Ok(v)
}
