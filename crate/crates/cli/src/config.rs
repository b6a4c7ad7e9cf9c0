//! Run-configuration and profile files.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use greenfront::engine::EvMogaConfig;
use greenfront::portfolio::Bounds;
use greenfront::preferences::ProfileConfig;

/// Engine parameters plus optional uniform weight bounds, read from a flat
/// `key = value` file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub engine: EvMogaConfig,
    pub weight_lower: Option<f64>,
    pub weight_upper: Option<f64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text).context("run config is not valid key = value TOML")?;
        let mut take = |key: &str| -> Result<Option<f64>> {
            match table.remove(key) {
                None => Ok(None),
                Some(toml::Value::Float(v)) => Ok(Some(v)),
                Some(toml::Value::Integer(v)) => Ok(Some(v as f64)),
                Some(other) => bail!("{key} must be a number, got {other}"),
            }
        };
        let weight_lower = take("weight_lower")?;
        let weight_upper = take("weight_upper")?;
        if let Some((key, _)) = table.iter().find(|(_, v)| v.is_table()) {
            bail!("run config must be flat; found table [{key}]");
        }
        let engine: EvMogaConfig = table.try_into().context("invalid run config")?;
        engine.validate()?;
        Ok(RunConfig {
            engine,
            weight_lower,
            weight_upper,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Per-asset bounds for `n` assets; `[0, 1]` unless overridden.
    pub fn bounds(&self, n: usize) -> Result<Bounds> {
        let lo = self.weight_lower.unwrap_or(0.0);
        let hi = self.weight_upper.unwrap_or(1.0);
        Ok(Bounds::new(vec![lo; n], vec![hi; n])?)
    }
}

/// Reads a profile file with `[green]` and `[risk]` tables; missing keys keep
/// their defaults.
pub fn load_profiles(path: Option<&Path>) -> Result<ProfileConfig> {
    let Some(path) = path else {
        return Ok(ProfileConfig::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let p: ProfileConfig = toml::from_str(&text).with_context(|| format!("invalid profile file {}", path.display()))?;
    p.validate()?;
    Ok(p)
}
