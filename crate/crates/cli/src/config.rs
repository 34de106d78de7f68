use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// `key = value` lines; `#` starts a comment. Keys use the long flag names
/// (`max-ops`, `p-overlap`, ...); underscores are accepted too.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("config line {}: expected key=value, got {raw:?}", no + 1);
            };
            values.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| anyhow::anyhow!("config key {key}: cannot parse {v:?}")),
        }
    }
}

/// Fill `slot` from the config unless a flag already set it.
pub fn merge<T: std::str::FromStr>(slot: &mut Option<T>, cfg: &ConfigFile, key: &str) -> Result<()> {
    if slot.is_none() {
        *slot = cfg.get(key)?;
    }
    Ok(())
}
