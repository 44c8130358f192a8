//! Run configuration: key-value files, flag overrides and manifests.
//!
//! Lookup order for a key `k` of command `c`: flag override, then `c.k`
//! from the file (a `[c]` section), then top-level `k`. Every value read
//! is recorded, so the manifest echoes the fully resolved configuration.

use crate::{CliError, Result};
use cuspwave::initial_data::InitialDataSpec;
use cuspwave::keyvalue::KeyValues;
use std::cell::RefCell;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const MANIFEST: &str = "manifest.txt";

#[derive(Debug, Clone)]
pub struct RunConfig {
    command: String,
    file: KeyValues,
    file_dir: Option<PathBuf>,
    flags: KeyValues,
    resolved: RefCell<KeyValues>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            file: KeyValues::default(),
            file_dir: None,
            flags: KeyValues::default(),
            resolved: RefCell::new(KeyValues::default()),
        }
    }

    pub fn from_text(command: &str, text: &str) -> Result<Self> {
        let mut cfg = Self::new(command);
        cfg.file = KeyValues::parse(text).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(command: &str, path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::new(command));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_text(command, &text)?;
        cfg.file_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    /// Flag override; wins over anything in the file.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.flags.set(key, value);
    }

    /// Apply `key=value` overrides.
    pub fn set_pairs(&mut self, pairs: &[String]) -> Result<()> {
        for p in pairs {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("expected key=value, got `{p}`")))?;
            self.set(k.trim(), v.trim());
        }
        Ok(())
    }

    fn lookup(&self, key: &str) -> Option<String> {
        self.flags
            .get(key)
            .or_else(|| self.file.get(&format!("{}.{key}", self.command)))
            .or_else(|| self.file.get(key))
            .map(str::to_string)
    }

    fn record(&self, key: &str, value: &str) {
        self.resolved.borrow_mut().set(key, value);
    }

    fn parse<T: FromStr>(key: &str, raw: &str) -> Result<T> {
        raw.trim()
            .parse::<T>()
            .map_err(|_| CliError::Config(format!("key `{key}`: cannot parse `{raw}`")))
    }

    pub fn get<T: FromStr + Display>(&self, key: &str, default: T) -> Result<T> {
        let v = match self.lookup(key) {
            Some(raw) => Self::parse(key, &raw)?,
            None => default,
        };
        self.record(key, &v.to_string());
        Ok(v)
    }

    pub fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.lookup(key) {
            Some(raw) => {
                let v = Self::parse(key, &raw)?;
                self.record(key, &raw);
                Ok(Some(v))
            }
            None => Ok(None),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.opt(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    pub fn string(&self, key: &str, default: &str) -> String {
        let v = self.lookup(key).unwrap_or_else(|| default.to_string());
        self.record(key, &v);
        v
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str, default: &str) -> Result<Vec<T>> {
        let raw = self.string(key, default);
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| Self::parse(key, s))
            .collect()
    }

    /// Record a derived value that is not read from the configuration.
    pub fn note(&self, key: &str, value: impl Display) {
        self.record(key, &value.to_string());
    }

    pub fn out_dir(&self, default: &str) -> PathBuf {
        PathBuf::from(self.string("out", default))
    }

    /// Initial data from a `data = path` key or inline `data.*` keys.
    /// The spec is written inline into the manifest either way.
    pub fn data_spec(&self) -> Result<Option<InitialDataSpec>> {
        let mut inline = KeyValues::default();
        let mut found = false;
        if let Some(path) = self.flags.get("data").or_else(|| self.file.get("data")) {
            let mut p = PathBuf::from(path);
            if !p.exists() {
                if let Some(dir) = &self.file_dir {
                    p = dir.join(path);
                }
            }
            let text = std::fs::read_to_string(&p)
                .map_err(|e| CliError::Config(format!("data spec {}: {e}", p.display())))?;
            inline = KeyValues::parse(&text).map_err(|e| CliError::Config(e.to_string()))?;
            found = true;
        }
        for kv in [&self.file, &self.flags] {
            for (k, v) in kv.iter() {
                if let Some(rest) = k.strip_prefix("data.") {
                    inline.set(rest, v);
                    found = true;
                }
            }
        }
        if !found {
            return Ok(None);
        }
        let spec = InitialDataSpec::from_key_values(&inline).map_err(|e| CliError::Config(e.to_string()))?;
        for (k, v) in spec.to_key_values().iter() {
            self.record(&format!("data.{k}"), v);
        }
        Ok(Some(spec))
    }

    pub fn data_spec_or(&self, default: &str) -> Result<InitialDataSpec> {
        match self.data_spec()? {
            Some(s) => Ok(s),
            None => {
                let spec = InitialDataSpec::parse(default).map_err(|e| CliError::Config(e.to_string()))?;
                for (k, v) in spec.to_key_values().iter() {
                    self.record(&format!("data.{k}"), v);
                }
                Ok(spec)
            }
        }
    }

    pub fn resolved(&self) -> KeyValues {
        self.resolved.borrow().clone()
    }

    /// Manifest text: the resolved configuration plus a `[result]` block.
    /// Loading it as a config file reproduces the run.
    pub fn manifest(&self, result: &[(&str, String)]) -> String {
        let mut kv = self.resolved();
        kv.set("command", self.command.clone());
        kv.set("version", env!("CARGO_PKG_VERSION"));
        for (k, v) in result {
            kv.set(format!("result.{k}"), v.clone());
        }
        kv.render()
    }

    pub fn write_manifest(&self, dir: &Path, result: &[(&str, String)]) -> Result<PathBuf> {
        crate::create_dir(dir)?;
        let path = dir.join(MANIFEST);
        crate::write_file(&path, &self.manifest(result))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_flags_then_section_then_top() {
        let text = "m = 1\nsize = 64\n[solve]\nm = 2\n";
        let mut cfg = RunConfig::from_text("solve", text).unwrap();
        assert_eq!(cfg.get::<u32>("m", 9).unwrap(), 2);
        assert_eq!(cfg.get::<usize>("size", 9).unwrap(), 64);
        cfg.set("m", "3");
        assert_eq!(cfg.get::<u32>("m", 9).unwrap(), 3);
        assert_eq!(cfg.get::<f64>("T", 0.5).unwrap(), 0.5);
        let kv = cfg.resolved();
        assert_eq!(kv.get("m"), Some("3"));
        assert_eq!(kv.get("T"), Some("0.5"));
        assert!(cfg.get::<u32>("bad", 0).is_ok());
        cfg.set("bad", "x");
        assert!(matches!(cfg.get::<u32>("bad", 0), Err(CliError::Config(_))));
    }

    #[test]
    fn manifest_reloads_to_the_same_values() {
        let text = "m = 2\n[data]\nfamily = A1\nslots = 2\nslot0.right = bump center=0 width=2 amp=1\n";
        let cfg = RunConfig::from_text("solve", text).unwrap();
        cfg.get::<u32>("m", 1).unwrap();
        let spec = cfg.data_spec().unwrap().unwrap();
        let manifest = cfg.manifest(&[("converged", "true".into())]);
        let again = RunConfig::from_text("solve", &manifest).unwrap();
        assert_eq!(again.get::<u32>("m", 1).unwrap(), 2);
        assert_eq!(again.data_spec().unwrap().unwrap(), spec);
    }
}
