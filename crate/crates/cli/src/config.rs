//! Option resolution: explicit flags, then the `--config` JSON file, then defaults.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// Bad invocation; reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub struct Resolver {
    path: Option<PathBuf>,
    file: Map<String, Value>,
    resolved: Map<String, Value>,
    trace: Vec<String>,
}

impl Resolver {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let file = match path {
            None => Map::new(),
            Some(p) => {
                let text = fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                match serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", p.display()))?
                {
                    Value::Object(m) => m,
                    _ => {
                        return Err(UsageError(format!(
                            "config {} must be a JSON object",
                            p.display()
                        ))
                        .into())
                    }
                }
            }
        };
        Ok(Self {
            path: path.map(Path::to_path_buf),
            file,
            resolved: Map::new(),
            trace: Vec::new(),
        })
    }

    fn take<T: DeserializeOwned>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<(T, &'static str)>> {
        let from_file = self.file.remove(key);
        if let Some(v) = flag {
            return Ok(Some((v, "flag")));
        }
        match from_file {
            Some(v) => {
                let t = serde_json::from_value(v)
                    .map_err(|e| UsageError(format!("config key {key:?}: {e}")))?;
                Ok(Some((t, "config")))
            }
            None => Ok(None),
        }
    }

    fn record<T: Serialize>(&mut self, key: &str, value: &T, origin: &str) {
        let v = serde_json::to_value(value).expect("option values serialize");
        self.trace.push(format!("{key} = {v} ({origin})"));
        self.resolved.insert(key.to_string(), v);
    }

    pub fn get<T: Serialize + DeserializeOwned>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T> {
        let (value, origin) = self.take(key, flag)?.unwrap_or((default, "default"));
        self.record(key, &value, origin);
        Ok(value)
    }

    pub fn optional<T: Serialize + DeserializeOwned>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>> {
        Ok(self.take(key, flag)?.map(|(value, origin)| {
            self.record(key, &value, origin);
            value
        }))
    }

    pub fn required<T: Serialize + DeserializeOwned>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<T> {
        self.optional(key, flag)?.ok_or_else(|| {
            UsageError(format!(
                "missing --{} (flag or config key {key:?})",
                key.replace('_', "-")
            ))
            .into()
        })
    }

    /// Rejects leftover config keys, prints the trace when verbose and returns
    /// the fully-resolved options.
    pub fn finish(self, command: &str, verbose: bool) -> Result<Value> {
        if let Some(key) = self.file.keys().next() {
            return Err(UsageError(format!("unknown config key {key:?} for {command}")).into());
        }
        if verbose {
            let file = self
                .path
                .as_ref()
                .map_or("none".to_string(), |p| p.display().to_string());
            eprintln!("resolution order: flags > config file ({file}) > defaults");
            for line in &self.trace {
                eprintln!("  {line}");
            }
        }
        let mut out = Map::new();
        out.insert("command".into(), Value::String(command.into()));
        out.extend(self.resolved);
        Ok(Value::Object(out))
    }
}
