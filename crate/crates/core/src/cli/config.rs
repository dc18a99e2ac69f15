//! Run configuration: a JSON file plus `--key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::decode::ReceiverKind;
use crate::error::{Error, Result};
use crate::harness::SweepSpec;
use crate::phy::FrameConfig;

pub const SEED_ENV: &str = "OO_SEED";

fn default_out_dir() -> PathBuf {
    PathBuf::from("results")
}
fn default_target() -> f64 {
    0.9
}

/// Sweep axes and channel/receiver settings at the top level, the frame
/// layout under `frame`, plus output and reporting options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub frame: FrameConfig,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// PRR target of the power-savings report.
    #[serde(default = "default_target")]
    pub target_prr: f64,
    /// Receiver compared against the baseline in the power-savings report;
    /// defaults to the first non-baseline receiver.
    #[serde(default)]
    pub power_receiver: Option<ReceiverKind>,
    #[serde(default)]
    pub verbosity: u8,
}

impl RunConfig {
    /// Reads `path`, applies `overrides` and resolves the seed: an explicit
    /// key wins, otherwise `OO_SEED` is used when set.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let env_seed = std::env::var(SEED_ENV).ok();
        Self::from_value(value, overrides, env_seed.as_deref())
    }

    pub fn from_value(mut value: Value, overrides: &[String], env_seed: Option<&str>) -> Result<Self> {
        let root = value.as_object_mut().ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
        for o in overrides {
            apply_override(root, o)?;
        }
        if !root.contains_key("seed") {
            if let Some(s) = env_seed {
                let seed: u64 = s.trim().parse().map_err(|_| Error::Config(format!("{SEED_ENV}=`{s}` is not an unsigned integer")))?;
                root.insert("seed".into(), seed.into());
            }
        }
        check_keys(root)?;
        let cfg: RunConfig = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.frame.validate()?;
        self.sweep.validate(&self.frame)?;
        if !(self.target_prr > 0.0 && self.target_prr <= 1.0) {
            return Err(Error::Config(format!("target_prr {} must lie in (0, 1]", self.target_prr)));
        }
        Ok(())
    }

    /// Creates the output directory and checks that it is writable.
    pub fn prepare_out_dir(&self) -> Result<()> {
        let probe = self.out_dir.join(".write-check");
        std::fs::create_dir_all(&self.out_dir)
            .and_then(|_| std::fs::write(&probe, b""))
            .and_then(|_| std::fs::remove_file(&probe))
            .map_err(|e| Error::Config(format!("output directory {}: {e}", self.out_dir.display())))
    }

    pub fn power_receiver(&self) -> Option<ReceiverKind> {
        self.power_receiver.or_else(|| self.sweep.receivers.iter().copied().find(|r| *r != ReceiverKind::Baseline))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

fn defaults() -> Map<String, Value> {
    let v = serde_json::to_value(RunConfig {
        sweep: SweepSpec::new(vec![0.0]),
        frame: FrameConfig::default(),
        out_dir: default_out_dir(),
        target_prr: default_target(),
        power_receiver: None,
        verbosity: 0,
    })
    .expect("config serialises");
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn check_keys(root: &Map<String, Value>) -> Result<()> {
    let known = defaults();
    match root.keys().find(|k| !known.contains_key(*k)) {
        Some(k) => Err(Error::Config(format!("unknown key `{k}`"))),
        None => Ok(()),
    }
}

/// Applies `--key=value` (or `key=value`). Dotted keys address nested
/// objects. The value is read as JSON when it parses, else as a string; a
/// comma-separated value becomes a list, and a scalar given for a list key
/// becomes a one-element list.
pub fn apply_override(root: &mut Map<String, Value>, arg: &str) -> Result<()> {
    let body = arg.strip_prefix("--").unwrap_or(arg);
    let (key, raw) = body.split_once('=').ok_or_else(|| Error::Config(format!("override `{arg}` is not of the form --key=value")))?;
    if key.is_empty() {
        return Err(Error::Config(format!("override `{arg}` has an empty key")));
    }
    let mut parsed = parse_value(raw);
    if !parsed.is_array() && defaults().get(key).is_some_and(Value::is_array) {
        parsed = Value::Array(vec![parsed]);
    }
    // Missing parents start from their defaults so a nested override
    // changes one field only.
    let defaults = Value::Object(defaults());
    let mut fallback = Some(&defaults);
    let mut parts = key.split('.').peekable();
    let mut obj = root;
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            obj.insert(part.to_string(), parsed);
            break;
        }
        fallback = fallback.and_then(|d| d.get(part));
        let entry = obj.entry(part.to_string()).or_insert_with(|| fallback.cloned().unwrap_or_else(|| Value::Object(Map::new())));
        obj = entry.as_object_mut().ok_or_else(|| Error::Config(format!("`{part}` in `{key}` is not an object")))?;
    }
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    if let Ok(v) = serde_json::from_str::<Value>(raw) {
        return v;
    }
    if raw.contains(',') {
        return Value::Array(raw.split(',').map(|p| serde_json::from_str(p.trim()).unwrap_or_else(|_| Value::String(p.trim().into()))).collect());
    }
    Value::String(raw.into())
}
