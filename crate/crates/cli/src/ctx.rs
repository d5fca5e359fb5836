//! Parameter resolution (flags > config file > defaults), set loading and
//! the result record.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cantorlab::catalog::{builtin, definition_of, SetDefinition};
use cantorlab::RegularCantorSet;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;
pub const BUDGET_ENV: &str = "CANTORLAB_BUDGET";

#[derive(Debug)]
pub enum CliError {
    Lib(cantorlab::Error),
    Config(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_budget() => 2,
            _ => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<cantorlab::Error> for CliError {
    fn from(e: cantorlab::Error) -> Self {
        CliError::Lib(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

pub fn write_file(path: &Path, body: &str) -> CliResult<()> {
    std::fs::write(path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub struct Ctx {
    config: Map<String, Value>,
    /// Resolved inputs, hashed into the record.
    inputs: BTreeMap<String, Value>,
    pub budget: Option<u64>,
    started: Instant,
}

impl Ctx {
    pub fn new(config_path: Option<&Path>, budget_flag: Option<u64>) -> CliResult<Self> {
        let config = match config_path {
            Some(p) => match serde_json::from_str::<Value>(&read_file(p)?) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(CliError::Config(format!("{} must hold a JSON object", p.display()))),
                Err(e) => return Err(CliError::Config(format!("{}: {e}", p.display()))),
            },
            None => Map::new(),
        };
        let env = match std::env::var(BUDGET_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| CliError::Config(format!("{BUDGET_ENV}={v} is not a positive integer")))?,
            ),
            Err(_) => None,
        };
        let mut ctx = Ctx {
            config,
            inputs: BTreeMap::new(),
            budget: None,
            started: Instant::now(),
        };
        let from_config = ctx.config_value::<u64>("budget")?;
        ctx.budget = budget_flag.or(env).or(from_config);
        if ctx.budget == Some(0) {
            return Err(CliError::Config("budget must be positive".into()));
        }
        Ok(ctx)
    }

    fn config_value<T: DeserializeOwned>(&self, key: &str) -> CliResult<Option<T>> {
        match self.config.get(key) {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key '{key}': {e}"))),
        }
    }

    pub fn opt<T: DeserializeOwned + Serialize>(&mut self, key: &str, flag: Option<T>) -> CliResult<Option<T>> {
        let v = match flag {
            Some(v) => Some(v),
            None => self.config_value(key)?,
        };
        if let Some(v) = &v {
            self.inputs.insert(key.into(), json!(v));
        }
        Ok(v)
    }

    pub fn get<T: DeserializeOwned + Serialize>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T> {
        let v = self.opt(key, flag)?;
        let v = v.unwrap_or(default);
        self.inputs.insert(key.into(), json!(v));
        Ok(v)
    }

    pub fn require<T: DeserializeOwned + Serialize>(&mut self, key: &str, flag: Option<T>) -> CliResult<T> {
        self.opt(key, flag)?
            .ok_or_else(|| CliError::Config(format!("missing required parameter --{key}")))
    }

    /// A built-in name, or a path to a JSON definition file.
    pub fn set(&mut self, key: &str, flag: Option<String>, default: &str) -> CliResult<RegularCantorSet> {
        let spec: String = self.get(key, flag, default.to_string())?;
        let k = if spec.ends_with(".json") || spec.contains(std::path::MAIN_SEPARATOR) {
            let body = read_file(&PathBuf::from(&spec))?;
            SetDefinition::from_json(&body)?.build()?
        } else {
            builtin(&spec)?
        };
        self.inputs
            .insert(format!("{key}_definition"), json!(definition_of(&k)));
        Ok(k)
    }

    pub fn budget_or(&self, default: u64) -> u64 {
        self.budget.unwrap_or(default)
    }

    pub fn record(&self, command: &str, outputs: Value) -> Value {
        let canonical = serde_json::to_string(&self.inputs).expect("inputs serialize");
        let digest = hex::encode(Sha256::digest(canonical.as_bytes()));
        json!({
            "schema": SCHEMA,
            "command": command,
            "inputs": self.inputs,
            "inputs_digest": digest,
            "outputs": outputs,
            "runtime": { "seconds": self.started.elapsed().as_secs_f64() },
        })
    }
}
