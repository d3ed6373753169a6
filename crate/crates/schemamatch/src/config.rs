//! Settings merged from a TOML file, environment variables and flags, in
//! rising precedence.

use std::path::Path;

use serde::{Deserialize, Serialize};

use schemamatch_core::baseline::{CupidConfig, FloodConfig};
use schemamatch_core::Error;

use crate::files::read_text;
use crate::AppError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FloodSettings {
    pub epsilon: f64,
    pub max_iters: usize,
    pub threshold: f64,
}

impl Default for FloodSettings {
    fn default() -> Self {
        let d = FloodConfig::default();
        Self { epsilon: d.epsilon, max_iters: d.max_iters, threshold: d.select_threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CupidSettings {
    pub w_struct: f64,
    pub threshold: f64,
}

impl Default for CupidSettings {
    fn default() -> Self {
        let d = CupidConfig::default();
        Self { w_struct: d.w_struct, threshold: d.select_threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSettings {
    pub threshold: f64,
}

impl Default for ThresholdSettings {
    fn default() -> Self {
        Self { threshold: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedSettings {
    /// `local` or `remote`.
    pub provider: String,
    pub dim: usize,
    pub max_concurrency: usize,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key: Option<String>,
    pub retries: usize,
    /// Serve failed remote calls from the local embedder.
    pub fallback: bool,
    /// Cache file for remote vectors, relative to the working directory.
    pub cache: String,
}

impl Default for EmbedSettings {
    fn default() -> Self {
        Self {
            provider: "local".into(),
            dim: schemamatch_core::embedding::DEFAULT_DIM,
            max_concurrency: 4,
            endpoint: None,
            model: None,
            api_key: None,
            retries: 2,
            fallback: false,
            cache: ".schemamatch-embeddings.json".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmSettings {
    pub retries: usize,
    pub max_concurrency: usize,
    pub temperature: Option<f64>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key: Option<String>,
    pub timeout_secs: u64,
}

impl Default for LlmSettings {
    fn default() -> Self {
        Self {
            retries: schemamatch_core::gateway::DEFAULT_RETRIES,
            max_concurrency: 4,
            temperature: None,
            endpoint: None,
            model: None,
            api_key: None,
            timeout_secs: 120,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub flood: FloodSettings,
    pub cupid: CupidSettings,
    pub lexical: ThresholdSettings,
    pub composite: ThresholdSettings,
    pub embed: EmbedSettings,
    pub llm: LlmSettings,
}

/// Environment variables with a fixed name. Every other key `a.b` is read
/// from `SCHEMAMATCH_A_B`.
const NAMED_ENV: &[(&str, &str)] = &[
    ("LLM_ENDPOINT", "llm.endpoint"),
    ("LLM_MODEL", "llm.model"),
    ("LLM_API_KEY", "llm.api_key"),
    ("EMBED_ENDPOINT", "embed.endpoint"),
];

pub const KEYS: &[&str] = &[
    "flood.epsilon",
    "flood.max_iters",
    "flood.threshold",
    "cupid.w_struct",
    "cupid.threshold",
    "lexical.threshold",
    "composite.threshold",
    "embed.provider",
    "embed.dim",
    "embed.max_concurrency",
    "embed.endpoint",
    "embed.model",
    "embed.api_key",
    "embed.retries",
    "embed.fallback",
    "embed.cache",
    "llm.retries",
    "llm.max_concurrency",
    "llm.temperature",
    "llm.endpoint",
    "llm.model",
    "llm.api_key",
    "llm.timeout_secs",
];

pub fn env_name(key: &str) -> String {
    format!("SCHEMAMATCH_{}", key.replace('.', "_").to_uppercase())
}

fn config_err(m: impl Into<String>) -> AppError {
    AppError::Engine(Error::Config(m.into()))
}

/// Parses a scalar the way TOML would, falling back to a plain string.
fn scalar(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .filter(|v| !v.is_table() && !v.is_array())
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set(root: &mut toml::Table, key: &str, value: toml::Value) -> Result<(), AppError> {
    let (section, field) = key.split_once('.').ok_or_else(|| config_err(format!("bad key {key:?}")))?;
    let entry = root
        .entry(section)
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let table = entry
        .as_table_mut()
        .ok_or_else(|| config_err(format!("{section:?} must be a table")))?;
    table.insert(field.to_string(), value);
    Ok(())
}

impl Settings {
    /// `file` first, then environment, then `flags` (`key`, raw value).
    pub fn load(
        file: Option<&Path>,
        env: &dyn Fn(&str) -> Option<String>,
        flags: &[(&str, String)],
    ) -> Result<Self, AppError> {
        let mut root = match file {
            Some(p) => read_text(p)?
                .parse::<toml::Table>()
                .map_err(|e| config_err(format!("{}: {e}", p.display())))?,
            None => toml::Table::new(),
        };
        for key in KEYS {
            if let Some(v) = env(&env_name(key)) {
                set(&mut root, key, scalar(&v))?;
            }
        }
        for (name, key) in NAMED_ENV {
            if let Some(v) = env(name) {
                set(&mut root, key, toml::Value::String(v))?;
            }
        }
        for (key, v) in flags {
            set(&mut root, key, scalar(v))?;
        }
        let settings: Settings = toml::Value::Table(root)
            .try_into()
            .map_err(|e: toml::de::Error| config_err(format!("configuration: {}", e.message())))?;
        settings.validate()?;
        Ok(settings)
    }

    pub fn validate(&self) -> Result<(), AppError> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(config_err(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        if self.flood.epsilon.is_nan() || self.flood.epsilon <= 0.0 {
            return Err(config_err("flood.epsilon must be positive"));
        }
        if self.flood.max_iters == 0 {
            return Err(config_err("flood.max_iters must be at least 1"));
        }
        unit("flood.threshold", self.flood.threshold)?;
        unit("cupid.w_struct", self.cupid.w_struct)?;
        unit("cupid.threshold", self.cupid.threshold)?;
        unit("lexical.threshold", self.lexical.threshold)?;
        unit("composite.threshold", self.composite.threshold)?;
        if !matches!(self.embed.provider.as_str(), "local" | "remote") {
            return Err(config_err(format!(
                "embed.provider must be local or remote, got {:?}",
                self.embed.provider
            )));
        }
        if self.embed.dim == 0 {
            return Err(config_err("embed.dim must be at least 1"));
        }
        if self.embed.max_concurrency == 0 || self.llm.max_concurrency == 0 {
            return Err(config_err("max_concurrency must be at least 1"));
        }
        if let Some(t) = self.llm.temperature {
            if t.is_nan() || t < 0.0 {
                return Err(config_err("llm.temperature must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn flood_config(&self) -> FloodConfig {
        FloodConfig {
            epsilon: self.flood.epsilon,
            max_iters: self.flood.max_iters,
            select_threshold: self.flood.threshold,
        }
    }

    pub fn cupid_config(&self) -> CupidConfig {
        CupidConfig { w_struct: self.cupid.w_struct, select_threshold: self.cupid.threshold }
    }
}
