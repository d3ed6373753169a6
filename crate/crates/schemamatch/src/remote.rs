//! HTTP completion and embedding clients, and a content-addressed vector
//! cache kept in one JSON file.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Duration;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use schemamatch_core::embedding::{EmbeddingProvider, EmbeddingVector};
use schemamatch_core::gateway::{CompletionClient, Prompt};
use schemamatch_core::Error;

use crate::config::{EmbedSettings, LlmSettings};

fn agent(timeout_secs: u64) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(timeout_secs)))
        .http_status_as_error(true)
        .build()
        .into()
}

fn post(agent: &ureq::Agent, url: &str, key: Option<&str>, body: &Value) -> Result<Value, String> {
    let mut req = agent.post(url).header("Content-Type", "application/json");
    if let Some(k) = key {
        req = req.header("Authorization", &format!("Bearer {k}"));
    }
    let text = req
        .send(body.to_string())
        .map_err(|e| e.to_string())?
        .body_mut()
        .read_to_string()
        .map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| format!("response is not JSON: {e}"))
}

/// Chat-completions style endpoint: one user message per prompt.
pub struct RemoteClient {
    agent: ureq::Agent,
    endpoint: String,
    model: Option<String>,
    api_key: Option<String>,
    temperature: Option<f64>,
}

impl RemoteClient {
    pub fn from_settings(s: &LlmSettings) -> Result<Self, Error> {
        let endpoint = s
            .endpoint
            .clone()
            .filter(|e| !e.trim().is_empty())
            .ok_or_else(|| Error::Config("remote client needs LLM_ENDPOINT (or llm.endpoint)".into()))?;
        Ok(Self {
            agent: agent(s.timeout_secs),
            endpoint,
            model: s.model.clone(),
            api_key: s.api_key.clone(),
            temperature: s.temperature,
        })
    }

    fn body(&self, text: &str) -> Value {
        let mut body = json!({ "messages": [{ "role": "user", "content": text }] });
        if let Some(m) = &self.model {
            body["model"] = json!(m);
        }
        if let Some(t) = self.temperature {
            body["temperature"] = json!(t);
        }
        body
    }
}

/// `choices[0].message.content`, or a top-level `content`/`response` string.
pub fn completion_text(v: &Value) -> Option<&str> {
    v.pointer("/choices/0/message/content")
        .or_else(|| v.pointer("/choices/0/text"))
        .or_else(|| v.get("content"))
        .or_else(|| v.get("response"))
        .and_then(Value::as_str)
}

impl CompletionClient for RemoteClient {
    fn complete(&self, prompt: &Prompt) -> Result<String, Error> {
        let reply = post(&self.agent, &self.endpoint, self.api_key.as_deref(), &self.body(&prompt.text))
            .map_err(|e| Error::Client(format!("{}: {e}", self.endpoint)))?;
        completion_text(&reply)
            .map(str::to_string)
            .ok_or_else(|| Error::Client("completion response without message content".into()))
    }

    fn is_deterministic(&self) -> bool {
        false
    }
}

/// Embedding endpoint answering `{"data":[{"embedding":[...]}]}` or
/// `{"embedding":[...]}`.
pub struct RemoteEmbedder {
    agent: ureq::Agent,
    endpoint: String,
    model: Option<String>,
    api_key: Option<String>,
    dim: usize,
}

impl RemoteEmbedder {
    pub fn from_settings(s: &EmbedSettings, api_key: Option<String>) -> Result<Self, Error> {
        let endpoint = s
            .endpoint
            .clone()
            .filter(|e| !e.trim().is_empty())
            .ok_or_else(|| Error::Config("remote embeddings need EMBED_ENDPOINT (or embed.endpoint)".into()))?;
        Ok(Self { agent: agent(60), endpoint, model: s.model.clone(), api_key, dim: s.dim })
    }
}

pub fn embedding_values(v: &Value) -> Option<Vec<f64>> {
    v.pointer("/data/0/embedding")
        .or_else(|| v.get("embedding"))
        .and_then(Value::as_array)
        .map(|a| a.iter().map(|x| x.as_f64().unwrap_or(f64::NAN)).collect())
}

impl EmbeddingProvider for RemoteEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector, Error> {
        let mut body = json!({ "input": text });
        if let Some(m) = &self.model {
            body["model"] = json!(m);
        }
        let reply = post(&self.agent, &self.endpoint, self.api_key.as_deref(), &body)
            .map_err(|e| Error::Provider(format!("{}: {e}", self.endpoint)))?;
        let values = embedding_values(&reply).ok_or_else(|| Error::Provider("response without embedding".into()))?;
        if values.len() != self.dim {
            return Err(Error::DimMismatch { left: self.dim, right: values.len() });
        }
        EmbeddingVector::from_raw(values)
    }
}

/// Vectors keyed by the SHA-256 of dimension and text, persisted as one
/// JSON object. Only successful lookups are stored.
pub struct EmbeddingCache<P> {
    inner: P,
    path: PathBuf,
    entries: Mutex<BTreeMap<String, Vec<f64>>>,
    dirty: Mutex<bool>,
}

impl<P: EmbeddingProvider> EmbeddingCache<P> {
    pub fn open(inner: P, path: impl Into<PathBuf>) -> Result<Self, Error> {
        let path = path.into();
        let entries = match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("embedding cache {}: {e}", path.display())))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(Error::Provider(format!("embedding cache {}: {e}", path.display()))),
        };
        Ok(Self { inner, path, entries: Mutex::new(entries), dirty: Mutex::new(false) })
    }

    pub fn key(dim: usize, text: &str) -> String {
        let mut h = Sha256::new();
        h.update(dim.to_string().as_bytes());
        h.update(b"\n");
        h.update(text.as_bytes());
        hex::encode(h.finalize())
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flush(&self) -> Result<(), Error> {
        let mut dirty = self.dirty.lock().expect("cache lock");
        if !*dirty {
            return Ok(());
        }
        let text = serde_json::to_string(&*self.entries.lock().expect("cache lock"))
            .map_err(|e| Error::Provider(e.to_string()))?;
        std::fs::write(&self.path, text)
            .map_err(|e| Error::Provider(format!("embedding cache {}: {e}", self.path.display())))?;
        *dirty = false;
        Ok(())
    }
}

impl<P: EmbeddingProvider> EmbeddingProvider for EmbeddingCache<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector, Error> {
        let key = Self::key(self.dim(), text);
        if let Some(v) = self.entries.lock().expect("cache lock").get(&key) {
            return EmbeddingVector::from_raw(v.clone());
        }
        let v = self.inner.embed(text)?;
        self.entries.lock().expect("cache lock").insert(key, v.values().to_vec());
        *self.dirty.lock().expect("cache lock") = true;
        Ok(v)
    }
}

impl<P> Drop for EmbeddingCache<P> {
    fn drop(&mut self) {
        let dirty = self.dirty.get_mut().map(|d| *d).unwrap_or(false);
        if dirty {
            if let Ok(entries) = self.entries.get_mut() {
                if let Ok(text) = serde_json::to_string(entries) {
                    let _ = std::fs::write(&self.path, text);
                }
            }
        }
    }
}
