use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use super::{CompletionClient, Prompt, PromptKind};
use crate::error::Error;
use crate::text::{ident_eq, ident_key};

/// One scripted reply. Omitted key fields match anything.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockRecord {
    pub kind: PromptKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
    pub response: String,
}

impl MockRecord {
    pub fn new(kind: PromptKind, response: impl Into<String>) -> Self {
        Self {
            kind,
            table: None,
            candidates: None,
            column: None,
            response: response.into(),
        }
    }

    pub fn for_table(mut self, table: impl Into<String>) -> Self {
        self.table = Some(table.into());
        self
    }

    pub fn for_candidates<S: Into<String>>(mut self, candidates: impl IntoIterator<Item = S>) -> Self {
        self.candidates = Some(candidates.into_iter().map(Into::into).collect());
        self
    }

    pub fn for_column(mut self, column: impl Into<String>) -> Self {
        self.column = Some(column.into());
        self
    }

    fn matches(&self, prompt: &Prompt) -> bool {
        let key = &prompt.key;
        self.kind == key.kind
            && self.table.as_ref().is_none_or(|t| ident_eq(t, &key.table))
            && self.candidates.as_ref().is_none_or(|c| same_set(c, &key.candidates))
            && self
                .column
                .as_ref()
                .is_none_or(|c| key.column.as_ref().is_some_and(|k| ident_eq(c, k)))
    }
}

fn same_set(a: &[String], b: &[String]) -> bool {
    let mut a: Vec<String> = a.iter().map(|s| ident_key(s)).collect();
    let mut b: Vec<String> = b.iter().map(|s| ident_key(s)).collect();
    a.sort();
    a.dedup();
    b.sort();
    b.dedup();
    a == b
}

/// Replays a transcript. Records matching a prompt are consumed in order,
/// so a retry gets the next record; the last one then repeats. Unmatched
/// prompts get an empty reply of the right shape, or an error when strict.
pub struct MockClient {
    records: Vec<MockRecord>,
    used: Vec<AtomicBool>,
    strict: bool,
}

impl MockClient {
    pub fn new(records: Vec<MockRecord>) -> Self {
        let used = records.iter().map(|_| AtomicBool::new(false)).collect();
        Self {
            records,
            used,
            strict: false,
        }
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    /// Parses a transcript: a JSON list of records.
    pub fn from_json(json: &str) -> Result<Self, Error> {
        let records: Vec<MockRecord> = serde_json::from_str(json).map_err(|e| Error::Parse(format!("mock transcript: {e}")))?;
        Ok(Self::new(records))
    }

    pub fn records(&self) -> &[MockRecord] {
        &self.records
    }

    fn empty_reply(kind: PromptKind) -> &'static str {
        match kind {
            PromptKind::Rollup => r#"{"groups":[]}"#,
            PromptKind::TableSelection => r#"{"tables":[]}"#,
            PromptKind::ColumnMatch | PromptKind::Drilldown => r#"{"matches":[]}"#,
        }
    }
}

impl CompletionClient for MockClient {
    fn complete(&self, prompt: &Prompt) -> Result<String, Error> {
        let matching: Vec<usize> = (0..self.records.len())
            .filter(|&i| self.records[i].matches(prompt))
            .collect();
        for &i in &matching {
            if self.used[i]
                .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
                .is_ok()
            {
                return Ok(self.records[i].response.clone());
            }
        }
        match matching.last() {
            Some(&i) => Ok(self.records[i].response.clone()),
            None if self.strict => Err(Error::Client(format!(
                "no scripted reply for {} on {:?}",
                prompt.kind().as_str(),
                prompt.key.table
            ))),
            None => Ok(Self::empty_reply(prompt.kind()).into()),
        }
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}
