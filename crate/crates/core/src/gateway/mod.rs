//! Language-model boundary: prompt construction, structured-response parsing
//! with validation and retry, and deterministic mock and oracle clients.
//!
//! Response contracts, one JSON object per reply:
//!
//! | kind            | reply                                                                      |
//! |-----------------|----------------------------------------------------------------------------|
//! | rollup          | `{"groups":[{"alias":str,"columns":[str...],"description":str}]}`          |
//! | table selection | `{"tables":[str...]}`                                                      |
//! | column match    | `{"matches":[{"source_column":str,"target_table":str,"target_column":str}]}` |
//! | drilldown       | `{"matches":[{"source_column":str,"target_column":str}]}`                  |

mod extract;
mod mock;
mod oracle;
mod prompt;
mod requests;
mod rollup;

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::diag::Warnings;
use crate::error::Error;
use crate::schema::Table;
use crate::serializer::word_count;

pub use extract::extract_structured;
pub use mock::{MockClient, MockRecord};
pub use oracle::OracleClient;
pub use prompt::{
    column_match_prompt, drilldown_prompt, rollup_prompt, table_selection_prompt, DrilldownSide,
};
pub use requests::{request_column_matches, request_drilldown, request_table_selection};
pub use rollup::{request_rollup, RollupGroup, RollupRegistry};

pub const DEFAULT_RETRIES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptKind {
    Rollup,
    TableSelection,
    ColumnMatch,
    Drilldown,
}

impl PromptKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PromptKind::Rollup => "rollup",
            PromptKind::TableSelection => "table_selection",
            PromptKind::ColumnMatch => "column_match",
            PromptKind::Drilldown => "drilldown",
        }
    }
}

/// Lookup key for scripted clients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptKey {
    pub kind: PromptKind,
    /// Rolled-up table, or the source table for the other kinds.
    pub table: String,
    /// Target tables offered, in prompt order.
    pub candidates: Vec<String>,
    /// Drilldown only: the matched source element.
    pub column: Option<String>,
}

/// Structured content of a prompt, for clients that answer without reading
/// the text.
#[derive(Debug, Clone, PartialEq)]
pub enum PromptContext {
    Rollup {
        table: Table,
    },
    TableSelection {
        source: Table,
        targets: Vec<Table>,
    },
    ColumnMatch {
        source: Table,
        candidates: Vec<Table>,
        source_groups: Vec<RollupGroup>,
        target_groups: Vec<RollupGroup>,
    },
    Drilldown {
        source: DrilldownSide,
        target: DrilldownSide,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prompt {
    pub key: PromptKey,
    pub context: PromptContext,
    pub text: String,
    /// 0 for the first attempt.
    pub attempt: usize,
}

impl Prompt {
    pub fn kind(&self) -> PromptKind {
        self.key.kind
    }

    fn retried(&self, error: &str) -> Prompt {
        let mut next = self.clone();
        next.attempt += 1;
        next.text = format!(
            "{}\n\nYour previous reply was rejected: {error}\nAnswer again using exactly the JSON format above.",
            self.text
        );
        next
    }
}

pub trait CompletionClient {
    fn complete(&self, prompt: &Prompt) -> Result<String, Error>;

    /// Mock and oracle clients return the same reply for the same prompt.
    fn is_deterministic(&self) -> bool {
        false
    }
}

impl<C: CompletionClient + ?Sized> CompletionClient for &C {
    fn complete(&self, prompt: &Prompt) -> Result<String, Error> {
        (**self).complete(prompt)
    }

    fn is_deterministic(&self) -> bool {
        (**self).is_deterministic()
    }
}

impl<C: CompletionClient + ?Sized> CompletionClient for Box<C> {
    fn complete(&self, prompt: &Prompt) -> Result<String, Error> {
        (**self).complete(prompt)
    }

    fn is_deterministic(&self) -> bool {
        (**self).is_deterministic()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GatewayStats {
    pub prompts: BTreeMap<PromptKind, usize>,
    pub retries: usize,
    pub words_sent: usize,
}

impl GatewayStats {
    pub fn total_prompts(&self) -> usize {
        self.prompts.values().sum()
    }

    pub fn merge(&mut self, other: &GatewayStats) {
        for (k, v) in &other.prompts {
            *self.prompts.entry(*k).or_insert(0) += v;
        }
        self.retries += other.retries;
        self.words_sent += other.words_sent;
    }
}

/// A client plus the retry limit, counters and warning sink shared by all
/// requests of one run.
pub struct Gateway<'a> {
    client: &'a dyn CompletionClient,
    retries: usize,
    pub warnings: Warnings,
    pub stats: GatewayStats,
}

impl<'a> Gateway<'a> {
    pub fn new(client: &'a dyn CompletionClient, retries: usize) -> Self {
        Self {
            client,
            retries,
            warnings: Warnings::new(),
            stats: GatewayStats::default(),
        }
    }

    pub fn retries(&self) -> usize {
        self.retries
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push("llm_gateway", message);
    }

    /// Sends `prompt` and parses the reply, retrying at most `retries` times
    /// on transport or parse failures. Each retry carries the previous
    /// error. `Ok(None)` means every attempt was rejected by the parser;
    /// transport failures on the last attempt surface as errors.
    fn ask<T>(
        &mut self,
        prompt: Prompt,
        mut parse: impl FnMut(&str, &mut Warnings) -> Result<T, String>,
    ) -> Result<Option<T>, Error> {
        let mut prompt = prompt;
        loop {
            *self.stats.prompts.entry(prompt.kind()).or_insert(0) += 1;
            self.stats.words_sent += word_count(&prompt.text);
            let message = match self.client.complete(&prompt) {
                Ok(reply) => {
                    let mut scratch = Warnings::new();
                    match parse(&reply, &mut scratch) {
                        Ok(v) => {
                            self.warnings.extend(scratch);
                            return Ok(Some(v));
                        }
                        Err(msg) => msg,
                    }
                }
                Err(e) if prompt.attempt >= self.retries => return Err(e),
                Err(e) => format!("{e}"),
            };
            if prompt.attempt >= self.retries {
                self.warn(format!(
                    "{} reply for {:?} rejected after {} attempt(s): {message}",
                    prompt.kind().as_str(),
                    prompt.key.table,
                    prompt.attempt + 1
                ));
                return Ok(None);
            }
            self.stats.retries += 1;
            prompt = prompt.retried(&message);
        }
    }
}

/// Exact spelling first, then case-insensitive (with a warning).
pub(crate) fn resolve_name<'n>(
    names: impl IntoIterator<Item = &'n str> + Clone,
    wanted: &str,
    warnings: &mut Warnings,
) -> Option<&'n str> {
    if let Some(hit) = names.clone().into_iter().find(|n| *n == wanted) {
        return Some(hit);
    }
    let hit = names
        .into_iter()
        .find(|n| crate::text::ident_eq(n, wanted))?;
    warnings.push(
        "llm_gateway",
        format!("resolved {wanted:?} to {hit:?} ignoring case"),
    );
    Some(hit)
}
