use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use super::{split_batches, RolledSchema, SelectionStrategy};
use crate::embedding::{rank_tables_topk, EmbeddingProvider};
use crate::error::Error;
use crate::gateway::{request_table_selection, Gateway};
use crate::schema::Table;
use crate::serializer::{serialize_table, word_count, BudgetConfig, ElementConfig};

/// Target tables retained for one source table, in selection order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSet {
    pub source_table: String,
    pub candidates: Vec<String>,
    pub strategy_used: SelectionStrategy,
}

impl CandidateSet {
    pub fn tables<'a>(&'a self, target: &'a RolledSchema) -> Vec<&'a Table> {
        self.candidates
            .iter()
            .filter_map(|name| target.view.table(name))
            .collect()
    }
}

pub(crate) fn render_words(t: &Table, cfg: &ElementConfig) -> usize {
    word_count(&serialize_table(t, cfg))
}

/// Narrows the target tables for `source`, a table of the rolled source view.
/// Returns the candidate set and the number of selection prompts batched.
pub fn select_tables(
    strategy: &SelectionStrategy,
    source: &Table,
    target: &RolledSchema,
    gw: &mut Gateway<'_>,
    provider: &dyn EmbeddingProvider,
    cfg: &ElementConfig,
    budget: Option<&BudgetConfig>,
) -> Result<(CandidateSet, usize), Error> {
    let targets = &target.view.tables;
    if targets.is_empty() {
        return Err(Error::Config("target schema has no tables".into()));
    }
    let mut batches = 0;
    let candidates = match strategy {
        SelectionStrategy::None | SelectionStrategy::NestedJoin => {
            targets.iter().map(|t| t.name.clone()).collect()
        }
        SelectionStrategy::VectorSimilarity { k } => rank_tables_topk(source, targets, *k, cfg, provider)?,
        SelectionStrategy::Llm => {
            let fixed = render_words(source, cfg);
            let mut chosen: Vec<String> = Vec::new();
            for batch in split_batches(targets, budget, fixed, |t| render_words(t, cfg), |t| t.name.to_string())? {
                batches += 1;
                for name in request_table_selection(gw, source, batch, cfg)? {
                    if !chosen.contains(&name) {
                        chosen.push(name);
                    }
                }
            }
            chosen
        }
    };
    Ok((
        CandidateSet {
            source_table: source.name.clone(),
            candidates,
            strategy_used: *strategy,
        },
        batches,
    ))
}
