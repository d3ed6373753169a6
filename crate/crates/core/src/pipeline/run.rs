use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use super::select::render_words;
use super::{apply_drilldown, apply_rollup, match_columns, select_tables, Clock, PipelineConfig, RolledSchema};
use crate::diag::Warnings;
use crate::embedding::EmbeddingProvider;
use crate::error::Error;
use crate::gateway::{CompletionClient, Gateway, PromptKind};
use crate::schema::{MatchSet, Schema, Table};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StageTimings {
    pub rollup_us: u64,
    pub selection_us: u64,
    pub matching_us: u64,
    pub drilldown_us: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSummary {
    pub source_table: String,
    pub count: usize,
    pub tables: Vec<String>,
}

/// What a run did. Everything except `timings` is reproducible for a
/// deterministic client and provider.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: String,
    pub timings: StageTimings,
    pub prompts: BTreeMap<PromptKind, usize>,
    pub prompt_count: usize,
    pub retries: usize,
    pub words_sent: usize,
    pub selection_batches: usize,
    pub matching_batches: usize,
    pub rollup_groups_source: usize,
    pub rollup_groups_target: usize,
    pub candidates: Vec<CandidateSummary>,
    pub mean_candidates: f64,
    pub pairs: usize,
    pub warnings: Warnings,
}

impl RunReport {
    pub fn batches(&self) -> usize {
        self.selection_batches + self.matching_batches
    }
}

fn largest<'a>(tables: &'a [Table], cfg: &crate::serializer::ElementConfig) -> Option<(&'a Table, usize)> {
    tables
        .iter()
        .map(|t| (t, render_words(t, cfg)))
        .fold(None, |best, (t, w)| match best {
            Some((_, bw)) if bw >= w => best,
            _ => Some((t, w)),
        })
}

/// Runs the whole pipeline for every source table in schema order.
///
/// Fails fast when the largest source and target tables cannot share one
/// prompt under the configured budget.
pub fn run_pipeline(
    source: &Schema,
    target: &Schema,
    cfg: &PipelineConfig,
    client: &dyn CompletionClient,
    provider: &dyn EmbeddingProvider,
    clock: &dyn Clock,
) -> Result<(MatchSet, RunReport), Error> {
    cfg.validate()?;
    if target.tables.is_empty() {
        return Err(Error::Config("target schema has no tables".into()));
    }
    let elements = &cfg.elements;
    let budget = cfg.budget.as_ref();
    let mut gw = Gateway::new(client, cfg.retries);
    let mut timings = StageTimings::default();

    let t0 = clock.now_micros();
    let src = if cfg.rollup_source {
        apply_rollup(source, &mut gw, elements)?
    } else {
        RolledSchema::identity(source)
    };
    let tgt = if cfg.rollup_target {
        apply_rollup(target, &mut gw, elements)?
    } else {
        RolledSchema::identity(target)
    };
    timings.rollup_us = clock.now_micros().saturating_sub(t0);

    if let (Some(b), Some((ls, sw)), Some((lt, tw))) =
        (budget, largest(&src.view.tables, elements), largest(&tgt.view.tables, elements))
    {
        let needed = sw + tw + b.overhead_words;
        if needed > b.max_words_per_prompt {
            return Err(Error::BudgetTooSmall {
                item: format!("largest source table {} with largest target table {}", ls.name, lt.name),
                needed,
                limit: b.max_words_per_prompt,
            });
        }
    }

    let mut pairs = Vec::new();
    let mut candidates = Vec::new();
    let (mut selection_batches, mut matching_batches) = (0, 0);
    for table in &src.view.tables {
        let t = clock.now_micros();
        let (cand, sb) = select_tables(&cfg.strategy, table, &tgt, &mut gw, provider, elements, budget)?;
        let t_sel = clock.now_micros();
        let (found, mb) = match_columns(table, &cand, &src, &tgt, &mut gw, elements, budget)?;
        timings.selection_us += t_sel.saturating_sub(t);
        timings.matching_us += clock.now_micros().saturating_sub(t_sel);
        selection_batches += sb;
        matching_batches += mb;
        pairs.extend(found);
        candidates.push(CandidateSummary {
            source_table: cand.source_table.clone(),
            count: cand.candidates.len(),
            tables: cand.candidates,
        });
    }

    let t = clock.now_micros();
    let mut matches = apply_drilldown(&pairs, &src, &tgt, &mut gw, elements, cfg.drilldown)?;
    timings.drilldown_us = clock.now_micros().saturating_sub(t);

    let before = matches.len();
    matches.retain(|c| {
        source.resolve(c.source.table(), c.source.column()).is_some()
            && target.resolve(c.target.table(), c.target.column()).is_some()
    });
    if matches.len() != before {
        gw.warn(format!("{} unresolvable pair(s) removed from the output", before - matches.len()));
    }

    let mean_candidates = if candidates.is_empty() {
        0.0
    } else {
        candidates.iter().map(|c| c.count).sum::<usize>() as f64 / candidates.len() as f64
    };
    let report = RunReport {
        config: cfg.describe(),
        timings,
        prompt_count: gw.stats.total_prompts(),
        prompts: gw.stats.prompts.clone(),
        retries: gw.stats.retries,
        words_sent: gw.stats.words_sent,
        selection_batches,
        matching_batches,
        rollup_groups_source: src.registry.len(),
        rollup_groups_target: tgt.registry.len(),
        candidates,
        mean_candidates,
        pairs: matches.len(),
        warnings: gw.warnings,
    };
    Ok((matches, report))
}
