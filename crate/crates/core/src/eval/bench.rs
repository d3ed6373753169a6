//! Experiment runners. Rows carry pinned CSV column orders; a failing cell
//! becomes a row with its error instead of aborting the run.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::evaluate_f1;
use crate::embedding::EmbeddingProvider;
use crate::error::Error;
use crate::gateway::CompletionClient;
use crate::pipeline::{run_pipeline, Clock, PipelineConfig, SelectionStrategy};
use crate::schema::{mapping_stats, schema_stats, MatchSet, Schema};
use crate::serializer::{BudgetConfig, ElementConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub source: Schema,
    pub target: Schema,
    pub gold: MatchSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub datasets: Vec<Dataset>,
    pub element_configs: Vec<ElementConfig>,
    pub strategies: Vec<SelectionStrategy>,
    /// `None` is an unlimited budget; used by the scalability sweep.
    pub budgets: Vec<Option<BudgetConfig>>,
    /// Rollup, drilldown, preset, retries and budget for ablation cells.
    pub base: PipelineConfig,
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<(), Error> {
        if self.datasets.is_empty()
            || self.element_configs.is_empty()
            || self.strategies.is_empty()
            || self.budgets.is_empty()
        {
            return Err(Error::Config("experiment grid axes must be non-empty".into()));
        }
        Ok(())
    }
}

/// Builds the completion client for one dataset (an oracle needs its gold).
pub type ClientFactory<'a> = dyn Fn(&Dataset) -> Result<Box<dyn CompletionClient + 'a>, Error> + 'a;

fn fmt_f(v: f64) -> String {
    format!("{v:.6}")
}

fn opt_f(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_default()
}

pub const ABLATION_HEADER: [&str; 8] = [
    "dataset",
    "elements",
    "strategy",
    "f1",
    "precision",
    "recall",
    "mean_candidates",
    "error",
];

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub dataset: String,
    pub elements: String,
    pub strategy: String,
    pub f1: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub mean_candidates: Option<f64>,
    pub error: Option<String>,
}

impl AblationRow {
    pub fn to_record(&self) -> Vec<String> {
        Vec::from([
            self.dataset.clone(),
            self.elements.clone(),
            self.strategy.clone(),
            opt_f(self.f1),
            opt_f(self.precision),
            opt_f(self.recall),
            opt_f(self.mean_candidates),
            self.error.clone().unwrap_or_default(),
        ])
    }
}

/// One pipeline run and F1 evaluation per (dataset, elements, strategy).
pub fn run_ablation(
    grid: &ExperimentGrid,
    client_for: &ClientFactory<'_>,
    provider: &dyn EmbeddingProvider,
    clock: &dyn Clock,
) -> Result<Vec<AblationRow>, Error> {
    grid.validate()?;
    let mut rows = Vec::new();
    for ds in &grid.datasets {
        for elements in &grid.element_configs {
            for strategy in &grid.strategies {
                let mut cfg = grid.base.clone();
                cfg.elements = *elements;
                cfg.strategy = *strategy;
                let mut row = AblationRow {
                    dataset: ds.name.clone(),
                    elements: elements.label(),
                    strategy: strategy.to_string(),
                    f1: None,
                    precision: None,
                    recall: None,
                    mean_candidates: None,
                    error: None,
                };
                let outcome = client_for(ds).and_then(|client| {
                    let (pred, report) = run_pipeline(&ds.source, &ds.target, &cfg, client.as_ref(), provider, clock)?;
                    Ok((evaluate_f1(&pred, &ds.gold, &ds.source, &ds.target)?, report))
                });
                match outcome {
                    Ok((eval, report)) => {
                        row.f1 = Some(eval.f1);
                        row.precision = Some(eval.precision);
                        row.recall = Some(eval.recall);
                        row.mean_candidates = Some(report.mean_candidates);
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

pub const SCALABILITY_HEADER: [&str; 6] = ["dataset", "budget_words", "f1", "error", "prompt_count", "batches"];

#[derive(Debug, Clone, PartialEq)]
pub struct ScalabilityRow {
    pub dataset: String,
    /// `None` for the unlimited budget.
    pub budget_words: Option<usize>,
    pub f1: Option<f64>,
    pub error: Option<String>,
    pub prompt_count: usize,
    pub batches: usize,
}

impl ScalabilityRow {
    pub fn is_budget_too_small(&self) -> bool {
        self.error.as_deref().is_some_and(|e| e.starts_with("budget too small"))
    }

    pub fn to_record(&self) -> Vec<String> {
        Vec::from([
            self.dataset.clone(),
            self.budget_words
                .map_or_else(|| "unlimited".to_string(), |w| w.to_string()),
            opt_f(self.f1),
            self.error.clone().unwrap_or_default(),
            self.prompt_count.to_string(),
            self.batches.to_string(),
        ])
    }
}

/// Re-runs one dataset under each budget, ascending, unlimited last.
pub fn run_scalability(
    budgets: &[Option<BudgetConfig>],
    dataset: &Dataset,
    cfg: &PipelineConfig,
    client: &dyn CompletionClient,
    provider: &dyn EmbeddingProvider,
    clock: &dyn Clock,
) -> Result<Vec<ScalabilityRow>, Error> {
    let sorted = budgets.windows(2).all(|w| match (w[0], w[1]) {
        (Some(a), Some(b)) => a.max_words_per_prompt <= b.max_words_per_prompt,
        (Some(_), None) => true,
        (None, _) => false,
    });
    if !sorted {
        return Err(Error::Config("budgets must ascend with unlimited last".into()));
    }
    let mut rows = Vec::with_capacity(budgets.len());
    for budget in budgets {
        let mut cell = cfg.clone();
        cell.budget = *budget;
        let mut row = ScalabilityRow {
            dataset: dataset.name.clone(),
            budget_words: budget.map(|b| b.max_words_per_prompt),
            f1: None,
            error: None,
            prompt_count: 0,
            batches: 0,
        };
        let outcome = run_pipeline(&dataset.source, &dataset.target, &cell, client, provider, clock).and_then(
            |(pred, report)| Ok((evaluate_f1(&pred, &dataset.gold, &dataset.source, &dataset.target)?, report)),
        );
        match outcome {
            Ok((eval, report)) => {
                row.f1 = Some(eval.f1);
                row.prompt_count = report.prompt_count;
                row.batches = report.batches();
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        rows.push(row);
    }
    Ok(rows)
}

pub const STATS_HEADER: [&str; 9] = [
    "dataset",
    "tables_src",
    "tables_tgt",
    "cols_src",
    "cols_tgt",
    "pk",
    "fk",
    "avg_target_tables_per_source",
    "one_to_one_ratio",
];

/// Dataset statistics row; `pk` and `fk` sum both schemas.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub dataset: String,
    pub tables_src: usize,
    pub tables_tgt: usize,
    pub cols_src: usize,
    pub cols_tgt: usize,
    pub pk: usize,
    pub fk: usize,
    pub avg_target_tables_per_source: f64,
    pub one_to_one_ratio: f64,
}

impl StatsRow {
    pub fn to_record(&self) -> Vec<String> {
        Vec::from([
            self.dataset.clone(),
            self.tables_src.to_string(),
            self.tables_tgt.to_string(),
            self.cols_src.to_string(),
            self.cols_tgt.to_string(),
            self.pk.to_string(),
            self.fk.to_string(),
            fmt_f(self.avg_target_tables_per_source),
            fmt_f(self.one_to_one_ratio),
        ])
    }
}

pub fn stats_row(ds: &Dataset) -> StatsRow {
    let s = schema_stats(&ds.source);
    let t = schema_stats(&ds.target);
    let m = mapping_stats(&ds.gold, &ds.source, &ds.target);
    StatsRow {
        dataset: ds.name.clone(),
        tables_src: s.table_count,
        tables_tgt: t.table_count,
        cols_src: s.column_count,
        cols_tgt: t.column_count,
        pk: s.pk_count + t.pk_count,
        fk: s.fk_count + t.fk_count,
        avg_target_tables_per_source: m.avg_target_tables_per_source_table,
        one_to_one_ratio: m.one_to_one_ratio,
    }
}
