//! The matching pipeline: rollup, table selection, column matching and
//! drilldown, run once per source table.

mod batch;
mod matching;
mod rolled;
mod run;
mod select;

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gateway::DEFAULT_RETRIES;
use crate::serializer::{BudgetConfig, ElementConfig};

pub use batch::split_batches;
pub use matching::{apply_drilldown, match_columns};
pub use rolled::{apply_rollup, RolledSchema};
pub use run::{run_pipeline, CandidateSummary, RunReport, StageTimings};
pub use select::{select_tables, CandidateSet};

pub const DEFAULT_TOP_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum SelectionStrategy {
    /// Every target table in one prompt.
    None,
    /// One prompt per (source, target) table pair.
    NestedJoin,
    /// Top-k target tables by embedding cosine.
    VectorSimilarity { k: usize },
    /// The model picks the relevant target tables.
    Llm,
}

impl SelectionStrategy {
    /// Parses `none`, `nested`, `vector` or `llm`; `k` applies to `vector`.
    pub fn parse(name: &str, k: usize) -> Result<Self, Error> {
        let s = match name.trim() {
            "none" => SelectionStrategy::None,
            "nested" | "nested_join" => SelectionStrategy::NestedJoin,
            "vector" | "vector_similarity" => SelectionStrategy::VectorSimilarity { k },
            "llm" => SelectionStrategy::Llm,
            other => return Err(Error::Config(format!("unknown selection strategy {other:?}"))),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), Error> {
        match self {
            SelectionStrategy::VectorSimilarity { k: 0 } => {
                Err(Error::Config("vector similarity needs k >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SelectionStrategy::None => "none",
            SelectionStrategy::NestedJoin => "nested",
            SelectionStrategy::VectorSimilarity { .. } => "vector",
            SelectionStrategy::Llm => "llm",
        }
    }
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionStrategy::VectorSimilarity { k } => write!(f, "vector:{k}"),
            other => f.write_str(other.name()),
        }
    }
}

/// `none`, `nested`, `llm`, `vector` or `vector:K`.
impl FromStr for SelectionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.split_once(':') {
            Some((name, k)) => {
                let k = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad k in strategy {s:?}")))?;
                Self::parse(name, k)
            }
            None => Self::parse(s, DEFAULT_TOP_K),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Llmatch,
    Rematch,
    Custom,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "llmatch" => Ok(Preset::Llmatch),
            "rematch" => Ok(Preset::Rematch),
            "custom" => Ok(Preset::Custom),
            other => Err(Error::Config(format!("unknown preset {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub preset: Preset,
    pub strategy: SelectionStrategy,
    pub elements: ElementConfig,
    pub rollup_source: bool,
    pub rollup_target: bool,
    pub drilldown: bool,
    /// `None` means unlimited.
    pub budget: Option<BudgetConfig>,
    pub retries: usize,
}

impl PipelineConfig {
    /// Rollup on both sides, drilldown on, every schema element.
    pub fn llmatch(strategy: SelectionStrategy) -> Self {
        Self {
            preset: Preset::Llmatch,
            strategy,
            elements: ElementConfig::all(),
            rollup_source: true,
            rollup_target: true,
            drilldown: true,
            budget: None,
            retries: DEFAULT_RETRIES,
        }
    }

    /// Embedding retrieval of the top-k target tables, then one matching
    /// prompt; no rollup or drilldown.
    pub fn rematch(k: usize) -> Self {
        Self {
            preset: Preset::Rematch,
            strategy: SelectionStrategy::VectorSimilarity { k },
            rollup_source: false,
            rollup_target: false,
            drilldown: false,
            ..Self::llmatch(SelectionStrategy::None)
        }
    }

    pub fn rollup_enabled(&self) -> bool {
        self.rollup_source || self.rollup_target
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.strategy.validate()?;
        if let Some(b) = &self.budget {
            b.validate()?;
        }
        if self.drilldown && !self.rollup_enabled() {
            return Err(Error::Config("drilldown requires rollup".into()));
        }
        if self.preset == Preset::Rematch
            && (!matches!(self.strategy, SelectionStrategy::VectorSimilarity { .. })
                || self.rollup_enabled()
                || self.drilldown)
        {
            return Err(Error::Config(
                "the rematch preset uses vector selection without rollup or drilldown".into(),
            ));
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!(
            "{:?} strategy={} elements={} rollup={}/{} drilldown={}",
            self.preset,
            self.strategy,
            self.elements.label(),
            self.rollup_source,
            self.rollup_target,
            self.drilldown
        )
    }
}

/// Monotonic time source for stage timings.
pub trait Clock {
    fn now_micros(&self) -> u64;
}

/// Reports every timing as zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_micros(&self) -> u64 {
        0
    }
}
