//! Experiment grid files (JSON). Dataset paths are relative to the grid file.
//!
//! ```json
//! {
//!   "datasets": [{"name": "toy_bank", "source": "a.json", "target": "b.json", "gold": "a_b.mapping.json"}],
//!   "elements": ["name", "name,desc", "name,desc,keys,types"],
//!   "strategies": ["none", "nested", "vector:5", "llm"],
//!   "budgets": [150, 300, null],
//!   "overhead_words": 60,
//!   "pipeline": {"preset": "llmatch", "rollup": true, "drilldown": true},
//!   "scalability": {"strategy": "llm", "elements": "name,desc,keys,types"}
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use schemamatch_core::diag::Warnings;
use schemamatch_core::eval::{Dataset, ExperimentGrid};
use schemamatch_core::pipeline::{PipelineConfig, Preset, SelectionStrategy};
use schemamatch_core::serializer::{BudgetConfig, ElementConfig};
use schemamatch_core::Error;

use crate::files::{load_mapping_file, load_schema_file, read_text};
use crate::AppError;

pub const DEFAULT_OVERHEAD_WORDS: usize = 60;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub name: String,
    pub source: PathBuf,
    pub target: PathBuf,
    pub gold: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineEntry {
    pub preset: Option<String>,
    pub rollup: Option<bool>,
    pub drilldown: Option<bool>,
    pub retries: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalabilityEntry {
    pub strategy: Option<String>,
    pub elements: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub datasets: Vec<DatasetEntry>,
    #[serde(default = "default_elements")]
    pub elements: Vec<String>,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<String>,
    #[serde(default = "default_budgets")]
    pub budgets: Vec<Option<usize>>,
    #[serde(default)]
    pub overhead_words: Option<usize>,
    #[serde(default)]
    pub pipeline: PipelineEntry,
    #[serde(default)]
    pub scalability: ScalabilityEntry,
}

fn default_elements() -> Vec<String> {
    vec!["name,desc,keys,types".into()]
}

fn default_strategies() -> Vec<String> {
    vec!["llm".into()]
}

fn default_budgets() -> Vec<Option<usize>> {
    vec![None]
}

/// A loaded grid plus the single configuration used for the budget sweep.
pub struct Grid {
    pub grid: ExperimentGrid,
    pub scalability: PipelineConfig,
    pub warnings: Warnings,
}

pub fn load_datasets(entries: &[DatasetEntry], base: &Path, warnings: &mut Warnings) -> Result<Vec<Dataset>, AppError> {
    entries
        .iter()
        .map(|d| {
            let source = load_schema_file(&base.join(&d.source), warnings)?;
            let target = load_schema_file(&base.join(&d.target), warnings)?;
            let gold = load_mapping_file(&base.join(&d.gold), &source, &target, warnings)?;
            Ok(Dataset { name: d.name.clone(), source, target, gold })
        })
        .collect()
}

pub fn parse_grid_file(path: &Path) -> Result<GridFile, AppError> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| AppError::Engine(Error::Config(format!("grid file {}: {e}", path.display()))))
}

pub fn load_grid(path: &Path, default_retries: usize) -> Result<Grid, AppError> {
    let file = parse_grid_file(path)?;
    let base_dir = path.parent().unwrap_or(Path::new("."));
    let mut warnings = Warnings::new();
    let datasets = load_datasets(&file.datasets, base_dir, &mut warnings)?;

    let element_configs = file
        .elements
        .iter()
        .map(|e| ElementConfig::parse_list(e))
        .collect::<Result<Vec<_>, _>>()?;
    let strategies = file
        .strategies
        .iter()
        .map(|s| s.parse::<SelectionStrategy>())
        .collect::<Result<Vec<_>, _>>()?;
    let overhead = file.overhead_words.unwrap_or(DEFAULT_OVERHEAD_WORDS);
    let budgets = file
        .budgets
        .iter()
        .map(|b| b.map(|w| BudgetConfig::new(w, overhead)).transpose())
        .collect::<Result<Vec<_>, _>>()?;

    let preset: Preset = file.pipeline.preset.as_deref().unwrap_or("llmatch").parse()?;
    let mut base = match preset {
        Preset::Rematch => PipelineConfig::rematch(schemamatch_core::pipeline::DEFAULT_TOP_K),
        _ => PipelineConfig::llmatch(SelectionStrategy::None),
    };
    base.preset = preset;
    if let Some(r) = file.pipeline.rollup {
        base.rollup_source = r;
        base.rollup_target = r;
    }
    if let Some(d) = file.pipeline.drilldown {
        base.drilldown = d;
    }
    base.retries = file.pipeline.retries.unwrap_or(default_retries);

    let grid = ExperimentGrid { datasets, element_configs, strategies, budgets, base: base.clone() };
    grid.validate()?;

    let mut scalability = base;
    scalability.strategy = match &file.scalability.strategy {
        Some(s) => s.parse()?,
        None => grid.strategies[0],
    };
    scalability.elements = match &file.scalability.elements {
        Some(e) => ElementConfig::parse_list(e)?,
        None => grid.element_configs[0],
    };
    scalability.validate()?;
    Ok(Grid { grid, scalability, warnings })
}
