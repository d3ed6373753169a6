//! Prompt text. Renders come from [`crate::serializer`], so the element
//! configuration decides what the model sees.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Prompt, PromptContext, PromptKey, PromptKind, RollupGroup};
use crate::schema::{Column, Table};
use crate::serializer::{serialize_table, ElementConfig};

pub fn rollup_prompt(table: &Table, cfg: &ElementConfig) -> Prompt {
    let text = format!(
        "Task: rollup\n\
         Group columns of the table below that describe one concept into a single alias column. \
         Every group needs at least two columns, a column belongs to at most one group, and the \
         alias must be a new name that is not already a column of the table.\n\
         Reply with JSON only: {{\"groups\":[{{\"alias\":\"<new name>\",\"columns\":[\"<column>\"],\"description\":\"<what the alias covers>\"}}]}}\n\
         Reply {{\"groups\":[]}} when nothing should be merged.\n\n{}",
        serialize_table(table, cfg)
    );
    Prompt {
        key: PromptKey {
            kind: PromptKind::Rollup,
            table: table.name.clone(),
            candidates: Vec::new(),
            column: None,
        },
        context: PromptContext::Rollup {
            table: table.clone(),
        },
        text,
        attempt: 0,
    }
}

fn render_all(tables: &[Table], cfg: &ElementConfig) -> String {
    tables
        .iter()
        .map(|t| serialize_table(t, cfg))
        .collect::<Vec<_>>()
        .join("\n\n")
}

pub fn table_selection_prompt(source: &Table, targets: &[Table], cfg: &ElementConfig) -> Prompt {
    let text = format!(
        "Task: table selection\n\
         List the target tables that may contain columns corresponding to columns of the source table.\n\
         Reply with JSON only: {{\"tables\":[\"<target table>\"]}}\n\n\
         Source table:\n{}\n\nTarget tables:\n{}",
        serialize_table(source, cfg),
        render_all(targets, cfg)
    );
    Prompt {
        key: PromptKey {
            kind: PromptKind::TableSelection,
            table: source.name.clone(),
            candidates: targets.iter().map(|t| t.name.clone()).collect(),
            column: None,
        },
        context: PromptContext::TableSelection {
            source: source.clone(),
            targets: targets.to_vec(),
        },
        text,
        attempt: 0,
    }
}

/// `source_groups`/`target_groups` describe the alias columns present in the
/// rendered tables; they travel as context only.
pub fn column_match_prompt(
    source: &Table,
    candidates: &[Table],
    cfg: &ElementConfig,
    source_groups: Vec<RollupGroup>,
    target_groups: Vec<RollupGroup>,
) -> Prompt {
    let text = format!(
        "Task: column matching\n\
         Match each source column to the target columns that hold the same information. \
         A source column may match several target columns or none.\n\
         Reply with JSON only: {{\"matches\":[{{\"source_column\":\"<column>\",\"target_table\":\"<table>\",\"target_column\":\"<column>\"}}]}}\n\n\
         Source table:\n{}\n\nCandidate target tables:\n{}",
        serialize_table(source, cfg),
        render_all(candidates, cfg)
    );
    Prompt {
        key: PromptKey {
            kind: PromptKind::ColumnMatch,
            table: source.name.clone(),
            candidates: candidates.iter().map(|t| t.name.clone()).collect(),
            column: None,
        },
        context: PromptContext::ColumnMatch {
            source: source.clone(),
            candidates: candidates.to_vec(),
            source_groups,
            target_groups,
        },
        text,
        attempt: 0,
    }
}

/// One side of a matched pair: the matched element (an alias or a plain
/// column) and the original columns it stands for.
#[derive(Debug, Clone, PartialEq)]
pub struct DrilldownSide {
    pub table: String,
    pub element: String,
    pub members: Vec<Column>,
}

impl DrilldownSide {
    pub fn member_names(&self) -> impl Iterator<Item = &str> + Clone {
        self.members.iter().map(|c| c.name.as_str())
    }
}

fn render_members(side: &DrilldownSide, cfg: &ElementConfig) -> String {
    let t = Table::new(side.table.clone(), side.members.clone());
    serialize_table(&t, cfg)
}

pub fn drilldown_prompt(source: &DrilldownSide, target: &DrilldownSide, cfg: &ElementConfig) -> Prompt {
    let text = format!(
        "Task: drilldown\n\
         The source element {}.{} was matched to the target element {}.{}. \
         Below are the original columns behind both elements. List only the column pairs that \
         really correspond; leave out columns that do not.\n\
         Reply with JSON only: {{\"matches\":[{{\"source_column\":\"<column>\",\"target_column\":\"<column>\"}}]}}\n\n\
         Source columns:\n{}\n\nTarget columns:\n{}",
        source.table,
        source.element,
        target.table,
        target.element,
        render_members(source, cfg),
        render_members(target, cfg)
    );
    Prompt {
        key: PromptKey {
            kind: PromptKind::Drilldown,
            table: source.table.clone(),
            candidates: [target.table.clone()].to_vec(),
            column: Some(format!("{}->{}", source.element, target.element)),
        },
        context: PromptContext::Drilldown {
            source: source.clone(),
            target: target.clone(),
        },
        text: text.to_string(),
        attempt: 0,
    }
}
