use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Deserialize;

use super::{
    column_match_prompt, drilldown_prompt, extract_structured, resolve_name, table_selection_prompt,
    DrilldownSide, Gateway, RollupRegistry,
};
use crate::diag::Warnings;
use crate::error::Error;
use crate::schema::{ColumnRef, Correspondence, Stage, Table};
use crate::serializer::ElementConfig;

fn reply_value<T: for<'de> Deserialize<'de>>(reply: &str, what: &str) -> Result<T, String> {
    let value = extract_structured(reply).map_err(|e| e.to_string())?;
    serde_json::from_value(value).map_err(|e| format!("malformed {what} reply: {e}"))
}

#[derive(Deserialize)]
struct SelectionReply {
    tables: Vec<String>,
}

fn parse_selection(reply: &str, targets: &[Table], w: &mut Warnings) -> Result<Vec<String>, String> {
    let parsed: SelectionReply = reply_value(reply, "table selection")?;
    let names = targets.iter().map(|t| t.name.as_str());
    let mut out: Vec<String> = Vec::new();
    for name in parsed.tables {
        match resolve_name(names.clone(), name.trim(), w) {
            Some(hit) if !out.iter().any(|o| o == hit) => out.push(hit.to_string()),
            Some(_) => {}
            None => w.push("llm_gateway", format!("dropping unknown target table {name:?}")),
        }
    }
    Ok(out)
}

/// Target tables the model considers relevant, in reply order; never a name
/// outside `targets`.
pub fn request_table_selection(
    gw: &mut Gateway<'_>,
    source: &Table,
    targets: &[Table],
    cfg: &ElementConfig,
) -> Result<Vec<String>, Error> {
    if targets.is_empty() {
        return Err(Error::Config("table selection needs at least one target table".into()));
    }
    let prompt = table_selection_prompt(source, targets, cfg);
    Ok(gw
        .ask(prompt, |reply, w| parse_selection(reply, targets, w))?
        .unwrap_or_default())
}

#[derive(Deserialize)]
struct MatchReply {
    matches: Vec<MatchEntry>,
}

#[derive(Deserialize)]
struct MatchEntry {
    source_column: String,
    target_table: String,
    target_column: String,
}

fn parse_matches(
    reply: &str,
    source: &Table,
    candidates: &[Table],
    w: &mut Warnings,
) -> Result<Vec<Correspondence>, String> {
    let parsed: MatchReply = reply_value(reply, "column match")?;
    let source_names = source.columns.iter().map(|c| c.name.as_str());
    let table_names = candidates.iter().map(|t| t.name.as_str());
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for m in parsed.matches {
        let Some(sc) = resolve_name(source_names.clone(), m.source_column.trim(), w) else {
            w.push("llm_gateway", format!("dropping match from unknown source column {:?}", m.source_column));
            continue;
        };
        let Some(tt) = resolve_name(table_names.clone(), m.target_table.trim(), w) else {
            w.push("llm_gateway", format!("dropping match into table {:?} outside the candidates", m.target_table));
            continue;
        };
        let table = candidates.iter().find(|t| t.name == tt).expect("resolved name");
        let Some(tc) = resolve_name(table.columns.iter().map(|c| c.name.as_str()), m.target_column.trim(), w) else {
            w.push("llm_gateway", format!("dropping match to unknown column {}.{}", tt, m.target_column));
            continue;
        };
        let c = Correspondence::new(ColumnRef::new(&source.name, sc), ColumnRef::new(tt, tc), Stage::LlmMatch);
        if seen.insert((c.source.clone(), c.target.clone())) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Column correspondences between `source` and the candidate tables. Both
/// sides may name alias columns of the rolled views.
pub fn request_column_matches(
    gw: &mut Gateway<'_>,
    source: &Table,
    candidates: &[Table],
    cfg: &ElementConfig,
    source_registry: &RollupRegistry,
    target_registry: &RollupRegistry,
) -> Result<Vec<Correspondence>, Error> {
    if candidates.is_empty() {
        return Err(Error::Config("column matching needs at least one candidate table".into()));
    }
    let source_groups = source_registry.groups_for(&source.name).cloned().collect();
    let target_groups = candidates
        .iter()
        .flat_map(|t| target_registry.groups_for(&t.name).cloned())
        .collect();
    let prompt = column_match_prompt(source, candidates, cfg, source_groups, target_groups);
    Ok(gw
        .ask(prompt, |reply, w| parse_matches(reply, source, candidates, w))?
        .unwrap_or_default())
}

#[derive(Deserialize)]
struct DrilldownReply {
    matches: Vec<DrilldownEntry>,
}

#[derive(Deserialize)]
struct DrilldownEntry {
    source_column: String,
    target_column: String,
}

fn parse_drilldown(
    reply: &str,
    source: &DrilldownSide,
    target: &DrilldownSide,
    w: &mut Warnings,
) -> Result<Vec<Correspondence>, String> {
    let parsed: DrilldownReply = reply_value(reply, "drilldown")?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for m in parsed.matches {
        let sc = resolve_name(source.member_names(), m.source_column.trim(), w);
        let tc = resolve_name(target.member_names(), m.target_column.trim(), w);
        let (Some(sc), Some(tc)) = (sc, tc) else {
            w.push(
                "llm_gateway",
                format!(
                    "dropping drilldown pair {:?} -> {:?} outside the recorded members",
                    m.source_column, m.target_column
                ),
            );
            continue;
        };
        let c = Correspondence::new(ColumnRef::new(&source.table, sc), ColumnRef::new(&target.table, tc), Stage::Drilldown);
        if seen.insert((c.source.clone(), c.target.clone())) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Re-examines an alias-level match against the original member columns.
/// An empty result means the alias match should be discarded.
pub fn request_drilldown(
    gw: &mut Gateway<'_>,
    source: &DrilldownSide,
    target: &DrilldownSide,
    cfg: &ElementConfig,
) -> Result<Vec<Correspondence>, Error> {
    if source.members.len() < 2 && target.members.len() < 2 {
        return Err(Error::Config(format!(
            "drilldown of {}.{} -> {}.{} needs an alias on at least one side",
            source.table, source.element, target.table, target.element
        )));
    }
    let prompt = drilldown_prompt(source, target, cfg);
    Ok(gw
        .ask(prompt, |reply, w| parse_drilldown(reply, source, target, w))?
        .unwrap_or_default())
}
