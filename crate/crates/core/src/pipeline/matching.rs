use alloc::string::ToString;
use alloc::vec::Vec;

use super::select::render_words;
use super::{split_batches, CandidateSet, RolledSchema, SelectionStrategy};
use crate::error::Error;
use crate::gateway::{request_column_matches, request_drilldown, DrilldownSide, Gateway};
use crate::schema::{ColumnRef, Correspondence, MatchSet, Stage, Table};
use crate::serializer::{BudgetConfig, ElementConfig};

/// Column matching for one source view table against its candidates.
///
/// Nested join sends one prompt per candidate; the other strategies pack
/// candidates into as few prompts as the budget allows, with the source
/// render as fixed cost. Returns the union of all replies and the number of
/// prompts planned.
pub fn match_columns(
    source: &Table,
    cand: &CandidateSet,
    source_side: &RolledSchema,
    target_side: &RolledSchema,
    gw: &mut Gateway<'_>,
    cfg: &ElementConfig,
    budget: Option<&BudgetConfig>,
) -> Result<(Vec<Correspondence>, usize), Error> {
    let tables: Vec<Table> = cand.tables(target_side).into_iter().cloned().collect();
    if tables.is_empty() {
        return Ok((Vec::new(), 0));
    }
    let batches: Vec<&[Table]> = match cand.strategy_used {
        SelectionStrategy::NestedJoin => tables.chunks(1).collect(),
        _ => split_batches(
            &tables,
            budget,
            render_words(source, cfg),
            |t| render_words(t, cfg),
            |t| t.name.to_string(),
        )?,
    };
    let mut seen = MatchSet::new();
    let mut out = Vec::new();
    for batch in &batches {
        for c in request_column_matches(gw, source, batch, cfg, &source_side.registry, &target_side.registry)? {
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
    }
    Ok((out, batches.len()))
}

/// Replaces alias-level pairs with member-level pairs.
///
/// With `drilldown` on, each alias pair becomes one focused request over the
/// recorded members (both member lists when both sides are aliases) and an
/// empty answer drops the pair. With it off, an alias expands to all of its
/// members. Pairs without aliases pass through.
pub fn apply_drilldown(
    pairs: &[Correspondence],
    source_side: &RolledSchema,
    target_side: &RolledSchema,
    gw: &mut Gateway<'_>,
    cfg: &ElementConfig,
    drilldown: bool,
) -> Result<MatchSet, Error> {
    let unique: MatchSet = pairs.iter().cloned().collect();
    let mut out = MatchSet::new();
    for pair in &unique {
        let s_alias = source_side.is_alias(pair.source.table(), pair.source.column());
        let t_alias = target_side.is_alias(pair.target.table(), pair.target.column());
        if !s_alias && !t_alias {
            out.insert(pair.clone());
            continue;
        }
        let source = side(source_side, &pair.source);
        let target = side(target_side, &pair.target);
        if drilldown {
            out.extend(request_drilldown(gw, &source, &target, cfg)?);
        } else {
            for s in &source.members {
                for t in &target.members {
                    out.insert(Correspondence::new(
                        ColumnRef::new(&source.table, &s.name),
                        ColumnRef::new(&target.table, &t.name),
                        Stage::LlmMatch,
                    ));
                }
            }
        }
    }
    Ok(out)
}

fn side(rolled: &RolledSchema, element: &ColumnRef) -> DrilldownSide {
    DrilldownSide {
        table: element.table().to_string(),
        element: element.column().to_string(),
        members: rolled.members_of(element.table(), element.column()),
    }
}
