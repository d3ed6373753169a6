use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use super::{CompletionClient, Prompt, PromptContext, RollupGroup};
use crate::error::Error;
use crate::schema::{MatchSet, Table};
use crate::text::ident_eq;

/// Evaluation device: answers every prompt from a gold mapping.
///
/// It never proposes rollups, selects exactly the gold-mapped tables,
/// matches exactly the gold pairs (lifted to aliases where the prompt's
/// tables are rolled up) and drills down to the gold member pairs.
pub struct OracleClient {
    gold: MatchSet,
    description_gated: bool,
}

impl OracleClient {
    pub fn new(gold: MatchSet) -> Self {
        Self {
            gold,
            description_gated: false,
        }
    }

    /// Lossy variant: a column pair is only reported when both column
    /// descriptions appear in the prompt text.
    pub fn description_gated(gold: MatchSet) -> Self {
        Self {
            gold,
            description_gated: true,
        }
    }

    pub fn gold(&self) -> &MatchSet {
        &self.gold
    }
}

#[derive(Serialize)]
struct Groups {
    groups: Vec<()>,
}

#[derive(Serialize)]
struct Tables<'a> {
    tables: Vec<&'a str>,
}

#[derive(Serialize, PartialEq, Eq, PartialOrd, Ord)]
struct TableMatch<'a> {
    source_column: &'a str,
    target_table: &'a str,
    target_column: &'a str,
}

#[derive(Serialize)]
struct TableMatches<'a> {
    matches: Vec<TableMatch<'a>>,
}

#[derive(Serialize, PartialEq, Eq, PartialOrd, Ord)]
struct MemberMatch<'a> {
    source_column: &'a str,
    target_column: &'a str,
}

#[derive(Serialize)]
struct MemberMatches<'a> {
    matches: Vec<MemberMatch<'a>>,
}

/// The element of `table` that shows `column`: its alias when rolled up.
fn visible<'a>(table: &'a Table, groups: &'a [RollupGroup], column: &'a str) -> Option<&'a str> {
    if let Some(g) = groups
        .iter()
        .find(|g| ident_eq(&g.table, &table.name) && g.has_member(column))
    {
        return Some(g.alias.as_str());
    }
    table.column(column).map(|c| c.name.as_str())
}

fn described(table: &Table, column: &str, text: &str) -> bool {
    table
        .column(column)
        .is_some_and(|c| !c.description.trim().is_empty() && text.contains(c.description.trim()))
}

impl OracleClient {
    fn answer(&self, prompt: &Prompt) -> String {
        let json = match &prompt.context {
            PromptContext::Rollup { .. } => serde_json::to_string(&Groups { groups: Vec::new() }),
            PromptContext::TableSelection { source, targets } => {
                let tables = targets
                    .iter()
                    .filter(|t| {
                        self.gold
                            .for_source_table(&source.name)
                            .any(|c| ident_eq(c.target.table(), &t.name))
                    })
                    .map(|t| t.name.as_str())
                    .collect();
                serde_json::to_string(&Tables { tables })
            }
            PromptContext::ColumnMatch {
                source,
                candidates,
                source_groups,
                target_groups,
            } => {
                let mut matches = BTreeSet::new();
                for c in self.gold.for_source_table(&source.name) {
                    let Some(table) = candidates.iter().find(|t| ident_eq(&t.name, c.target.table())) else {
                        continue;
                    };
                    let (Some(sc), Some(tc)) = (
                        visible(source, source_groups, c.source.column()),
                        visible(table, target_groups, c.target.column()),
                    ) else {
                        continue;
                    };
                    if self.description_gated
                        && !(described(source, sc, &prompt.text) && described(table, tc, &prompt.text))
                    {
                        continue;
                    }
                    matches.insert(TableMatch {
                        source_column: sc,
                        target_table: &table.name,
                        target_column: tc,
                    });
                }
                serde_json::to_string(&TableMatches {
                    matches: matches.into_iter().collect(),
                })
            }
            PromptContext::Drilldown { source, target } => {
                let mut matches = BTreeSet::new();
                for c in self.gold.for_source_table(&source.table) {
                    if !ident_eq(c.target.table(), &target.table) {
                        continue;
                    }
                    let sc = source.member_names().find(|m| ident_eq(m, c.source.column()));
                    let tc = target.member_names().find(|m| ident_eq(m, c.target.column()));
                    if let (Some(sc), Some(tc)) = (sc, tc) {
                        matches.insert(MemberMatch {
                            source_column: sc,
                            target_column: tc,
                        });
                    }
                }
                serde_json::to_string(&MemberMatches {
                    matches: matches.into_iter().collect(),
                })
            }
        };
        json.expect("oracle replies always serialize")
    }
}

impl CompletionClient for OracleClient {
    fn complete(&self, prompt: &Prompt) -> Result<String, Error> {
        Ok(self.answer(prompt))
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}
