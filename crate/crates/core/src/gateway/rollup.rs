use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{extract_structured, resolve_name, rollup_prompt, Gateway};
use crate::diag::Warnings;
use crate::error::Error;
use crate::schema::Table;
use crate::serializer::ElementConfig;
use crate::text::{ident_eq, ident_key};

/// Columns of one table merged under an alias.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RollupGroup {
    pub table: String,
    pub alias: String,
    pub members: Vec<String>,
    pub alias_description: String,
}

impl RollupGroup {
    pub fn has_member(&self, column: &str) -> bool {
        self.members.iter().any(|m| ident_eq(m, column))
    }
}

/// Every recorded rollup, unique by `(table, alias)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RollupRegistry {
    groups: Vec<RollupGroup>,
}

impl RollupRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, group: RollupGroup) -> Result<(), Error> {
        if self.lookup(&group.table, &group.alias).is_some() {
            return Err(Error::Config(format!(
                "alias {}.{} registered twice",
                group.table, group.alias
            )));
        }
        self.groups.push(group);
        Ok(())
    }

    pub fn lookup(&self, table: &str, alias: &str) -> Option<&RollupGroup> {
        self.groups
            .iter()
            .find(|g| ident_eq(&g.table, table) && ident_eq(&g.alias, alias))
    }

    pub fn groups_for<'a>(&'a self, table: &'a str) -> impl Iterator<Item = &'a RollupGroup> + 'a {
        self.groups.iter().filter(move |g| ident_eq(&g.table, table))
    }

    pub fn group_of_member(&self, table: &str, column: &str) -> Option<&RollupGroup> {
        self.groups
            .iter()
            .find(|g| ident_eq(&g.table, table) && g.has_member(column))
    }

    pub fn iter(&self) -> impl Iterator<Item = &RollupGroup> {
        self.groups.iter()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

#[derive(Deserialize)]
struct RollupReply {
    groups: Vec<GroupReply>,
}

#[derive(Deserialize)]
struct GroupReply {
    alias: String,
    columns: Vec<String>,
    #[serde(default)]
    description: String,
}

/// All-or-nothing: one bad group rejects the whole reply.
fn parse_rollup(reply: &str, table: &Table, warnings: &mut Warnings) -> Result<Vec<RollupGroup>, String> {
    let value = extract_structured(reply).map_err(|e| e.to_string())?;
    let parsed: RollupReply = serde_json::from_value(value).map_err(|e| format!("malformed rollup reply: {e}"))?;
    let column_names = table.columns.iter().map(|c| c.name.as_str());
    let mut aliases = BTreeSet::new();
    let mut used = BTreeSet::new();
    let mut groups = Vec::with_capacity(parsed.groups.len());
    for g in parsed.groups {
        let alias = g.alias.trim();
        if alias.is_empty() {
            return Err("group with empty alias".into());
        }
        if table.column(alias).is_some() {
            return Err(format!("alias {alias:?} collides with an existing column"));
        }
        if !aliases.insert(ident_key(alias)) {
            return Err(format!("alias {alias:?} used twice"));
        }
        let mut members: Vec<String> = Vec::new();
        for col in &g.columns {
            let Some(name) = resolve_name(column_names.clone(), col.trim(), warnings) else {
                return Err(format!("group {alias:?}: unknown column {col:?}"));
            };
            if members.iter().any(|m| ident_eq(m, name)) {
                continue;
            }
            if !used.insert(ident_key(name)) {
                return Err(format!("group {alias:?}: column {name:?} is already in another group"));
            }
            members.push(name.to_string());
        }
        if members.len() < 2 {
            return Err(format!("group {alias:?} needs at least two distinct columns"));
        }
        groups.push(RollupGroup {
            table: table.name.clone(),
            alias: alias.to_string(),
            members,
            alias_description: g.description,
        });
    }
    Ok(groups)
}

/// Asks for rollup groups of one table. A reply still invalid after the
/// retries turns rollup into a no-op for the table.
pub fn request_rollup(gw: &mut Gateway<'_>, table: &Table, cfg: &ElementConfig) -> Result<Vec<RollupGroup>, Error> {
    let prompt = rollup_prompt(table, cfg);
    Ok(gw
        .ask(prompt, |reply, w| parse_rollup(reply, table, w))?
        .unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::Column;
    use alloc::vec;

    fn account() -> Table {
        Table::new(
            "account",
            vec![
                Column::new("id").primary_key(),
                Column::new("currency"),
                Column::new("currency_code_id"),
                Column::new("currency_code"),
                Column::new("balance"),
            ],
        )
    }

    #[test]
    fn parses_valid_group() {
        let reply = r#"{"groups":[{"alias":"currency_meta_data","columns":["currency","currency_code_id","CURRENCY_CODE"],"description":"currency info"}]}"#;
        let mut w = Warnings::new();
        let groups = parse_rollup(reply, &account(), &mut w).unwrap();
        assert_eq!(groups[0].members, ["currency", "currency_code_id", "currency_code"]);
        assert_eq!(w.len(), 1, "case-insensitive resolution warns");
    }

    #[test]
    fn rejects_invalid_groups() {
        let t = account();
        let mut w = Warnings::new();
        let cases = [
            (r#"{"groups":[{"alias":"m","columns":["currency","nope"]}]}"#, "unknown column"),
            (r#"{"groups":[{"alias":"balance","columns":["currency","currency_code"]}]}"#, "collides"),
            (r#"{"groups":[{"alias":"a","columns":["currency","currency_code"]},{"alias":"b","columns":["currency_code","balance"]}]}"#, "another group"),
            (r#"{"groups":[{"alias":"a","columns":["currency","currency"]}]}"#, "two distinct"),
            (r#"{"groups":[{"alias":"a","columns":["currency","balance"]},{"alias":"A","columns":["currency_code","id"]}]}"#, "used twice"),
            (r#"{"groups":[{"alias":" ","columns":["currency","balance"]}]}"#, "empty alias"),
            (r#"{"groups":"none"}"#, "malformed"),
        ];
        for (reply, needle) in cases {
            let err = parse_rollup(reply, &t, &mut w).unwrap_err();
            assert!(err.contains(needle), "{reply}: {err}");
        }
    }

    #[test]
    fn registry_lookup_is_unique() {
        let mut r = RollupRegistry::new();
        let g = RollupGroup {
            table: "t".into(),
            alias: "a".into(),
            members: vec!["x".into(), "y".into()],
            alias_description: String::new(),
        };
        r.insert(g.clone()).unwrap();
        let mut dup = g.clone();
        dup.alias = "A".into();
        assert!(r.insert(dup).is_err());
        assert_eq!(r.lookup("T", "a"), Some(&g));
        assert_eq!(r.group_of_member("t", "Y"), Some(&g));
        assert!(r.group_of_member("t", "z").is_none());
    }
}
