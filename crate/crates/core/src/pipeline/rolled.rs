use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::gateway::{request_rollup, Gateway, RollupRegistry};
use crate::schema::{Column, Schema, Table};
use crate::serializer::ElementConfig;
use crate::text::ident_eq;

/// A schema with its recorded rollups and the view used for matching.
///
/// In the view each group's members are replaced by one alias column, placed
/// where the first member was. The alias carries the group description and
/// no key flags; foreign keys touching a member are left out of the view.
#[derive(Debug, Clone, PartialEq)]
pub struct RolledSchema {
    pub base: Schema,
    pub registry: RollupRegistry,
    pub view: Schema,
}

impl RolledSchema {
    /// No rollups: the view is the base schema.
    pub fn identity(schema: &Schema) -> Self {
        Self {
            base: schema.clone(),
            registry: RollupRegistry::new(),
            view: schema.clone(),
        }
    }

    /// Builds the view for an already validated registry.
    pub fn from_registry(base: &Schema, registry: RollupRegistry) -> Result<Self, Error> {
        let tables = base
            .tables
            .iter()
            .map(|t| view_table(t, &registry))
            .collect();
        let view = Schema {
            name: base.name.clone(),
            tables,
        };
        view.validate()?;
        Ok(Self {
            base: base.clone(),
            registry,
            view,
        })
    }

    pub fn is_alias(&self, table: &str, column: &str) -> bool {
        self.registry.lookup(table, column).is_some()
    }

    /// Base columns behind a view element: the group's members for an
    /// alias, otherwise the column itself.
    pub fn members_of(&self, table: &str, element: &str) -> Vec<Column> {
        let Some(base_table) = self.base.table(table) else {
            return Vec::new();
        };
        match self.registry.lookup(table, element) {
            Some(g) => g
                .members
                .iter()
                .filter_map(|m| base_table.column(m).cloned())
                .collect(),
            None => base_table.column(element).cloned().into_iter().collect(),
        }
    }
}

fn view_table(t: &Table, registry: &RollupRegistry) -> Table {
    let mut columns = Vec::with_capacity(t.columns.len());
    for c in &t.columns {
        match registry.group_of_member(&t.name, &c.name) {
            None => columns.push(c.clone()),
            Some(g) if ident_eq(&g.members[0], &c.name) => columns.push(Column {
                name: g.alias.clone(),
                data_type: None,
                description: g.alias_description.clone(),
                is_primary_key: false,
            }),
            Some(_) => {}
        }
    }
    let foreign_keys = t
        .foreign_keys
        .iter()
        .filter(|fk| {
            registry.group_of_member(&t.name, &fk.column).is_none()
                && registry.group_of_member(&fk.ref_table, &fk.ref_column).is_none()
        })
        .cloned()
        .collect();
    Table {
        name: t.name.clone(),
        description: t.description.clone(),
        columns,
        foreign_keys,
    }
}

/// Asks for rollup groups table by table and builds the view.
pub fn apply_rollup(schema: &Schema, gw: &mut Gateway<'_>, cfg: &ElementConfig) -> Result<RolledSchema, Error> {
    let mut registry = RollupRegistry::new();
    for table in &schema.tables {
        for group in request_rollup(gw, table, cfg)? {
            if let Err(e) = registry.insert(group) {
                gw.warn(format!("{e}"));
            }
        }
    }
    RolledSchema::from_registry(schema, registry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::RollupGroup;
    use alloc::string::String;
    use alloc::vec;

    fn base() -> Schema {
        Schema::new(
            "s",
            vec![
                Table::new("cur", vec![Column::new("code").primary_key(), Column::new("name")]),
                Table::new(
                    "acct",
                    vec![
                        Column::new("id").primary_key(),
                        Column::new("currency"),
                        Column::new("currency_code").typed("char(3)"),
                        Column::new("balance"),
                    ],
                )
                .with_fk("currency_code", "cur", "code"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn view_replaces_members_with_alias() {
        let mut reg = RollupRegistry::new();
        reg.insert(RollupGroup {
            table: "acct".into(),
            alias: "currency_meta_data".into(),
            members: vec!["currency".into(), "currency_code".into()],
            alias_description: "currency of the balance".into(),
        })
        .unwrap();
        let rolled = RolledSchema::from_registry(&base(), reg).unwrap();
        let acct = rolled.view.table("acct").unwrap();
        let names: Vec<&str> = acct.columns.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["id", "currency_meta_data", "balance"]);
        assert!(acct.foreign_keys.is_empty());
        assert_eq!(acct.columns[1].description, "currency of the balance");
        assert!(rolled.is_alias("ACCT", "currency_meta_data"));
        let members: Vec<String> = rolled.members_of("acct", "currency_meta_data").into_iter().map(|c| c.name).collect();
        assert_eq!(members, ["currency", "currency_code"]);
        assert_eq!(rolled.members_of("acct", "balance").len(), 1);
        assert_eq!(rolled.view.tables[0], rolled.base.tables[0]);
    }
}
