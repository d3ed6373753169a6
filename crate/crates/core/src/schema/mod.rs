//! Relational schema model with descriptions and key structure.
//!
//! Identifiers keep the spelling they were given but compare
//! case-insensitively after trimming.

mod doc;
mod matchset;
mod stats;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::ValidationError;
use crate::text::{ident_eq, ident_key};

pub use doc::{
    load_ground_truth, load_ground_truth_doc, load_schema, load_schema_doc, mapping_to_doc,
    mapping_to_json, schema_to_doc, schema_to_json, ColumnDoc, ForeignKeyDoc, MappingDoc,
    PairDoc, SchemaDoc, TableDoc,
};
pub use matchset::{Correspondence, MatchSet, Stage};
pub use stats::{mapping_stats, schema_stats, MappingStats, SchemaStats};

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data_type: Option<String>,
    pub description: String,
    pub is_primary_key: bool,
}

impl Column {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            data_type: None,
            description: String::new(),
            is_primary_key: false,
        }
    }

    pub fn typed(mut self, data_type: impl Into<String>) -> Self {
        self.data_type = Some(data_type.into());
        self
    }

    pub fn described(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn primary_key(mut self) -> Self {
        self.is_primary_key = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForeignKey {
    pub column: String,
    pub ref_table: String,
    pub ref_column: String,
}

impl ForeignKey {
    pub fn new(
        column: impl Into<String>,
        ref_table: impl Into<String>,
        ref_column: impl Into<String>,
    ) -> Self {
        Self {
            column: column.into(),
            ref_table: ref_table.into(),
            ref_column: ref_column.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub description: String,
    pub columns: Vec<Column>,
    pub foreign_keys: Vec<ForeignKey>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Self {
        Self {
            name: name.into(),
            description: String::new(),
            columns,
            foreign_keys: Vec::new(),
        }
    }

    pub fn described(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn with_fk(
        mut self,
        column: impl Into<String>,
        ref_table: impl Into<String>,
        ref_column: impl Into<String>,
    ) -> Self {
        self.foreign_keys
            .push(ForeignKey::new(column, ref_table, ref_column));
        self
    }

    /// Exact spelling wins over a case-insensitive match.
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .or_else(|| self.columns.iter().find(|c| ident_eq(&c.name, name)))
    }

    /// First declared foreign key on `column`.
    pub fn foreign_key(&self, column: &str) -> Option<&ForeignKey> {
        self.foreign_keys
            .iter()
            .find(|fk| ident_eq(&fk.column, column))
    }

    pub fn is_foreign_key(&self, column: &str) -> bool {
        self.foreign_key(column).is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub name: String,
    pub tables: Vec<Table>,
}

impl Schema {
    /// Builds and validates a schema.
    pub fn new(name: impl Into<String>, tables: Vec<Table>) -> Result<Self, ValidationError> {
        let schema = Self {
            name: name.into(),
            tables,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables
            .iter()
            .find(|t| t.name == name)
            .or_else(|| self.tables.iter().find(|t| ident_eq(&t.name, name)))
    }

    /// Resolves a reference, returning it in the schema's own spelling.
    pub fn resolve(&self, table: &str, column: &str) -> Option<ColumnRef> {
        let t = self.table(table)?;
        let c = t.column(column)?;
        Some(ColumnRef::new(&t.name, &c.name))
    }

    pub fn column_refs(&self) -> impl Iterator<Item = ColumnRef> + '_ {
        self.tables
            .iter()
            .flat_map(|t| t.columns.iter().map(move |c| ColumnRef::new(&t.name, &c.name)))
    }

    pub fn column_count(&self) -> usize {
        self.tables.iter().map(|t| t.columns.len()).sum()
    }

    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let mut violations = Vec::new();
        let mut table_names = BTreeSet::new();
        for table in &self.tables {
            if table.name.trim().is_empty() {
                violations.push("table with empty name".to_string());
            } else if !table_names.insert(ident_key(&table.name)) {
                violations.push(format!("duplicate table name {:?}", table.name));
            }
            if table.columns.is_empty() {
                violations.push(format!("table {:?} has no columns", table.name));
            }
            let mut column_names = BTreeSet::new();
            for column in &table.columns {
                if column.name.trim().is_empty() {
                    violations.push(format!("table {:?} has a column with empty name", table.name));
                } else if !column_names.insert(ident_key(&column.name)) {
                    violations.push(format!(
                        "duplicate column name {:?} in table {:?}",
                        column.name, table.name
                    ));
                }
            }
            for fk in &table.foreign_keys {
                self.check_foreign_key(table, fk, &mut violations);
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ValidationError::new(violations))
        }
    }

    fn check_foreign_key(&self, table: &Table, fk: &ForeignKey, violations: &mut Vec<String>) {
        let label = format!(
            "foreign key {}.{} -> {}.{}",
            table.name, fk.column, fk.ref_table, fk.ref_column
        );
        if table.column(&fk.column).is_none() {
            violations.push(format!("{label}: column {:?} not in table", fk.column));
        }
        let Some(ref_table) = self.table(&fk.ref_table) else {
            violations.push(format!("{label}: dangling reference, no table {:?}", fk.ref_table));
            return;
        };
        match ref_table.column(&fk.ref_column) {
            None => violations.push(format!(
                "{label}: dangling reference, no column {:?} in {:?}",
                fk.ref_column, fk.ref_table
            )),
            Some(c) if !c.is_primary_key => {
                violations.push(format!("{label}: referenced column is not a primary key"))
            }
            Some(_) => {}
        }
        if ident_eq(&ref_table.name, &table.name) && ident_eq(&fk.ref_column, &fk.column) {
            violations.push(format!("{label}: column references itself"));
        }
    }
}

/// A `table.column` reference. Equality, ordering and hashing use the
/// case-insensitive key, so `Orders.ID` and `orders.id` are the same column.
#[derive(Clone, serde::Serialize)]
pub struct ColumnRef {
    table: String,
    column: String,
    #[serde(skip)]
    key: String,
}

impl ColumnRef {
    pub fn new(table: impl Into<String>, column: impl Into<String>) -> Self {
        let table = table.into();
        let column = column.into();
        let key = format!("{}.{}", ident_key(&table), ident_key(&column));
        Self { table, column, key }
    }

    pub fn table(&self) -> &str {
        &self.table
    }

    pub fn column(&self) -> &str {
        &self.column
    }

    /// Lowercased `table.column`, the tie-break order used everywhere.
    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn table_key(&self) -> String {
        ident_key(&self.table)
    }
}

impl PartialEq for ColumnRef {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for ColumnRef {}

impl PartialOrd for ColumnRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ColumnRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl core::hash::Hash for ColumnRef {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl fmt::Debug for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.table, self.column)
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.table, self.column)
    }
}
