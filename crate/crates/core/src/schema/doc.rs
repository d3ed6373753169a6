//! JSON documents for schema files (`.json`) and mapping files
//! (`.mapping.json`). Unknown fields are accepted and reported as warnings.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Column, Correspondence, ForeignKey, MatchSet, Schema, Stage, Table};
use crate::diag::Warnings;
use crate::error::{Error, ValidationError};

type Extra = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaDoc {
    pub name: String,
    pub tables: Vec<TableDoc>,
    #[serde(flatten, skip_serializing)]
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub columns: Vec<ColumnDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub foreign_keys: Option<Vec<ForeignKeyDoc>>,
    #[serde(flatten, skip_serializing)]
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDoc {
    pub name: String,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub data_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primary_key: Option<bool>,
    #[serde(flatten, skip_serializing)]
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForeignKeyDoc {
    pub column: String,
    pub ref_table: String,
    pub ref_column: String,
    #[serde(flatten, skip_serializing)]
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingDoc {
    pub pairs: Vec<PairDoc>,
    #[serde(flatten, skip_serializing)]
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDoc {
    pub source_table: String,
    pub source_column: String,
    pub target_table: String,
    pub target_column: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    #[serde(flatten, skip_serializing)]
    pub extra: Extra,
}

fn warn_unknown(extra: &Extra, path: &str, warnings: &mut Warnings) {
    for key in extra.keys() {
        warnings.push("schema_core", format!("ignoring unknown field {path}.{key}"));
    }
}

fn parse<T: for<'de> Deserialize<'de>>(json: &str) -> Result<T, Error> {
    serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses and validates a schema file.
pub fn load_schema(json: &str, warnings: &mut Warnings) -> Result<Schema, Error> {
    load_schema_doc(parse(json)?, warnings)
}

pub fn load_schema_doc(doc: SchemaDoc, warnings: &mut Warnings) -> Result<Schema, Error> {
    warn_unknown(&doc.extra, "schema", warnings);
    let mut tables = Vec::with_capacity(doc.tables.len());
    for t in doc.tables {
        let path = format!("tables[{}]", t.name);
        warn_unknown(&t.extra, &path, warnings);
        let mut columns = Vec::with_capacity(t.columns.len());
        for c in t.columns {
            warn_unknown(&c.extra, &format!("{path}.columns[{}]", c.name), warnings);
            columns.push(Column {
                name: c.name,
                data_type: c.data_type,
                description: c.description.unwrap_or_default(),
                is_primary_key: c.primary_key.unwrap_or(false),
            });
        }
        let mut foreign_keys = Vec::new();
        for fk in t.foreign_keys.unwrap_or_default() {
            warn_unknown(&fk.extra, &format!("{path}.foreign_keys[{}]", fk.column), warnings);
            foreign_keys.push(ForeignKey {
                column: fk.column,
                ref_table: fk.ref_table,
                ref_column: fk.ref_column,
            });
        }
        tables.push(Table {
            name: t.name,
            description: t.description.unwrap_or_default(),
            columns,
            foreign_keys,
        });
    }
    Ok(Schema::new(doc.name, tables)?)
}

pub fn schema_to_doc(schema: &Schema) -> SchemaDoc {
    SchemaDoc {
        name: schema.name.clone(),
        tables: schema
            .tables
            .iter()
            .map(|t| TableDoc {
                name: t.name.clone(),
                description: non_empty(&t.description),
                columns: t
                    .columns
                    .iter()
                    .map(|c| ColumnDoc {
                        name: c.name.clone(),
                        data_type: c.data_type.clone(),
                        description: non_empty(&c.description),
                        primary_key: c.is_primary_key.then_some(true),
                        extra: Extra::new(),
                    })
                    .collect(),
                foreign_keys: (!t.foreign_keys.is_empty()).then(|| {
                    t.foreign_keys
                        .iter()
                        .map(|fk| ForeignKeyDoc {
                            column: fk.column.clone(),
                            ref_table: fk.ref_table.clone(),
                            ref_column: fk.ref_column.clone(),
                            extra: Extra::new(),
                        })
                        .collect()
                }),
                extra: Extra::new(),
            })
            .collect(),
        extra: Extra::new(),
    }
}

pub fn schema_to_json(schema: &Schema) -> String {
    serde_json::to_string_pretty(&schema_to_doc(schema)).expect("schema documents always serialize")
}

fn non_empty(s: &str) -> Option<String> {
    (!s.is_empty()).then(|| s.to_string())
}

/// Parses a mapping file and resolves every pair against the two schemas.
/// Duplicate pairs collapse, each one adding a warning.
pub fn load_ground_truth(
    json: &str,
    source: &Schema,
    target: &Schema,
    warnings: &mut Warnings,
) -> Result<MatchSet, Error> {
    load_ground_truth_doc(parse(json)?, source, target, warnings)
}

pub fn load_ground_truth_doc(
    doc: MappingDoc,
    source: &Schema,
    target: &Schema,
    warnings: &mut Warnings,
) -> Result<MatchSet, Error> {
    warn_unknown(&doc.extra, "mapping", warnings);
    let mut violations = Vec::new();
    let mut set = MatchSet::new();
    for (i, p) in doc.pairs.into_iter().enumerate() {
        warn_unknown(&p.extra, &format!("pairs[{i}]"), warnings);
        let s = source.resolve(&p.source_table, &p.source_column);
        let t = target.resolve(&p.target_table, &p.target_column);
        if s.is_none() {
            violations.push(format!(
                "pairs[{i}]: source column {}.{} not in schema {:?}",
                p.source_table, p.source_column, source.name
            ));
        }
        if t.is_none() {
            violations.push(format!(
                "pairs[{i}]: target column {}.{} not in schema {:?}",
                p.target_table, p.target_column, target.name
            ));
        }
        if let (Some(s), Some(t)) = (s, t) {
            let mut c = Correspondence::new(s, t, p.stage.unwrap_or(Stage::Baseline));
            c.confidence = p.confidence;
            if !set.insert(c) {
                warnings.push("schema_core", format!("pairs[{i}]: duplicate pair collapsed"));
            }
        }
    }
    if violations.is_empty() {
        Ok(set)
    } else {
        Err(ValidationError::new(violations).into())
    }
}

/// Output mapping document; carries stage and confidence per pair.
pub fn mapping_to_doc(set: &MatchSet) -> MappingDoc {
    MappingDoc {
        pairs: set.iter().map(pair_doc).collect(),
        extra: Extra::new(),
    }
}

fn pair_doc(c: &Correspondence) -> PairDoc {
    PairDoc {
        source_table: c.source.table().to_string(),
        source_column: c.source.column().to_string(),
        target_table: c.target.table().to_string(),
        target_column: c.target.column().to_string(),
        stage: Some(c.stage),
        confidence: c.confidence,
        extra: Extra::new(),
    }
}

pub fn mapping_to_json(set: &MatchSet) -> String {
    serde_json::to_string_pretty(&mapping_to_doc(set)).expect("mapping documents always serialize")
}
