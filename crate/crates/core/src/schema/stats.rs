use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;

use serde::Serialize;

use super::{MatchSet, Schema};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemaStats {
    pub table_count: usize,
    pub column_count: usize,
    pub pk_count: usize,
    pub fk_count: usize,
    pub avg_columns_per_table: f64,
}

/// Counts primary-key columns and foreign-key columns (a column with several
/// declared references counts once).
pub fn schema_stats(s: &Schema) -> SchemaStats {
    let table_count = s.tables.len();
    let column_count = s.column_count();
    let pk_count = s
        .tables
        .iter()
        .flat_map(|t| &t.columns)
        .filter(|c| c.is_primary_key)
        .count();
    let fk_count = s
        .tables
        .iter()
        .map(|t| t.columns.iter().filter(|c| t.is_foreign_key(&c.name)).count())
        .sum();
    SchemaStats {
        table_count,
        column_count,
        pk_count,
        fk_count,
        avg_columns_per_table: if table_count == 0 {
            0.0
        } else {
            column_count as f64 / table_count as f64
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingStats {
    pub avg_target_tables_per_source_table: f64,
    pub one_to_one_ratio: f64,
    pub total_pairs: usize,
}

/// Dataset complexity of a gold mapping. The schemas are accepted for
/// symmetry with the other statistics; every pair is assumed resolved.
pub fn mapping_stats(gold: &MatchSet, _source: &Schema, _target: &Schema) -> MappingStats {
    let total_pairs = gold.len();
    if total_pairs == 0 {
        return MappingStats {
            avg_target_tables_per_source_table: 0.0,
            one_to_one_ratio: 0.0,
            total_pairs: 0,
        };
    }
    let mut targets_per_source: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut source_uses: BTreeMap<&str, usize> = BTreeMap::new();
    let mut target_uses: BTreeMap<&str, usize> = BTreeMap::new();
    for c in gold {
        targets_per_source
            .entry(c.source.table_key())
            .or_default()
            .insert(c.target.table_key());
        *source_uses.entry(c.source.key()).or_insert(0) += 1;
        *target_uses.entry(c.target.key()).or_insert(0) += 1;
    }
    let mapped: usize = targets_per_source.values().map(BTreeSet::len).sum();
    let simple = gold
        .iter()
        .filter(|c| source_uses[c.source.key()] == 1 && target_uses[c.target.key()] == 1)
        .count();
    MappingStats {
        avg_target_tables_per_source_table: mapped as f64 / targets_per_source.len() as f64,
        one_to_one_ratio: simple as f64 / total_pairs as f64,
        total_pairs,
    }
}
