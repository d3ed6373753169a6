use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;

use serde::Serialize;

use super::canonicalize_ref;
use crate::error::Error;
use crate::schema::{ColumnRef, MatchSet, Schema};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// Keyed by the canonical source table.
    pub per_source_table: BTreeMap<String, Counts>,
}

impl EvalReport {
    fn from_counts(tp: usize, fp: usize, fn_: usize, per_source_table: BTreeMap<String, Counts>) -> Self {
        let precision = if tp + fp == 0 {
            if fn_ == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let recall = if tp + fn_ == 0 {
            1.0
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
            per_source_table,
        }
    }
}

type Pair = (ColumnRef, ColumnRef);

fn canonical_pairs(set: &MatchSet, source: &Schema, target: &Schema) -> Result<BTreeSet<Pair>, Error> {
    set.iter()
        .map(|c| Ok((canonicalize_ref(&c.source, source)?, canonicalize_ref(&c.target, target)?)))
        .collect()
}

/// Set-based precision, recall and F1 after mapping every FK column on both
/// sides of both sets to its referenced PK and deduplicating.
pub fn evaluate_f1(pred: &MatchSet, gold: &MatchSet, source: &Schema, target: &Schema) -> Result<EvalReport, Error> {
    let pred = canonical_pairs(pred, source, target)?;
    let gold = canonical_pairs(gold, source, target)?;
    let mut per_table: BTreeMap<String, Counts> = BTreeMap::new();
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for p in &pred {
        let entry = per_table.entry(p.0.table().into()).or_default();
        if gold.contains(p) {
            tp += 1;
            entry.tp += 1;
        } else {
            fp += 1;
            entry.fp += 1;
        }
    }
    for g in gold.difference(&pred) {
        fn_ += 1;
        per_table.entry(g.0.table().into()).or_default().fn_ += 1;
    }
    Ok(EvalReport::from_counts(tp, fp, fn_, per_table))
}
