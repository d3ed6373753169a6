#![allow(dead_code)]

use schemamatch_core::diag::Warnings;
use schemamatch_core::schema::{load_ground_truth, load_schema, MatchSet, Schema};

pub const BANK1: &str = include_str!("../../../../fixtures/toy/toy_bank1.json");
pub const BANK2: &str = include_str!("../../../../fixtures/toy/toy_bank2.json");
pub const BANK_GOLD: &str = include_str!("../../../../fixtures/toy/toy_bank.mapping.json");
pub const CLINIC: &str = include_str!("../../../../fixtures/toy/toy_clinic.json");
pub const OMOP: &str = include_str!("../../../../fixtures/toy/toy_omop.json");
pub const CLINIC_GOLD: &str = include_str!("../../../../fixtures/toy/toy_clinic.mapping.json");
pub const ORACLE: &str = include_str!("../../../../fixtures/golden/oracle.json");

pub struct Pair {
    pub name: &'static str,
    pub source: Schema,
    pub target: Schema,
    pub gold: MatchSet,
}

fn pair(name: &'static str, s: &str, t: &str, g: &str) -> Pair {
    let mut w = Warnings::default();
    let source = load_schema(s, &mut w).unwrap();
    let target = load_schema(t, &mut w).unwrap();
    let gold = load_ground_truth(g, &source, &target, &mut w).unwrap();
    Pair { name, source, target, gold }
}

pub fn bank() -> Pair {
    pair("toy_bank", BANK1, BANK2, BANK_GOLD)
}

pub fn clinic() -> Pair {
    pair("toy_clinic", CLINIC, OMOP, CLINIC_GOLD)
}

pub fn pairs() -> [Pair; 2] {
    [bank(), clinic()]
}

pub fn oracle() -> serde_json::Value {
    serde_json::from_str(ORACLE).unwrap()
}

/// Sorted `[src_table, src_col, tgt_table, tgt_col]` rows of a match set.
pub fn rows(m: &MatchSet) -> Vec<[String; 4]> {
    let mut v: Vec<_> = m
        .iter()
        .map(|c| {
            [
                c.source.table().to_string(),
                c.source.column().to_string(),
                c.target.table().to_string(),
                c.target.column().to_string(),
            ]
        })
        .collect();
    v.sort();
    v
}

pub fn golden_rows(v: &serde_json::Value) -> Vec<[String; 4]> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let a = r.as_array().unwrap();
            core::array::from_fn(|i| a[i].as_str().unwrap().to_string())
        })
        .collect()
}
