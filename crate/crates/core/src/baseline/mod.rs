//! Non-LLM comparators.
//!
//! Every matcher first produces a [`ScoreMatrix`] over all
//! (source column, target column) pairs, then selects with the same rule:
//! per source column, the best-scoring target column is kept when its score
//! reaches the threshold; ties go to the lexicographically smallest target
//! `table.column`.

mod composite;
mod cupid;
mod flood;
mod lexical;
mod name;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::Error;
use crate::schema::{ColumnRef, Correspondence, MatchSet, Schema, Stage};

pub use composite::{composite_match, composite_scores};
pub use cupid::{cupid_match, cupid_scores, CupidConfig};
pub use flood::{
    build_pcg, flood, flood_scores, similarity_flood_match, EdgeLabel, ElementRef, FloodConfig,
    FloodOutcome, Pcg, PcgEdge, PcgNode, pcg_scores,
};
pub use lexical::{lexical_match, lexical_scores};
pub use name::name_similarity;

/// Dense row-major scores: one row per source column, one column per target
/// column, both in schema order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub sources: Vec<ColumnRef>,
    pub targets: Vec<ColumnRef>,
    pub scores: Vec<f64>,
}

impl ScoreMatrix {
    pub fn from_fn(
        source: &Schema,
        target: &Schema,
        mut score: impl FnMut(&ColumnRef, &ColumnRef) -> f64,
    ) -> Self {
        let sources: Vec<ColumnRef> = source.column_refs().collect();
        let targets: Vec<ColumnRef> = target.column_refs().collect();
        let mut scores = Vec::with_capacity(sources.len() * targets.len());
        for s in &sources {
            for t in &targets {
                scores.push(score(s, t));
            }
        }
        Self {
            sources,
            targets,
            scores,
        }
    }

    pub fn get(&self, source: usize, target: usize) -> f64 {
        self.scores[source * self.targets.len() + target]
    }

    pub fn row(&self, source: usize) -> &[f64] {
        let n = self.targets.len();
        &self.scores[source * n..(source + 1) * n]
    }

    /// Per-source argmax with lexicographic tie-break, kept iff ≥ threshold.
    pub fn select(&self, threshold: f64) -> MatchSet {
        let mut out = MatchSet::new();
        for (i, s) in self.sources.iter().enumerate() {
            let mut best: Option<usize> = None;
            for (j, &v) in self.row(i).iter().enumerate() {
                best = match best {
                    None => Some(j),
                    Some(b) => {
                        let bv = self.get(i, b);
                        if v > bv || (v == bv && self.targets[j] < self.targets[b]) {
                            Some(j)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            if let Some(b) = best {
                let v = self.get(i, b);
                if v >= threshold {
                    out.insert(
                        Correspondence::new(s.clone(), self.targets[b].clone(), Stage::Baseline)
                            .with_confidence(v),
                    );
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatcherId {
    Lexical,
    Flood,
    Cupid,
    Composite,
}

impl MatcherId {
    pub fn as_str(self) -> &'static str {
        match self {
            MatcherId::Lexical => "lexical",
            MatcherId::Flood => "flood",
            MatcherId::Cupid => "cupid",
            MatcherId::Composite => "composite",
        }
    }
}

impl FromStr for MatcherId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "lexical" => Ok(MatcherId::Lexical),
            "flood" => Ok(MatcherId::Flood),
            "cupid" => Ok(MatcherId::Cupid),
            "composite" => Ok(MatcherId::Composite),
            other => Err(Error::Config(format!("unknown matcher id {other:?}"))),
        }
    }
}

impl fmt::Display for MatcherId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
