use alloc::collections::btree_map::{BTreeMap, Entry};

use serde::{Deserialize, Serialize};

use super::ColumnRef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Baseline,
    LlmMatch,
    Drilldown,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Baseline => "baseline",
            Stage::LlmMatch => "llm_match",
            Stage::Drilldown => "drilldown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correspondence {
    pub source: ColumnRef,
    pub target: ColumnRef,
    pub stage: Stage,
    pub confidence: Option<f64>,
}

impl Correspondence {
    pub fn new(source: ColumnRef, target: ColumnRef, stage: Stage) -> Self {
        Self {
            source,
            target,
            stage,
            confidence: None,
        }
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = Some(confidence.clamp(0.0, 1.0));
        self
    }
}

/// Correspondences with set semantics on `(source, target)`.
///
/// Iteration is ordered by source key, then target key. Re-inserting a pair
/// keeps the first occurrence and bumps [`MatchSet::duplicates`].
/// Equality compares the (source, target) keys only; stage and confidence
/// are annotations.
#[derive(Debug, Clone, Default)]
pub struct MatchSet {
    pairs: BTreeMap<(ColumnRef, ColumnRef), Correspondence>,
    duplicates: usize,
}

impl PartialEq for MatchSet {
    fn eq(&self, other: &Self) -> bool {
        self.pairs.keys().eq(other.pairs.keys())
    }
}

impl MatchSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the pair was already present.
    pub fn insert(&mut self, c: Correspondence) -> bool {
        match self.pairs.entry((c.source.clone(), c.target.clone())) {
            Entry::Occupied(_) => {
                self.duplicates += 1;
                false
            }
            Entry::Vacant(v) => {
                v.insert(c);
                true
            }
        }
    }

    pub fn contains(&self, source: &ColumnRef, target: &ColumnRef) -> bool {
        self.pairs.contains_key(&(source.clone(), target.clone()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn iter(&self) -> impl Iterator<Item = &Correspondence> {
        self.pairs.values()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&Correspondence) -> bool) {
        self.pairs.retain(|_, c| keep(c));
    }

    /// Pairs whose source column belongs to `table` (case-insensitive).
    pub fn for_source_table<'a>(
        &'a self,
        table: &'a str,
    ) -> impl Iterator<Item = &'a Correspondence> + 'a {
        let key = crate::text::ident_key(table);
        self.pairs
            .values()
            .filter(move |c| c.source.table_key() == key)
    }
}

impl Extend<Correspondence> for MatchSet {
    fn extend<I: IntoIterator<Item = Correspondence>>(&mut self, iter: I) {
        for c in iter {
            self.insert(c);
        }
    }
}

impl FromIterator<Correspondence> for MatchSet {
    fn from_iter<I: IntoIterator<Item = Correspondence>>(iter: I) -> Self {
        let mut set = MatchSet::new();
        set.extend(iter);
        set
    }
}

impl<'a> IntoIterator for &'a MatchSet {
    type Item = &'a Correspondence;
    type IntoIter = alloc::collections::btree_map::Values<'a, (ColumnRef, ColumnRef), Correspondence>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.values()
    }
}
