use alloc::format;

use super::{name_similarity, ScoreMatrix};
use crate::schema::{MatchSet, Schema};

/// Name similarity of `table.column` strings.
pub fn lexical_scores(source: &Schema, target: &Schema) -> ScoreMatrix {
    ScoreMatrix::from_fn(source, target, |s, t| {
        name_similarity(
            &format!("{}.{}", s.table(), s.column()),
            &format!("{}.{}", t.table(), t.column()),
        )
    })
}

pub fn lexical_match(source: &Schema, target: &Schema, threshold: f64) -> MatchSet {
    lexical_scores(source, target).select(threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{Column, ColumnRef, Table};
    use alloc::vec;

    #[test]
    fn identical_schemas_map_to_themselves() {
        let s = Schema::new(
            "s",
            vec![
                Table::new("orders", vec![Column::new("id"), Column::new("total_amount")]),
                Table::new("items", vec![Column::new("sku"), Column::new("qty")]),
            ],
        )
        .unwrap();
        let m = lexical_match(&s, &s, 0.9);
        assert_eq!(m.len(), 4);
        assert!(m.iter().all(|c| c.source == c.target));
    }

    #[test]
    fn disjoint_vocabularies_match_nothing() {
        let s = Schema::new("s", vec![Table::new("abc", vec![Column::new("def")])]).unwrap();
        let t = Schema::new("t", vec![Table::new("xyz", vec![Column::new("uvw")])]).unwrap();
        assert!(lexical_match(&s, &t, 0.5).is_empty());
        assert!(!lexical_match(&s, &t, 0.0).contains(&ColumnRef::new("a", "b"), &ColumnRef::new("c", "d")));
    }
}
