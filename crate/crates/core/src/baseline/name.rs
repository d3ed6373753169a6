use crate::text::{gram_counts, normalize_name};

/// Multiset Jaccard over character 3-grams of the normalized names.
///
/// Exactly 1.0 iff the normalized forms are equal; distinct forms whose gram
/// multisets coincide are held just below 1.
pub fn name_similarity(a: &str, b: &str) -> f64 {
    let na = normalize_name(a);
    let nb = normalize_name(b);
    if na == nb {
        return 1.0;
    }
    let ga = gram_counts(&na);
    let gb = gram_counts(&nb);
    let mut inter = 0usize;
    let mut union = 0usize;
    for (g, &ca) in &ga {
        let cb = gb.get(g).copied().unwrap_or(0);
        inter += ca.min(cb);
        union += ca.max(cb);
    }
    union += gb
        .iter()
        .filter(|(g, _)| !ga.contains_key(*g))
        .map(|(_, &c)| c)
        .sum::<usize>();
    if union == 0 {
        return 0.0;
    }
    let j = inter as f64 / union as f64;
    j.min(1.0 - 1e-9)
}
