//! Identifier keys, name normalization and character 3-grams shared by the
//! lexical matchers and the local embedder.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

/// Comparison key for identifiers: trimmed and lowercased.
pub(crate) fn ident_key(s: &str) -> String {
    s.trim().to_lowercase()
}

pub(crate) fn ident_eq(a: &str, b: &str) -> bool {
    ident_key(a) == ident_key(b)
}

/// Lowercase, split on non-alphanumerics and camelCase boundaries, join the
/// tokens with single spaces.
pub(crate) fn normalize_name(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut tokens: Vec<String> = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if !current.is_empty() {
                tokens.push(core::mem::take(&mut current));
            }
            continue;
        }
        if c.is_uppercase() && !current.is_empty() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if prev.is_lowercase() || prev.is_numeric() || (prev.is_uppercase() && next_lower) {
                tokens.push(core::mem::take(&mut current));
            }
        }
        current.extend(c.to_lowercase());
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens.join(" ")
}

const PAD: char = '$';

/// Character 3-grams of an already normalized string. Strings shorter than
/// three characters yield one gram padded on the right.
pub(crate) fn trigrams(normalized: &str) -> Vec<String> {
    let mut chars: Vec<char> = normalized.chars().collect();
    if chars.is_empty() {
        return Vec::new();
    }
    while chars.len() < 3 {
        chars.push(PAD);
    }
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

pub(crate) fn gram_counts(normalized: &str) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for g in trigrams(normalized) {
        *counts.entry(g).or_insert(0) += 1;
    }
    counts
}
