use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::serializer::BudgetConfig;

/// Greedy, order-preserving split of `items` so that every batch satisfies
/// `fixed_cost + overhead + Σ measure ≤ max_words_per_prompt`.
///
/// Without a budget everything goes into one batch. Fails with
/// [`Error::BudgetTooSmall`] naming the first item that cannot fit even
/// alone.
pub fn split_batches<'a, T>(
    items: &'a [T],
    budget: Option<&BudgetConfig>,
    fixed_cost: usize,
    measure: impl Fn(&T) -> usize,
    name: impl Fn(&T) -> String,
) -> Result<Vec<&'a [T]>, Error> {
    if items.is_empty() {
        return Ok(Vec::new());
    }
    let Some(budget) = budget else {
        return Ok(alloc::vec![items]);
    };
    let limit = budget.max_words_per_prompt;
    let base = fixed_cost + budget.overhead_words;
    let sizes: Vec<usize> = items.iter().map(&measure).collect();
    if let Some((i, &size)) = sizes.iter().enumerate().find(|(_, &s)| base + s > limit) {
        return Err(Error::BudgetTooSmall {
            item: name(&items[i]),
            needed: base + size,
            limit,
        });
    }
    let mut batches = Vec::new();
    let mut start = 0;
    let mut used = 0;
    for (i, &size) in sizes.iter().enumerate() {
        if i > start && base + used + size > limit {
            batches.push(&items[start..i]);
            start = i;
            used = 0;
        }
        used += size;
    }
    batches.push(&items[start..]);
    Ok(batches)
}
