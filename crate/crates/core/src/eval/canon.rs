use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::Error;
use crate::schema::{ColumnRef, Schema};

/// Follows foreign keys to the primary key they reference, transitively.
///
/// Non-FK columns map to themselves. A column with several declared
/// references follows the first. If the chain runs into a cycle, the
/// smallest `table.column` of the cycle is returned, which keeps the
/// function idempotent.
pub fn canonicalize_ref(c: &ColumnRef, s: &Schema) -> Result<ColumnRef, Error> {
    let mut current = s
        .resolve(c.table(), c.column())
        .ok_or_else(|| Error::Resolution(alloc::format!("{c} in schema {:?}", s.name)))?;
    let mut path: Vec<ColumnRef> = Vec::new();
    let mut seen = BTreeSet::new();
    loop {
        if !seen.insert(current.clone()) {
            let start = path.iter().position(|p| *p == current).expect("seen implies on path");
            return Ok(path[start..].iter().min().expect("cycle is non-empty").clone());
        }
        path.push(current.clone());
        let table = s.table(current.table()).expect("resolved");
        let Some(fk) = table.foreign_key(current.column()) else {
            return Ok(current);
        };
        match s.resolve(&fk.ref_table, &fk.ref_column) {
            Some(next) => current = next,
            None => return Ok(current),
        }
    }
}
