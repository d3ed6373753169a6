//! Prompt renders of tables and schemas, and word-count sizing.
//!
//! Layout, one line per element:
//!
//! ```text
//! table accounts — deposit accounts
//! column acct_id : integer — surrogate key [PK]
//! column cust_id : integer — owner [FK→customers.cust_id]
//! ```
//!
//! Types, descriptions and key markers appear only when the matching
//! [`ElementConfig`] flag is set; names always appear.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::Error;
use crate::schema::{Schema, Table};

/// Which schema elements go into a render.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct ElementConfig {
    pub include_descriptions: bool,
    pub include_keys: bool,
    pub include_types: bool,
}

impl Default for ElementConfig {
    fn default() -> Self {
        Self::all()
    }
}

impl ElementConfig {
    pub const fn all() -> Self {
        Self {
            include_descriptions: true,
            include_keys: true,
            include_types: true,
        }
    }

    pub const fn names_only() -> Self {
        Self {
            include_descriptions: false,
            include_keys: false,
            include_types: false,
        }
    }

    /// Names are the minimal content and are always rendered.
    pub const fn include_names(&self) -> bool {
        true
    }

    /// Flag-wise `self ≤ other`.
    pub fn is_subset_of(&self, other: &ElementConfig) -> bool {
        (!self.include_descriptions || other.include_descriptions)
            && (!self.include_keys || other.include_keys)
            && (!self.include_types || other.include_types)
    }

    /// Parses a comma list drawn from `name`, `desc`, `keys`, `types`.
    pub fn parse_list(list: &str) -> Result<Self, Error> {
        let mut cfg = Self::names_only();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "name" | "names" => {}
                "desc" | "description" | "descriptions" => cfg.include_descriptions = true,
                "keys" | "key" => cfg.include_keys = true,
                "types" | "type" => cfg.include_types = true,
                other => return Err(Error::Config(format!("unknown schema element {other:?}"))),
            }
        }
        Ok(cfg)
    }

    /// `name+desc+keys+types` style label used in reports.
    pub fn label(&self) -> String {
        let mut parts = Vec::from(["name"]);
        if self.include_descriptions {
            parts.push("desc");
        }
        if self.include_keys {
            parts.push("keys");
        }
        if self.include_types {
            parts.push("types");
        }
        parts.join("+")
    }
}

/// Word budget for a single prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BudgetConfig {
    pub max_words_per_prompt: usize,
    pub overhead_words: usize,
}

impl BudgetConfig {
    pub fn new(max_words_per_prompt: usize, overhead_words: usize) -> Result<Self, Error> {
        let budget = Self {
            max_words_per_prompt,
            overhead_words,
        };
        budget.validate()?;
        Ok(budget)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.max_words_per_prompt == 0 || self.max_words_per_prompt <= self.overhead_words {
            return Err(Error::Config(format!(
                "budget of {} words must exceed the {} overhead words",
                self.max_words_per_prompt, self.overhead_words
            )));
        }
        Ok(())
    }

    /// Words left for table renders.
    pub fn content_words(&self) -> usize {
        self.max_words_per_prompt - self.overhead_words
    }
}

pub fn serialize_table(t: &Table, cfg: &ElementConfig) -> String {
    let mut out = String::new();
    let _ = write!(out, "table {}", t.name);
    if cfg.include_descriptions && !t.description.is_empty() {
        let _ = write!(out, " — {}", t.description);
    }
    for c in &t.columns {
        let _ = write!(out, "\ncolumn {}", c.name);
        if cfg.include_types {
            if let Some(ty) = c.data_type.as_deref().filter(|ty| !ty.is_empty()) {
                let _ = write!(out, " : {ty}");
            }
        }
        if cfg.include_descriptions && !c.description.is_empty() {
            let _ = write!(out, " — {}", c.description);
        }
        if cfg.include_keys {
            if c.is_primary_key {
                out.push_str(" [PK]");
            }
            for fk in t.foreign_keys.iter().filter(|fk| crate::text::ident_eq(&fk.column, &c.name)) {
                let _ = write!(out, " [FK→{}.{}]", fk.ref_table, fk.ref_column);
            }
        }
    }
    out
}

/// Table renders in schema order, separated by blank lines.
pub fn serialize_schema(s: &Schema, cfg: &ElementConfig) -> String {
    s.tables
        .iter()
        .map(|t| serialize_table(t, cfg))
        .collect::<Vec<_>>()
        .join("\n\n")
}

/// Number of maximal runs of non-whitespace characters.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::Column;
    use alloc::vec;

    #[test]
    fn minimal_render() {
        let t = Table::new("t", vec![Column::new("x")]);
        let text = serialize_table(&t, &ElementConfig::names_only());
        assert_eq!(text, "table t\ncolumn x");
        assert_eq!(text.split_whitespace().collect::<Vec<_>>(), ["table", "t", "column", "x"]);
    }

    #[test]
    fn keys_add_pk_marker() {
        let t = Table::new("t", vec![Column::new("x").primary_key()]);
        let cfg = ElementConfig { include_keys: true, ..ElementConfig::names_only() };
        assert_eq!(serialize_table(&t, &cfg), "table t\ncolumn x [PK]");
    }

    #[test]
    fn full_layout() {
        let t = Table::new(
            "orders",
            vec![
                Column::new("id").typed("int").described("order number").primary_key(),
                Column::new("cust").typed("int"),
            ],
        )
        .described("customer orders")
        .with_fk("cust", "customers", "id");
        assert_eq!(
            serialize_table(&t, &ElementConfig::all()),
            "table orders — customer orders\ncolumn id : int — order number [PK]\ncolumn cust : int [FK→customers.id]"
        );
    }

    #[test]
    fn word_counts() {
        assert_eq!(word_count(""), 0);
        assert_eq!(word_count("a  b\nc"), 3);
        assert_eq!(word_count(" \t\u{2003}x\u{00a0}y "), 2);
    }

    #[test]
    fn element_lists() {
        assert_eq!(ElementConfig::parse_list("name").unwrap(), ElementConfig::names_only());
        assert_eq!(ElementConfig::parse_list("name,desc,keys,types").unwrap(), ElementConfig::all());
        assert_eq!(ElementConfig::parse_list("desc, keys").unwrap().label(), "name+desc+keys");
        assert!(ElementConfig::parse_list("name,colour").is_err());
        assert!(ElementConfig::names_only().is_subset_of(&ElementConfig::all()));
        assert!(!ElementConfig::all().is_subset_of(&ElementConfig::names_only()));
    }

    #[test]
    fn budget_must_exceed_overhead() {
        assert!(BudgetConfig::new(10, 10).is_err());
        assert!(BudgetConfig::new(0, 0).is_err());
        assert_eq!(BudgetConfig::new(10, 4).unwrap().content_words(), 6);
    }
}
