//! Schema-matching engine.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches the
//! outside world goes through a trait: [`gateway::CompletionClient`] for
//! language models, [`embedding::EmbeddingProvider`] for vectors and
//! [`pipeline::Clock`] for timings. The `schemamatch` crate provides the
//! std implementations, file IO and the CLI.
//!
//! Module map:
//! - [`schema`]: relational model, file documents, validation, statistics.
//! - [`serializer`]: prompt renders and word counting.
//! - [`baseline`]: lexical, similarity flooding, Cupid-style and composite matchers.
//! - [`embedding`]: local hashed embedder, cosine, top-k table retrieval.
//! - [`gateway`]: prompts, structured response parsing, mock and oracle clients.
//! - [`pipeline`]: rollup, table selection, column matching, drilldown.
//! - [`eval`]: FK-to-PK canonical F1, ablation and scalability runners.
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod baseline;
pub mod diag;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod gateway;
pub mod pipeline;
pub mod schema;
pub mod serializer;
mod text;

pub use error::{Error, Result};
