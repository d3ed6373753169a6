//! Embedding provider boundary, the hashed 3-gram local embedder, cosine
//! similarity and top-k target-table retrieval.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::hash::Hasher;
use core::sync::atomic::{AtomicUsize, Ordering};

use fnv::FnvHasher;

use crate::error::Error;
use crate::schema::Table;
use crate::serializer::{serialize_table, ElementConfig};
use crate::text::{ident_key, normalize_name, trigrams};

pub const DEFAULT_DIM: usize = 256;

/// Unit-length vector, or the flagged zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    values: Vec<f64>,
    zero: bool,
}

impl EmbeddingVector {
    /// L2-normalizes `values`; an all-zero input stays zero and is flagged.
    pub fn from_raw(mut values: Vec<f64>) -> Result<Self, Error> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Provider("embedding has non-finite entries".into()));
        }
        let norm = libm::sqrt(values.iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            return Ok(Self { values, zero: true });
        }
        for v in &mut values {
            *v /= norm;
        }
        Ok(Self { values, zero: false })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            values: vec![0.0; dim],
            zero: true,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }
}

/// Must return the same vector for the same text within a run.
pub trait EmbeddingProvider {
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> Result<EmbeddingVector, Error>;
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector, Error> {
        (**self).embed(text)
    }
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for alloc::boxed::Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector, Error> {
        (**self).embed(text)
    }
}

/// Term frequencies of hashed character 3-grams over the normalized text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalEmbedder {
    dim: usize,
}

impl LocalEmbedder {
    pub fn new(dim: usize) -> Result<Self, Error> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        Ok(Self { dim })
    }
}

impl Default for LocalEmbedder {
    fn default() -> Self {
        Self { dim: DEFAULT_DIM }
    }
}

impl EmbeddingProvider for LocalEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector, Error> {
        let mut counts = vec![0.0; self.dim];
        for gram in trigrams(&normalize_name(text)) {
            let mut h = FnvHasher::default();
            h.write(gram.as_bytes());
            counts[(h.finish() % self.dim as u64) as usize] += 1.0;
        }
        EmbeddingVector::from_raw(counts)
    }
}

/// Retries a provider and optionally degrades to the local embedder.
pub struct RetryingProvider<P> {
    inner: P,
    retries: usize,
    fallback: Option<LocalEmbedder>,
    degraded: AtomicUsize,
}

impl<P: EmbeddingProvider> RetryingProvider<P> {
    pub fn new(inner: P, retries: usize, fallback: bool) -> Self {
        let dim = inner.dim();
        Self {
            inner,
            retries,
            fallback: fallback.then_some(LocalEmbedder { dim }),
            degraded: AtomicUsize::new(0),
        }
    }

    /// Texts served by the fallback so far.
    pub fn degraded_count(&self) -> usize {
        self.degraded.load(Ordering::Relaxed)
    }
}

impl<P: EmbeddingProvider> EmbeddingProvider for RetryingProvider<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector, Error> {
        let mut last = None;
        for _ in 0..=self.retries {
            match self.inner.embed(text) {
                Ok(v) => return Ok(v),
                Err(e) => last = Some(e),
            }
        }
        let err = last.expect("at least one attempt");
        match &self.fallback {
            Some(local) => {
                self.degraded.fetch_add(1, Ordering::Relaxed);
                local.embed(text)
            }
            None => Err(err),
        }
    }
}

pub fn embed_text(provider: &dyn EmbeddingProvider, text: &str) -> Result<EmbeddingVector, Error> {
    let v = provider.embed(text)?;
    if v.dim() != provider.dim() {
        return Err(Error::DimMismatch {
            left: v.dim(),
            right: provider.dim(),
        });
    }
    Ok(v)
}

/// Inner product of unit vectors; 0 when either side is the zero vector.
pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, Error> {
    if u.dim() != v.dim() {
        return Err(Error::DimMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    if u.is_zero() || v.is_zero() {
        return Ok(0.0);
    }
    let dot: f64 = u.values.iter().zip(&v.values).map(|(a, b)| a * b).sum();
    Ok(dot.clamp(-1.0, 1.0))
}

/// All targets with their cosine to `source`, best first, ties by name.
pub fn rank_tables(
    source: &Table,
    targets: &[Table],
    cfg: &ElementConfig,
    provider: &dyn EmbeddingProvider,
) -> Result<Vec<(String, f64)>, Error> {
    let query = embed_text(provider, &serialize_table(source, cfg))?;
    let mut scored = Vec::with_capacity(targets.len());
    for t in targets {
        let doc = embed_text(provider, &serialize_table(t, cfg))?;
        scored.push((t.name.clone(), cosine(&query, &doc)?));
    }
    scored.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| ident_key(&a.0).cmp(&ident_key(&b.0)))
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(scored)
}

pub fn rank_tables_topk(
    source: &Table,
    targets: &[Table],
    k: usize,
    cfg: &ElementConfig,
    provider: &dyn EmbeddingProvider,
) -> Result<Vec<String>, Error> {
    if k == 0 {
        return Err(Error::Config(format!("top-k needs k >= 1, got {k}")));
    }
    let mut ranked = rank_tables(source, targets, cfg, provider)?;
    ranked.truncate(k);
    Ok(ranked.into_iter().map(|(name, _)| name).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::Column;

    #[test]
    fn empty_text_is_flagged_zero() {
        let v = LocalEmbedder::default().embed("").unwrap();
        assert!(v.is_zero());
        assert_eq!(v.dim(), DEFAULT_DIM);
        assert_eq!(cosine(&v, &v).unwrap(), 0.0);
    }

    #[test]
    fn local_embedder_is_deterministic_and_unit() {
        let e = LocalEmbedder::default();
        let a = e.embed("customer account balance").unwrap();
        assert_eq!(a, e.embed("customer account balance").unwrap());
        let norm: f64 = a.values().iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!((cosine(&a, &a).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn separator_styles_embed_identically() {
        let e = LocalEmbedder::default();
        let c = cosine(&e.embed("currency code").unwrap(), &e.embed("currency_code").unwrap()).unwrap();
        assert_eq!(c, 1.0);
    }

    #[test]
    fn one_hot_vectors_are_orthogonal() {
        let u = EmbeddingVector::from_raw(vec![1.0, 0.0, 0.0]).unwrap();
        let v = EmbeddingVector::from_raw(vec![0.0, 3.0, 0.0]).unwrap();
        assert_eq!(cosine(&u, &v).unwrap(), 0.0);
        let w = EmbeddingVector::from_raw(vec![0.0, 1.0]).unwrap();
        assert!(matches!(cosine(&u, &w), Err(Error::DimMismatch { left: 3, right: 2 })));
        assert!(EmbeddingVector::from_raw(vec![f64::NAN]).is_err());
    }

    #[test]
    fn identical_table_ranks_first() {
        let src = Table::new("orders", vec![Column::new("order_id"), Column::new("total")]);
        let targets = vec![
            Table::new("customers", vec![Column::new("name")]),
            src.clone(),
            Table::new("order_items", vec![Column::new("order_id"), Column::new("qty")]),
        ];
        let cfg = ElementConfig::all();
        let e = LocalEmbedder::default();
        assert_eq!(rank_tables_topk(&src, &targets, 1, &cfg, &e).unwrap(), ["orders"]);
        let all = rank_tables_topk(&src, &targets, 10, &cfg, &e).unwrap();
        assert_eq!(all.len(), 3);
        assert!(rank_tables_topk(&src, &targets, 0, &cfg, &e).is_err());
    }

    struct Flaky {
        failures: AtomicUsize,
    }

    impl EmbeddingProvider for Flaky {
        fn dim(&self) -> usize {
            8
        }

        fn embed(&self, _: &str) -> Result<EmbeddingVector, Error> {
            if self.failures.fetch_sub(1, Ordering::Relaxed) > 0 {
                Err(Error::Provider("unavailable".into()))
            } else {
                EmbeddingVector::from_raw(vec![1.0; 8])
            }
        }
    }

    #[test]
    fn retries_then_succeeds_or_degrades() {
        let p = RetryingProvider::new(Flaky { failures: AtomicUsize::new(2) }, 2, false);
        assert!(p.embed("x").is_ok());

        let p = RetryingProvider::new(Flaky { failures: AtomicUsize::new(5) }, 1, false);
        assert!(matches!(p.embed("x"), Err(Error::Provider(_))));

        let p = RetryingProvider::new(Flaky { failures: AtomicUsize::new(5) }, 1, true);
        let v = p.embed("abc").unwrap();
        assert_eq!(v.dim(), 8);
        assert_eq!(p.degraded_count(), 1);
    }
}
