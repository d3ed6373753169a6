use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schemamatch_core::embedding::{embed_text, rank_tables_topk, EmbeddingProvider, LocalEmbedder};
use schemamatch_core::schema::{Column, Table};
use schemamatch_core::serializer::{serialize_table, ElementConfig};

const WORDS: &[&str] = &[
    "customer", "account", "balance", "currency", "code", "party", "ledger", "entry", "visit", "patient",
    "person", "date", "amount", "type", "status", "name", "address", "zip", "city", "measure", "value",
    "unit", "order", "item", "price", "id",
];

fn random_table(rng: &mut ChaCha8Rng, name: String) -> Table {
    let n = rng.gen_range(1..6);
    let cols = (0..n)
        .map(|i| {
            let a = WORDS.choose(rng).unwrap();
            let b = WORDS.choose(rng).unwrap();
            Column::new(format!("{a}_{b}_{i}")).described(format!("{b} of the {a}"))
        })
        .collect();
    Table::new(name, cols).described(WORDS.choose(rng).unwrap().to_string())
}

/// Independent reference: dot products of normalized vectors, full sort.
fn oracle_topk(source: &Table, targets: &[Table], k: usize, p: &LocalEmbedder) -> Vec<String> {
    let cfg = ElementConfig::all();
    let q = embed_text(p, &serialize_table(source, &cfg)).unwrap();
    let mut scored: Vec<(f64, String)> = targets
        .iter()
        .map(|t| {
            let d = embed_text(p, &serialize_table(t, &cfg)).unwrap();
            let dot: f64 = q.values().iter().zip(d.values()).map(|(a, b)| a * b).sum();
            (dot, t.name.clone())
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    scored.into_iter().take(k).map(|(_, n)| n).collect()
}

#[test]
fn topk_equals_exhaustive_sort_on_random_instances() {
    let p = LocalEmbedder::new(256).unwrap();
    assert_eq!(p.dim(), 256);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let targets: Vec<Table> = (0..50).map(|i| random_table(&mut rng, format!("t{i:02}"))).collect();
        let source = random_table(&mut rng, "src".into());
        for k in [1, 3, 5, 10, 50] {
            let got = rank_tables_topk(&source, &targets, k, &ElementConfig::all(), &p).unwrap();
            let want = oracle_topk(&source, &targets, k, &p);
            assert_eq!(got, want, "seed {seed} k {k}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn topk_is_prefix_of_topk_plus_one(seed in any::<u64>(), k in 1usize..20) {
        let p = LocalEmbedder::new(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let targets: Vec<Table> = (0..20).map(|i| random_table(&mut rng, format!("t{i:02}"))).collect();
        let source = random_table(&mut rng, "src".into());
        let cfg = ElementConfig::all();
        let a = rank_tables_topk(&source, &targets, k, &cfg, &p).unwrap();
        let b = rank_tables_topk(&source, &targets, k + 1, &cfg, &p).unwrap();
        prop_assert_eq!(a.len(), k.min(targets.len()));
        prop_assert_eq!(&b[..a.len()], &a[..]);
    }
}

#[test]
fn k_zero_is_rejected() {
    let p = LocalEmbedder::new(16).unwrap();
    let t = Table::new("t", vec![Column::new("a")]);
    assert!(rank_tables_topk(&t, std::slice::from_ref(&t), 0, &ElementConfig::all(), &p).is_err());
}
