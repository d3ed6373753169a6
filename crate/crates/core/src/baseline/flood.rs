//! Similarity flooding over a pairwise connectivity graph (PCG).
//!
//! Nodes pair a source element with a target element: every
//! (source table, target table) and every (source column, target column).
//! Update rule, applied to all nodes at once:
//!
//! ```text
//! σ'(p) = σ0(p) + σ(p) + Σ_{q→p} σ(q)·w(q→p)
//! ```
//!
//! followed by division by the largest value. σ0 is itself divided by its
//! maximum before the first step, so scaling every initial similarity by a
//! positive constant changes nothing.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{name_similarity, ScoreMatrix};
use crate::schema::{ColumnRef, MatchSet, Schema};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FloodConfig {
    pub epsilon: f64,
    pub max_iters: usize,
    pub select_threshold: f64,
}

impl Default for FloodConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            max_iters: 100,
            select_threshold: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementRef {
    Table(String),
    Column(ColumnRef),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcgNode {
    pub source_elem: ElementRef,
    pub target_elem: ElementRef,
    pub sigma0: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeLabel {
    ColumnOf,
    Fk,
}

/// `from` and `to` index [`Pcg::nodes`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcgEdge {
    pub from: usize,
    pub to: usize,
    pub label: EdgeLabel,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Pcg {
    pub nodes: Vec<PcgNode>,
    pub edges: Vec<PcgEdge>,
}

impl Pcg {
    pub fn edges_with_label(&self, label: EdgeLabel) -> impl Iterator<Item = &PcgEdge> {
        self.edges.iter().filter(move |e| e.label == label)
    }

    /// Multiplies every σ0 by `c`; used to check scale invariance.
    pub fn scale_initial(&mut self, c: f64) {
        for n in &mut self.nodes {
            n.sigma0 *= c;
            n.sigma = n.sigma0;
        }
    }

    pub fn column_node(&self, source: &ColumnRef, target: &ColumnRef) -> Option<usize> {
        self.nodes.iter().position(|n| {
            n.source_elem == ElementRef::Column(source.clone())
                && n.target_elem == ElementRef::Column(target.clone())
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloodOutcome {
    pub iterations: usize,
    pub converged: bool,
    pub last_delta: f64,
}

pub fn build_pcg(source: &Schema, target: &Schema) -> Pcg {
    let mut pcg = Pcg::default();
    let mut column_nodes: BTreeMap<(ColumnRef, ColumnRef), usize> = BTreeMap::new();
    let mut raw_edges: Vec<(usize, usize, EdgeLabel)> = Vec::new();

    for st in &source.tables {
        for tt in &target.tables {
            let table_node = pcg.nodes.len();
            let s0 = name_similarity(&st.name, &tt.name);
            pcg.nodes.push(PcgNode {
                source_elem: ElementRef::Table(st.name.clone()),
                target_elem: ElementRef::Table(tt.name.clone()),
                sigma0: s0,
                sigma: s0,
            });
            for sc in &st.columns {
                for tc in &tt.columns {
                    let idx = pcg.nodes.len();
                    let sr = ColumnRef::new(&st.name, &sc.name);
                    let tr = ColumnRef::new(&tt.name, &tc.name);
                    let s0 = name_similarity(&sc.name, &tc.name);
                    pcg.nodes.push(PcgNode {
                        source_elem: ElementRef::Column(sr.clone()),
                        target_elem: ElementRef::Column(tr.clone()),
                        sigma0: s0,
                        sigma: s0,
                    });
                    column_nodes.insert((sr, tr), idx);
                    raw_edges.push((table_node, idx, EdgeLabel::ColumnOf));
                    raw_edges.push((idx, table_node, EdgeLabel::ColumnOf));
                }
            }
        }
    }

    let source_fks = foreign_key_refs(source);
    let target_fks = foreign_key_refs(target);
    for (cs, ps) in &source_fks {
        for (ct, pt) in &target_fks {
            let from = column_nodes[&(cs.clone(), ct.clone())];
            let to = column_nodes[&(ps.clone(), pt.clone())];
            raw_edges.push((from, to, EdgeLabel::Fk));
            raw_edges.push((to, from, EdgeLabel::Fk));
        }
    }

    let mut out_degree: BTreeMap<(usize, u8), usize> = BTreeMap::new();
    for &(from, _, label) in &raw_edges {
        *out_degree.entry((from, label as u8)).or_insert(0) += 1;
    }
    pcg.edges = raw_edges
        .into_iter()
        .map(|(from, to, label)| PcgEdge {
            from,
            to,
            label,
            weight: 1.0 / out_degree[&(from, label as u8)] as f64,
        })
        .collect();
    pcg
}

fn foreign_key_refs(s: &Schema) -> Vec<(ColumnRef, ColumnRef)> {
    let mut out = Vec::new();
    for t in &s.tables {
        for fk in &t.foreign_keys {
            if let (Some(c), Some(p)) = (s.resolve(&t.name, &fk.column), s.resolve(&fk.ref_table, &fk.ref_column)) {
                out.push((c, p));
            }
        }
    }
    out
}

/// Runs the fixed-point iteration in place, leaving normalized scores in
/// each node's `sigma`. Sums run in edge order so results are reproducible.
pub fn flood(pcg: &mut Pcg, cfg: &FloodConfig) -> FloodOutcome {
    let n = pcg.nodes.len();
    let mut initial: Vec<f64> = pcg.nodes.iter().map(|p| p.sigma0).collect();
    normalize(&mut initial);

    let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in &pcg.edges {
        incoming[e.to].push((e.from, e.weight));
    }

    let mut sigma = initial.clone();
    let mut next = vec![0.0; n];
    let mut outcome = FloodOutcome {
        iterations: 0,
        converged: false,
        last_delta: f64::INFINITY,
    };
    while outcome.iterations < cfg.max_iters {
        for (p, slot) in next.iter_mut().enumerate() {
            let mut v = initial[p] + sigma[p];
            for &(q, w) in &incoming[p] {
                v += sigma[q] * w;
            }
            *slot = v;
        }
        normalize(&mut next);
        let delta = sigma
            .iter()
            .zip(&next)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max);
        core::mem::swap(&mut sigma, &mut next);
        outcome.iterations += 1;
        outcome.last_delta = delta;
        if delta < cfg.epsilon {
            outcome.converged = true;
            break;
        }
    }
    for (node, s) in pcg.nodes.iter_mut().zip(sigma) {
        node.sigma = s;
    }
    outcome
}

fn normalize(values: &mut [f64]) {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        for v in values {
            *v /= max;
        }
    }
}

/// Reads the column-pair scores of a flooded graph into a matrix.
pub fn pcg_scores(pcg: &Pcg, source: &Schema, target: &Schema) -> ScoreMatrix {
    let mut index = BTreeMap::new();
    for (i, n) in pcg.nodes.iter().enumerate() {
        if let (ElementRef::Column(s), ElementRef::Column(t)) = (&n.source_elem, &n.target_elem) {
            index.insert((s.clone(), t.clone()), i);
        }
    }
    ScoreMatrix::from_fn(source, target, |s, t| {
        index
            .get(&(s.clone(), t.clone()))
            .map_or(0.0, |&i| pcg.nodes[i].sigma)
    })
}

pub fn flood_scores(source: &Schema, target: &Schema, cfg: &FloodConfig) -> (ScoreMatrix, FloodOutcome) {
    let mut pcg = build_pcg(source, target);
    let outcome = flood(&mut pcg, cfg);
    (pcg_scores(&pcg, source, target), outcome)
}

/// Table-pair nodes are never emitted; only column pairs are selected.
pub fn similarity_flood_match(source: &Schema, target: &Schema, cfg: &FloodConfig) -> (MatchSet, FloodOutcome) {
    let (scores, outcome) = flood_scores(source, target, cfg);
    (scores.select(cfg.select_threshold), outcome)
}
