use alloc::format;
use alloc::string::String;

use super::{name_similarity, ScoreMatrix};
use crate::schema::{Column, MatchSet, Schema, Table};

/// Cupid-style weights. Tables are the only structural context in this model.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CupidConfig {
    pub w_struct: f64,
    pub select_threshold: f64,
}

impl Default for CupidConfig {
    fn default() -> Self {
        Self {
            w_struct: 0.5,
            select_threshold: 0.5,
        }
    }
}

const KEY_BONUS: f64 = 0.2;

fn linguistic_text(c: &Column) -> String {
    if c.description.is_empty() {
        c.name.clone()
    } else {
        format!("{} {}", c.name, c.description)
    }
}

fn structural(st: &Table, sc: &Column, tt: &Table, tc: &Column) -> f64 {
    let mut v = name_similarity(&st.name, &tt.name);
    let both_pk = sc.is_primary_key && tc.is_primary_key;
    let both_fk = st.is_foreign_key(&sc.name) && tt.is_foreign_key(&tc.name);
    if both_pk || both_fk {
        v += KEY_BONUS;
    }
    v.min(1.0)
}

/// `w_struct · ssim + (1 − w_struct) · lsim` for every column pair.
pub fn cupid_scores(source: &Schema, target: &Schema, cfg: &CupidConfig) -> ScoreMatrix {
    ScoreMatrix::from_fn(source, target, |s, t| {
        let st = source.table(s.table()).expect("ref from schema");
        let sc = st.column(s.column()).expect("ref from schema");
        let tt = target.table(t.table()).expect("ref from schema");
        let tc = tt.column(t.column()).expect("ref from schema");
        let lsim = name_similarity(&linguistic_text(sc), &linguistic_text(tc));
        let ssim = structural(st, sc, tt, tc);
        cfg.w_struct * ssim + (1.0 - cfg.w_struct) * lsim
    })
}

pub fn cupid_match(source: &Schema, target: &Schema, cfg: &CupidConfig) -> MatchSet {
    cupid_scores(source, target, cfg).select(cfg.select_threshold)
}
