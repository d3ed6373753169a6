use alloc::format;
use alloc::vec::Vec;

use super::{cupid_scores, flood_scores, lexical_scores, CupidConfig, FloodConfig, MatcherId, ScoreMatrix};
use crate::error::Error;
use crate::schema::{MatchSet, Schema};

/// Arithmetic mean of the member matchers' pre-selection scores.
pub fn composite_scores(
    source: &Schema,
    target: &Schema,
    members: &[&str],
    flood_cfg: &FloodConfig,
    cupid_cfg: &CupidConfig,
) -> Result<ScoreMatrix, Error> {
    if members.is_empty() {
        return Err(Error::Config("composite matcher needs at least one member".into()));
    }
    let mut matrices = Vec::with_capacity(members.len());
    for m in members {
        let id: MatcherId = m.parse()?;
        matrices.push(match id {
            MatcherId::Lexical => lexical_scores(source, target),
            MatcherId::Flood => flood_scores(source, target, flood_cfg).0,
            MatcherId::Cupid => cupid_scores(source, target, cupid_cfg),
            MatcherId::Composite => {
                return Err(Error::Config(format!("{m:?} cannot be a composite member")))
            }
        });
    }
    let mut out = matrices[0].clone();
    for (k, v) in out.scores.iter_mut().enumerate() {
        *v = matrices.iter().map(|m| m.scores[k]).sum::<f64>() / matrices.len() as f64;
    }
    Ok(out)
}

pub fn composite_match(
    source: &Schema,
    target: &Schema,
    members: &[&str],
    threshold: f64,
    flood_cfg: &FloodConfig,
    cupid_cfg: &CupidConfig,
) -> Result<MatchSet, Error> {
    Ok(composite_scores(source, target, members, flood_cfg, cupid_cfg)?.select(threshold))
}
