//! Sequential community extraction: extract, remove, repeat.
//!
//! Each round maximizes the chosen criterion on the subgraph induced by the
//! still-active nodes, so edges touching already-extracted nodes play no role.
//! Extraction stops when the proposed community is smaller than `min_size`
//! (the proposal is discarded), when `max_communities` is reached, or when
//! fewer than two active nodes remain; leftovers become background.

use serde::{Deserialize, Serialize};

use crate::criteria::ExtractionCriterion;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Real;
use crate::seed::derive_seed;
use crate::tabu::{multi_start, TabuConfig};

/// Stopping rule for [`extract_sequence`].
#[derive(Debug, Clone)]
pub struct StopRule {
    /// A proposed community is kept only if it has at least this many nodes.
    pub min_size: usize,
    /// Hard cap on the number of extracted communities.
    pub max_communities: Option<usize>,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_size: 5,
            max_communities: None,
        }
    }
}

/// One extracted community with its score at extraction time.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedCommunity<T> {
    /// 1-based extraction order.
    pub rank: usize,
    pub members: Vec<usize>,
    pub score: T,
}

/// Ordered extraction output plus the background set.
#[derive(Debug, Clone)]
pub struct ExtractionResult<T> {
    pub communities: Vec<ExtractedCommunity<T>>,
    pub background: Vec<usize>,
    pub criterion: ExtractionCriterion,
}

impl<T> ExtractionResult<T> {
    /// Community id of each node (None for background).
    pub fn assignment(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for c in &self.communities {
            for &m in &c.members {
                out[m] = Some(c.rank - 1);
            }
        }
        out
    }
}

/// Extract a single community from the subgraph induced by `active`.
///
/// Returns member ids in the original graph's numbering, plus the criterion
/// value the community achieved on the induced subgraph.
pub fn extract_one<T: Real>(
    g: &Graph<T>,
    active: &[usize],
    criterion: ExtractionCriterion,
    cfg: &TabuConfig,
) -> Result<(Vec<usize>, T)> {
    if active.len() < 2 {
        return Err(Error::TooSmall { size: active.len() });
    }
    let (sub, ids) = g.induced_subgraph(active);
    let res = multi_start(&sub, criterion.into(), cfg)?;
    let members: Vec<usize> = res
        .best_labeling
        .members()
        .into_iter()
        .map(|local| ids[local])
        .collect();
    Ok((members, res.best_score))
}

/// Repeated extraction with the preset-size stopping rule.
///
/// Round r reuses `cfg` with a seed derived from (cfg.seed, r), so rounds are
/// independent and the whole sequence is reproducible.
pub fn extract_sequence<T: Real>(
    g: &Graph<T>,
    criterion: ExtractionCriterion,
    cfg: &TabuConfig,
    stop: &StopRule,
) -> Result<ExtractionResult<T>> {
    let n = g.node_count();
    let mut active: Vec<usize> = (0..n).collect();
    let mut communities = Vec::new();
    let mut round: u64 = 0;
    loop {
        if let Some(cap) = stop.max_communities {
            if communities.len() >= cap {
                break;
            }
        }
        if active.len() < 2 {
            break;
        }
        let round_cfg = cfg.clone().with_seed(derive_seed(cfg.seed, round));
        let (mut members, score) = extract_one(g, &active, criterion, &round_cfg)?;
        if members.len() < stop.min_size {
            break;
        }
        members.sort_unstable();
        active.retain(|v| !members.contains(v));
        communities.push(ExtractedCommunity {
            rank: communities.len() + 1,
            members,
            score,
        });
        round += 1;
    }
    Ok(ExtractionResult {
        communities,
        background: active,
        criterion,
    })
}

/// Serializable form of an extraction result, with nodes as original labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub criterion: String,
    pub communities: Vec<CommunityReport>,
    pub background: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommunityReport {
    pub rank: usize,
    pub score: f64,
    pub members: Vec<String>,
}

impl ExtractionReport {
    /// Render a result using `labels[i]` as the display name of node i.
    pub fn from_result<T: Real>(result: &ExtractionResult<T>, labels: &[String]) -> Self {
        ExtractionReport {
            criterion: result.criterion.name().to_string(),
            communities: result
                .communities
                .iter()
                .map(|c| CommunityReport {
                    rank: c.rank,
                    score: c.score.to_f64().unwrap_or(f64::NAN),
                    members: c.members.iter().map(|&m| labels[m].clone()).collect(),
                })
                .collect(),
            background: result
                .background
                .iter()
                .map(|&m| labels[m].clone())
                .collect(),
        }
    }
}
