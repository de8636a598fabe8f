//! Scoring functions for two-way and K-way labelings.
//!
//! The extraction criteria treat the candidate community S and its complement
//! asymmetrically: the score depends on edges inside S and edges crossing the
//! boundary, never on edges inside the complement. Modularity and the cut
//! family are included as symmetric partition baselines.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Real;

/// Which extraction criterion to score or optimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractionCriterion {
    /// O(S)/|S|^2 - B(S)/(|S||S^c|).
    Original,
    /// |S||S^c| times the original criterion; penalizes extreme sizes.
    Adjusted,
}

impl ExtractionCriterion {
    pub fn name(&self) -> &'static str {
        match self {
            ExtractionCriterion::Original => "original",
            ExtractionCriterion::Adjusted => "adjusted",
        }
    }
}

/// Assignment of each node to the candidate set S or its complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoWayLabeling {
    in_set: Vec<bool>,
}

impl TwoWayLabeling {
    pub fn new(in_set: Vec<bool>) -> Self {
        TwoWayLabeling { in_set }
    }

    /// Labeling with `members` in S and everything else outside.
    pub fn from_members(n: usize, members: &[usize]) -> Self {
        let mut in_set = vec![false; n];
        for &m in members {
            in_set[m] = true;
        }
        TwoWayLabeling { in_set }
    }

    pub fn len(&self) -> usize {
        self.in_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.in_set.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.in_set[node]
    }

    pub fn set_size(&self) -> usize {
        self.in_set.iter().filter(|&&b| b).count()
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_set[i]).collect()
    }

    pub fn complement_members(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.in_set[i]).collect()
    }

    pub fn flip(&mut self, node: usize) {
        self.in_set[node] = !self.in_set[node];
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.in_set
    }
}

/// The (|S|, O(S), B(S)) triple every criterion consumes.
///
/// `internal` sums A_ij over ordered pairs inside S, so it is twice the
/// undirected edge weight within S. `boundary` sums A_ij over pairs with
/// i in S and j outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetStats<T> {
    pub size: usize,
    pub internal: T,
    pub boundary: T,
}

/// Exact O(S), B(S) and |S| for a labeling.
pub fn subset_stats<T: Real>(g: &Graph<T>, s: &TwoWayLabeling) -> SubsetStats<T> {
    let mut internal = T::zero();
    let mut boundary = T::zero();
    let mut size = 0usize;
    for i in 0..g.node_count() {
        if !s.contains(i) {
            continue;
        }
        size += 1;
        for &(j, w) in g.neighbors(i) {
            if s.contains(j) {
                internal += w;
            } else {
                boundary += w;
            }
        }
    }
    SubsetStats {
        size,
        internal,
        boundary,
    }
}

fn check_feasible<T>(stats: &SubsetStats<T>, n: usize) -> Result<()> {
    if stats.size == 0 || stats.size >= n {
        return Err(Error::InfeasibleSubset {
            size: stats.size,
            n,
        });
    }
    Ok(())
}

/// W(S) = O(S)/|S|^2 - B(S)/(|S||S^c|). Undefined at |S| in {0, n}.
pub fn extraction_score<T: Real>(stats: &SubsetStats<T>, n: usize) -> Result<T> {
    check_feasible(stats, n)?;
    let s = T::from_count(stats.size);
    let c = T::from_count(n - stats.size);
    Ok(stats.internal / (s * s) - stats.boundary / (s * c))
}

/// W_a(S) = |S||S^c| * W(S).
pub fn adjusted_score<T: Real>(stats: &SubsetStats<T>, n: usize) -> Result<T> {
    check_feasible(stats, n)?;
    let s = T::from_count(stats.size);
    let c = T::from_count(n - stats.size);
    Ok(s * c * (stats.internal / (s * s) - stats.boundary / (s * c)))
}

/// Score `stats` under the requested extraction criterion.
pub fn score<T: Real>(
    criterion: ExtractionCriterion,
    stats: &SubsetStats<T>,
    n: usize,
) -> Result<T> {
    match criterion {
        ExtractionCriterion::Original => extraction_score(stats, n),
        ExtractionCriterion::Adjusted => adjusted_score(stats, n),
    }
}

/// Stats after switching `node` across the boundary, touching only the node's
/// incident weights.
///
/// Work is proportional to the degree of `node`; nothing is recomputed over
/// all pairs.
pub fn switch_stats<T: Real>(
    g: &Graph<T>,
    s: &TwoWayLabeling,
    stats: &SubsetStats<T>,
    node: usize,
) -> SubsetStats<T> {
    let mut to_set = T::zero();
    let mut to_complement = T::zero();
    for &(j, w) in g.neighbors(node) {
        if s.contains(j) {
            to_set += w;
        } else {
            to_complement += w;
        }
    }
    let two = T::from_count(2);
    if s.contains(node) {
        SubsetStats {
            size: stats.size - 1,
            internal: stats.internal - two * to_set,
            boundary: stats.boundary + to_set - to_complement,
        }
    } else {
        SubsetStats {
            size: stats.size + 1,
            internal: stats.internal + two * to_set,
            boundary: stats.boundary - to_set + to_complement,
        }
    }
}

/// Score and stats after a single label switch, in O(degree) work.
///
/// Errors when the switch would empty S or its complement.
pub fn switch_delta<T: Real>(
    g: &Graph<T>,
    s: &TwoWayLabeling,
    stats: &SubsetStats<T>,
    node: usize,
    criterion: ExtractionCriterion,
) -> Result<(T, SubsetStats<T>)> {
    let n = g.node_count();
    let leaving = s.contains(node);
    if (leaving && stats.size <= 1) || (!leaving && stats.size >= n - 1) {
        return Err(Error::InfeasibleMove { node, min_side: 1 });
    }
    let new_stats = switch_stats(g, s, stats, node);
    let new_score = score(criterion, &new_stats, n)?;
    Ok((new_score, new_stats))
}

/// Two-way modularity Q = (1/4m) * sum_ij (A_ij - k_i k_j / 2m) s_i s_j.
pub fn modularity_score<T: Real>(g: &Graph<T>, s: &TwoWayLabeling) -> Result<T> {
    let two_m = g.total_weight();
    if two_m <= T::zero() {
        return Err(Error::UndefinedScore(
            "modularity is undefined on an edgeless graph".into(),
        ));
    }
    // sum_ij A_ij s_i s_j = 2m - 4 B(S); sum_i k_i s_i = 2 D_S - 2m.
    let stats = subset_stats(g, s);
    let mut degree_sum = T::zero();
    for i in 0..g.node_count() {
        if s.contains(i) {
            degree_sum += g.degree(i);
        }
    }
    let four = T::from_count(4);
    let two = T::from_count(2);
    let u = two * degree_sum - two_m;
    Ok((two_m - four * stats.boundary - u * u / two_m) / (two * two_m))
}

/// K-way modularity in indicator form:
/// Q = sum_g [ O_gg/2m - (D_g/2m)^2 ]. Coincides with the two-way form at K=2.
pub fn modularity_kway_score<T: Real>(g: &Graph<T>, assignment: &[usize]) -> Result<T> {
    if assignment.len() != g.node_count() {
        return Err(Error::LengthMismatch {
            left: assignment.len(),
            right: g.node_count(),
        });
    }
    let two_m = g.total_weight();
    if two_m <= T::zero() {
        return Err(Error::UndefinedScore(
            "modularity is undefined on an edgeless graph".into(),
        ));
    }
    let k = assignment.iter().max().map_or(0, |&m| m + 1);
    let mut internal = vec![T::zero(); k];
    let mut degree = vec![T::zero(); k];
    for i in 0..g.node_count() {
        let gi = assignment[i];
        degree[gi] += g.degree(i);
        for &(j, w) in g.neighbors(i) {
            if assignment[j] == gi {
                internal[gi] += w;
            }
        }
    }
    let mut q = T::zero();
    for gi in 0..k {
        let a = degree[gi] / two_m;
        q = q + internal[gi] / two_m - a * a;
    }
    Ok(q)
}

/// Configuration-model null probability P_ij = k_i k_j / 2m (may exceed 1).
pub fn config_null_prob<T: Real>(g: &Graph<T>, i: usize, j: usize) -> Result<T> {
    let two_m = g.total_weight();
    if two_m <= T::zero() {
        return Err(Error::UndefinedScore(
            "null model undefined on an edgeless graph".into(),
        ));
    }
    Ok(g.degree(i) * g.degree(j) / two_m)
}

/// The cut R, ratio cut R/(|V1||V2|) and normalized cut R/D1 + R/D2.
pub fn cut_scores<T: Real>(g: &Graph<T>, s: &TwoWayLabeling) -> Result<(T, T, T)> {
    let n = g.node_count();
    let stats = subset_stats(g, s);
    check_feasible(&stats, n)?;
    let cut = stats.boundary;
    let size1 = T::from_count(stats.size);
    let size2 = T::from_count(n - stats.size);
    let ratio = cut / (size1 * size2);
    let mut d1 = T::zero();
    for i in 0..n {
        if s.contains(i) {
            d1 += g.degree(i);
        }
    }
    let d2 = g.total_weight() - d1;
    if d1 <= T::zero() || d2 <= T::zero() {
        if cut == T::zero() {
            // A side with zero volume can only happen with no cross edges.
            return Ok((T::zero(), ratio, T::zero()));
        }
        return Err(Error::UndefinedScore(
            "normalized cut undefined: a side has zero volume".into(),
        ));
    }
    Ok((cut, ratio, cut / d1 + cut / d2))
}
