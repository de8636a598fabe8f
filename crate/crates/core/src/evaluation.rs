//! Scoring detected communities against ground truth.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Real;

/// Proportion matrix R with R_ab = (1/n) #{i : s_i = a, c_i = b}.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix<T> {
    k: usize,
    entries: Vec<T>,
}

impl<T: Real> ConfusionMatrix<T> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, a: usize, b: usize) -> T {
        self.entries[a * self.k + b]
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.k)
            .map(|a| (0..self.k).fold(T::zero(), |acc, b| acc + self.get(a, b)))
            .collect()
    }

    pub fn column_sums(&self) -> Vec<T> {
        (0..self.k)
            .map(|b| (0..self.k).fold(T::zero(), |acc, a| acc + self.get(a, b)))
            .collect()
    }
}

/// Confusion matrix between a proposed labeling and the truth.
pub fn confusion_matrix<T: Real>(
    proposed: &[usize],
    truth: &[usize],
) -> Result<ConfusionMatrix<T>> {
    if proposed.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: proposed.len(),
            right: truth.len(),
        });
    }
    if proposed.is_empty() {
        return Err(Error::Domain("confusion matrix of empty labelings".into()));
    }
    let k = proposed
        .iter()
        .chain(truth.iter())
        .max()
        .map_or(0, |&m| m + 1);
    let mut counts = vec![0usize; k * k];
    for (&a, &b) in proposed.iter().zip(truth.iter()) {
        counts[a * k + b] += 1;
    }
    let n = T::from_count(proposed.len());
    Ok(ConfusionMatrix {
        k,
        entries: counts.into_iter().map(|c| T::from_count(c) / n).collect(),
    })
}

/// Block totals O with O_kl the adjacency weight summed over ordered pairs
/// (i, j) with s_i = k, s_j = l; O_kk is twice the within-block weight.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEdgeCounts<T> {
    k: usize,
    totals: Vec<T>,
}

impl<T: Real> BlockEdgeCounts<T> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, a: usize, b: usize) -> T {
        self.totals[a * self.k + b]
    }

    pub fn total(&self) -> T {
        self.totals.iter().fold(T::zero(), |a, &b| a + b)
    }
}

pub fn block_edge_counts<T: Real>(g: &Graph<T>, labeling: &[usize]) -> Result<BlockEdgeCounts<T>> {
    if labeling.len() != g.node_count() {
        return Err(Error::LengthMismatch {
            left: labeling.len(),
            right: g.node_count(),
        });
    }
    let k = labeling.iter().max().map_or(0, |&m| m + 1);
    let mut totals = vec![T::zero(); k * k];
    for i in 0..g.node_count() {
        for &(j, w) in g.neighbors(i) {
            totals[labeling[i] * k + labeling[j]] += w;
        }
    }
    Ok(BlockEdgeCounts { k, totals })
}

/// PPV/NPV of an extracted set against its best-matching true class.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchScore<T> {
    pub ppv: T,
    pub npv: T,
    /// True class holding the plurality of S (ties go to the lowest id).
    pub matched_class: usize,
    /// Whether the matched class is the designated background class.
    pub matched_background: bool,
}

/// Majority-vote matching and predictive values.
///
/// C_S is the true class holding the plurality of S; PPV = |C_S cap S| / |S|
/// measures purity and NPV = 1 - |C_S cap S^c| / |S^c| measures completeness.
/// A designated background class competes for the match like any other class.
pub fn match_and_score<T: Real>(
    extracted: &[usize],
    truth: &[usize],
    background_label: Option<usize>,
) -> Result<MatchScore<T>> {
    let n = truth.len();
    let set: HashSet<usize> = extracted.iter().copied().collect();
    if set.is_empty() {
        return Err(Error::Domain("extracted set is empty".into()));
    }
    if set.len() >= n {
        return Err(Error::Domain(
            "extracted set leaves an empty complement".into(),
        ));
    }
    if let Some(&bad) = extracted.iter().find(|&&v| v >= n) {
        return Err(Error::NodeOutOfRange { node: bad, n });
    }
    let k = truth.iter().max().map_or(0, |&m| m + 1);
    let mut counts = vec![0usize; k];
    for &v in &set {
        counts[truth[v]] += 1;
    }
    let matched_class = (0..k).max_by_key(|&c| (counts[c], k - c)).unwrap_or(0);
    let class_in_s = counts[matched_class];
    let class_total = truth.iter().filter(|&&t| t == matched_class).count();
    let size_s = set.len();
    let size_c = n - size_s;
    let ppv = T::from_count(class_in_s) / T::from_count(size_s);
    let lost = class_total - class_in_s;
    let npv = T::one() - T::from_count(lost) / T::from_count(size_c);
    Ok(MatchScore {
        ppv,
        npv,
        matched_class,
        matched_background: background_label == Some(matched_class),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_perfect_agreement() {
        let labels: Vec<usize> = vec![0, 0, 0, 1, 1, 1, 1, 1, 1, 1];
        let r: ConfusionMatrix<f64> = confusion_matrix(&labels, &labels).unwrap();
        assert_eq!(r.get(0, 0), 0.3);
        assert_eq!(r.get(1, 1), 0.7);
        assert_eq!(r.get(0, 1), 0.0);
        assert_eq!(r.get(1, 0), 0.0);
    }

    #[test]
    fn confusion_degenerate_assignment() {
        let proposed = vec![0usize; 10];
        let truth: Vec<usize> = vec![0, 0, 0, 1, 1, 1, 1, 1, 1, 1];
        let r: ConfusionMatrix<f64> = confusion_matrix(&proposed, &truth).unwrap();
        assert_eq!(r.get(0, 0), 0.3);
        assert_eq!(r.get(0, 1), 0.7);
        assert_eq!(r.get(1, 0), 0.0);
        assert_eq!(r.get(1, 1), 0.0);
    }

    #[test]
    fn confusion_uniform_quarters() {
        let proposed = vec![0usize, 0, 1, 1];
        let truth = vec![0usize, 1, 0, 1];
        let r: ConfusionMatrix<f64> = confusion_matrix(&proposed, &truth).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(r.get(a, b), 0.25);
            }
        }
    }

    #[test]
    fn confusion_marginals_match_proportions() {
        let proposed = vec![0usize, 1, 1, 2, 0, 1];
        let truth = vec![2usize, 1, 1, 0, 0, 2];
        let r: ConfusionMatrix<f64> = confusion_matrix(&proposed, &truth).unwrap();
        let total: f64 = (0..r.k())
            .flat_map(|a| (0..r.k()).map(move |b| (a, b)))
            .map(|(a, b)| r.get(a, b))
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        let rows = r.row_sums();
        let cols = r.column_sums();
        for c in 0..3 {
            let prop_s = proposed.iter().filter(|&&x| x == c).count() as f64 / 6.0;
            let prop_c = truth.iter().filter(|&&x| x == c).count() as f64 / 6.0;
            assert!((rows[c] - prop_s).abs() < 1e-12);
            assert!((cols[c] - prop_c).abs() < 1e-12);
        }
    }

    #[test]
    fn confusion_length_mismatch() {
        let r: Result<ConfusionMatrix<f64>> = confusion_matrix(&[0, 1], &[0, 1, 1]);
        assert!(matches!(r, Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn block_counts_on_g1() {
        let g: Graph<f64> =
            Graph::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let counts = block_edge_counts(&g, &[0, 0, 0, 1]).unwrap();
        assert_eq!(counts.get(0, 0), 6.0);
        assert_eq!(counts.get(0, 1), 1.0);
        assert_eq!(counts.get(1, 0), 1.0);
        assert_eq!(counts.get(1, 1), 0.0);
        assert_eq!(counts.total(), g.total_weight());

        let all_one = block_edge_counts(&g, &[0, 0, 0, 0]).unwrap();
        assert_eq!(all_one.get(0, 0), 8.0);

        let empty: Graph<f64> = Graph::from_edges(3, &[]).unwrap();
        let z = block_edge_counts(&empty, &[0, 1, 0]).unwrap();
        assert_eq!(z.total(), 0.0);
    }

    #[test]
    fn perfect_extraction_scores_one() {
        let truth = vec![1usize, 1, 1, 0, 0, 0, 0, 0, 0, 0];
        let score: MatchScore<f64> = match_and_score(&[0, 1, 2], &truth, Some(0)).unwrap();
        assert_eq!(score.ppv, 1.0);
        assert_eq!(score.npv, 1.0);
        assert_eq!(score.matched_class, 1);
        assert!(!score.matched_background);
    }

    #[test]
    fn partial_extraction_counts() {
        // True community {0..4}; extracted {0, 1, 2, 3, 5, 6}.
        let truth: Vec<usize> = (0..10).map(|i| if i < 5 { 1 } else { 0 }).collect();
        let score: MatchScore<f64> = match_and_score(&[0, 1, 2, 3, 5, 6], &truth, Some(0)).unwrap();
        assert_eq!(score.matched_class, 1);
        assert!((score.ppv - 4.0 / 6.0).abs() < 1e-15);
        assert!((score.npv - 0.75).abs() < 1e-15);
    }

    #[test]
    fn background_can_win_the_vote() {
        let truth: Vec<usize> = (0..10).map(|i| if i < 5 { 1 } else { 0 }).collect();
        let score: MatchScore<f64> = match_and_score(&[5, 6], &truth, Some(0)).unwrap();
        assert_eq!(score.matched_class, 0);
        assert!(score.matched_background);
        assert_eq!(score.ppv, 1.0);
        assert!((score.npv - (1.0 - 3.0 / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn ties_go_to_lowest_class() {
        let truth = vec![0usize, 0, 1, 1];
        let score: MatchScore<f64> = match_and_score(&[0, 2], &truth, None).unwrap();
        assert_eq!(score.matched_class, 0);
    }

    #[test]
    fn empty_sides_rejected() {
        let truth = vec![0usize, 1];
        assert!(match_and_score::<f64>(&[], &truth, None).is_err());
        assert!(match_and_score::<f64>(&[0, 1], &truth, None).is_err());
    }

    #[test]
    fn predictive_values_stay_in_unit_interval() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(2..30);
            let k = rng.random_range(1..4);
            let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let size = rng.random_range(1..n);
            let mut nodes: Vec<usize> = (0..n).collect();
            nodes.shuffle(&mut rng);
            let score: MatchScore<f64> = match_and_score(&nodes[..size], &truth, Some(0)).unwrap();
            assert!((0.0..=1.0).contains(&score.ppv));
            assert!((0.0..=1.0).contains(&score.npv));
            let members: Vec<usize> = (0..n)
                .filter(|&i| truth[i] == score.matched_class)
                .collect();
            let extracted: std::collections::HashSet<usize> =
                nodes[..size].iter().copied().collect();
            let exact = members.len() == size && members.iter().all(|m| extracted.contains(m));
            assert_eq!(score.ppv == 1.0 && score.npv == 1.0, exact);
        }
    }
}
