//! Block-model generation and numerical checks of the consistency theory.
//!
//! Networks are drawn from the two-parameter family (pi, P) with an optional
//! sparsity multiplier rho, either with i.i.d. block labels or with fixed
//! block sizes. The population criteria are the large-n limits of the
//! extraction criteria after the confusion-matrix transformation
//! t1 = r11/(r11+r12), t2 = r22/(r21+r22); consistency requires their grid
//! argmax over the feasible region to be the truthful corner (1, 1).

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Real;

/// How block labels are assigned when sampling.
#[derive(Debug, Clone, PartialEq)]
pub enum SizeSpec<T> {
    /// Each node's block drawn i.i.d. from these probabilities (sum to 1).
    Probabilities(Vec<T>),
    /// Exact block sizes; nodes 0..sizes[0] get block 0, and so on.
    Fixed(Vec<usize>),
}

/// Parameters of a K-block model.
#[derive(Debug, Clone)]
pub struct BlockModelParams<T> {
    pub n: usize,
    pub sizes: SizeSpec<T>,
    /// Symmetric K x K edge-probability matrix.
    pub p: Vec<Vec<T>>,
    /// Sparsity multiplier; effective probabilities are rho * p. Defaults to 1.
    pub rho: Option<T>,
}

impl<T: Real> BlockModelParams<T> {
    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn effective_prob(&self, a: usize, b: usize) -> T {
        let rho = self.rho.unwrap_or_else(T::one);
        rho * self.p[a][b]
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.p.len();
        if k == 0 {
            return Err(Error::Domain("block model needs at least one block".into()));
        }
        for row in &self.p {
            if row.len() != k {
                return Err(Error::Domain("probability matrix must be square".into()));
            }
        }
        let tol = T::from_f64(1e-12).unwrap();
        for a in 0..k {
            for b in 0..k {
                if (self.p[a][b] - self.p[b][a]).abs() > tol {
                    return Err(Error::Domain("probability matrix must be symmetric".into()));
                }
                let eff = self.effective_prob(a, b);
                if eff < T::zero() || eff > T::one() {
                    return Err(Error::Domain(format!(
                        "scaled probability {} at ({a}, {b}) outside [0, 1]",
                        eff
                    )));
                }
            }
        }
        match &self.sizes {
            SizeSpec::Probabilities(pi) => {
                if pi.len() != k {
                    return Err(Error::Domain("pi length must match block count".into()));
                }
                let mut sum = T::zero();
                for &v in pi {
                    if v < T::zero() || v > T::one() {
                        return Err(Error::Domain("pi entries must lie in [0, 1]".into()));
                    }
                    sum += v;
                }
                if (sum - T::one()).abs() > tol {
                    return Err(Error::Domain("pi must sum to 1".into()));
                }
            }
            SizeSpec::Fixed(sizes) => {
                if sizes.len() != k {
                    return Err(Error::Domain("sizes length must match block count".into()));
                }
                if sizes.iter().sum::<usize>() != self.n {
                    return Err(Error::Domain("fixed sizes must sum to n".into()));
                }
            }
        }
        Ok(())
    }
}

/// Draw a graph and its true block labels.
pub fn sample_block_model<T: Real>(
    params: &BlockModelParams<T>,
    seed: u64,
) -> Result<(Graph<T>, Vec<usize>)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n;
    let labels: Vec<usize> = match &params.sizes {
        SizeSpec::Fixed(sizes) => {
            let mut labels = Vec::with_capacity(n);
            for (block, &count) in sizes.iter().enumerate() {
                labels.extend(std::iter::repeat(block).take(count));
            }
            labels
        }
        SizeSpec::Probabilities(pi) => {
            let cumulative: Vec<f64> = pi
                .iter()
                .scan(0.0, |acc, &p| {
                    *acc += p.to_f64().unwrap();
                    Some(*acc)
                })
                .collect();
            (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    cumulative
                        .iter()
                        .position(|&c| u < c)
                        .unwrap_or(pi.len() - 1)
                })
                .collect()
        }
    };
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = params
                .effective_prob(labels[i], labels[j])
                .to_f64()
                .unwrap();
            if rng.random::<f64>() < p {
                edges.push((i, j, T::one()));
            }
        }
    }
    let graph = Graph::from_edges(n, &edges)?;
    Ok((graph, labels))
}

/// The three strict inequalities of the consistency theorems:
/// p11 > p12, p11 > p22 and p11 + p22 > 2 p12.
pub fn check_consistency_conditions<T: Real>(p11: T, p12: T, p22: T) -> bool {
    p11 > p12 && p11 > p22 && p11 + p22 > p12 + p12
}

fn half<T: Real>() -> T {
    T::from_f64(0.5).unwrap()
}

/// Population version of the original criterion in (t1, t2) coordinates.
pub fn population_original<T: Real>(t1: T, t2: T, p11: T, p12: T, p22: T) -> Result<T> {
    if t1 < T::zero() || t1 > T::one() || t2 < T::zero() || t2 > T::one() {
        return Err(Error::Domain(format!(
            "(t1, t2) = ({t1}, {t2}) outside the unit square"
        )));
    }
    let bracket = t1 * (t1 + t2 - T::one()) - half::<T>() * (t1 + t2);
    Ok(p22 - p12 + (p11 - p12 - p12 + p22) * bracket + half::<T>() * (p11 - p22) * (t1 + t2))
}

/// Whether (t1, t2) lies in [0, pi] x [0, 1-pi] union [pi, 1] x [1-pi, 1].
pub fn in_feasible_region<T: Real>(t1: T, t2: T, pi: T) -> bool {
    let lower = t1 >= T::zero() && t1 <= pi && t2 >= T::zero() && t2 <= T::one() - pi;
    let upper = t1 >= pi && t1 <= T::one() && t2 >= T::one() - pi && t2 <= T::one();
    lower || upper
}

/// Population version of the adjusted criterion; singular on t1 + t2 = 1.
pub fn population_adjusted<T: Real>(t1: T, t2: T, pi: T, p11: T, p12: T, p22: T) -> Result<T> {
    if !in_feasible_region(t1, t2, pi) {
        return Err(Error::Domain(format!(
            "(t1, t2) = ({t1}, {t2}) outside the feasible region for pi = {pi}"
        )));
    }
    let denom = t1 + t2 - T::one();
    if denom == T::zero() {
        return Err(Error::SingularPoint);
    }
    let factor = (t1 - pi) * (t2 - (T::one() - pi)) / (denom * denom);
    let brace = population_original(t1, t2, p11, p12, p22)?;
    Ok(factor * brace)
}

/// The only interior stationary-point candidate; always satisfies
/// t1* + t2* = 1.
pub fn interior_stationary_point<T: Real>(p11: T, p12: T, p22: T) -> Result<(T, T)> {
    let denom = p11 + p22 - p12 - p12;
    if denom == T::zero() {
        return Err(Error::Degenerate(
            "p11 + p22 = 2 p12 leaves no unique stationary point".into(),
        ));
    }
    Ok(((p22 - p12) / denom, (p11 - p12) / denom))
}

/// Which population criterion a grid scan maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopulationCriterion {
    Original,
    Adjusted,
}

/// Result of a grid maximization over the feasible region.
#[derive(Debug, Clone)]
pub struct GridArgmax<T> {
    pub t1: T,
    pub t2: T,
    pub value: T,
    /// Whether the theorem conditions held for the supplied parameters.
    pub conditions_hold: bool,
    /// True when another grid point ties the maximum (constant surfaces).
    pub degenerate: bool,
}

fn axis_grid<T: Real>(lo: T, hi: T, step: T) -> Vec<T> {
    if hi <= lo {
        return vec![lo];
    }
    let span = (hi - lo).to_f64().unwrap();
    let steps = (span / step.to_f64().unwrap()).ceil().max(1.0) as usize;
    let mut points: Vec<T> = (0..=steps)
        .map(|i| lo + (hi - lo) * T::from_count(i) / T::from_count(steps))
        .collect();
    if let Some(last) = points.last_mut() {
        *last = hi;
    }
    points
}

/// Grid argmax of a population criterion over the feasible region.
///
/// The adjusted criterion skips the band |t1 + t2 - 1| < step/2 around its
/// singular line. Under the theorem conditions the argmax is (1, 1).
pub fn population_grid_argmax<T: Real>(
    criterion: PopulationCriterion,
    pi: T,
    p11: T,
    p12: T,
    p22: T,
    step: T,
) -> Result<GridArgmax<T>> {
    let step_f = step.to_f64().unwrap_or(0.0);
    if !(step_f > 0.0 && step_f <= 0.1) {
        return Err(Error::Domain("step must lie in (0, 0.1]".into()));
    }
    if pi <= T::zero() || pi >= T::one() {
        return Err(Error::Domain("pi must lie strictly inside (0, 1)".into()));
    }
    let one = T::one();
    let rects = [
        (T::zero(), pi, T::zero(), one - pi),
        (pi, one, one - pi, one),
    ];
    let mut best: Option<(T, T, T)> = None;
    let mut tie = false;
    let tie_tol = T::from_f64(1e-12).unwrap();
    for &(a, b, c, d) in &rects {
        for &t1 in &axis_grid(a, b, step) {
            for &t2 in &axis_grid(c, d, step) {
                let value = match criterion {
                    PopulationCriterion::Original => population_original(t1, t2, p11, p12, p22)?,
                    PopulationCriterion::Adjusted => {
                        if (t1 + t2 - one).abs() < step * half::<T>() {
                            continue;
                        }
                        population_adjusted(t1, t2, pi, p11, p12, p22)?
                    }
                };
                match &mut best {
                    None => best = Some((t1, t2, value)),
                    Some((bt1, bt2, bv)) => {
                        if value > *bv + tie_tol {
                            *bt1 = t1;
                            *bt2 = t2;
                            *bv = value;
                            tie = false;
                        } else if (value - *bv).abs() <= tie_tol
                            && ((t1 - *bt1).abs() > tie_tol || (t2 - *bt2).abs() > tie_tol)
                        {
                            tie = true;
                            // Prefer the truthful corner among exact ties so the
                            // reported point is stable.
                            if t1 + t2 > *bt1 + *bt2 {
                                *bt1 = t1;
                                *bt2 = t2;
                                *bv = value;
                            }
                        }
                    }
                }
            }
        }
    }
    let (t1, t2, value) = best.ok_or_else(|| Error::Domain("empty grid".into()))?;
    Ok(GridArgmax {
        t1,
        t2,
        value,
        conditions_hold: check_consistency_conditions(p11, p12, p22),
        degenerate: tie,
    })
}
