//! Tabu search over two-way labelings with O(degree) move updates.
//!
//! One iteration performs exactly one label switch. Nodes are examined in a
//! fixed order: the first non-tabu switch that beats the global maximum is
//! taken immediately (and the scan restarts from the first position next
//! iteration); otherwise the non-tabu switch with the best resulting value of
//! the current criterion is taken, even if it is a downhill move. A switched
//! node is tabu for the next `tenure` iterations.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::criteria::{subset_stats, ExtractionCriterion, TwoWayLabeling};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Real;
use crate::seed::derive_seed;

/// Criterion a tabu run maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TabuCriterion {
    Original,
    Adjusted,
    /// Two-way modularity (Eq. with the 1/4m convention).
    Modularity,
}

impl From<ExtractionCriterion> for TabuCriterion {
    fn from(c: ExtractionCriterion) -> Self {
        match c {
            ExtractionCriterion::Original => TabuCriterion::Original,
            ExtractionCriterion::Adjusted => TabuCriterion::Adjusted,
        }
    }
}

/// Tabu search parameters.
#[derive(Debug, Clone)]
pub struct TabuConfig {
    /// Iterations a switched node stays tabu.
    pub tenure: usize,
    /// Total switch iterations per run.
    pub max_iters: usize,
    /// Independent random starts in [`multi_start`].
    pub restarts: usize,
    /// Seed for all derived randomness.
    pub seed: u64,
    /// Minimum allowed size of S and of its complement.
    pub min_side: usize,
}

impl TabuConfig {
    /// Defaults scaled to an n-node graph: tenure max(5, n/50), 50n iterations,
    /// 10 restarts.
    pub fn default_for(n: usize) -> Self {
        TabuConfig {
            tenure: 5.max(n / 50),
            max_iters: 1.max(50 * n),
            restarts: 10,
            seed: 0,
            min_side: 1,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.tenure < 1 || self.max_iters < 1 || self.restarts < 1 || self.min_side < 1 {
            return Err(Error::Domain(
                "tabu config requires tenure, max_iters, restarts, min_side >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// One recorded switch: (iteration, node).
pub type MoveRecord = (usize, usize);

/// Outcome of a tabu run or multi-start.
#[derive(Debug, Clone)]
pub struct SearchResult<T> {
    pub best_labeling: TwoWayLabeling,
    pub best_score: T,
    /// Best-so-far score after each iteration (nondecreasing).
    pub trace: Vec<T>,
    /// Log of performed switches, for auditing the tabu discipline.
    pub moves: Vec<MoveRecord>,
}

/// What the engine maximizes. `SplitGain` is used internally by sequential
/// modularity splitting: it measures the global modularity gain of splitting
/// a parent community, so degree sums come from the full graph.
#[derive(Debug, Clone)]
pub(crate) enum Objective<T> {
    Original,
    Adjusted,
    Modularity,
    SplitGain {
        full_degrees: Vec<T>,
        full_total: T,
        parent_degree: T,
    },
}

impl<T: Real> Objective<T> {
    fn node_weight(&self, g: &Graph<T>, v: usize) -> T {
        match self {
            Objective::Modularity => g.degree(v),
            Objective::SplitGain { full_degrees, .. } => full_degrees[v],
            _ => T::zero(),
        }
    }

    fn score(&self, o: T, b: T, size: usize, degsum: T, n: usize, two_m: T) -> T {
        match self {
            Objective::Original => {
                let s = T::from_count(size);
                let c = T::from_count(n - size);
                o / (s * s) - b / (s * c)
            }
            Objective::Adjusted => {
                let s = T::from_count(size);
                let c = T::from_count(n - size);
                s * c * (o / (s * s) - b / (s * c))
            }
            Objective::Modularity => {
                let two = T::from_count(2);
                let four = T::from_count(4);
                let u = two * degsum - two_m;
                (two_m - four * b - u * u / two_m) / (two * two_m)
            }
            Objective::SplitGain {
                full_total,
                parent_degree,
                ..
            } => degsum * (*parent_degree - degsum) / *full_total - b,
        }
    }
}

fn objective_of<T: Real>(c: TabuCriterion) -> Objective<T> {
    match c {
        TabuCriterion::Original => Objective::Original,
        TabuCriterion::Adjusted => Objective::Adjusted,
        TabuCriterion::Modularity => Objective::Modularity,
    }
}

struct Engine<'a, T> {
    g: &'a Graph<T>,
    objective: &'a Objective<T>,
    labeling: TwoWayLabeling,
    /// Weighted links of each node into the current S.
    to_set: Vec<T>,
    o: T,
    b: T,
    size: usize,
    degsum: T,
    two_m: T,
    n: usize,
}

impl<'a, T: Real> Engine<'a, T> {
    fn new(g: &'a Graph<T>, objective: &'a Objective<T>, init: TwoWayLabeling) -> Self {
        let n = g.node_count();
        let stats = subset_stats(g, &init);
        let mut to_set = vec![T::zero(); n];
        let mut degsum = T::zero();
        for i in 0..n {
            let mut t = T::zero();
            for &(j, w) in g.neighbors(i) {
                if init.contains(j) {
                    t += w;
                }
            }
            to_set[i] = t;
            if init.contains(i) {
                degsum += objective.node_weight(g, i);
            }
        }
        Engine {
            g,
            objective,
            labeling: init,
            to_set,
            o: stats.internal,
            b: stats.boundary,
            size: stats.size,
            degsum,
            two_m: g.total_weight(),
            n,
        }
    }

    fn current_score(&self) -> T {
        self.objective
            .score(self.o, self.b, self.size, self.degsum, self.n, self.two_m)
    }

    /// Score after switching `v`, without performing the switch.
    fn candidate_score(&self, v: usize) -> T {
        let tv = self.to_set[v];
        let kv = self.g.degree(v);
        let wv = self.objective.node_weight(self.g, v);
        let two = T::from_count(2);
        let (o, b, size, degsum) = if self.labeling.contains(v) {
            (
                self.o - two * tv,
                self.b + tv - (kv - tv),
                self.size - 1,
                self.degsum - wv,
            )
        } else {
            (
                self.o + two * tv,
                self.b - tv + (kv - tv),
                self.size + 1,
                self.degsum + wv,
            )
        };
        self.objective.score(o, b, size, degsum, self.n, self.two_m)
    }

    fn feasible(&self, v: usize, min_side: usize) -> bool {
        if self.labeling.contains(v) {
            self.size > min_side
        } else {
            self.n - self.size > min_side
        }
    }

    fn perform_switch(&mut self, v: usize) {
        let tv = self.to_set[v];
        let kv = self.g.degree(v);
        let wv = self.objective.node_weight(self.g, v);
        let two = T::from_count(2);
        let entering = !self.labeling.contains(v);
        if entering {
            self.o += two * tv;
            self.b = self.b - tv + (kv - tv);
            self.size += 1;
            self.degsum += wv;
        } else {
            self.o = self.o - two * tv;
            self.b = self.b + tv - (kv - tv);
            self.size -= 1;
            self.degsum -= wv;
        }
        self.labeling.flip(v);
        for &(j, w) in self.g.neighbors(v) {
            if entering {
                self.to_set[j] += w;
            } else {
                self.to_set[j] -= w;
            }
        }
    }
}

pub(crate) fn run_engine<T: Real>(
    g: &Graph<T>,
    objective: &Objective<T>,
    init: TwoWayLabeling,
    order: &[usize],
    cfg: &TabuConfig,
) -> Result<SearchResult<T>> {
    cfg.validate()?;
    let n = g.node_count();
    if n < 2 * cfg.min_side {
        return Err(Error::Domain(format!(
            "graph with {n} nodes cannot hold two sides of size >= {}",
            cfg.min_side
        )));
    }
    if init.len() != n {
        return Err(Error::LengthMismatch {
            left: init.len(),
            right: n,
        });
    }
    let init_size = init.set_size();
    if init_size < cfg.min_side || n - init_size < cfg.min_side {
        return Err(Error::InfeasibleSubset { size: init_size, n });
    }
    {
        let mut seen = vec![false; n];
        for &v in order {
            if v >= n || seen[v] {
                return Err(Error::Domain("order must be a permutation of 0..n".into()));
            }
            seen[v] = true;
        }
        if order.len() != n {
            return Err(Error::Domain("order must be a permutation of 0..n".into()));
        }
    }

    let mut engine = Engine::new(g, objective, init);
    let mut best_score = engine.current_score();
    let mut best_labeling = engine.labeling.clone();
    let mut trace = Vec::with_capacity(cfg.max_iters);
    let mut moves = Vec::new();
    // Node v may switch again only at iterations > tabu_until[v].
    let mut tabu_until = vec![0usize; n];

    'iterations: for iter in 1..=cfg.max_iters {
        let chosen = loop {
            let mut fallback: Option<(usize, T)> = None;
            let mut any_tabu_candidate = false;
            let mut improver = None;
            for &v in order {
                if !engine.feasible(v, cfg.min_side) {
                    continue;
                }
                if tabu_until[v] >= iter {
                    any_tabu_candidate = true;
                    continue;
                }
                let score = engine.candidate_score(v);
                if score > best_score {
                    improver = Some(v);
                    break;
                }
                match fallback {
                    Some((_, f)) if score <= f => {}
                    _ => fallback = Some((v, score)),
                }
            }
            if let Some(v) = improver {
                break Some(v);
            }
            if let Some((v, _)) = fallback {
                break Some(v);
            }
            if !any_tabu_candidate {
                // Every node is infeasible: no move will ever open up.
                break None;
            }
            // Anti-deadlock: everything switchable is tabu; free the node
            // whose tabu status expires soonest (lowest index on ties).
            let oldest = (0..n)
                .filter(|&v| tabu_until[v] >= iter && engine.feasible(v, cfg.min_side))
                .min_by_key(|&v| (tabu_until[v], v))
                .expect("a tabu candidate exists");
            tabu_until[oldest] = 0;
        };
        let Some(v) = chosen else {
            break 'iterations;
        };
        engine.perform_switch(v);
        tabu_until[v] = iter + cfg.tenure;
        moves.push((iter, v));
        let score = engine.current_score();
        if score > best_score {
            best_score = score;
            best_labeling = engine.labeling.clone();
        }
        trace.push(best_score);
    }

    Ok(SearchResult {
        best_labeling,
        best_score,
        trace,
        moves,
    })
}

/// Maximize `criterion` from a given start and node order.
///
/// Deterministic in (init, order, cfg); the best labeling ever visited is
/// returned, not the final one.
pub fn tabu_maximize<T: Real>(
    g: &Graph<T>,
    criterion: TabuCriterion,
    init: TwoWayLabeling,
    order: &[usize],
    cfg: &TabuConfig,
) -> Result<SearchResult<T>> {
    let objective = objective_of::<T>(criterion);
    run_engine(g, &objective, init, order, cfg)
}

/// Draw a labeling with each node in S with probability 1/2, redrawn until
/// both sides have at least `min_side` nodes.
pub fn random_feasible_labeling<R: Rng>(n: usize, min_side: usize, rng: &mut R) -> TwoWayLabeling {
    loop {
        let in_set: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
        let size = in_set.iter().filter(|&&b| b).count();
        if size >= min_side && n - size >= min_side {
            return TwoWayLabeling::new(in_set);
        }
    }
}

pub(crate) fn random_order<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

pub(crate) fn multi_start_engine<T: Real>(
    g: &Graph<T>,
    objective: &Objective<T>,
    cfg: &TabuConfig,
) -> Result<SearchResult<T>> {
    cfg.validate()?;
    let n = g.node_count();
    if n < 2 * cfg.min_side {
        return Err(Error::Domain(format!(
            "graph with {n} nodes cannot hold two sides of size >= {}",
            cfg.min_side
        )));
    }
    let runs: Result<Vec<(usize, SearchResult<T>)>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, r as u64));
            let init = random_feasible_labeling(n, cfg.min_side, &mut rng);
            let order = random_order(n, &mut rng);
            run_engine(g, objective, init, &order, cfg).map(|res| (r, res))
        })
        .collect();
    let best = runs?
        .into_iter()
        .min_by(|(ra, a), (rb, b)| {
            // Max score first; lowest run index breaks ties, so the reduction
            // is independent of scheduling.
            b.best_score
                .partial_cmp(&a.best_score)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(ra.cmp(rb))
        })
        .map(|(_, res)| res)
        .expect("restarts >= 1");
    Ok(best)
}

/// Best result over `cfg.restarts` independent tabu runs, each from a fresh
/// random start and random node order. Run r derives its seed from
/// (cfg.seed, r), so results do not depend on how runs are scheduled.
pub fn multi_start<T: Real>(
    g: &Graph<T>,
    criterion: TabuCriterion,
    cfg: &TabuConfig,
) -> Result<SearchResult<T>> {
    let objective = objective_of::<T>(criterion);
    multi_start_engine(g, &objective, cfg)
}
