//! Undirected weighted graphs with cached degrees.
//!
//! The adjacency is stored as sorted neighbor lists (CSR style). Graphs are
//! immutable after construction: symmetry, a zero diagonal and nonnegative
//! weights are enforced at build time, and `degrees`/`total_weight` are cached
//! so that every criterion can read them without recomputation.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One undirected edge record prior to graph assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord<T> {
    pub u: usize,
    pub v: usize,
    pub w: T,
}

/// Immutable undirected weighted graph.
#[derive(Debug, Clone)]
pub struct Graph<T> {
    n: usize,
    /// Row pointers into `neighbors`, length n + 1.
    offsets: Vec<usize>,
    /// Flattened (neighbor, weight) lists, sorted by neighbor within each row.
    neighbors: Vec<(usize, T)>,
    /// Weighted degree k_i = sum_j A_ij.
    degrees: Vec<T>,
    /// 2m = sum_i k_i.
    total: T,
}

impl<T: Real> Graph<T> {
    /// Build a graph from undirected edge records over nodes `0..n`.
    ///
    /// Self-loop records are dropped (their count is reported by
    /// [`Graph::from_edges_counting`]); duplicate pairs and negative weights
    /// are errors.
    pub fn from_edges(n: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        Self::from_edges_counting(n, edges).map(|(g, _)| g)
    }

    /// Same as [`Graph::from_edges`] but also returns how many self-loop
    /// records were dropped.
    pub fn from_edges_counting(n: usize, edges: &[(usize, usize, T)]) -> Result<(Self, usize)> {
        let mut dropped = 0usize;
        let mut half: Vec<(usize, usize, T)> = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::NodeOutOfRange { node: u.max(v), n });
            }
            if w < T::zero() {
                return Err(Error::NegativeWeight {
                    line: 0,
                    weight: w.to_f64().unwrap_or(f64::NAN),
                });
            }
            if u == v {
                dropped += 1;
                continue;
            }
            half.push((u.min(v), u.max(v), w));
        }
        half.sort_by_key(|&(u, v, _)| (u, v));
        for pair in half.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(Error::DuplicateEdge {
                    u: pair[0].0.to_string(),
                    v: pair[0].1.to_string(),
                });
            }
        }
        Ok((Self::assemble(n, &half), dropped))
    }

    /// `half` must hold each undirected edge once with u < v, no duplicates.
    fn assemble(n: usize, half: &[(usize, usize, T)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(u, v, _) in half {
            counts[u + 1] += 1;
            counts[v + 1] += 1;
        }
        let mut offsets = counts;
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![(0usize, T::zero()); half.len() * 2];
        for &(u, v, w) in half {
            neighbors[cursor[u]] = (v, w);
            cursor[u] += 1;
            neighbors[cursor[v]] = (u, w);
            cursor[v] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_by_key(|&(j, _)| j);
        }
        let mut degrees = vec![T::zero(); n];
        let mut total = T::zero();
        for i in 0..n {
            let mut k = T::zero();
            for &(_, w) in &neighbors[offsets[i]..offsets[i + 1]] {
                k += w;
            }
            degrees[i] = k;
            total += k;
        }
        Graph {
            n,
            offsets,
            neighbors,
            degrees,
            total,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Weighted degree k_i.
    pub fn degree(&self, i: usize) -> T {
        self.degrees[i]
    }

    /// All weighted degrees; sums to `total_weight`.
    pub fn degrees(&self) -> &[T] {
        &self.degrees
    }

    /// 2m, twice the total edge weight.
    pub fn total_weight(&self) -> T {
        self.total
    }

    /// Number of stored undirected edges.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Sorted (neighbor, weight) list of node `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, T)] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Weight A_ij (zero when no edge, including the diagonal).
    pub fn weight(&self, i: usize, j: usize) -> T {
        let row = self.neighbors(i);
        match row.binary_search_by_key(&j, |&(nbr, _)| nbr) {
            Ok(pos) => row[pos].1,
            Err(_) => T::zero(),
        }
    }

    /// Iterate each undirected edge once as (u, v, w) with u < v.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&(v, _)| v > u)
                .map(move |&(v, w)| (u, v, w))
        })
    }

    /// Induced subgraph on `nodes` (edges to outside nodes are discarded).
    ///
    /// Returns the subgraph together with the map from new to original ids.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> (Graph<T>, Vec<usize>) {
        let mut order: Vec<usize> = nodes.to_vec();
        order.sort_unstable();
        order.dedup();
        let mut local = HashMap::with_capacity(order.len());
        for (new, &old) in order.iter().enumerate() {
            local.insert(old, new);
        }
        let mut half = Vec::new();
        for (new_u, &old_u) in order.iter().enumerate() {
            for &(old_v, w) in self.neighbors(old_u) {
                if old_v > old_u {
                    if let Some(&new_v) = local.get(&old_v) {
                        half.push((new_u.min(new_v), new_u.max(new_v), w));
                    }
                }
            }
        }
        half.sort_by_key(|&(u, v, _)| (u, v));
        (Self::assemble(order.len(), &half), order)
    }

    /// Check structural invariants: symmetry, zero diagonal, degree cache.
    pub fn validate(&self) -> Result<()> {
        let tol = T::from_f64(1e-12).unwrap();
        let mut total = T::zero();
        for i in 0..self.n {
            let mut k = T::zero();
            for &(j, w) in self.neighbors(i) {
                if j == i {
                    return Err(Error::Domain(format!("self-loop stored at node {i}")));
                }
                if w < T::zero() {
                    return Err(Error::Domain(format!("negative weight at ({i}, {j})")));
                }
                if (self.weight(j, i) - w).abs() > tol {
                    return Err(Error::Domain(format!("asymmetric weight at ({i}, {j})")));
                }
                k += w;
            }
            if (k - self.degrees[i]).abs() > tol * T::max(T::one(), k) {
                return Err(Error::Domain(format!("stale degree cache at node {i}")));
            }
            total += k;
        }
        if (total - self.total).abs() > tol * T::max(T::one(), total) {
            return Err(Error::Domain("stale total weight".into()));
        }
        Ok(())
    }
}

/// How to interpret the direction of edge records while loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectedMode {
    /// Records are undirected; a repeated pair (in either orientation) is an error.
    Undirected,
    /// Records are directed; A_ij is the average of the two directed weights,
    /// with a missing direction contributing zero.
    AverageDirected,
}

/// A graph loaded from an edge list, with the original node labels retained.
#[derive(Debug, Clone)]
pub struct LoadedGraph<T> {
    pub graph: Graph<T>,
    /// Original label of each compacted node id.
    pub labels: Vec<String>,
    /// Number of self-loop records dropped during loading.
    pub dropped_self_loops: usize,
}

impl<T: Real> LoadedGraph<T> {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Parse whitespace-separated `u v [w]` lines into a graph.
///
/// `#` starts a comment; blank lines are skipped. Node ids are arbitrary
/// tokens, compacted to `0..n` in first-appearance order.
pub fn load_edge_list<T: Real, R: BufRead>(
    reader: R,
    mode: DirectedMode,
) -> Result<LoadedGraph<T>> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |tok: &str, labels: &mut Vec<String>| -> usize {
        if let Some(&i) = index.get(tok) {
            return i;
        }
        let i = labels.len();
        labels.push(tok.to_string());
        index.insert(tok.to_string(), i);
        i
    };

    // Direction preserved; self-loops dropped here.
    let mut records: Vec<EdgeRecord<T>> = Vec::new();
    let mut dropped = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let u_tok = fields.next().unwrap();
        let v_tok = fields.next().ok_or_else(|| Error::Parse {
            line: lineno,
            msg: "expected at least two fields: u v [w]".into(),
        })?;
        let w = match fields.next() {
            None => T::one(),
            Some(tok) => {
                let parsed: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("invalid weight '{tok}'"),
                })?;
                if parsed < 0.0 {
                    return Err(Error::NegativeWeight {
                        line: lineno,
                        weight: parsed,
                    });
                }
                T::from_f64(parsed).ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: format!("weight '{tok}' not representable"),
                })?
            }
        };
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                msg: "too many fields: expected u v [w]".into(),
            });
        }
        let u = intern(u_tok, &mut labels);
        let v = intern(v_tok, &mut labels);
        if u == v {
            dropped += 1;
            continue;
        }
        records.push(EdgeRecord { u, v, w });
    }

    let n = labels.len();
    let half: Vec<(usize, usize, T)> = match mode {
        DirectedMode::Undirected => {
            let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
            for r in &records {
                let key = (r.u.min(r.v), r.u.max(r.v));
                if seen.insert(key, ()).is_some() {
                    return Err(Error::DuplicateEdge {
                        u: labels[r.u].clone(),
                        v: labels[r.v].clone(),
                    });
                }
            }
            records
                .into_iter()
                .map(|r| (r.u.min(r.v), r.u.max(r.v), r.w))
                .collect()
        }
        DirectedMode::AverageDirected => {
            let mut directed: HashMap<(usize, usize), T> = HashMap::new();
            for r in &records {
                if directed.insert((r.u, r.v), r.w).is_some() {
                    return Err(Error::DuplicateEdge {
                        u: labels[r.u].clone(),
                        v: labels[r.v].clone(),
                    });
                }
            }
            let half = T::from_f64(0.5).unwrap();
            let mut merged: HashMap<(usize, usize), T> = HashMap::new();
            for (&(u, v), &w) in &directed {
                let key = (u.min(v), u.max(v));
                let entry = merged.entry(key).or_insert_with(T::zero);
                *entry = *entry + w * half;
            }
            merged.into_iter().map(|((u, v), w)| (u, v, w)).collect()
        }
    };

    let mut half = half;
    half.sort_by_key(|&(u, v, _)| (u, v));
    let graph = Graph::assemble(n, &half);
    Ok(LoadedGraph {
        graph,
        labels,
        dropped_self_loops: dropped,
    })
}

/// Serialize to the same `u v w` edge-list format the loader accepts.
///
/// Nodes with no incident edges are emitted as self-loop records so the
/// node set round-trips.
pub fn write_edge_list<T: Real, W: std::io::Write>(
    g: &Graph<T>,
    labels: Option<&[String]>,
    out: &mut W,
) -> std::io::Result<()> {
    let name = |i: usize| -> String {
        match labels {
            Some(ls) => ls[i].clone(),
            None => i.to_string(),
        }
    };
    for (u, v, w) in g.edges() {
        writeln!(out, "{} {} {}", name(u), name(v), w)?;
    }
    for i in 0..g.node_count() {
        if g.neighbors(i).is_empty() {
            writeln!(out, "{} {} 0", name(i), name(i))?;
        }
    }
    Ok(())
}

/// The weighted degree vector k with sum(k) = 2m.
pub fn degree_vector<T: Real>(g: &Graph<T>) -> Vec<T> {
    g.degrees().to_vec()
}

/// Parsed `node_id true_label` file; classes compacted to `0..K` in
/// first-appearance order.
#[derive(Debug, Clone)]
pub struct LabelFile {
    pub assignments: Vec<(String, usize)>,
    pub class_names: Vec<String>,
}

pub fn load_label_file<R: BufRead>(reader: R) -> Result<LabelFile> {
    let mut classes: HashMap<String, usize> = HashMap::new();
    let mut class_names = Vec::new();
    let mut assignments = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let node = fields.next().unwrap().to_string();
        let class_tok = fields.next().ok_or_else(|| Error::Parse {
            line: lineno,
            msg: "expected: node_id true_label".into(),
        })?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                msg: "too many fields: expected node_id true_label".into(),
            });
        }
        let class = match classes.get(class_tok) {
            Some(&c) => c,
            None => {
                let c = class_names.len();
                classes.insert(class_tok.to_string(), c);
                class_names.push(class_tok.to_string());
                c
            }
        };
        assignments.push((node, class));
    }
    Ok(LabelFile {
        assignments,
        class_names,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn g1() -> Graph<f64> {
        Graph::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap()
    }

    #[test]
    fn undirected_load_basic() {
        let loaded: LoadedGraph<f64> =
            load_edge_list(Cursor::new("0 1\n1 2\n"), DirectedMode::Undirected).unwrap();
        let g = loaded.graph;
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.weight(0, 1), 1.0);
        assert_eq!(g.weight(1, 2), 1.0);
        assert_eq!(g.weight(0, 2), 0.0);
        assert_eq!(degree_vector(&g), vec![1.0, 2.0, 1.0]);
        assert_eq!(g.total_weight(), 4.0);
    }

    #[test]
    fn average_directed_load() {
        let loaded: LoadedGraph<f64> =
            load_edge_list(Cursor::new("0 1 4\n1 0 2\n"), DirectedMode::AverageDirected).unwrap();
        assert_eq!(loaded.graph.weight(0, 1), 3.0);
        // A missing reverse direction contributes zero.
        let loaded: LoadedGraph<f64> =
            load_edge_list(Cursor::new("0 1 4\n"), DirectedMode::AverageDirected).unwrap();
        assert_eq!(loaded.graph.weight(0, 1), 2.0);
    }

    #[test]
    fn self_loop_dropped() {
        let loaded: LoadedGraph<f64> =
            load_edge_list(Cursor::new("0 0 5\n"), DirectedMode::Undirected).unwrap();
        assert_eq!(loaded.graph.node_count(), 1);
        assert_eq!(loaded.graph.edge_count(), 0);
        assert_eq!(loaded.dropped_self_loops, 1);
    }

    #[test]
    fn duplicate_pair_rejected() {
        let err = load_edge_list::<f64, _>(Cursor::new("a b 1\nb a 2\n"), DirectedMode::Undirected)
            .unwrap_err();
        assert!(matches!(err, Error::DuplicateEdge { .. }));
    }

    #[test]
    fn malformed_line_has_number() {
        let err = load_edge_list::<f64, _>(Cursor::new("0 1\nbroken\n"), DirectedMode::Undirected)
            .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn negative_weight_rejected() {
        let err = load_edge_list::<f64, _>(Cursor::new("0 1 -2\n"), DirectedMode::Undirected)
            .unwrap_err();
        assert!(matches!(err, Error::NegativeWeight { line: 1, .. }));
    }

    #[test]
    fn comments_and_labels() {
        let text = "# header\nalice bob 2 # inline\n\nbob carol\n";
        let loaded: LoadedGraph<f64> =
            load_edge_list(Cursor::new(text), DirectedMode::Undirected).unwrap();
        assert_eq!(loaded.labels, vec!["alice", "bob", "carol"]);
        assert_eq!(loaded.graph.weight(0, 1), 2.0);
    }

    #[test]
    fn g1_degrees() {
        let g = g1();
        assert_eq!(degree_vector(&g), vec![2.0, 2.0, 3.0, 1.0]);
        assert_eq!(g.total_weight(), 8.0);
        g.validate().unwrap();
    }

    #[test]
    fn empty_graph_degrees() {
        let g: Graph<f64> = Graph::from_edges(4, &[]).unwrap();
        assert_eq!(degree_vector(&g), vec![0.0; 4]);
        assert_eq!(g.total_weight(), 0.0);
    }

    #[test]
    fn induced_subgraph_drops_outside_edges() {
        let g = g1();
        let (sub, ids) = g.induced_subgraph(&[0, 1, 2]);
        assert_eq!(ids, vec![0, 1, 2]);
        assert_eq!(sub.total_weight(), 6.0);
        assert_eq!(sub.weight(0, 1), 1.0);
        let (sub, ids) = g.induced_subgraph(&[2, 3]);
        assert_eq!(ids, vec![2, 3]);
        assert_eq!(sub.weight(0, 1), 1.0);
        assert_eq!(sub.total_weight(), 2.0);
    }

    #[test]
    fn serialize_round_trip() {
        let g = g1();
        let mut buf = Vec::new();
        write_edge_list(&g, None, &mut buf).unwrap();
        let reloaded: LoadedGraph<f64> =
            load_edge_list(Cursor::new(buf), DirectedMode::Undirected).unwrap();
        assert_eq!(reloaded.graph.node_count(), 4);
        for i in 0..4 {
            for j in 0..4 {
                // Labels were numeric strings in first-appearance order, which
                // matches edge iteration order here.
                let a = g.weight(i, j);
                let b = reloaded
                    .graph
                    .weight(reloaded.index_of(&i.to_string()).unwrap(), {
                        reloaded.index_of(&j.to_string()).unwrap()
                    });
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn label_file_parsing() {
        let parsed = load_label_file(Cursor::new("a hi\nb officer\nc hi\n")).unwrap();
        assert_eq!(
            parsed.assignments,
            vec![
                ("a".to_string(), 0),
                ("b".to_string(), 1),
                ("c".to_string(), 0)
            ]
        );
        assert_eq!(parsed.class_names, vec!["hi", "officer"]);
    }
}
