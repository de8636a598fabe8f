//! Shared test oracles, independent of the implementation paths they check.
// Each test binary uses its own subset of these helpers.
#![allow(dead_code)]

use commex::blockmodel::{sample_block_model, BlockModelParams, SizeSpec};
use commex::criteria::{
    adjusted_score, extraction_score, modularity_score, subset_stats, TwoWayLabeling,
};
use commex::Graph64;

pub fn g1() -> Graph64 {
    Graph64::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap()
}

/// Erdos-Renyi graph via the one-block model.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph64 {
    let params = BlockModelParams::<f64> {
        n,
        sizes: SizeSpec::Fixed(vec![n]),
        p: vec![vec![p]],
        rho: None,
    };
    sample_block_model(&params, seed).unwrap().0
}

/// Exhaustive maximum of the adjusted criterion over all feasible subsets.
pub fn enumerate_max_adjusted(g: &Graph64) -> (f64, Vec<usize>) {
    enumerate_max(g, |g, s| {
        adjusted_score(&subset_stats(g, s), g.node_count()).unwrap()
    })
}

/// Exhaustive maximum of the original criterion over all feasible subsets.
pub fn enumerate_max_original(g: &Graph64) -> (f64, Vec<usize>) {
    enumerate_max(g, |g, s| {
        extraction_score(&subset_stats(g, s), g.node_count()).unwrap()
    })
}

/// Exhaustive maximum of two-way modularity over all feasible subsets.
pub fn enumerate_max_modularity(g: &Graph64) -> (f64, Vec<usize>) {
    enumerate_max(g, |g, s| modularity_score(g, s).unwrap())
}

fn enumerate_max(
    g: &Graph64,
    score: impl Fn(&Graph64, &TwoWayLabeling) -> f64,
) -> (f64, Vec<usize>) {
    let n = g.node_count();
    assert!(n <= 20, "enumeration oracle limited to tiny graphs");
    let mut best = f64::NEG_INFINITY;
    let mut best_members = Vec::new();
    for mask in 1u64..((1 << n) - 1) {
        let members: Vec<usize> = (0..n).filter(|&b| mask >> b & 1 == 1).collect();
        let s = TwoWayLabeling::from_members(n, &members);
        let value = score(g, &s);
        if value > best {
            best = value;
            best_members = members;
        }
    }
    (best, best_members)
}

/// Dense symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns (eigenvalues, eigenvectors as rows), unsorted.
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[p][k];
                    let vkq = v[q][k];
                    v[p][k] = c * vkp - s * vkq;
                    v[q][k] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigvals = (0..n).map(|i| a[i][i]).collect();
    (eigvals, v)
}

/// Dense modularity matrix B = A - k k^T / 2m.
pub fn dense_modularity_matrix(g: &Graph64) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let two_m = g.total_weight();
    let mut b = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            b[i][j] = g.weight(i, j) - g.degree(i) * g.degree(j) / two_m;
        }
    }
    b
}

/// Leading eigenvector of B restricted to the subspace orthogonal to the
/// constant vector, via the dense Jacobi oracle. Also returns the gap to the
/// runner-up eigenvalue; sign patterns are only well defined when it is open.
pub fn oracle_leading_split_vector(g: &Graph64) -> (Vec<f64>, f64) {
    let n = g.node_count();
    let (vals, vecs) = jacobi_eigen(dense_modularity_matrix(g));
    let mut candidates: Vec<(f64, &Vec<f64>)> = vals
        .iter()
        .zip(vecs.iter())
        .filter(|(_, vec)| {
            let mean: f64 = vec.iter().sum::<f64>() / n as f64;
            let ortho: f64 = vec.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
            ortho >= 1e-8 // the constant eigenvector carries no split
        })
        .map(|(l, v)| (*l, v))
        .collect();
    candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let (lead, vec) = candidates[0];
    let gap = if candidates.len() > 1 {
        lead - candidates[1].0
    } else {
        f64::INFINITY
    };
    (vec.clone(), gap)
}
