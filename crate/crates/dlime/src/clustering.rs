//! Agglomerative hierarchical clustering with average linkage, plus the
//! dendrogram cuts used to pick the number of clusters.
//!
//! All tie-breaking is fixed: when two cluster pairs are at the same
//! distance, the pair with the lexicographically smallest (min_id, max_id)
//! node ids merges first. Leaves carry ids 0..n-1, internal nodes n..2n-2
//! in merge order.

use serde::{Deserialize, Serialize};

use crate::error::{DlimeError, Result};

/// One merge step: the two node ids joined, the average-linkage distance at
/// which they joined, and the size of the merged cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// Stepwise dendrogram over n leaves: exactly n-1 merges, heights
/// non-decreasing (average linkage is reducible, so no inversions).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

/// A flat partition of the leaves into `n_clusters` groups. Cluster ids are
/// normalized: cluster 0 contains leaf with the smallest index, and ids
/// increase with each cluster's smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatClustering {
    pub assignments: Vec<usize>,
    pub n_clusters: usize,
}

impl Dendrogram {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "spec_version": crate::data::SPEC_VERSION,
            "n_leaves": self.n_leaves,
            "merges": self.merges.iter()
                .map(|m| serde_json::json!([m.left, m.right, m.height, m.size]))
                .collect::<Vec<_>>(),
        })
    }
}

impl FlatClustering {
    /// Sizes indexed by cluster id.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.n_clusters];
        for &c in &self.assignments {
            sizes[c] += 1;
        }
        sizes
    }

    /// Row indices belonging to `cluster`.
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == cluster)
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Build the average-linkage dendrogram over Euclidean distances.
///
/// Lance-Williams update: d(a∪b, k) = (|a| d(a,k) + |b| d(b,k)) / (|a|+|b|).
/// Each step scans all active pairs for the minimum, O(n^2) per merge; fine
/// for the dataset sizes this crate targets.
pub fn agglomerate(rows: &[Vec<f64>]) -> Result<Dendrogram> {
    let n = rows.len();
    if n < 2 {
        return Err(DlimeError::Data(format!(
            "clustering needs at least 2 rows, got {n}"
        )));
    }

    // Slot i holds an active cluster; merged clusters reuse the left slot.
    let mut node_id: Vec<usize> = (0..n).collect();
    let mut size: Vec<usize> = vec![1; n];
    let mut active: Vec<bool> = vec![true; n];
    let mut dist: Vec<Vec<f64>> = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&rows[i], &rows[j]);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }

    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..(n - 1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..n {
                if !active[j] {
                    continue;
                }
                let (lo, hi) = if node_id[i] < node_id[j] {
                    (node_id[i], node_id[j])
                } else {
                    (node_id[j], node_id[i])
                };
                let cand = (dist[i][j], lo, hi, i, j);
                let better = match &best {
                    None => true,
                    Some(b) => (cand.0, cand.1, cand.2) < (b.0, b.1, b.2),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let (height, lo, hi, si, sj) = best.expect("at least two active clusters");
        let merged_size = size[si] + size[sj];
        merges.push(Merge {
            left: lo,
            right: hi,
            height,
            size: merged_size,
        });

        let (wa, wb) = (size[si] as f64, size[sj] as f64);
        for k in 0..n {
            if !active[k] || k == si || k == sj {
                continue;
            }
            let d = (wa * dist[si][k] + wb * dist[sj][k]) / (wa + wb);
            dist[si][k] = d;
            dist[k][si] = d;
        }
        node_id[si] = n + step;
        size[si] = merged_size;
        active[sj] = false;
    }

    Ok(Dendrogram { n_leaves: n, merges })
}

/// Cut into exactly `n_clusters` groups by undoing the last merges.
pub fn cut_k(d: &Dendrogram, n_clusters: usize) -> Result<FlatClustering> {
    let n = d.n_leaves;
    if n_clusters < 1 || n_clusters > n {
        return Err(DlimeError::Usage(format!(
            "cluster count {n_clusters} out of range 1..={n}"
        )));
    }

    // Union-find over leaves, applying the first n - n_clusters merges.
    let mut parent: Vec<usize> = (0..(2 * n - 1)).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (step, m) in d.merges.iter().take(n - n_clusters).enumerate() {
        let new_node = n + step;
        let a = find(&mut parent, m.left);
        let b = find(&mut parent, m.right);
        parent[a] = new_node;
        parent[b] = new_node;
    }

    // Relabel components in order of their smallest leaf.
    let mut label_of_root: std::collections::HashMap<usize, usize> =
        std::collections::HashMap::new();
    let mut assignments = vec![0usize; n];
    for leaf in 0..n {
        let root = find(&mut parent, leaf);
        let next = label_of_root.len();
        let label = *label_of_root.entry(root).or_insert(next);
        assignments[leaf] = label;
    }
    debug_assert_eq!(label_of_root.len(), n_clusters);

    Ok(FlatClustering {
        assignments,
        n_clusters,
    })
}

/// Choose the cluster count in 2..=max_C with the largest gap between
/// successive merge heights, ties toward smaller counts, then cut there.
///
/// With merges indexed 0..n-2, the gap for k clusters is
/// h[n-k] - h[n-k-1]: the distance between the first merge the cut undoes
/// and the last one it keeps.
pub fn cut_largest_gap(d: &Dendrogram, max_c: usize) -> Result<FlatClustering> {
    let n = d.n_leaves;
    if max_c < 2 {
        return Err(DlimeError::Usage("max_C must be at least 2".into()));
    }
    if n == 2 {
        return cut_k(d, 2);
    }
    let h = |j: usize| d.merges[j].height;
    let mut best_k = 2;
    let mut best_gap = f64::NEG_INFINITY;
    for k in 2..=max_c.min(n - 1) {
        let gap = h(n - k) - h(n - k - 1);
        if gap > best_gap {
            best_gap = gap;
            best_k = k;
        }
    }
    cut_k(d, best_k)
}
