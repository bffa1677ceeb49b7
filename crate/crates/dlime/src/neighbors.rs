//! Exact nearest-neighbor queries and majority-vote cluster routing.

use crate::clustering::{euclidean, FlatClustering};
use crate::error::{DlimeError, Result};

/// Borrowing view over the training rows plus their flat-cluster labels.
pub struct NeighborIndex<'a> {
    rows: &'a [Vec<f64>],
    cluster_labels: &'a [usize],
}

impl<'a> NeighborIndex<'a> {
    pub fn new(rows: &'a [Vec<f64>], clustering: &'a FlatClustering) -> Result<Self> {
        if clustering.assignments.len() != rows.len() {
            return Err(DlimeError::Internal(format!(
                "cluster labels length {} does not match {} rows",
                clustering.assignments.len(),
                rows.len()
            )));
        }
        Ok(NeighborIndex {
            rows,
            cluster_labels: &clustering.assignments,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// The k nearest training rows to `x`, ascending by distance; equal
    /// distances order by row index.
    pub fn knn_query(&self, x: &[f64], k: usize) -> Result<Vec<(usize, f64)>> {
        let n = self.rows.len();
        if k == 0 || k > n {
            return Err(DlimeError::Usage(format!("k={k} out of range 1..={n}")));
        }
        if x.len() != self.rows[0].len() {
            return Err(DlimeError::Data(format!(
                "query has {} features, index has {}",
                x.len(),
                self.rows[0].len()
            )));
        }
        let mut dists: Vec<(usize, f64)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (i, euclidean(r, x)))
            .collect();
        dists.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        dists.truncate(k);
        Ok(dists)
    }

    /// Majority cluster id among the k nearest neighbors. Vote ties go to
    /// the nearest neighbor's cluster, then to the smaller cluster id.
    pub fn route_cluster(&self, x: &[f64], k: usize) -> Result<usize> {
        let neighbors = self.knn_query(x, k)?;
        let mut votes: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
        for &(row, _) in &neighbors {
            *votes.entry(self.cluster_labels[row]).or_insert(0) += 1;
        }
        let max_votes = *votes.values().max().unwrap();
        let nearest_cluster = self.cluster_labels[neighbors[0].0];
        if votes[&nearest_cluster] == max_votes {
            return Ok(nearest_cluster);
        }
        // BTreeMap iteration is ascending, so the first max is the smallest id.
        Ok(*votes
            .iter()
            .find(|(_, &v)| v == max_votes)
            .map(|(c, _)| c)
            .unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn flat(labels: Vec<usize>) -> FlatClustering {
        let n_clusters = labels.iter().copied().max().map_or(1, |m| m + 1);
        FlatClustering {
            assignments: labels,
            n_clusters,
        }
    }

    #[test]
    fn self_query_returns_own_index_at_zero() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, -(i as f64)]).collect();
        let labels = flat(vec![0; 10]);
        let idx = NeighborIndex::new(&rows, &labels).unwrap();
        let hits = idx.knn_query(&rows[7].clone(), 1).unwrap();
        assert_eq!(hits, vec![(7, 0.0)]);
    }

    #[test]
    fn one_dimensional_hand_distance() {
        let rows = vec![vec![0.0], vec![10.0]];
        let labels = flat(vec![0, 1]);
        let idx = NeighborIndex::new(&rows, &labels).unwrap();
        assert_eq!(idx.knn_query(&[4.0], 1).unwrap(), vec![(0, 4.0)]);
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        let mut rng = CounterRng::new(321);
        for _ in 0..50 {
            let n = 5 + rng.range_usize(196);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..3).map(|_| rng.uniform(-4.0, 4.0)).collect())
                .collect();
            let labels = flat(vec![0; n]);
            let idx = NeighborIndex::new(&rows, &labels).unwrap();
            let x: Vec<f64> = (0..3).map(|_| rng.uniform(-4.0, 4.0)).collect();
            let k = 1 + rng.range_usize(n.min(8));

            let mut brute: Vec<(usize, f64)> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| (i, euclidean(r, &x)))
                .collect();
            brute.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
            brute.truncate(k);

            assert_eq!(idx.knn_query(&x, k).unwrap(), brute);
        }
    }

    #[test]
    fn distances_are_non_decreasing() {
        let mut rng = CounterRng::new(9);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..2).map(|_| rng.uniform(0.0, 1.0)).collect())
            .collect();
        let labels = flat(vec![0; 30]);
        let idx = NeighborIndex::new(&rows, &labels).unwrap();
        let hits = idx.knn_query(&[0.5, 0.5], 10).unwrap();
        for w in hits.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
    }

    #[test]
    fn k1_routes_to_nearest_cluster() {
        let rows = vec![vec![0.0], vec![1.0], vec![10.0]];
        let labels = flat(vec![0, 0, 1]);
        let idx = NeighborIndex::new(&rows, &labels).unwrap();
        assert_eq!(idx.route_cluster(&[9.0], 1).unwrap(), 1);
        assert_eq!(idx.route_cluster(&[0.4], 1).unwrap(), 0);
    }

    #[test]
    fn strict_majority_wins() {
        let rows = vec![vec![0.0], vec![1.0], vec![2.0]];
        let labels = flat(vec![1, 1, 0]);
        let idx = NeighborIndex::new(&rows, &labels).unwrap();
        assert_eq!(idx.route_cluster(&[1.0], 3).unwrap(), 1);
    }

    #[test]
    fn vote_tie_goes_to_nearest_neighbors_cluster() {
        let rows = vec![vec![0.0], vec![3.0]];
        let labels = flat(vec![0, 1]);
        let idx = NeighborIndex::new(&rows, &labels).unwrap();
        // Query nearer row 1 (cluster 1): 1-1 tie resolves to cluster 1.
        assert_eq!(idx.route_cluster(&[2.0], 2).unwrap(), 1);
        // Query nearer row 0: same tie resolves to cluster 0.
        assert_eq!(idx.route_cluster(&[1.0], 2).unwrap(), 0);
    }

    #[test]
    fn errors_on_bad_k_and_dimension() {
        let rows = vec![vec![0.0], vec![1.0]];
        let labels = flat(vec![0, 1]);
        let idx = NeighborIndex::new(&rows, &labels).unwrap();
        assert!(idx.knn_query(&[0.0], 3).is_err());
        assert!(idx.knn_query(&[0.0, 1.0], 1).is_err());
    }
}
