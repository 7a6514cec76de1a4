use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::dataset::Quadrant;
use crate::error::{Error, Result};

/// Brute-force k-nearest-neighbour classifier over Euclidean distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    k: usize,
    train: Vec<Vec<f64>>,
    labels: Vec<Quadrant>,
}

#[derive(Debug, Clone, Copy)]
struct Neighbor {
    dist: f64,
    index: usize,
}

// Max-heap order: farther first, and among equal distances the later training
// index first, so the heap always evicts the worst candidate.
impl Ord for Neighbor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist.total_cmp(&other.dist).then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Neighbor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Neighbor {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Neighbor {}

pub(crate) fn check_training(x: &[Vec<f64>], y: &[Quadrant]) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let dim = x[0].len();
    if let Some(row) = x.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
    }
    Ok(dim)
}

impl KnnModel {
    pub fn fit(x: &[Vec<f64>], y: &[Quadrant], k: usize) -> Result<Self> {
        check_training(x, y)?;
        if k == 0 || k > x.len() {
            return Err(Error::Config(format!("knn k = {k} must be in [1, {}]", x.len())));
        }
        Ok(KnnModel { k, train: x.to_vec(), labels: y.to_vec() })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.train[0].len()
    }

    /// Indices of the k nearest training points, nearest first.
    ///
    /// Equal distances favour the lower training index.
    pub fn neighbors(&self, query: &[f64]) -> Result<Vec<(usize, f64)>> {
        if query.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: query.len() });
        }
        let mut heap = BinaryHeap::with_capacity(self.k + 1);
        for (index, row) in self.train.iter().enumerate() {
            let dist = row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let cand = Neighbor { dist, index };
            if heap.len() < self.k {
                heap.push(cand);
            } else if cand < *heap.peek().expect("k >= 1") {
                heap.pop();
                heap.push(cand);
            }
        }
        Ok(heap.into_sorted_vec().into_iter().map(|n| (n.index, n.dist)).collect())
    }

    /// Majority vote. A tied vote goes to the class with the smaller mean
    /// neighbour distance, then to the canonical quadrant order.
    pub fn predict(&self, query: &[f64]) -> Result<Quadrant> {
        let nn = self.neighbors(query)?;
        let mut votes = [0usize; 4];
        let mut dist_sum = [0.0f64; 4];
        for (i, d) in nn {
            let q = self.labels[i].index();
            votes[q] += 1;
            dist_sum[q] += d;
        }
        let mut best = None::<(usize, usize, f64)>;
        for q in 0..4 {
            if votes[q] == 0 {
                continue;
            }
            let mean = dist_sum[q] / votes[q] as f64;
            let better = match best {
                None => true,
                Some((_, bv, bm)) => votes[q] > bv || (votes[q] == bv && mean < bm),
            };
            if better {
                best = Some((q, votes[q], mean));
            }
        }
        Ok(Quadrant::from_index(best.expect("k >= 1").0).unwrap())
    }
}

pub fn knn_predict(model: &KnnModel, x: &[f64]) -> Result<Quadrant> {
    model.predict(x)
}
