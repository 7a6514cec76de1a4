//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::HashMap;

use affect_dda::dataset::Quadrant;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_signal<R: Rng>(rng: &mut R, len: usize, amp: f64) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-amp..=amp)).collect()
}

/// Pair-sum pyramid: at every level, pad an odd band with its last sample,
/// then replace each pair by its sum over sqrt(2).
pub fn pyramid_approx(x: &[f64], level: u32) -> Vec<f64> {
    let mut band = x.to_vec();
    for _ in 0..level {
        if band.len() % 2 == 1 {
            band.push(*band.last().unwrap());
        }
        let mut next = Vec::new();
        let mut i = 0;
        while i < band.len() {
            next.push((band[i] + band[i + 1]) / std::f64::consts::SQRT_2);
            i += 2;
        }
        band = next;
    }
    band
}

pub fn equal_width_bins(x: &[f64], bins: usize) -> Vec<usize> {
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return vec![0; x.len()];
    }
    x.iter()
        .map(|v| {
            let b = ((v - lo) / (hi - lo) * bins as f64).floor() as usize;
            b.min(bins - 1)
        })
        .collect()
}

/// Plug-in mutual information in bits from a joint histogram.
pub fn mi_bits(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut pa: HashMap<usize, f64> = HashMap::new();
    let mut pb: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1.0 / n;
        *pa.entry(x).or_default() += 1.0 / n;
        *pb.entry(y).or_default() += 1.0 / n;
    }
    joint.iter().map(|(&(x, y), &p)| p * (p / (pa[&x] * pb[&y])).log2()).sum()
}

/// Greedy MID selection, recomputing every score from scratch at each step.
pub fn greedy_mrmr(columns: &[Vec<f64>], labels: &[usize], k: usize, bins: usize) -> Vec<usize> {
    let binned: Vec<Vec<usize>> = columns.iter().map(|c| equal_width_bins(c, bins)).collect();
    let mut selected: Vec<usize> = Vec::new();
    while selected.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for f in 0..columns.len() {
            if selected.contains(&f) {
                continue;
            }
            let relevance = mi_bits(&binned[f], labels);
            let score = if selected.is_empty() {
                relevance
            } else {
                let red: f64 = selected.iter().map(|&s| mi_bits(&binned[f], &binned[s])).sum();
                relevance - red / selected.len() as f64
            };
            if best.is_none() || score > best.unwrap().1 {
                best = Some((f, score));
            }
        }
        selected.push(best.unwrap().0);
    }
    selected
}

/// Sort every training point by (distance, index), vote among the first k,
/// break vote ties by mean distance and then by quadrant order.
pub fn knn_oracle(train: &[Vec<f64>], labels: &[Quadrant], k: usize, q: &[f64]) -> Quadrant {
    let mut d: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, r)| (r.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(), i))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut tally: Vec<(usize, f64, usize)> = Quadrant::ALL.iter().map(|q| (0, 0.0, q.index())).collect();
    for &(dist, i) in &d[..k] {
        let t = &mut tally[labels[i].index()];
        t.0 += 1;
        t.1 += dist;
    }
    let top = tally.iter().map(|t| t.0).max().unwrap();
    let mut tied: Vec<(f64, usize)> =
        tally.iter().filter(|t| t.0 == top).map(|t| (t.1 / t.0 as f64, t.2)).collect();
    tied.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    Quadrant::from_index(tied[0].1).unwrap()
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn invert(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        a.swap(c, p);
        let piv = a[c][c];
        for v in a[c].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                let pivot_row = a[c].clone();
                for (v, pv) in a[r].iter_mut().zip(pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Linear discriminant scores for each class present, in quadrant order,
/// from pooled covariance over (n - classes) plus a ridge of 1e-6 * trace / dim.
pub fn lda_oracle(train: &[Vec<f64>], labels: &[Quadrant], x: &[f64]) -> Vec<(Quadrant, f64)> {
    let d = train[0].len();
    let n = train.len();
    let classes: Vec<Quadrant> = Quadrant::ALL.into_iter().filter(|q| labels.contains(q)).collect();
    let mut means = Vec::new();
    let mut cov = vec![vec![0.0; d]; d];
    for &c in &classes {
        let rows: Vec<&Vec<f64>> = train.iter().zip(labels).filter(|(_, l)| **l == c).map(|(r, _)| r).collect();
        let mu: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64).collect();
        for r in &rows {
            for i in 0..d {
                for j in 0..d {
                    cov[i][j] += (r[i] - mu[i]) * (r[j] - mu[j]);
                }
            }
        }
        means.push((c, mu, rows.len()));
    }
    let denom = (n - classes.len()) as f64;
    for row in cov.iter_mut() {
        for v in row.iter_mut() {
            *v /= denom;
        }
    }
    let ridge = 1e-6 * (0..d).map(|i| cov[i][i]).sum::<f64>() / d as f64;
    for (i, row) in cov.iter_mut().enumerate() {
        row[i] += ridge;
    }
    let inv = invert(&cov);
    means
        .iter()
        .map(|(c, mu, count)| {
            let w: Vec<f64> = (0..d).map(|i| (0..d).map(|j| inv[i][j] * mu[j]).sum()).collect();
            let lin: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
            let quad: f64 = mu.iter().zip(&w).map(|(a, b)| a * b).sum();
            (*c, lin - 0.5 * quad + (*count as f64 / n as f64).ln())
        })
        .collect()
}

/// Spearman for untied data: 1 - 6 sum d^2 / (n (n^2 - 1)).
pub fn spearman_closed_form(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (*x as f64 - *y as f64).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Four-class toy data: one Gaussian-ish blob per quadrant.
pub fn toy_set<R: Rng>(rng: &mut R, per_class: usize, dim: usize, spread: f64) -> (Vec<Vec<f64>>, Vec<Quadrant>) {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for q in Quadrant::ALL {
        let center: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
        for _ in 0..per_class {
            x.push(center.iter().map(|c| c + rng.random_range(-spread..spread)).collect());
            y.push(q);
        }
    }
    (x, y)
}
