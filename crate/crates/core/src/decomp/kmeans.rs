//! k-means with k-means++ seeding, Lloyd refinement and seeded restarts.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self { restarts: 10, max_iter: 300, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    /// Cluster ids numbered by first appearance in vertex order.
    pub labels: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Inertia after every Lloyd iteration of the winning restart.
    pub history: Vec<f64>,
}

impl ClusterAssignment {
    /// CSV with header `vertex,label`.
    pub fn to_csv(&self, labels: &[u64]) -> String {
        let mut out = String::from("vertex,label\n");
        for (v, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("{},{}\n", labels.get(v).copied().unwrap_or(v as u64), l));
        }
        out
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    centers
        .iter()
        .enumerate()
        .map(|(i, c)| (i, dist2(p, c)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centers = vec![points[rng.gen_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centers[0])).collect();
    while centers.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(w) => w.sample(rng),
            // every point already coincides with a centre
            Err(_) => rng.gen_range(0..points.len()),
        };
        centers.push(points[next].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, centers.last().expect("just pushed")));
        }
    }
    centers
}

fn lloyd(points: &[Vec<f64>], mut centers: Vec<Vec<f64>>, max_iter: usize) -> ClusterAssignment {
    let dim = points[0].len();
    let mut labels = vec![usize::MAX; points.len()];
    let mut history = Vec::new();
    for _ in 0..max_iter {
        let mut changed = false;
        let mut inertia = 0.0;
        for (l, p) in labels.iter_mut().zip(points) {
            let (c, d) = nearest(p, &centers);
            changed |= *l != c;
            *l = c;
            inertia += d;
        }
        history.push(inertia);
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; centers.len()];
        let mut counts = vec![0usize; centers.len()];
        for (&l, p) in labels.iter().zip(points) {
            counts[l] += 1;
            sums[l].iter_mut().zip(p).for_each(|(s, x)| *s += x);
        }
        for ((c, s), &n) in centers.iter_mut().zip(sums).zip(&counts) {
            if n > 0 {
                *c = s.into_iter().map(|x| x / n as f64).collect();
            }
        }
    }
    let inertia = labels.iter().zip(points).map(|(&l, p)| dist2(p, &centers[l])).sum();
    ClusterAssignment { labels, centers, inertia, history }
}

/// Renumbers clusters by first appearance so equal partitions compare equal.
fn canonical(mut a: ClusterAssignment) -> ClusterAssignment {
    let mut map = vec![usize::MAX; a.centers.len()];
    let mut next = 0;
    for l in &a.labels {
        if map[*l] == usize::MAX {
            map[*l] = next;
            next += 1;
        }
    }
    for slot in map.iter_mut().filter(|m| **m == usize::MAX) {
        *slot = next;
        next += 1;
    }
    let mut centers = vec![Vec::new(); a.centers.len()];
    for (old, c) in a.centers.into_iter().enumerate() {
        centers[map[old]] = c;
    }
    a.labels.iter_mut().for_each(|l| *l = map[*l]);
    ClusterAssignment { centers, ..a }
}

/// Best of `restarts` seeded runs by inertia; restarts run in parallel and
/// ties go to the lowest restart index.
pub fn kmeans(points: &[Vec<f64>], k: usize, opts: &KMeansOptions) -> Result<ClusterAssignment> {
    if points.is_empty() || k == 0 || k > points.len() {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={}", points.len())));
    }
    let runs: Vec<ClusterAssignment> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            lloyd(points, plus_plus(points, k, &mut rng), opts.max_iter)
        })
        .collect();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.inertia < a.inertia { b } else { a })
        .expect("at least one restart");
    Ok(canonical(best))
}
