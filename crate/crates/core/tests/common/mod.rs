#![allow(dead_code)]

use std::io::Write;

use hyperttsv::Hypergraph;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Small hypergraph on the oracle grid: `n ≤ max_n`, `1 ≤ m ≤ max_m`, edge
/// sizes and tensor order at most `max_r`.
pub fn random_hypergraph(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize, max_r: usize) -> Hypergraph {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let edges: Vec<Vec<usize>> = (0..m)
        .map(|_| {
            let k = rng.gen_range(1..=n.min(max_r));
            sample(rng, n, k).into_vec()
        })
        .collect();
    let h = Hypergraph::new(n, edges).unwrap();
    let lo = h.max_edge_size().max(2);
    let r = rng.gen_range(lo..=max_r.max(lo));
    h.with_rank(r).unwrap()
}

/// Like [`random_hypergraph`] but retried until connected with no isolated
/// vertices.
pub fn random_connected(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize, max_r: usize) -> Hypergraph {
    loop {
        let h = random_hypergraph(rng, max_n, max_m, max_r);
        if h.n() >= 2 && h.is_connected() && h.degrees().iter().all(|&d| d > 0) {
            return h;
        }
    }
}

pub fn uniform_vector(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// `|a − b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| rel_err(x, y)).fold(0.0, f64::max)
}

pub fn dense_rel_err(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| max_rel_err(x, y)).fold(0.0, f64::max)
}

/// One status line per acceptance criterion, written past the test
/// harness's output capture so it lands in the log.
pub fn report(id: u32, title: &str, pass: bool, detail: &str) {
    let line = format!("criterion {id:>2} [{}] {title}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}
