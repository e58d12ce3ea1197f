//! Rank comparison and persistence under LEQ filtering.

use serde::Serialize;

use super::{centrality, CentralityOptions, Method};
use crate::hypergraph::Hypergraph;
use crate::ttsv::Kernel;

/// Vertices ordered by descending score, ties broken by ascending id.
pub fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// The first `k` entries of [`ranking`].
pub fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut r = ranking(scores);
    r.truncate(k);
    r
}

/// Kendall's `τ_B` between two score vectors over the top `k` vertices of
/// `a`, with the tie correction. `k` is clamped to the vector length.
/// Returns NaN when every pair is tied in either score vector.
pub fn kendall_tau_b(a: &[f64], b: &[f64], k: usize) -> f64 {
    assert_eq!(a.len(), b.len(), "score vectors must share a vertex set");
    let items = top_k(a, k.min(a.len()));
    let (mut concordant, mut discordant, mut ties_a, mut ties_b, mut pairs) = (0i64, 0i64, 0i64, 0i64, 0i64);
    for (i, &u) in items.iter().enumerate() {
        for &v in &items[i + 1..] {
            pairs += 1;
            let da = a[u].total_cmp(&a[v]) as i64;
            let db = b[u].total_cmp(&b[v]) as i64;
            if da == 0 {
                ties_a += 1;
            }
            if db == 0 {
                ties_b += 1;
            }
            match da * db {
                1 => concordant += 1,
                -1 => discordant += 1,
                _ => {}
            }
        }
    }
    let denom = (((pairs - ties_a) * (pairs - ties_b)) as f64).sqrt();
    if denom == 0.0 {
        return f64::NAN;
    }
    (concordant - discordant) as f64 / denom
}

/// One LEQ-filtering level of a persistence sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceColumn {
    pub r: usize,
    /// Original vertex labels of the top vertices, best first.
    pub top: Vec<u64>,
    /// Per rank position, whether the occupant differs from the previous
    /// level; empty when the previous level is missing or failed.
    pub changed: Vec<bool>,
    /// Top vertices absent from the previous level's top list.
    pub new_entrants: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceTable {
    pub method: Method,
    pub topk: usize,
    pub columns: Vec<PersistenceColumn>,
}

impl PersistenceTable {
    /// Levels whose top list differs from the previous level.
    pub fn change_levels(&self) -> Vec<usize> {
        self.columns.iter().filter(|c| c.changed.iter().any(|&x| x)).map(|c| c.r).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,status,new_entrants");
        for i in 1..=self.topk {
            out.push_str(&format!(",rank{i},changed{i}"));
        }
        out.push('\n');
        for c in &self.columns {
            let status = match &c.error {
                None => "ok".to_string(),
                Some(e) => format!("\"error: {}\"", e.replace('"', "'")),
            };
            let entrants = c.new_entrants.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{}", c.r, status, entrants));
            for i in 0..self.topk {
                let v = c.top.get(i).map(|x| x.to_string()).unwrap_or_default();
                let ch = c.changed.get(i).map(|x| x.to_string()).unwrap_or_default();
                out.push_str(&format!(",{v},{ch}"));
            }
            out.push('\n');
        }
        out
    }
}

/// For each `r` in `r_lo..=r_hi`: LEQ-filter (dropping isolated vertices),
/// compute `method`, and compare the top list with level `r−1`.
pub fn persistence_sweep(
    h: &Hypergraph,
    method: Method,
    r_lo: usize,
    r_hi: usize,
    topk: usize,
    kernel: &Kernel,
    opts: &CentralityOptions,
) -> PersistenceTable {
    let mut columns: Vec<PersistenceColumn> = Vec::new();
    for r in r_lo..=r_hi {
        let outcome = h.leq_filter(r, true).and_then(|f| {
            let c = centrality(&f, method, kernel, opts)?;
            Ok(top_k(&c.scores, topk).into_iter().map(|v| f.labels()[v]).collect::<Vec<u64>>())
        });
        let prev = columns.last().filter(|c| c.r + 1 == r && c.error.is_none());
        let column = match outcome {
            Ok(top) => {
                let (changed, new_entrants) = match prev {
                    Some(p) => (
                        (0..top.len()).map(|i| p.top.get(i) != Some(&top[i])).collect(),
                        Some(top.iter().filter(|v| !p.top.contains(v)).count()),
                    ),
                    None => (Vec::new(), None),
                };
                PersistenceColumn { r, top, changed, new_entrants, error: None }
            }
            Err(e) => PersistenceColumn { r, top: Vec::new(), changed: Vec::new(), new_entrants: None, error: Some(e.to_string()) },
        };
        columns.push(column);
    }
    PersistenceTable { method, topk, columns }
}
