//! Hypergraph data model: ingestion, weighting, filtering and the derived
//! graph-level structures (degrees, clique expansion, connectivity).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::BufRead;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::combin::{big_to_f64, blowup_count};
use crate::error::{Error, Result};

/// How hyperedge weights `w_e` are assigned.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum WeightScheme {
    /// `w_e = |e| / |β(e)|`, so that contracting with the all-ones vector
    /// yields the degree sequence. Depends on the rank, so it is recomputed
    /// whenever the rank changes.
    #[default]
    Banerjee,
    Unit,
    /// One positive finite weight per edge, in edge order.
    Custom(Vec<f64>),
}

/// Banerjee weight `|e| / (|e|! · S(r, |e|))` as a float.
pub fn banerjee_weight(size: usize, r: usize) -> f64 {
    let count = blowup_count(size, r).expect("edge size within rank");
    // Ratio of exact integers; both sides fit comfortably for r ≤ 170.
    size as f64 / big_to_f64(&count)
}

/// Banerjee weight as an exact rational.
pub fn banerjee_weight_exact(size: usize, r: usize) -> BigRational {
    let count = blowup_count(size, r).expect("edge size within rank");
    BigRational::new(BigInt::from(size), BigInt::from(count))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
    scheme: WeightScheme,
    rank: usize,
    incidence: Vec<Vec<usize>>,
    labels: Vec<u64>,
}

/// JSON sidecar describing a (possibly filtered) hypergraph.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Metadata {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub vol: usize,
    pub id_map: Vec<u64>,
}

impl Hypergraph {
    /// Builds a hypergraph on vertices `0..n`. Each edge is sorted and
    /// deduplicated; duplicate edges are kept as distinct edges.
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let labels = (0..n as u64).collect();
        Self::with_labels(n, edges, labels)
    }

    fn with_labels(n: usize, mut edges: Vec<Vec<usize>>, labels: Vec<u64>) -> Result<Self> {
        for (id, edge) in edges.iter_mut().enumerate() {
            edge.sort_unstable();
            edge.dedup();
            if edge.is_empty() {
                return Err(Error::InvalidArgument(format!("edge {id} is empty")));
            }
            if let Some(&v) = edge.last().filter(|&&v| v >= n) {
                return Err(Error::InvalidArgument(format!(
                    "edge {id} references vertex {v} but n = {n}"
                )));
            }
        }
        let rank = edges.iter().map(Vec::len).max().unwrap_or(0).max(2);
        let mut incidence = vec![Vec::new(); n];
        for (id, edge) in edges.iter().enumerate() {
            for &v in edge {
                incidence[v].push(id);
            }
        }
        Ok(Self { n, edges, scheme: WeightScheme::Banerjee, rank, incidence, labels })
    }

    /// Replaces the weighting scheme.
    pub fn with_weights(mut self, scheme: WeightScheme) -> Result<Self> {
        if let WeightScheme::Custom(w) = &scheme {
            if w.len() != self.edges.len() {
                return Err(Error::DimensionMismatch { expected: self.edges.len(), got: w.len() });
            }
            if let Some(bad) = w.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(Error::InvalidArgument(format!("edge weight {bad} is not positive and finite")));
            }
        }
        self.scheme = scheme;
        Ok(self)
    }

    /// Treats the hypergraph as having tensor order `r`, which must be at
    /// least the largest edge size.
    pub fn with_rank(mut self, r: usize) -> Result<Self> {
        let max = self.max_edge_size();
        if r < max.max(2) {
            return Err(Error::InvalidArgument(format!(
                "rank {r} below the largest edge size {max} (or 2)"
            )));
        }
        self.rank = r;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Tensor order `r`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    /// `E(v)`: ids of the edges containing `v`, ascending.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// Original label of every dense vertex id.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn scheme(&self) -> &WeightScheme {
        &self.scheme
    }

    pub fn weight_of(&self, e: usize, scheme: &WeightScheme) -> f64 {
        match scheme {
            WeightScheme::Banerjee => banerjee_weight(self.edges[e].len(), self.rank),
            WeightScheme::Unit => 1.0,
            WeightScheme::Custom(w) => w[e],
        }
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.weight_of(e, &self.scheme)
    }

    /// Weight of every edge under the current scheme.
    pub fn edge_weights(&self) -> Vec<f64> {
        match &self.scheme {
            WeightScheme::Banerjee => {
                let table: Vec<f64> =
                    (0..=self.rank).map(|s| if s == 0 { 0.0 } else { banerjee_weight(s, self.rank) }).collect();
                self.edges.iter().map(|e| table[e.len()]).collect()
            }
            WeightScheme::Unit => vec![1.0; self.edges.len()],
            WeightScheme::Custom(w) => w.clone(),
        }
    }

    /// Exact rational weights; custom weights are converted losslessly.
    pub fn edge_weights_exact(&self) -> Vec<BigRational> {
        match &self.scheme {
            WeightScheme::Banerjee => {
                self.edges.iter().map(|e| banerjee_weight_exact(e.len(), self.rank)).collect()
            }
            WeightScheme::Unit => vec![BigRational::from_integer(1.into()); self.edges.len()],
            WeightScheme::Custom(w) => w
                .iter()
                .map(|&x| BigRational::from_float(x).expect("weights are finite"))
                .collect(),
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.incidence.iter().map(Vec::len).collect()
    }

    pub fn volume(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn metadata(&self) -> Metadata {
        Metadata { n: self.n, m: self.m(), r: self.rank, vol: self.volume(), id_map: self.labels.clone() }
    }

    /// Parses the hyperedge-list text format: one edge per line, ids
    /// separated by whitespace or commas, `#` starts a comment line.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut raw: Vec<Vec<u64>> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut edge = Vec::new();
            for token in trimmed.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
                let id = token.parse::<u64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("invalid vertex id {token:?}"),
                })?;
                edge.push(id);
            }
            if edge.is_empty() {
                return Err(Error::Parse { line: idx + 1, message: "no vertex ids".into() });
            }
            raw.push(edge);
        }
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        let ids: BTreeSet<u64> = raw.iter().flatten().copied().collect();
        let dense = ids.iter().enumerate().all(|(i, &id)| i as u64 == id);
        let labels: Vec<u64> = ids.into_iter().collect();
        let edges: Vec<Vec<usize>> = if dense {
            raw.into_iter().map(|e| e.into_iter().map(|v| v as usize).collect()).collect()
        } else {
            let lookup: BTreeMap<u64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
            raw.into_iter().map(|e| e.into_iter().map(|v| lookup[&v]).collect()).collect()
        };
        Self::with_labels(labels.len(), edges, labels)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::parse(text.as_bytes())
    }

    /// Writes the edge list with dense ids, one edge per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for edge in &self.edges {
            let line: Vec<String> = edge.iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Drops every edge larger than `max_size` ("less than or equal to"
    /// filtering). Custom weights follow their edges; the rank is
    /// recomputed. With `drop_isolated`, vertices left without edges are
    /// removed and the rest relabeled densely, keeping original labels.
    pub fn leq_filter(&self, max_size: usize, drop_isolated: bool) -> Result<Self> {
        if max_size < 2 {
            return Err(Error::InvalidArgument(format!("filter size {max_size} must be at least 2")));
        }
        let keep: Vec<usize> = (0..self.m()).filter(|&e| self.edges[e].len() <= max_size).collect();
        if keep.is_empty() {
            return Err(Error::EmptyResult { max_size });
        }
        let edges: Vec<Vec<usize>> = keep.iter().map(|&e| self.edges[e].clone()).collect();
        let scheme = match &self.scheme {
            WeightScheme::Custom(w) => WeightScheme::Custom(keep.iter().map(|&e| w[e]).collect()),
            other => other.clone(),
        };
        let h = if drop_isolated {
            let mut used = vec![false; self.n];
            for &v in edges.iter().flatten() {
                used[v] = true;
            }
            self.relabel_subset(edges, &used)?
        } else {
            Self::with_labels(self.n, edges, self.labels.clone())?
        };
        h.with_weights(scheme)
    }

    fn relabel_subset(&self, edges: Vec<Vec<usize>>, keep: &[bool]) -> Result<Self> {
        let mut map = vec![usize::MAX; self.n];
        let mut labels = Vec::new();
        for v in 0..self.n {
            if keep[v] {
                map[v] = labels.len();
                labels.push(self.labels[v]);
            }
        }
        let edges = edges.into_iter().map(|e| e.into_iter().map(|v| map[v]).collect()).collect();
        Self::with_labels(labels.len(), edges, labels)
    }

    /// Removes vertices that appear in more than `fraction` of the edges,
    /// shrinking the edges that contained them and dropping edges that
    /// become empty. Vertices left isolated are removed as well.
    pub fn drop_high_degree(&self, fraction: f64) -> Result<Self> {
        let limit = fraction * self.m() as f64;
        let hub: Vec<bool> = self.incidence.iter().map(|inc| inc.len() as f64 > limit).collect();
        let mut edges = Vec::new();
        let mut weights = Vec::new();
        for (id, edge) in self.edges.iter().enumerate() {
            let kept: Vec<usize> = edge.iter().copied().filter(|&v| !hub[v]).collect();
            if !kept.is_empty() {
                edges.push(kept);
                weights.push(id);
            }
        }
        if edges.is_empty() {
            return Err(Error::EmptyResult { max_size: self.max_edge_size() });
        }
        let mut used = vec![false; self.n];
        for &v in edges.iter().flatten() {
            used[v] = true;
        }
        let scheme = match &self.scheme {
            WeightScheme::Custom(w) => WeightScheme::Custom(weights.iter().map(|&e| w[e]).collect()),
            other => other.clone(),
        };
        self.relabel_subset(edges, &used)?.with_weights(scheme)
    }

    /// Applies the vertex permutation `perm` (vertex `v` becomes `perm[v]`).
    pub fn permute_vertices(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: perm.len() });
        }
        let edges = self.edges.iter().map(|e| e.iter().map(|&v| perm[v]).collect()).collect();
        let mut labels = vec![0; self.n];
        for v in 0..self.n {
            labels[perm[v]] = self.labels[v];
        }
        let h = Self::with_labels(self.n, edges, labels)?.with_weights(self.scheme.clone())?;
        h.with_rank(self.rank)
    }

    pub fn clique_expansion(&self) -> CliqueExpansion {
        let mut rows: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); self.n];
        for edge in &self.edges {
            for (i, &u) in edge.iter().enumerate() {
                for &v in &edge[i + 1..] {
                    *rows[u].entry(v).or_insert(0) += 1;
                    *rows[v].entry(u).or_insert(0) += 1;
                }
            }
        }
        CliqueExpansion { n: self.n, rows: rows.into_iter().map(|r| r.into_iter().collect()).collect() }
    }

    /// Connectivity of the clique expansion; vacuously true for `n ≤ 1`.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut edge_seen = vec![false; self.m()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &e in &self.incidence[u] {
                if std::mem::replace(&mut edge_seen[e], true) {
                    continue;
                }
                for &v in &self.edges[e] {
                    if !seen[v] {
                        seen[v] = true;
                        reached += 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        reached == self.n
    }
}

/// Weighted clique expansion: `{u, v}` carries the codegree `|E(u, v)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueExpansion {
    n: usize,
    rows: Vec<Vec<(usize, u32)>>,
}

impl CliqueExpansion {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Neighbours of `u` with their codegrees, ascending by id.
    pub fn neighbors(&self, u: usize) -> &[(usize, u32)] {
        &self.rows[u]
    }

    pub fn weight(&self, u: usize, v: usize) -> u32 {
        self.rows[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .map_or(0, |i| self.rows[u][i].1)
    }

    pub fn num_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(v, w)| f64::from(w) * x[v]).sum())
            .collect()
    }

    pub fn max_row_sum(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(_, w)| f64::from(w)).sum::<f64>())
            .fold(0.0, f64::max)
    }
}
