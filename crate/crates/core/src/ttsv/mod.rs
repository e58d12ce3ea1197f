//! Tensor-times-same-vector products against the implicit adjacency tensor.
//!
//! `TTSV1` contracts the order-`r` tensor with `b` in all modes but one and
//! yields a vector; `TTSV2` leaves two modes free and yields a symmetric
//! matrix. No kernel except [`blowup::ttsv1_explicit`] materializes the
//! tensor.

pub mod blowup;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::ExecConfig;
use crate::genfn::{self, CoeffConfig};
use crate::hypergraph::Hypergraph;

/// Sparse symmetric matrix in CSR form holding both triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds `Y + Yᵀ - diag(Y)` from the upper-triangular rows of `Y`:
    /// `upper[u]` lists `(v, value)` with `v ≥ u`, ascending in `v`.
    pub fn from_upper(n: usize, upper: Vec<Vec<(usize, f64)>>) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (u, row) in upper.into_iter().enumerate() {
            for (v, val) in row {
                debug_assert!(v >= u);
                rows[u].push((v, val));
                if v != u {
                    rows[v].push((u, val));
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(v, _)| v);
            for (v, val) in row {
                cols.push(v);
                vals.push(val);
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn from_dense(dense: &[Vec<f64>]) -> Self {
        let n = dense.len();
        let upper = (0..n)
            .map(|u| (u..n).filter(|&v| dense[u][v] != 0.0).map(|v| (v, dense[u][v])).collect())
            .collect();
        Self::from_upper(n, upper)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[u]..self.row_ptr[u + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        let range = self.row_ptr[u]..self.row_ptr[u + 1];
        match self.cols[range.clone()].binary_search(&v) {
            Ok(i) => self.vals[range.start + i],
            Err(_) => 0.0,
        }
    }

    /// Entries `(u, v, value)` with `u ≤ v`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |u| self.row(u).filter(move |&(v, _)| v >= u).map(move |(v, x)| (u, v, x)))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|u| self.row(u).map(|(v, a)| a * x[v]).sum()).collect()
    }

    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n).map(|u| self.row(u).map(|(_, a)| a.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for u in 0..self.n {
            for (v, x) in self.row(u) {
                d[u][v] = x;
            }
        }
        d
    }
}

/// Kernel family used to evaluate a contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Explicit,
    Ordered,
    Unordered,
    GenFn,
    /// Generating functions, falling back to unordered blowups when the
    /// input vector fails the coefficient safety check.
    Auto,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Explicit, Algorithm::Ordered, Algorithm::Unordered, Algorithm::GenFn];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Explicit => "explicit",
            Algorithm::Ordered => "ordered",
            Algorithm::Unordered => "unordered",
            Algorithm::GenFn => "genfn",
            Algorithm::Auto => "auto",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(Algorithm::Explicit),
            "ordered" => Ok(Algorithm::Ordered),
            "unordered" => Ok(Algorithm::Unordered),
            "genfn" => Ok(Algorithm::GenFn),
            "auto" => Ok(Algorithm::Auto),
            other => Err(Error::InvalidArgument(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// A configured contraction engine: algorithm choice plus execution and
/// coefficient-extraction settings.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub algorithm: Algorithm,
    pub exec: ExecConfig,
    pub coeff: CoeffConfig,
}

impl Default for Kernel {
    fn default() -> Self {
        Self { algorithm: Algorithm::Auto, exec: ExecConfig::default(), coeff: CoeffConfig::default() }
    }
}

impl Kernel {
    pub fn new(algorithm: Algorithm) -> Self {
        Self { algorithm, ..Self::default() }
    }

    pub fn with_exec(mut self, exec: ExecConfig) -> Self {
        self.exec = exec;
        self
    }

    fn resolve(&self, h: &Hypergraph, b: &[f64]) -> Algorithm {
        match self.algorithm {
            Algorithm::Auto if self.coeff.allow_unsafe || genfn::safety_check(h, b).safe => Algorithm::GenFn,
            Algorithm::Auto => Algorithm::Unordered,
            other => other,
        }
    }

    /// `𝒜 b^{r-1}`.
    pub fn ttsv1(&self, h: &Hypergraph, b: &[f64]) -> Result<Vec<f64>> {
        check_len(h, b)?;
        match self.resolve(h, b) {
            Algorithm::Explicit => blowup::ttsv1_explicit(h, b, &self.exec),
            Algorithm::Ordered => blowup::ttsv1_ordered(h, b, &self.exec),
            Algorithm::Unordered => blowup::ttsv1_unord(h, b, &self.exec),
            _ => genfn::ttsv1_gen(h, b, &self.exec, &self.coeff),
        }
    }

    /// `𝒜 b^{r-2}`.
    pub fn ttsv2(&self, h: &Hypergraph, b: &[f64]) -> Result<SymmetricMatrix> {
        check_len(h, b)?;
        match self.resolve(h, b) {
            Algorithm::Explicit => blowup::ttsv2_explicit(h, b, &self.exec),
            Algorithm::Ordered => blowup::ttsv2_ordered(h, b, &self.exec),
            Algorithm::Unordered => blowup::ttsv2_unord(h, b, &self.exec),
            _ => genfn::ttsv2_gen(h, b, &self.exec, &self.coeff),
        }
    }
}

pub(crate) fn check_len(h: &Hypergraph, b: &[f64]) -> Result<()> {
    if b.len() != h.n() {
        return Err(Error::DimensionMismatch { expected: h.n(), got: b.len() });
    }
    if let Some(bad) = b.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("vector entry {bad} is not finite")));
    }
    Ok(())
}
