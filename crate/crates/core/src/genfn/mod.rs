//! Generating-function TTSV kernels.
//!
//! For a vertex `v` in edge `e`, the blowup sum collapses to the
//! coefficient `(r−1)! · (e^{b_v t} Π_{u∈e, u≠v} (e^{b_u t} − 1))[t^{r−1}]`;
//! TTSV2 uses degree `r−2` with `a = b_u + b_v` off the diagonal.

pub mod coeff;
mod dd;
pub mod series;

use std::collections::BTreeMap;

use serde::Serialize;

pub use coeff::{
    choose_path, crossover, edge_coeff, edge_coeff_direct, edge_coeff_fft, edge_coeff_subset, edge_series, CoeffPath,
};
pub use series::{exp_series, mult_series, Multiply, TruncatedSeries};

use crate::combin::ln_factorial;
use crate::error::{Error, Result};
use crate::exec::{CompensatedSum, ExecConfig};
use crate::hypergraph::Hypergraph;
use crate::ttsv::{check_len, SymmetricMatrix};

/// Settings for coefficient extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffConfig {
    /// Largest factor count the subset path may enumerate.
    pub subset_cap: usize,
    /// Degrees below this use direct convolution instead of the FFT.
    pub direct_threshold: usize,
    /// Overrides the computed crossover `k*`.
    pub crossover: Option<usize>,
    /// Forces one evaluation path for every non-trivial edge.
    pub force: Option<CoeffPath>,
    /// Runs the kernels even when [`safety_check`] fails.
    pub allow_unsafe: bool,
}

impl Default for CoeffConfig {
    fn default() -> Self {
        Self { subset_cap: 24, direct_threshold: 32, crossover: None, force: None, allow_unsafe: false }
    }
}

/// Whether the smallest coefficient `b_min^r / r!` stays in the normal
/// double range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SafetyReport {
    pub r: usize,
    pub b_min: f64,
    pub min_coeff_estimate: f64,
    pub safe: bool,
}

impl SafetyReport {
    pub fn evaluate(r: usize, b_min: f64) -> Self {
        let ln_est = r as f64 * b_min.ln() - ln_factorial(r);
        Self { r, b_min, min_coeff_estimate: ln_est.exp(), safe: ln_est >= f64::MIN_POSITIVE.ln() }
    }
}

/// Checks `min |b_u|` over non-isolated vertices. Exact zeros are left out:
/// they only remove terms and never produce an underflowing coefficient.
pub fn safety_check(h: &Hypergraph, b: &[f64]) -> SafetyReport {
    let b_min = (0..h.n().min(b.len()))
        .filter(|&v| !h.incident(v).is_empty() && b[v] != 0.0)
        .map(|v| b[v].abs())
        .fold(f64::INFINITY, f64::min);
    let b_min = if b_min.is_finite() { b_min } else { 1.0 };
    SafetyReport::evaluate(h.rank(), b_min)
}

fn require_safe(h: &Hypergraph, b: &[f64], cfg: &CoeffConfig) -> Result<()> {
    if cfg.allow_unsafe {
        return Ok(());
    }
    let report = safety_check(h, b);
    if report.safe {
        Ok(())
    } else {
        Err(Error::NumericRange { b_min: report.b_min, r: report.r })
    }
}

/// TTSV1 by per-edge coefficient extraction at degree `r−1`.
pub fn ttsv1_gen(h: &Hypergraph, b: &[f64], exec: &ExecConfig, cfg: &CoeffConfig) -> Result<Vec<f64>> {
    check_len(h, b)?;
    require_safe(h, b, cfg)?;
    let weights = h.edge_weights();
    let d = h.rank() - 1;
    exec.map_range(h.n(), |v| {
        let mut total = CompensatedSum::default();
        let mut rest = Vec::with_capacity(h.max_edge_size());
        for &e in h.incident(v) {
            exec.check()?;
            rest.clear();
            rest.extend(h.edge(e).iter().filter(|&&u| u != v).map(|&u| b[u]));
            total.add(coeff::edge_coeff_scaled(b[v], &rest, d, cfg).mul_f64(weights[e]).to_f64());
        }
        Ok(total.value())
    })
}

/// TTSV2 by per-edge coefficient extraction at degree `r−2`.
pub fn ttsv2_gen(h: &Hypergraph, b: &[f64], exec: &ExecConfig, cfg: &CoeffConfig) -> Result<SymmetricMatrix> {
    check_len(h, b)?;
    require_safe(h, b, cfg)?;
    let weights = h.edge_weights();
    let d = h.rank() - 2;
    let upper = exec.map_range(h.n(), |u| {
        let mut row: BTreeMap<usize, CompensatedSum> = BTreeMap::new();
        let mut rest = Vec::with_capacity(h.max_edge_size());
        for &e in h.incident(u) {
            exec.check()?;
            let edge = h.edge(e);
            for &v in edge.iter().filter(|&&v| v >= u) {
                rest.clear();
                rest.extend(edge.iter().filter(|&&x| x != u && x != v).map(|&x| b[x]));
                let a = if v == u { b[u] } else { b[u] + b[v] };
                let val = coeff::edge_coeff_scaled(a, &rest, d, cfg).mul_f64(weights[e]).to_f64();
                row.entry(v).or_default().add(val);
            }
        }
        Ok(row.into_iter().map(|(v, s)| (v, s.value())).filter(|&(_, x)| x != 0.0).collect())
    })?;
    Ok(SymmetricMatrix::from_upper(h.n(), upper))
}
