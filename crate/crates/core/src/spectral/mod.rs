//! Tensor eigenvector centralities and ranking analytics.

mod gram;
mod rank;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use gram::{gram_mate_fixture, gram_matrices, is_isomorphic, GramPair};
pub use rank::{kendall_tau_b, persistence_sweep, ranking, top_k, PersistenceColumn, PersistenceTable};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::ttsv::{Kernel, SymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Zec,
    Hec,
    Cec,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Zec, Method::Hec, Method::Cec];

    pub fn name(self) -> &'static str {
        match self {
            Method::Zec => "zec",
            Method::Hec => "hec",
            Method::Cec => "cec",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zec" => Ok(Method::Zec),
            "hec" => Ok(Method::Hec),
            "cec" => Ok(Method::Cec),
            other => Err(Error::InvalidArgument(format!("unknown centrality method {other:?}"))),
        }
    }
}

/// A positive, ℓ₁-normalized eigenvector with its eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityResult {
    pub method: Method,
    #[serde(rename = "lambda")]
    pub eigenvalue: f64,
    pub iterations: usize,
    /// `‖residual‖∞ / λ` of the eigen-equation at the returned vector.
    pub residual: f64,
    pub scores: Vec<f64>,
}

/// Iteration settings shared by the three methods. `step` is only read by
/// ZEC, `shift` only by HEC.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub step: f64,
    /// Adds `shift · x^{[r−1]}` to every HEC iterate; shifts `λ` by the same
    /// amount and damps oscillation on periodic tensors.
    pub shift: f64,
    /// Positive starting vector; uniform when absent.
    pub start: Option<Vec<f64>>,
}

impl CentralityOptions {
    pub fn for_method(method: Method) -> Self {
        let tol = match method {
            Method::Hec => 1e-8,
            Method::Zec => 1e-6,
            Method::Cec => 1e-10,
        };
        Self { tol, max_iter: 1000, step: 0.5, shift: 0.0, start: None }
    }
}

/// Runs `method` with `opts`.
pub fn centrality(h: &Hypergraph, method: Method, kernel: &Kernel, opts: &CentralityOptions) -> Result<CentralityResult> {
    match method {
        Method::Hec => hec(h, kernel, opts),
        Method::Zec => zec(h, kernel, opts),
        Method::Cec => cec(h, opts),
    }
}

fn check_input(h: &Hypergraph) -> Result<()> {
    if h.m() == 0 {
        return Err(Error::EmptyInput);
    }
    if !h.is_connected() {
        return Err(Error::NotConnected);
    }
    Ok(())
}

fn normalize_l1(x: &mut [f64]) {
    let s: f64 = x.iter().map(|v| v.abs()).sum();
    x.iter_mut().for_each(|v| *v /= s);
}

fn start_vector(h: &Hypergraph, opts: &CentralityOptions) -> Result<Vec<f64>> {
    match &opts.start {
        None => Ok(vec![1.0 / h.n() as f64; h.n()]),
        Some(s) if s.len() != h.n() => Err(Error::DimensionMismatch { expected: h.n(), got: s.len() }),
        Some(s) if s.iter().any(|&v| !(v > 0.0 && v.is_finite())) => {
            Err(Error::InvalidArgument("starting vector must be strictly positive".into()))
        }
        Some(s) => {
            let mut y = s.clone();
            normalize_l1(&mut y);
            Ok(y)
        }
    }
}

/// H-eigenvector centrality by the NQZ power-like iteration:
/// `x ← normalize(z^{[1/(r−1)]})`, `z ← 𝒜x^{r−1}`, stopping once the
/// ratio bounds of `z ⊘ x^{[r−1]}` are within `tol`.
pub fn hec(h: &Hypergraph, kernel: &Kernel, opts: &CentralityOptions) -> Result<CentralityResult> {
    check_input(h)?;
    let p = (h.rank() - 1) as i32;
    let apply = |x: &[f64]| -> Result<Vec<f64>> {
        let mut z = kernel.ttsv1(h, x)?;
        if opts.shift != 0.0 {
            z.iter_mut().zip(x).for_each(|(zi, &xi)| *zi += opts.shift * xi.powi(p));
        }
        Ok(z)
    };
    let mut z = apply(&start_vector(h, opts)?)?;
    let (mut lo, mut hi) = (f64::NAN, f64::NAN);
    for it in 1..=opts.max_iter {
        let mut x: Vec<f64> = z.iter().map(|&v| v.powf(1.0 / p as f64)).collect();
        normalize_l1(&mut x);
        if x.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::NoConvergence { method: "hec", iterations: it, detail: "iterate lost positivity".into() });
        }
        z = apply(&x)?;
        let ratios = z.iter().zip(&x).map(|(&zi, &xi)| zi / xi.powi(p));
        (lo, hi) = ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), q| (a.min(q), b.max(q)));
        if hi - lo < opts.tol {
            let lambda = 0.5 * (lo + hi);
            let residual = z
                .iter()
                .zip(&x)
                .map(|(&zi, &xi)| (zi - lambda * xi.powi(p)).abs())
                .fold(0.0, f64::max)
                / lambda;
            return Ok(CentralityResult { method: Method::Hec, eigenvalue: lambda - opts.shift, iterations: it, residual, scores: x });
        }
    }
    Err(Error::NoConvergence { method: "hec", iterations: opts.max_iter, detail: format!("λ bounds [{lo}, {hi}]") })
}

/// Dominant eigenvector of a nonnegative symmetric matrix by shifted power
/// iteration from `warm`, sign-fixed positive and ℓ₁-normalized.
fn dominant_eigvec(y: &SymmetricMatrix, warm: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let sigma = 0.5 * y.max_abs_row_sum();
    let mut d = warm.to_vec();
    for _ in 0..max_iter {
        let mut next = y.matvec(&d);
        next.iter_mut().zip(&d).for_each(|(n, &di)| *n += sigma * di);
        let pivot = next.iter().copied().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
        if pivot == 0.0 {
            return Err(Error::NoConvergence { method: "zec", iterations: 0, detail: "inner iterate vanished".into() });
        }
        normalize_l1(&mut next);
        if pivot < 0.0 {
            next.iter_mut().for_each(|v| *v = -*v);
        }
        let change: f64 = next.iter().zip(&d).map(|(a, b)| (a - b).abs()).sum();
        d = next;
        if change < tol {
            return Ok(d);
        }
    }
    Err(Error::NoConvergence { method: "zec", iterations: max_iter, detail: "inner eigenvector solve did not converge".into() })
}

/// Inner power-iteration budget per outer ZEC step.
const ZEC_INNER_ITER: usize = 100_000;

/// Z-eigenvector centrality by forward Euler on
/// `dx/dt = Λ(𝒜x^{r−2}) − x`, with `Λ` the dominant eigenvector map.
pub fn zec(h: &Hypergraph, kernel: &Kernel, opts: &CentralityOptions) -> Result<CentralityResult> {
    check_input(h)?;
    let mut y = start_vector(h, opts)?;
    let mut d = y.clone();
    let mut spread = f64::NAN;
    for it in 1..=opts.max_iter {
        let ymat = kernel.ttsv2(h, &y)?;
        d = dominant_eigvec(&ymat, &d, opts.tol / 10.0, ZEC_INNER_ITER)?;
        let x: Vec<f64> = y.iter().zip(&d).map(|(&yi, &di)| yi + opts.step * (di - yi)).collect();
        if x.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::NoConvergence { method: "zec", iterations: it, detail: "iterate lost positivity".into() });
        }
        let (lo, hi) = x
            .iter()
            .zip(&y)
            .map(|(a, b)| a / b)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), g| (a.min(g), b.max(g)));
        spread = (hi - lo) / lo;
        y = x;
        if spread < opts.tol {
            normalize_l1(&mut y);
            let z = kernel.ttsv1(h, &y)?;
            let num: f64 = z.iter().zip(&y).map(|(a, b)| a * b).sum();
            let den: f64 = y.iter().map(|v| v * v).sum();
            let lambda = num / den;
            let residual = z.iter().zip(&y).map(|(&zi, &yi)| (zi - lambda * yi).abs()).fold(0.0, f64::max) / lambda;
            return Ok(CentralityResult { method: Method::Zec, eigenvalue: lambda, iterations: it, residual, scores: y });
        }
    }
    Err(Error::NoConvergence { method: "zec", iterations: opts.max_iter, detail: format!("ratio spread {spread}") })
}

/// Dominant eigenvector of the codegree-weighted clique expansion.
pub fn cec(h: &Hypergraph, opts: &CentralityOptions) -> Result<CentralityResult> {
    if h.n() == 0 {
        return Err(Error::EmptyInput);
    }
    if !h.is_connected() {
        return Err(Error::NotConnected);
    }
    let w = h.clique_expansion();
    let sigma = 0.5 * w.max_row_sum();
    let mut x = start_vector(h, opts)?;
    for it in 1..=opts.max_iter {
        let mut next = w.matvec(&x);
        next.iter_mut().zip(&x).for_each(|(n, &xi)| *n += sigma * xi);
        normalize_l1(&mut next);
        let change: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if change < opts.tol {
            let wx = w.matvec(&x);
            let num: f64 = wx.iter().zip(&x).map(|(a, b)| a * b).sum();
            let den: f64 = x.iter().map(|v| v * v).sum();
            let lambda = num / den;
            let residual = wx.iter().zip(&x).map(|(&a, &b)| (a - lambda * b).abs()).fold(0.0, f64::max) / lambda.abs().max(f64::MIN_POSITIVE);
            return Ok(CentralityResult { method: Method::Cec, eigenvalue: lambda, iterations: it, residual, scores: x });
        }
    }
    Err(Error::NoConvergence { method: "cec", iterations: opts.max_iter, detail: "power iteration did not settle".into() })
}
