//! Symmetric CP decomposition driven by TTSV1, the normalized Laplacian
//! tensor, and k-means over the resulting embeddings.

mod kmeans;
mod laplacian;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use kmeans::{kmeans, ClusterAssignment, KMeansOptions};
pub use laplacian::{laplacian_ttsv1, Laplacian};

use crate::combin::blowup_count;
use crate::error::{Error, Result};
use crate::exec::ExecConfig;
use crate::hypergraph::Hypergraph;
use crate::ttsv::Kernel;

/// A symmetric order-`r` tensor reachable only through TTSV1 and its
/// squared Frobenius norm.
pub trait TensorOperator: Sync {
    fn order(&self) -> usize;
    fn dim(&self) -> usize;
    /// `𝒯x^{r−1}`.
    fn ttsv1(&self, x: &[f64]) -> Result<Vec<f64>>;
    /// `‖𝒯‖²`.
    fn norm_sq(&self) -> Result<f64>;
    fn exec(&self) -> &ExecConfig;
}

/// The weighted adjacency tensor of a hypergraph.
pub struct Adjacency<'a> {
    h: &'a Hypergraph,
    kernel: Kernel,
}

impl<'a> Adjacency<'a> {
    pub fn new(h: &'a Hypergraph, kernel: Kernel) -> Self {
        Self { h, kernel }
    }
}

/// `ln x` for a big integer of any size.
pub(crate) fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return crate::combin::big_to_f64(x).ln();
    }
    let shift = bits - 64;
    crate::combin::big_to_f64(&(x >> shift)).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Edges with equal vertex sets share tensor entries, so their weights add
/// before squaring: `‖𝒜‖² = Σ_{distinct e} (Σ w)² |β(e)|`.
pub(crate) fn grouped_weights(h: &Hypergraph) -> Vec<(Vec<usize>, f64)> {
    let weights = h.edge_weights();
    let mut order: Vec<usize> = (0..h.m()).collect();
    order.sort_by(|&a, &b| h.edge(a).cmp(h.edge(b)).then(a.cmp(&b)));
    let mut groups: Vec<(Vec<usize>, f64)> = Vec::new();
    for e in order {
        match groups.last_mut() {
            Some((set, w)) if set.as_slice() == h.edge(e) => *w += weights[e],
            _ => groups.push((h.edge(e).to_vec(), weights[e])),
        }
    }
    groups
}

impl TensorOperator for Adjacency<'_> {
    fn order(&self) -> usize {
        self.h.rank()
    }

    fn dim(&self) -> usize {
        self.h.n()
    }

    fn ttsv1(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.kernel.ttsv1(self.h, x)
    }

    fn norm_sq(&self) -> Result<f64> {
        let mut total = crate::exec::CompensatedSum::default();
        for (set, w) in grouped_weights(self.h) {
            let count = blowup_count(set.len(), self.h.rank())?;
            total.add((2.0 * w.ln() + big_ln(&count)).exp());
        }
        Ok(total.value())
    }

    fn exec(&self) -> &ExecConfig {
        &self.kernel.exec
    }
}

/// Weights `λ ∈ ℝ^q` and factor columns `E_j ∈ ℝ^n` of `Σ_j λ_j E_j^{⊗r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPModel {
    pub lambda: Vec<f64>,
    /// `columns[j]` is `E_j`.
    pub columns: Vec<Vec<f64>>,
}

impl CPModel {
    pub fn new(lambda: Vec<f64>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if lambda.len() != columns.len() || lambda.is_empty() {
            return Err(Error::DimensionMismatch { expected: lambda.len(), got: columns.len() });
        }
        let n = columns[0].len();
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: c.len() });
        }
        if lambda.iter().chain(columns.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("model entries must be finite".into()));
        }
        Ok(Self { lambda, columns })
    }

    /// Entries of `E` uniform in `(−1/√n, 1/√n)`, `λ = 1`.
    pub fn random(n: usize, q: usize, seed: u64) -> Self {
        Self::random_with(n, q, seed, Init::Symmetric)
    }

    pub fn random_with(n: usize, q: usize, seed: u64, init: Init) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = 1.0 / (n as f64).sqrt();
        let lo = match init {
            Init::Symmetric => -bound,
            Init::Nonnegative => 0.0,
        };
        let columns = (0..q).map(|_| (0..n).map(|_| rng.gen_range(lo..bound)).collect()).collect();
        Self { lambda: vec![1.0; q], columns }
    }

    pub fn q(&self) -> usize {
        self.lambda.len()
    }

    pub fn n(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    /// Row `v` of `E`, the embedding of vertex `v`.
    pub fn row(&self, v: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[v]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|v| self.row(v)).collect()
    }

    /// CSV with header `vertex,e_1..e_q`.
    pub fn to_csv(&self, labels: &[u64]) -> String {
        let mut out = String::from("vertex");
        for j in 1..=self.q() {
            out.push_str(&format!(",e_{j}"));
        }
        out.push('\n');
        for v in 0..self.n() {
            out.push_str(&labels.get(v).copied().unwrap_or(v as u64).to_string());
            for c in &self.columns {
                out.push_str(&format!(",{:.16e}", c[v]));
            }
            out.push('\n');
        }
        out
    }

    fn step(&self, grad: &Gradients, t: f64) -> Self {
        let lambda = self.lambda.iter().zip(&grad.lambda).map(|(x, g)| x - t * g).collect();
        let columns = self
            .columns
            .iter()
            .zip(&grad.columns)
            .map(|(c, g)| c.iter().zip(g).map(|(x, gi)| x - t * gi).collect())
            .collect();
        Self { lambda, columns }
    }
}

/// `∂f/∂λ` and `∂f/∂E_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub lambda: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn norm_sq(&self) -> f64 {
        self.lambda.iter().chain(self.columns.iter().flatten()).map(|g| g * g).sum()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_dims(op: &dyn TensorOperator, m: &CPModel) -> Result<()> {
    if m.n() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: m.n() });
    }
    Ok(())
}

/// Objective and gradients sharing the `q` TTSV1 evaluations.
fn evaluate(op: &dyn TensorOperator, m: &CPModel, want_grad: bool) -> Result<(f64, Option<Gradients>)> {
    check_dims(op, m)?;
    let r = op.order() as i32;
    let q = m.q();
    let s = op.exec().map_range(q, |j| op.ttsv1(&m.columns[j]))?;
    let a: Vec<f64> = (0..q).map(|j| dot(&s[j], &m.columns[j])).collect();
    let gram: Vec<Vec<f64>> = (0..q).map(|j| (0..q).map(|k| dot(&m.columns[j], &m.columns[k])).collect()).collect();
    let mut f = op.norm_sq()?;
    for j in 0..q {
        f -= 2.0 * m.lambda[j] * a[j];
        for k in 0..q {
            f += m.lambda[j] * m.lambda[k] * gram[j][k].powi(r);
        }
    }
    if !f.is_finite() {
        return Err(Error::Divergence { step: 0, objective: f });
    }
    if !want_grad {
        return Ok((f, None));
    }
    let lambda = (0..q)
        .map(|j| -2.0 * (a[j] - (0..q).map(|k| m.lambda[k] * gram[j][k].powi(r)).sum::<f64>()))
        .collect();
    let columns = (0..q)
        .map(|j| {
            let mut inner = s[j].clone();
            for k in 0..q {
                let c = m.lambda[k] * gram[j][k].powi(r - 1);
                inner.iter_mut().zip(&m.columns[k]).for_each(|(x, e)| *x -= c * e);
            }
            let pre = -2.0 * r as f64 * m.lambda[j];
            inner.iter_mut().for_each(|x| *x *= pre);
            inner
        })
        .collect();
    Ok((f, Some(Gradients { lambda, columns })))
}

/// Squared Frobenius distance `‖𝒯 − Σ_j λ_j E_j^{⊗r}‖²`.
pub fn cp_objective(op: &dyn TensorOperator, m: &CPModel) -> Result<f64> {
    Ok(evaluate(op, m, false)?.0)
}

/// Closed-form gradients of [`cp_objective`].
pub fn cp_gradients(op: &dyn TensorOperator, m: &CPModel) -> Result<Gradients> {
    Ok(evaluate(op, m, true)?.1.expect("gradients requested"))
}

/// Distribution of the random starting factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Init {
    /// Uniform in `(−1/√n, 1/√n)`.
    #[default]
    Symmetric,
    /// Uniform in `[0, 1/√n)`. Avoids the mixed-sign stationary points that
    /// odd-order nonnegative tensors have.
    Nonnegative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub q: usize,
    pub max_steps: usize,
    pub initial_step: f64,
    /// Stop once `‖∇f‖₂` falls below this.
    pub grad_tol: f64,
    pub seed: u64,
    pub init: Init,
    /// Independent starts with seeds `seed, seed + 1, ...`; the lowest final
    /// objective wins.
    pub restarts: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { q: 8, max_steps: 2000, initial_step: 1.0, grad_tol: 1e-8, seed: 0, init: Init::Symmetric, restarts: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: CPModel,
    /// Objective at the start and after every accepted step.
    pub history: Vec<f64>,
    pub grad_norm: f64,
    pub converged: bool,
}

impl FitResult {
    /// Final objective value.
    pub fn objective(&self) -> f64 {
        *self.history.last().expect("history holds the initial objective")
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// Gradient descent with Armijo backtracking from `opts.restarts` seeded
/// random starts, keeping the fit with the lowest final objective.
pub fn cp_fit(op: &dyn TensorOperator, opts: &FitOptions) -> Result<FitResult> {
    if opts.q == 0 {
        return Err(Error::InvalidArgument("embedding dimension q must be at least 1".into()));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    let mut best: Option<FitResult> = None;
    for i in 0..opts.restarts {
        let init = CPModel::random_with(op.dim(), opts.q, opts.seed.wrapping_add(i as u64), opts.init);
        let fit = cp_fit_from(op, init, opts)?;
        if best.as_ref().is_none_or(|b| fit.objective() < b.objective()) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// [`cp_fit`] from a given starting model; `opts.q` and `opts.seed` are
/// ignored.
pub fn cp_fit_from(op: &dyn TensorOperator, init: CPModel, opts: &FitOptions) -> Result<FitResult> {
    if init.n() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: init.n() });
    }
    let mut model = init;
    let (mut f, g) = evaluate(op, &model, true)?;
    let mut grad = g.expect("gradients requested");
    let mut history = vec![f];
    let mut t = opts.initial_step;
    for step in 1..=opts.max_steps {
        let gn2 = grad.norm_sq();
        if gn2.sqrt() <= opts.grad_tol {
            return Ok(FitResult { model, history, grad_norm: gn2.sqrt(), converged: true });
        }
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = model.step(&grad, t);
            let ft = evaluate(op, &trial, false)?.0;
            if !ft.is_finite() {
                return Err(Error::Divergence { step, objective: ft });
            }
            if ft <= f - ARMIJO * t * gn2 {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((trial, ft)) = accepted else {
            // no decrease is representable any more: a numerical stationary point
            return Ok(FitResult { model, history, grad_norm: gn2.sqrt(), converged: true });
        };
        model = trial;
        let (fv, g) = evaluate(op, &model, true)?;
        debug_assert!((fv - ft).abs() <= 1e-12 * ft.abs().max(1.0));
        f = fv;
        grad = g.expect("gradients requested");
        history.push(f);
        t *= 2.0;
    }
    let gn = grad.norm_sq().sqrt();
    Ok(FitResult { model, history, grad_norm: gn, converged: gn <= opts.grad_tol })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedOptions {
    pub fit: FitOptions,
    pub k: usize,
    pub use_laplacian: bool,
    pub kmeans: KMeansOptions,
}

/// CP-embeds `𝒜` (or `𝓛`) and clusters the rows of `E`.
pub fn embed_and_cluster(h: &Hypergraph, kernel: &Kernel, opts: &EmbedOptions) -> Result<(FitResult, ClusterAssignment)> {
    if opts.k == 0 || opts.k > h.n() {
        return Err(Error::InvalidArgument(format!("k = {} must lie in 1..={}", opts.k, h.n())));
    }
    let fit = if opts.use_laplacian {
        cp_fit(&Laplacian::new(h, kernel.clone())?, &opts.fit)?
    } else {
        cp_fit(&Adjacency::new(h, kernel.clone()), &opts.fit)?
    };
    let clusters = kmeans(&fit.model.rows(), opts.k, &KMeansOptions { seed: opts.fit.seed, ..opts.kmeans.clone() })?;
    Ok((fit, clusters))
}
