//! Blowup-based kernels: the explicit-tensor oracle, the ordered-blowup
//! baseline and the unordered-blowup algorithms.
//!
//! All kernels are vertex-major: output slot `v` (or row `u`) is produced by
//! one closure that walks `E(v)` in ascending edge order, so serial and
//! parallel runs add in the same order.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{check_len, SymmetricMatrix};
use crate::combin::{blowup_count, enumerate_beta, enumerate_kappa, factorial_f64, phi};
use crate::error::{Error, Result};
use crate::exec::{CompensatedSum, ExecConfig};
use crate::hypergraph::Hypergraph;

fn explicit_entries(h: &Hypergraph, cfg: &ExecConfig) -> Result<u128> {
    let needed = (h.n() as u128).checked_pow(h.rank() as u32).unwrap_or(u128::MAX);
    if needed > cfg.explicit_budget {
        return Err(Error::Capacity { what: "explicit adjacency tensor", needed, budget: cfg.explicit_budget });
    }
    Ok(needed)
}

/// Dense row-major adjacency tensor of order `r`.
fn materialize(h: &Hypergraph, cfg: &ExecConfig) -> Result<Vec<f64>> {
    let len = explicit_entries(h, cfg)? as usize;
    let n = h.n();
    let r = h.rank();
    let weights = h.edge_weights();
    let mut tensor = vec![0.0; len];
    for (e, edge) in h.edges().iter().enumerate() {
        cfg.check()?;
        for tuple in enumerate_beta(edge, r) {
            let idx = tuple.iter().fold(0usize, |acc, &v| acc * n + v);
            tensor[idx] += weights[e];
        }
    }
    Ok(tensor)
}

/// Contracts the trailing `free` modes of a dense slice with `b`.
fn contract_tail(slice: &[f64], b: &[f64], modes: usize) -> f64 {
    let n = b.len();
    let mut acc = CompensatedSum::default();
    for (idx, &a) in slice.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let mut rest = idx;
        let mut prod = a;
        for _ in 0..modes {
            prod *= b[rest % n];
            rest /= n;
        }
        acc.add(prod);
    }
    acc.value()
}

/// TTSV1 straight from the definition on the materialized tensor.
pub fn ttsv1_explicit(h: &Hypergraph, b: &[f64], cfg: &ExecConfig) -> Result<Vec<f64>> {
    check_len(h, b)?;
    let tensor = materialize(h, cfg)?;
    let n = h.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let stride = tensor.len() / n;
    cfg.map_range(n, |i| {
        cfg.check()?;
        Ok(contract_tail(&tensor[i * stride..(i + 1) * stride], b, h.rank() - 1))
    })
}

/// TTSV2 straight from the definition on the materialized tensor.
pub fn ttsv2_explicit(h: &Hypergraph, b: &[f64], cfg: &ExecConfig) -> Result<SymmetricMatrix> {
    check_len(h, b)?;
    let tensor = materialize(h, cfg)?;
    let n = h.n();
    if n == 0 {
        return Ok(SymmetricMatrix::from_upper(0, Vec::new()));
    }
    let stride = tensor.len() / (n * n);
    let upper = cfg.map_range(n, |i| {
        cfg.check()?;
        let mut row = Vec::new();
        for j in i..n {
            let start = (i * n + j) * stride;
            let val = contract_tail(&tensor[start..start + stride], b, h.rank() - 2);
            if val != 0.0 {
                row.push((j, val));
            }
        }
        Ok(row)
    })?;
    Ok(SymmetricMatrix::from_upper(n, upper))
}

fn ordered_guard(h: &Hypergraph, cfg: &ExecConfig) -> Result<()> {
    let mut total = BigUint::zero();
    for edge in h.edges() {
        total += blowup_count(edge.len(), h.rank())?;
    }
    let needed = total.to_u128().unwrap_or(u128::MAX);
    if needed > cfg.ordered_budget || h.max_edge_size() > 64 {
        return Err(Error::Capacity { what: "ordered blowup enumeration", needed, budget: cfg.ordered_budget });
    }
    Ok(())
}

/// Sums `Π b` over every completion of a partial blowup tuple; `covered`
/// tracks which slots of the edge are already used.
fn ordered_walk(slot_b: &[f64], covered: u64, full: u64, remaining: usize, prod: f64, acc: &mut CompensatedSum) {
    if remaining == 0 {
        if covered == full {
            acc.add(prod);
        }
        return;
    }
    if (full & !covered).count_ones() as usize > remaining {
        return;
    }
    for (i, &bi) in slot_b.iter().enumerate() {
        ordered_walk(slot_b, covered | (1 << i), full, remaining - 1, prod * bi, acc);
    }
}

fn full_mask(k: usize) -> u64 {
    if k == 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// TTSV1 by enumerating every ordered blowup `t ∈ β(e)` with `t₁ = v`.
pub fn ttsv1_ordered(h: &Hypergraph, b: &[f64], cfg: &ExecConfig) -> Result<Vec<f64>> {
    check_len(h, b)?;
    ordered_guard(h, cfg)?;
    let weights = h.edge_weights();
    let r = h.rank();
    cfg.map_range(h.n(), |v| {
        let mut total = CompensatedSum::default();
        for &e in h.incident(v) {
            cfg.check()?;
            let edge = h.edge(e);
            let slot_b: Vec<f64> = edge.iter().map(|&u| b[u]).collect();
            let i = edge.binary_search(&v).expect("incidence consistent");
            let mut acc = CompensatedSum::default();
            ordered_walk(&slot_b, 1 << i, full_mask(edge.len()), r - 1, 1.0, &mut acc);
            total.add(weights[e] * acc.value());
        }
        Ok(total.value())
    })
}

/// TTSV2 by enumerating every ordered blowup with `t₁ = u, t₂ = v`.
pub fn ttsv2_ordered(h: &Hypergraph, b: &[f64], cfg: &ExecConfig) -> Result<SymmetricMatrix> {
    check_len(h, b)?;
    ordered_guard(h, cfg)?;
    let weights = h.edge_weights();
    let r = h.rank();
    let upper = cfg.map_range(h.n(), |u| {
        let mut row: BTreeMap<usize, CompensatedSum> = BTreeMap::new();
        for &e in h.incident(u) {
            cfg.check()?;
            let edge = h.edge(e);
            let slot_b: Vec<f64> = edge.iter().map(|&x| b[x]).collect();
            let i = edge.binary_search(&u).expect("incidence consistent");
            for (j, &v) in edge.iter().enumerate().skip(i) {
                let mut acc = CompensatedSum::default();
                ordered_walk(&slot_b, (1 << i) | (1 << j), full_mask(edge.len()), r - 2, 1.0, &mut acc);
                row.entry(v).or_default().add(weights[e] * acc.value());
            }
        }
        Ok(finish_row(row))
    })?;
    Ok(SymmetricMatrix::from_upper(h.n(), upper))
}

fn finish_row(row: BTreeMap<usize, CompensatedSum>) -> Vec<(usize, f64)> {
    row.into_iter().map(|(v, s)| (v, s.value())).filter(|&(_, x)| x != 0.0).collect()
}

/// `table[m] = b^m / m!` for `m = 0..=r`.
fn scaled_powers(b: f64, r: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(r + 1);
    let mut c = 1.0;
    t.push(c);
    for m in 1..=r {
        c *= b / m as f64;
        t.push(c);
    }
    t
}

/// Leaves visited between stop-flag checks inside one edge.
const WALK_CHECK_INTERVAL: u32 = 1 << 16;

/// Walks the compositions of `r` over the edge slots (every multiplicity
/// ≥ 1, lexicographic order) and sums `Π_j table_j[m_j − fixed_j]`. Slot
/// `j` holds `fixed_j` copies pinned to leading positions, so multisets
/// with `m_j < fixed_j` are skipped. Large edges are checked for
/// cancellation every [`WALK_CHECK_INTERVAL`] leaves.
struct KappaWalk<'a> {
    tables: &'a [Vec<f64>],
    fixed: &'a [usize],
    cfg: &'a ExecConfig,
    leaves: u32,
    acc: CompensatedSum,
}

impl<'a> KappaWalk<'a> {
    fn sum(tables: &'a [Vec<f64>], fixed: &'a [usize], r: usize, cfg: &'a ExecConfig) -> Result<f64> {
        let mut walk = Self { tables, fixed, cfg, leaves: 0, acc: CompensatedSum::default() };
        walk.visit(0, r, 1.0)?;
        Ok(walk.acc.value())
    }

    fn visit(&mut self, slot: usize, remaining: usize, prod: f64) -> Result<()> {
        let last = self.tables.len() - 1;
        let min_m = self.fixed[slot].max(1);
        if slot == last {
            if remaining >= min_m {
                self.acc.add(prod * self.tables[slot][remaining - self.fixed[slot]]);
                self.leaves = self.leaves.wrapping_add(1);
                if self.leaves.is_multiple_of(WALK_CHECK_INTERVAL) {
                    self.cfg.check()?;
                }
            }
            return Ok(());
        }
        let reserve = last - slot;
        if remaining < reserve + min_m {
            return Ok(());
        }
        for m in min_m..=remaining - reserve {
            self.visit(slot + 1, remaining - m, prod * self.tables[slot][m - self.fixed[slot]])?;
        }
        Ok(())
    }
}

/// TTSV1 over unordered blowups. Each multiset `x ∈ κ(e)` contributes
/// `φ₁(x, v) · Π_{u ∈ x − v} b_u`, evaluated as `(r−1)! Π_u b_u^{m'_u}/m'_u!`
/// with `m'` the multiplicities after removing one copy of `v`. No division
/// by `b_v` takes place.
pub fn ttsv1_unord(h: &Hypergraph, b: &[f64], cfg: &ExecConfig) -> Result<Vec<f64>> {
    check_len(h, b)?;
    let weights = h.edge_weights();
    let r = h.rank();
    let scale = factorial_f64(r - 1);
    cfg.map_range(h.n(), |v| {
        let mut total = CompensatedSum::default();
        for &e in h.incident(v) {
            cfg.check()?;
            let edge = h.edge(e);
            let tables: Vec<Vec<f64>> = edge.iter().map(|&u| scaled_powers(b[u], r)).collect();
            let mut fixed = vec![0; edge.len()];
            fixed[edge.binary_search(&v).expect("incidence consistent")] = 1;
            total.add(weights[e] * scale * KappaWalk::sum(&tables, &fixed, r, cfg)?);
        }
        Ok(total.value())
    })
}

/// TTSV2 over unordered blowups with `φ₂` position counts; the diagonal
/// skips multisets in which `u` appears once.
pub fn ttsv2_unord(h: &Hypergraph, b: &[f64], cfg: &ExecConfig) -> Result<SymmetricMatrix> {
    check_len(h, b)?;
    let weights = h.edge_weights();
    let r = h.rank();
    let scale = factorial_f64(r - 2);
    let upper = cfg.map_range(h.n(), |u| {
        let mut row: BTreeMap<usize, CompensatedSum> = BTreeMap::new();
        for &e in h.incident(u) {
            cfg.check()?;
            let edge = h.edge(e);
            let tables: Vec<Vec<f64>> = edge.iter().map(|&x| scaled_powers(b[x], r)).collect();
            let i = edge.binary_search(&u).expect("incidence consistent");
            for (j, &v) in edge.iter().enumerate().skip(i) {
                let mut fixed = vec![0; edge.len()];
                fixed[i] += 1;
                fixed[j] += 1;
                row.entry(v).or_default().add(weights[e] * scale * KappaWalk::sum(&tables, &fixed, r, cfg)?);
            }
        }
        Ok(finish_row(row))
    })?;
    Ok(SymmetricMatrix::from_upper(h.n(), upper))
}

/// Exact rational TTSV1 over unordered blowups, using big-integer `φ₁`
/// and exact edge weights. Intended for small oracle instances.
pub fn ttsv1_unord_exact(h: &Hypergraph, b: &[BigRational]) -> Result<Vec<BigRational>> {
    if b.len() != h.n() {
        return Err(Error::DimensionMismatch { expected: h.n(), got: b.len() });
    }
    let weights = h.edge_weights_exact();
    let r = h.rank();
    let mut out = vec![BigRational::zero(); h.n()];
    for (v, slot) in out.iter_mut().enumerate() {
        for &e in h.incident(v) {
            for x in enumerate_kappa(h.edge(e), r) {
                let count = phi(&x, &[v], r)?.exact;
                let mut prod = BigRational::from_integer(count.into());
                for (&u, &m) in x.support.iter().zip(&x.multiplicities) {
                    let power = if u == v { m - 1 } else { m };
                    for _ in 0..power {
                        prod *= &b[u];
                    }
                }
                *slot += &weights[e] * prod;
            }
        }
    }
    Ok(out)
}
