//! Exact combinatorial primitives shared by the kernels and their oracles.
//!
//! Counts are exact big integers; conversion to `f64` happens only at the
//! point a count is multiplied into a floating-point sum.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest `n` with `n!` representable as a finite `f64`.
pub const MAX_F64_FACTORIAL: usize = 170;

fn stirling_table() -> &'static RwLock<Vec<Vec<BigUint>>> {
    static TABLE: OnceLock<RwLock<Vec<Vec<BigUint>>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![vec![BigUint::one()]]))
}

/// Stirling number of the second kind `S(n, k)`, memoized across calls.
///
/// Returns zero for `k > n`.
pub fn stirling2(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    {
        let table = stirling_table().read().expect("stirling table poisoned");
        if let Some(row) = table.get(n) {
            return row[k].clone();
        }
    }
    let mut table = stirling_table().write().expect("stirling table poisoned");
    while table.len() <= n {
        let prev = table.last().expect("table seeded with row 0");
        let m = table.len();
        let mut row = vec![BigUint::zero(); m + 1];
        for j in 1..=m {
            let carried = if j < prev.len() { &prev[j] * j } else { BigUint::zero() };
            row[j] = carried + &prev[j - 1];
        }
        table.push(row);
    }
    table[n][k].clone()
}

pub fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `n!` as an `f64`; infinite beyond [`MAX_F64_FACTORIAL`].
pub fn factorial_f64(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(MAX_F64_FACTORIAL + 1);
        let mut acc = BigUint::one();
        t.push(1.0);
        for i in 1..=MAX_F64_FACTORIAL {
            acc *= i;
            t.push(big_to_f64(&acc));
        }
        t
    });
    table.get(n).copied().unwrap_or(f64::INFINITY)
}

/// `ln(n!)`, exact-table backed where possible.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= MAX_F64_FACTORIAL {
        factorial_f64(n).ln()
    } else {
        (1..=n).map(|i| (i as f64).ln()).sum()
    }
}

/// Correctly rounded conversion for values below `2^1024`, infinity above.
pub fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

fn check_size(esize: usize, r: usize) -> Result<()> {
    if esize == 0 || esize > r {
        return Err(Error::InvalidArgument(format!(
            "edge size {esize} must lie in 1..={r}"
        )));
    }
    Ok(())
}

/// `|β(e)| = |e|! · S(r, |e|)`.
pub fn blowup_count(esize: usize, r: usize) -> Result<BigUint> {
    check_size(esize, r)?;
    Ok(factorial(esize) * stirling2(r, esize))
}

/// `|κ(e)| = C(r-1, r-|e|)`.
pub fn unordered_count(esize: usize, r: usize) -> Result<BigUint> {
    check_size(esize, r)?;
    Ok(binomial(r - 1, r - esize))
}

/// A size-`r` multiset given by its support and per-vertex multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multiset {
    pub support: Vec<usize>,
    pub multiplicities: Vec<usize>,
}

impl Multiset {
    pub fn size(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn multiplicity(&self, v: usize) -> usize {
        self.support
            .iter()
            .position(|&u| u == v)
            .map_or(0, |i| self.multiplicities[i])
    }

    /// Number of distinct orderings, `r! / Π m!`.
    pub fn arrangements(&self) -> BigUint {
        let denom = self
            .multiplicities
            .iter()
            .fold(BigUint::one(), |acc, &m| acc * factorial(m));
        factorial(self.size()) / denom
    }
}

/// Iterator over the unordered blowups `κ(e)`: compositions of `r - |e|`
/// extra copies over the slots of `e`, in lexicographic multiplicity order.
pub struct KappaIter {
    support: Vec<usize>,
    current: Option<Vec<usize>>,
}

pub fn enumerate_kappa(edge: &[usize], r: usize) -> KappaIter {
    let current = if edge.is_empty() || edge.len() > r {
        None
    } else {
        let mut m = vec![1; edge.len()];
        *m.last_mut().expect("nonempty") += r - edge.len();
        Some(m)
    };
    KappaIter { support: edge.to_vec(), current }
}

impl Iterator for KappaIter {
    type Item = Multiset;

    fn next(&mut self) -> Option<Multiset> {
        let m = self.current.take()?;
        let out = Multiset { support: self.support.clone(), multiplicities: m.clone() };
        // Next composition: bump the rightmost non-final slot whose suffix
        // still carries slack, reset everything after it.
        let k = m.len();
        let mut next = m;
        let mut suffix = next[k - 1] - 1;
        let mut i = k - 1;
        while i > 0 {
            i -= 1;
            if suffix > 0 {
                next[i] += 1;
                for slot in next.iter_mut().take(k - 1).skip(i + 1) {
                    *slot = 1;
                }
                next[k - 1] = suffix;
                self.current = Some(next);
                break;
            }
            suffix += next[i] - 1;
        }
        Some(out)
    }
}

/// Iterator over the ordered blowups `β(e)`: every `r`-tuple over `e` that
/// uses each vertex of `e` at least once. Exponential; oracle use only.
pub struct BetaIter {
    edge: Vec<usize>,
    r: usize,
    digits: Vec<usize>,
    done: bool,
}

pub fn enumerate_beta(edge: &[usize], r: usize) -> BetaIter {
    BetaIter {
        edge: edge.to_vec(),
        r,
        digits: vec![0; r],
        done: edge.is_empty() || edge.len() > r,
    }
}

impl BetaIter {
    fn advance(&mut self) {
        let base = self.edge.len();
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < base {
                return;
            }
            *d = 0;
        }
        self.done = true;
    }

    fn covers(&self) -> bool {
        let mut seen = vec![false; self.edge.len()];
        for &d in &self.digits {
            seen[d] = true;
        }
        seen.iter().all(|&s| s)
    }
}

impl Iterator for BetaIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        while !self.done {
            let hit = self.covers();
            let tuple: Vec<usize> = if hit {
                self.digits.iter().map(|&d| self.edge[d]).collect()
            } else {
                Vec::new()
            };
            self.advance();
            if hit {
                debug_assert_eq!(tuple.len(), self.r);
                return Some(tuple);
            }
        }
        None
    }
}

/// Position count `φ_k(x, fixed)` for `k = |fixed| ∈ {1, 2}`: the number of
/// blowups with multiset `x` whose first `k` entries are `fixed`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionCount {
    pub exact: BigUint,
    pub value: f64,
}

pub fn phi(x: &Multiset, fixed: &[usize], r: usize) -> Result<PositionCount> {
    if fixed.is_empty() || fixed.len() > 2 {
        return Err(Error::InvalidArgument(format!(
            "phi supports 1 or 2 fixed positions, got {}",
            fixed.len()
        )));
    }
    if x.size() != r {
        return Err(Error::InvalidArgument(format!(
            "multiset has size {}, expected {r}",
            x.size()
        )));
    }
    let mut remaining = x.multiplicities.clone();
    for &v in fixed {
        let slot = x.support.iter().position(|&u| u == v).ok_or_else(|| {
            Error::InvalidArgument(format!("fixed vertex {v} not in multiset support"))
        })?;
        if remaining[slot] == 0 {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} fixed more often than its multiplicity"
            )));
        }
        remaining[slot] -= 1;
    }
    let denom = remaining.iter().fold(BigUint::one(), |acc, &m| acc * factorial(m));
    let exact = factorial(r - fixed.len()) / denom;
    let value = big_to_f64(&exact);
    Ok(PositionCount { exact, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn stirling_alternating(n: usize, k: usize) -> BigUint {
        // (1/k!) Σ_i (-1)^i C(k,i) (k-i)^n
        let mut acc = BigInt::zero();
        for i in 0..=k {
            let term = BigInt::from(binomial(k, i)) * BigInt::from(k - i).pow(n as u32);
            if i % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        (acc / BigInt::from(factorial(k))).to_biguint().expect("non-negative")
    }

    #[test]
    fn stirling_small_values() {
        assert_eq!(stirling2(3, 2), BigUint::from(3u32));
        assert_eq!(stirling2(7, 7), BigUint::one());
        assert_eq!(stirling2(7, 1), BigUint::one());
        assert_eq!(stirling2(3, 5), BigUint::zero());
        assert_eq!(stirling2(0, 0), BigUint::one());
        assert_eq!(stirling2(5, 0), BigUint::zero());
    }

    #[test]
    fn stirling_matches_alternating_sum() {
        for n in 0..=20 {
            for k in 0..=n {
                assert_eq!(stirling2(n, k), stirling_alternating(n, k), "S({n},{k})");
            }
        }
    }

    #[test]
    fn stirling_is_threadsafe() {
        let handles: Vec<_> = (0..8)
            .map(|t| std::thread::spawn(move || stirling2(40 + t, 10)))
            .collect();
        for (t, h) in handles.into_iter().enumerate() {
            assert_eq!(h.join().unwrap(), stirling_alternating(40 + t, 10));
        }
    }

    #[test]
    fn blowup_and_unordered_counts() {
        assert_eq!(blowup_count(2, 3).unwrap(), BigUint::from(6u32));
        assert_eq!(unordered_count(2, 3).unwrap(), BigUint::from(2u32));
        assert_eq!(blowup_count(5, 5).unwrap(), factorial(5));
        assert_eq!(unordered_count(5, 5).unwrap(), BigUint::one());
        assert_eq!(blowup_count(1, 4).unwrap(), BigUint::one());
        assert_eq!(unordered_count(1, 4).unwrap(), BigUint::one());
        assert!(blowup_count(4, 3).is_err());
        assert!(unordered_count(0, 3).is_err());
    }

    #[test]
    fn kappa_listing_for_pair_in_rank_three() {
        let got: Vec<_> = enumerate_kappa(&[1, 3], 3).map(|x| x.multiplicities).collect();
        // {1,3,3} then {1,1,3}
        assert_eq!(got, vec![vec![1, 2], vec![2, 1]]);
        let full: Vec<_> = enumerate_kappa(&[0, 1, 2], 3).collect();
        assert_eq!(full.len(), 1);
        assert_eq!(full[0].multiplicities, vec![1, 1, 1]);
    }

    #[test]
    fn kappa_is_lexicographic_and_complete() {
        for size in 1..=6usize {
            for r in size..=12 {
                let edge: Vec<usize> = (0..size).collect();
                let all: Vec<_> = enumerate_kappa(&edge, r).map(|x| x.multiplicities).collect();
                assert!(all.windows(2).all(|w| w[0] < w[1]));
                assert!(all.iter().all(|m| m.iter().sum::<usize>() == r && m.iter().all(|&c| c >= 1)));
                // brute-force compositions of r into `size` positive parts
                let brute = count_compositions(r, size);
                assert_eq!(all.len() as u64, brute);
                assert_eq!(BigUint::from(brute), unordered_count(size, r).unwrap());
            }
        }
    }

    fn count_compositions(total: usize, parts: usize) -> u64 {
        if parts == 1 {
            return u64::from(total >= 1);
        }
        (1..total).map(|first| count_compositions(total - first, parts - 1)).sum()
    }

    #[test]
    fn beta_listing_for_pair_in_rank_three() {
        let got: Vec<_> = enumerate_beta(&[1, 3], 3).collect();
        let expected = vec![
            vec![1, 1, 3],
            vec![1, 3, 1],
            vec![1, 3, 3],
            vec![3, 1, 1],
            vec![3, 1, 3],
            vec![3, 3, 1],
        ];
        assert_eq!(got, expected);
        assert_eq!(enumerate_beta(&[1], 2).collect::<Vec<_>>(), vec![vec![1, 1]]);
    }

    #[test]
    fn beta_counts_match_formula() {
        for size in 1..=5usize {
            for r in size..=8 {
                let edge: Vec<usize> = (0..size).collect();
                let n = enumerate_beta(&edge, r).count();
                assert_eq!(BigUint::from(n), blowup_count(size, r).unwrap(), "|e|={size} r={r}");
            }
        }
    }

    #[test]
    fn multinomials_partition_the_blowups() {
        for size in 1..=6usize {
            for r in size..=12 {
                let edge: Vec<usize> = (0..size).collect();
                let total: BigUint = enumerate_kappa(&edge, r).map(|x| x.arrangements()).sum();
                assert_eq!(total, blowup_count(size, r).unwrap());
            }
        }
    }

    #[test]
    fn phi_examples() {
        let x = Multiset { support: vec![1, 3], multiplicities: vec![2, 1] };
        assert_eq!(phi(&x, &[1], 3).unwrap().exact, BigUint::from(2u32));
        let simple = Multiset { support: vec![0, 1, 2, 3], multiplicities: vec![1, 1, 1, 1] };
        assert_eq!(phi(&simple, &[2], 4).unwrap().exact, factorial(3));
        assert!(phi(&x, &[2], 3).is_err());
        assert!(phi(&x, &[3, 3], 3).is_err());
        assert_eq!(phi(&x, &[1, 1], 3).unwrap().value, 1.0);
    }

    #[test]
    fn phi_matches_position_brute_force() {
        for size in 1..=4usize {
            for r in size..=7 {
                let edge: Vec<usize> = (10..10 + size).collect();
                let tuples: Vec<Vec<usize>> = enumerate_beta(&edge, r).collect();
                for x in enumerate_kappa(&edge, r) {
                    let same_support: Vec<&Vec<usize>> = tuples
                        .iter()
                        .filter(|t| edge.iter().all(|&v| t.iter().filter(|&&w| w == v).count() == x.multiplicity(v)))
                        .collect();
                    for &u in &edge {
                        let brute = same_support.iter().filter(|t| t[0] == u).count();
                        assert_eq!(phi(&x, &[u], r).unwrap().exact, BigUint::from(brute));
                        for &v in &edge {
                            let valid = if u == v { x.multiplicity(u) >= 2 } else { true };
                            if !valid {
                                assert!(phi(&x, &[u, v], r).is_err());
                                continue;
                            }
                            let brute2 = same_support.iter().filter(|t| t[0] == u && t[1] == v).count();
                            assert_eq!(phi(&x, &[u, v], r).unwrap().exact, BigUint::from(brute2));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn factorial_table_is_exactly_rounded() {
        assert_eq!(factorial_f64(0), 1.0);
        assert_eq!(factorial_f64(10), 3_628_800.0);
        assert!(factorial_f64(170).is_finite());
        assert!(factorial_f64(171).is_infinite());
        assert!((ln_factorial(200) - 863.231_987_192_595).abs() < 1e-6);
    }
}
