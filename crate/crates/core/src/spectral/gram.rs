//! Gram-mate hypergraphs: equal `SSᵀ` and `SᵀS`, yet not isomorphic.

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// Incidence Gram matrices `(SSᵀ, SᵀS)`: vertex codegrees and edge
/// intersection sizes.
pub fn gram_matrices(h: &Hypergraph) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    let n = h.n();
    let m = h.m();
    let mut vv = vec![vec![0u32; n]; n];
    for edge in h.edges() {
        for &u in edge {
            for &v in edge {
                vv[u][v] += 1;
            }
        }
    }
    let mut ee = vec![vec![0u32; m]; m];
    for (i, row) in ee.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let (a, b) = (h.edge(i), h.edge(j));
            *slot = a.iter().filter(|v| b.binary_search(v).is_ok()).count() as u32;
        }
    }
    (vv, ee)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Exhaustive isomorphism test over all vertex permutations; meant for
/// fixtures with at most about nine vertices.
pub fn is_isomorphic(a: &Hypergraph, b: &Hypergraph) -> bool {
    if a.n() != b.n() || a.m() != b.m() {
        return false;
    }
    let mut target: Vec<Vec<usize>> = b.edges().to_vec();
    target.sort();
    let mut perm: Vec<usize> = (0..a.n()).collect();
    loop {
        let mut mapped: Vec<Vec<usize>> = a
            .edges()
            .iter()
            .map(|e| {
                let mut m: Vec<usize> = e.iter().map(|&v| perm[v]).collect();
                m.sort_unstable();
                m
            })
            .collect();
        mapped.sort();
        if mapped == target {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

/// A stored Gram-mate pair `S`, `R` on the same vertex and edge labels.
#[derive(Debug, Clone)]
pub struct GramPair {
    pub s: Hypergraph,
    pub r: Hypergraph,
}

const FIXTURE_S: &[&[usize]] =
    &[&[0, 1, 3], &[0, 1, 4], &[3, 4], &[1, 2, 3, 4], &[0, 1, 5], &[0, 2, 5], &[1, 2], &[2, 3, 5], &[2, 4, 5]];
const FIXTURE_R: &[&[usize]] =
    &[&[0, 1, 3], &[0, 1, 4], &[0, 5], &[0, 1, 2, 5], &[1, 3, 4], &[2, 3, 4], &[1, 2], &[2, 3, 5], &[2, 4, 5]];

/// The stored six-vertex Gram-mate pair, with both Gram identities and
/// non-isomorphism re-verified on every call.
pub fn gram_mate_fixture() -> Result<GramPair> {
    let build = |edges: &[&[usize]]| Hypergraph::new(6, edges.iter().map(|e| e.to_vec()).collect());
    let s = build(FIXTURE_S)?;
    let r = build(FIXTURE_R)?;
    if gram_matrices(&s) != gram_matrices(&r) {
        return Err(Error::FixtureCorrupt("Gram matrices of the stored pair differ".into()));
    }
    if is_isomorphic(&s, &r) {
        return Err(Error::FixtureCorrupt("stored pair is isomorphic".into()));
    }
    Ok(GramPair { s, r })
}
