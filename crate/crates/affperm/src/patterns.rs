//! Pattern containment and the rank decomposition.
//!
//! Decreasing-pattern avoidance is equivalent to a partition of `[N]` into
//! increasing periodic subsequences, computed here via ranks: the rank of a
//! position is the longest decreasing subsequence starting there. General
//! containment is a windowed depth-first search; the window is sound
//! because boundedness forces consecutive elements of any occurrence to sit
//! within `3N` of each other after normalization.

use crate::affine::{AffinePermutation, OrdinaryPermutation};
use crate::error::{Error, Result};

/// A witness that a pattern occurs: strictly increasing positions whose
/// values are order-isomorphic to the pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub pattern: OrdinaryPermutation,
    pub positions: Vec<i64>,
}

/// A partition of `[N]` into blocks whose value sequences increase, wrap
/// included: `σ(g_1) < ... < σ(g_n) < σ(g_1 + N)` per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncreasingPartition {
    pub blocks: Vec<Vec<i64>>,
}

impl IncreasingPartition {
    pub fn k(&self) -> usize {
        self.blocks.len()
    }
}

fn order_isomorphic_prefix(values: &[i64], pattern: &[usize], next: i64) -> bool {
    let j = values.len();
    values
        .iter()
        .zip(pattern)
        .all(|(&v, &p)| (v < next) == (p < pattern[j]))
}

fn dfs_pattern(
    value_at: &impl Fn(i64) -> i64,
    pattern: &[usize],
    lo: i64,
    hi: i64,
    first_hi: i64,
    positions: &mut Vec<i64>,
    values: &mut Vec<i64>,
) -> bool {
    let j = positions.len();
    if j == pattern.len() {
        return true;
    }
    let start = positions.last().map_or(lo, |&p| p + 1);
    let end = if j == 0 { first_hi } else { hi };
    for p in start..=end {
        let v = value_at(p);
        if !order_isomorphic_prefix(values, pattern, v) {
            continue;
        }
        positions.push(p);
        values.push(v);
        if dfs_pattern(value_at, pattern, lo, hi, first_hi, positions, values) {
            return true;
        }
        positions.pop();
        values.pop();
    }
    false
}

/// Finds an occurrence of `tau` inside the ordinary permutation `pi`.
pub fn contains_ordinary(
    pi: &OrdinaryPermutation,
    tau: &OrdinaryPermutation,
) -> Option<Occurrence> {
    let vals = pi.values();
    let value_at = |p: i64| vals[(p - 1) as usize] as i64;
    let n = pi.len() as i64;
    let mut positions = Vec::new();
    let mut values = Vec::new();
    if dfs_pattern(&value_at, tau.values(), 1, n, n, &mut positions, &mut values) {
        Some(Occurrence {
            pattern: tau.clone(),
            positions,
        })
    } else {
        None
    }
}

/// Finds an occurrence of `tau` inside the bounded affine permutation
/// `sigma`. The search takes the first index from `[1, N]` and the rest
/// from `[1, N + 3N(m-1)]`: an occurrence with a consecutive index gap of
/// `3N` or more can be shifted left by `N` without changing its pattern,
/// so some witness fits in this window whenever any witness exists.
pub fn contains_affine(
    sigma: &AffinePermutation,
    tau: &OrdinaryPermutation,
) -> Result<Option<Occurrence>> {
    contains_affine_windowed(sigma, tau, 3)
}

/// Same search with the per-gap window width `cN`; exposed so tests can
/// confirm the answer is stable when the window is doubled.
pub fn contains_affine_windowed(
    sigma: &AffinePermutation,
    tau: &OrdinaryPermutation,
    c: i64,
) -> Result<Option<Occurrence>> {
    sigma.require_bounded()?;
    let n = sigma.size() as i64;
    let m = tau.len() as i64;
    let hi = n + c * n * (m - 1);
    let value_at = |p: i64| sigma.evaluate(p);
    let mut positions = Vec::new();
    let mut values = Vec::new();
    if dfs_pattern(&value_at, tau.values(), 1, hi, n, &mut positions, &mut values) {
        Ok(Some(Occurrence {
            pattern: tau.clone(),
            positions,
        }))
    } else {
        Ok(None)
    }
}

/// Longest decreasing subsequence of `sigma` starting at position `a`.
///
/// Consecutive elements of a decreasing subsequence are fewer than `2N`
/// apart in index (boundedness squeezes `j - i < 2N - 2` when `i < j` and
/// `σ(i) > σ(j)`), and rank depends only on `a mod N`, so a memoized scan
/// over residue classes terminates. The recursion cannot cycle: a chain
/// returning to its own residue class would force `σ(a) + tN < σ(a)` with
/// `t >= 1`.
pub fn rank(sigma: &AffinePermutation, a: i64) -> Result<usize> {
    sigma.require_bounded()?;
    let n = sigma.size() as i64;
    let mut memo: Vec<Option<usize>> = vec![None; sigma.size()];
    Ok(rank_rec(sigma, (a - 1).rem_euclid(n), &mut memo))
}

fn rank_rec(sigma: &AffinePermutation, res: i64, memo: &mut Vec<Option<usize>>) -> usize {
    if let Some(r) = memo[res as usize] {
        return r;
    }
    let n = sigma.size() as i64;
    let a = res + 1; // representative of the class in [1, N]
    let va = sigma.evaluate(a);
    let mut best = 1;
    for b in (a + 1)..(a + 2 * n) {
        if sigma.evaluate(b) < va {
            best = best.max(1 + rank_rec(sigma, (b - 1).rem_euclid(n), memo));
        }
    }
    memo[res as usize] = Some(best);
    best
}

/// All window ranks at once; index `r` holds `rank(σ, r + 1)`.
pub fn window_ranks(sigma: &AffinePermutation) -> Result<Vec<usize>> {
    sigma.require_bounded()?;
    let n = sigma.size() as i64;
    let mut memo: Vec<Option<usize>> = vec![None; sigma.size()];
    Ok((0..n).map(|r| rank_rec(sigma, r, &mut memo)).collect())
}

/// True iff `sigma` avoids the decreasing pattern `m (m-1) ... 1`.
pub fn avoids_decreasing(sigma: &AffinePermutation, m: usize) -> Result<bool> {
    debug_assert!(m >= 2);
    Ok(window_ranks(sigma)?.into_iter().max().unwrap() <= m - 1)
}

/// Canonical partition of `[N]` into exactly `k` increasing blocks.
///
/// Starts from the rank classes, drops empty ones, then repeatedly splits
/// the largest block (first such block on ties) by moving its minimum into
/// a new singleton until `k` blocks remain, and finally orders blocks by
/// ascending minimum. Splitting preserves the increasing-with-wrap
/// invariant: the tail of an increasing block is increasing, and its new
/// wrap value only grows.
pub fn decompose_increasing(sigma: &AffinePermutation, k: usize) -> Result<IncreasingPartition> {
    let n = sigma.size();
    if n < k {
        return Err(Error::SizeTooSmall { size: n, needed: k });
    }
    let ranks = window_ranks(sigma)?;
    let max_rank = *ranks.iter().max().unwrap();
    if max_rank > k {
        let position = ranks.iter().position(|&r| r == max_rank).unwrap() as i64 + 1;
        return Err(Error::TooManyRanks {
            position,
            rank: max_rank,
            max: k,
        });
    }
    let mut blocks: Vec<Vec<i64>> = vec![Vec::new(); max_rank];
    for (i, &r) in ranks.iter().enumerate() {
        blocks[r - 1].push(i as i64 + 1);
    }
    blocks.retain(|b| !b.is_empty());
    while blocks.len() < k {
        let (idx, _) = blocks
            .iter()
            .enumerate()
            .max_by_key(|(i, b)| (b.len(), usize::MAX - i))
            .unwrap();
        let head = blocks[idx].remove(0);
        blocks.push(vec![head]);
    }
    blocks.sort_by_key(|b| b[0]);
    let partition = IncreasingPartition { blocks };
    debug_assert!(partition_is_increasing(sigma, &partition));
    Ok(partition)
}

pub(crate) fn partition_is_increasing(
    sigma: &AffinePermutation,
    p: &IncreasingPartition,
) -> bool {
    let n = sigma.size() as i64;
    p.blocks.iter().all(|b| {
        b.windows(2).all(|w| sigma.evaluate(w[0]) < sigma.evaluate(w[1]))
            && sigma.evaluate(*b.last().unwrap()) < sigma.evaluate(b[0] + n)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::AffinePermutation as AP;

    const FIG1: [i64; 6] = [2, 7, -2, -1, 9, 6];
    const FIG6: [i64; 10] = [6, -2, -1, 1, 10, 12, 4, 5, 13, 7];

    fn perm(s: &str) -> OrdinaryPermutation {
        OrdinaryPermutation::parse(s).unwrap()
    }

    fn check_occurrence(values: &[i64], occ: &Occurrence) {
        let pat = occ.pattern.values();
        assert_eq!(occ.positions.len(), pat.len());
        assert!(occ.positions.windows(2).all(|w| w[0] < w[1]));
        for i in 0..pat.len() {
            for j in 0..pat.len() {
                let vi = values[(occ.positions[i] - 1) as usize];
                let vj = values[(occ.positions[j] - 1) as usize];
                assert_eq!(vi < vj, pat[i] < pat[j]);
            }
        }
    }

    #[test]
    fn ordinary_containment_examples() {
        let pi = perm("493125876");
        let occ = contains_ordinary(&pi, &perm("4123")).expect("4123 occurs");
        let vals: Vec<i64> = pi.values().iter().map(|&v| v as i64).collect();
        check_occurrence(&vals, &occ);
        assert!(contains_ordinary(&pi, &perm("3142")).is_none());
        assert!(contains_ordinary(&pi, &perm("1")).is_some());
    }

    #[test]
    fn rank_examples() {
        let sigma = AP::validate(FIG6.to_vec()).unwrap();
        assert_eq!(rank(&sigma, 1).unwrap(), 2);
        let id = AP::validate((1..=5).collect()).unwrap();
        for a in -3..9 {
            assert_eq!(rank(&id, a).unwrap(), 1);
        }
    }

    #[test]
    fn rank_is_periodic() {
        let sigma = AP::validate(FIG1.to_vec()).unwrap();
        for a in 1..=6 {
            assert_eq!(rank(&sigma, a).unwrap(), rank(&sigma, a + 6).unwrap());
            assert_eq!(rank(&sigma, a).unwrap(), rank(&sigma, a - 12).unwrap());
        }
    }

    #[test]
    fn avoids_decreasing_examples() {
        let fig1 = AP::validate(FIG1.to_vec()).unwrap();
        assert!(!avoids_decreasing(&fig1, 3).unwrap());
        let id = AP::validate(vec![1, 2, 3, 4]).unwrap();
        assert!(avoids_decreasing(&id, 2).unwrap());
        let swap = AP::infinite_sum(&perm("21"));
        assert!(avoids_decreasing(&swap, 3).unwrap());
        assert!(!avoids_decreasing(&swap, 2).unwrap());
    }

    #[test]
    fn unbounded_input_rejected() {
        let sigma = AP::validate(vec![3, 0]).unwrap();
        assert!(matches!(rank(&sigma, 1), Err(Error::UnboundedInput { .. })));
        assert!(avoids_decreasing(&sigma, 2).is_err());
    }

    #[test]
    fn decompose_fig6() {
        let sigma = AP::validate(FIG6.to_vec()).unwrap();
        let p = decompose_increasing(&sigma, 2).unwrap();
        assert_eq!(p.blocks, vec![vec![1, 5, 6, 9], vec![2, 3, 4, 7, 8, 10]]);
    }

    #[test]
    fn decompose_identity_cases() {
        let id3 = AP::validate(vec![1, 2, 3]).unwrap();
        let p = decompose_increasing(&id3, 1).unwrap();
        assert_eq!(p.blocks, vec![vec![1, 2, 3]]);
        let p = decompose_increasing(&id3, 2).unwrap();
        assert_eq!(p.blocks, vec![vec![1], vec![2, 3]]);
    }

    #[test]
    fn decompose_errors() {
        let id2 = AP::validate(vec![1, 2]).unwrap();
        assert!(matches!(
            decompose_increasing(&id2, 3),
            Err(Error::SizeTooSmall { .. })
        ));
        let fig1 = AP::validate(FIG1.to_vec()).unwrap();
        // max rank of the size-6 window is 3, so k=2 must fail
        assert!(matches!(
            decompose_increasing(&fig1, 2),
            Err(Error::TooManyRanks { .. })
        ));
    }

    #[test]
    fn affine_containment_examples() {
        let fig1 = AP::validate(FIG1.to_vec()).unwrap();
        let occ = contains_affine(&fig1, &perm("321")).unwrap().expect("321 occurs");
        // validate the witness against evaluate
        assert!(occ.positions.windows(2).all(|w| w[0] < w[1]));
        let vals: Vec<i64> = occ.positions.iter().map(|&p| fig1.evaluate(p)).collect();
        assert!(vals.windows(2).all(|w| w[0] > w[1]));
        assert!(contains_affine(&fig1, &perm("1")).unwrap().is_some());
    }

    #[test]
    fn affine_agrees_with_rank_small() {
        // every bounded window of size 3: cross-check the two methods
        crate::counting::for_each_bounded_window(3, &mut |w| {
            let sigma = AP::validate(w.to_vec()).unwrap();
            let via_rank = avoids_decreasing(&sigma, 3).unwrap();
            let via_search = contains_affine(&sigma, &perm("321")).unwrap().is_none();
            assert_eq!(via_rank, via_search, "window {w:?}");
            let doubled = contains_affine_windowed(&sigma, &perm("321"), 6)
                .unwrap()
                .is_none();
            assert_eq!(via_search, doubled, "window {w:?}");
        });
    }
}
