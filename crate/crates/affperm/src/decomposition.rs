//! The tuple encoding of decreasing-pattern avoiders.
//!
//! A `(n⃗, G⃗, H⃗, Δ⃗)` tuple encodes an affine permutation by sending the
//! `j`-th element of `G_i` to the `(j + Δ_i)`-th element of `H_i`, both
//! read with their periodic extensions. The encoding is onto the avoiders
//! of `(k+1)k...1` and becomes exactly `k!`-to-1 once restricted to the
//! domain `Dom` carved out by the spacing and separation predicates below.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::affine::AffinePermutation;
use crate::error::{Error, Result};
use crate::patterns;

/// A quadruple `(n⃗, G⃗, H⃗, Δ⃗)`: block sizes, two partitions of `[N]` with
/// matching block sizes, and centered offsets with `|Δ_i| <= n_i`,
/// `ΣΔ_i = 0`. Block elements are stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(into = "TupleJson")]
pub struct DecompTuple {
    n: Vec<u64>,
    g: Vec<Vec<i64>>,
    h: Vec<Vec<i64>>,
    delta: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TupleJson {
    n: Vec<u64>,
    #[serde(rename = "G")]
    g: Vec<Vec<i64>>,
    #[serde(rename = "H")]
    h: Vec<Vec<i64>>,
    delta: Vec<i64>,
}

impl From<DecompTuple> for TupleJson {
    fn from(t: DecompTuple) -> Self {
        TupleJson {
            n: t.n,
            g: t.g,
            h: t.h,
            delta: t.delta,
        }
    }
}

impl<'de> Deserialize<'de> for DecompTuple {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = TupleJson::deserialize(de)?;
        DecompTuple::new(raw.n, raw.g, raw.h, raw.delta).map_err(serde::de::Error::custom)
    }
}

fn check_partition(blocks: &[Vec<i64>], sizes: &[u64], total: u64, label: &str) -> Result<()> {
    if blocks.len() != sizes.len() {
        return Err(Error::InvalidTuple(format!(
            "{label} has {} blocks for {} sizes",
            blocks.len(),
            sizes.len()
        )));
    }
    let mut seen = vec![false; total as usize];
    for (i, (block, &size)) in blocks.iter().zip(sizes).enumerate() {
        if block.len() as u64 != size {
            return Err(Error::InvalidTuple(format!(
                "{label}_{} has {} elements, n_{} = {}",
                i + 1,
                block.len(),
                i + 1,
                size
            )));
        }
        for &x in block {
            if x < 1 || x > total as i64 {
                return Err(Error::InvalidTuple(format!(
                    "{label}_{} contains {x}, outside [1, {total}]",
                    i + 1
                )));
            }
            if std::mem::replace(&mut seen[(x - 1) as usize], true) {
                return Err(Error::InvalidTuple(format!(
                    "{label} blocks are not disjoint at {x}"
                )));
            }
        }
    }
    // disjoint blocks of total size `total` inside [1, total] must cover it
    Ok(())
}

impl DecompTuple {
    pub fn new(
        n: Vec<u64>,
        mut g: Vec<Vec<i64>>,
        mut h: Vec<Vec<i64>>,
        delta: Vec<i64>,
    ) -> Result<Self> {
        if n.is_empty() || n.iter().any(|&x| x == 0) {
            return Err(Error::InvalidTuple("block sizes must be positive".into()));
        }
        let total: u64 = n.iter().sum();
        check_partition(&g, &n, total, "G")?;
        check_partition(&h, &n, total, "H")?;
        if delta.len() != n.len() {
            return Err(Error::InvalidTuple("delta length differs from k".into()));
        }
        for (i, (&d, &ni)) in delta.iter().zip(&n).enumerate() {
            if d.unsigned_abs() > ni {
                return Err(Error::InvalidTuple(format!(
                    "|Δ_{}| = {} exceeds n_{} = {ni}",
                    i + 1,
                    d.abs(),
                    i + 1
                )));
            }
        }
        if delta.iter().sum::<i64>() != 0 {
            return Err(Error::InvalidTuple("ΣΔ_i must be 0".into()));
        }
        for b in g.iter_mut().chain(h.iter_mut()) {
            b.sort_unstable();
        }
        Ok(DecompTuple { n, g, h, delta })
    }

    pub fn k(&self) -> usize {
        self.n.len()
    }

    pub fn total(&self) -> u64 {
        self.n.iter().sum()
    }

    pub fn sizes(&self) -> &[u64] {
        &self.n
    }

    pub fn g_blocks(&self) -> &[Vec<i64>] {
        &self.g
    }

    pub fn h_blocks(&self) -> &[Vec<i64>] {
        &self.h
    }

    pub fn deltas(&self) -> &[i64] {
        &self.delta
    }

    /// Applies a subscript permutation (`perm[i]` is the old index of the
    /// new block `i`). The encoded permutation is unchanged.
    pub fn relabel(&self, perm: &[usize]) -> DecompTuple {
        DecompTuple {
            n: perm.iter().map(|&i| self.n[i]).collect(),
            g: perm.iter().map(|&i| self.g[i].clone()).collect(),
            h: perm.iter().map(|&i| self.h[i].clone()).collect(),
            delta: perm.iter().map(|&i| self.delta[i]).collect(),
        }
    }

    /// Blocks reordered by ascending minimum of `G_i`: the representative
    /// of the `k!` relabelings that `psi_inverse` produces.
    pub fn canonical(&self) -> DecompTuple {
        let mut order: Vec<usize> = (0..self.k()).collect();
        order.sort_by_key(|&i| self.g[i][0]);
        self.relabel(&order)
    }
}

/// Periodic extension `h_{i, j + t·n_i} = h_{i,j} + t·N`, `j` one-based.
fn extended(block: &[i64], j: i64, total: i64) -> i64 {
    let n = block.len() as i64;
    let t = (j - 1).div_euclid(n);
    let r = (j - 1).rem_euclid(n);
    block[r as usize] + t * total
}

/// Encodes the tuple: `σ(g_{i,j}) = h_{i, j + Δ_i}`. The result is always
/// a valid affine permutation avoiding `(k+1)k...1`, but need not be
/// bounded.
pub fn psi(t: &DecompTuple) -> AffinePermutation {
    let total = t.total() as i64;
    let mut window = vec![0i64; total as usize];
    for i in 0..t.k() {
        for (j0, &g) in t.g[i].iter().enumerate() {
            let j = j0 as i64 + 1;
            window[(g - 1) as usize] = extended(&t.h[i], j + t.delta[i], total);
        }
    }
    let sigma = AffinePermutation::validate(window)
        .expect("tuple encoding preserves residues and the centering sum");
    debug_assert!(
        !sigma.is_bounded() || patterns::avoids_decreasing(&sigma, t.k() + 1).unwrap(),
        "encoded permutation must avoid the decreasing pattern"
    );
    sigma
}

/// Decodes a bounded avoider into the canonical tuple: blocks from the
/// rank decomposition, `H_i` as window representatives of the image
/// values, `Δ_i` matched from the first element. Satisfies
/// `psi(psi_inverse(σ, k)) = σ`.
pub fn psi_inverse(sigma: &AffinePermutation, k: usize) -> Result<DecompTuple> {
    let total = sigma.size() as i64;
    let partition = patterns::decompose_increasing(sigma, k)?;
    let mut n = Vec::with_capacity(k);
    let mut h = Vec::with_capacity(k);
    let mut delta = Vec::with_capacity(k);
    for block in &partition.blocks {
        let ni = block.len() as i64;
        let mut hi: Vec<i64> = block
            .iter()
            .map(|&g| (sigma.evaluate(g) - 1).rem_euclid(total) + 1)
            .collect();
        hi.sort_unstable();
        // σ(g_{i,1}) = h_{i, 1 + Δ_i}: locate the representative and the
        // number of full periods to solve for Δ_i
        let v = sigma.evaluate(block[0]);
        let rep = (v - 1).rem_euclid(total) + 1;
        let pos = hi.iter().position(|&x| x == rep).unwrap() as i64 + 1;
        let t = (v - rep) / total;
        delta.push(pos + t * ni - 1);
        n.push(ni as u64);
        h.push(hi);
    }
    DecompTuple::new(n, partition.blocks, h, delta)
}

/// Spacing predicate: the `ℓ`-th smallest of `w` elements must lie within
/// `A` of `ℓ(N+1)/(w+1)`, the mean of the `ℓ`-th of `w` uniform order
/// statistics on `[0, N+1]`. (The mean targets keep the predicate
/// satisfiable for every block size; an exactly uniformly spaced set stays
/// well inside for any `A >= 1`.)
pub fn in_seq_star_a(s: &[i64], total: u64, a: f64) -> bool {
    let w = s.len();
    let mut sorted: Vec<i64> = s.to_vec();
    sorted.sort_unstable();
    sorted.iter().enumerate().all(|(idx, &x)| {
        let target = (idx as f64 + 1.0) * (total as f64 + 1.0) / (w as f64 + 1.0);
        (x as f64 - target).abs() < a
    })
}

/// Parameters of the restricted domain: `0 < α < 1/k`, `A, B > 0`.
#[derive(Debug, Clone, Copy)]
pub struct DomParams {
    pub k: usize,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
}

impl DomParams {
    pub fn new(k: usize, alpha: f64, a: f64, b: f64) -> Result<Self> {
        if k == 0 || alpha <= 0.0 || alpha >= 1.0 / k as f64 || a <= 0.0 || b <= 0.0 {
            return Err(Error::BadInput(format!(
                "domain parameters out of range: k={k} alpha={alpha} A={a} B={b}"
            )));
        }
        Ok(DomParams { k, alpha, a, b })
    }

    /// Minimum allowed gap between the slopes' intercept terms
    /// `Δ_i N / n_i`: `4(2A + 2k/(1 - kα))`.
    pub fn separation(&self) -> f64 {
        let kf = self.k as f64;
        4.0 * (2.0 * self.a + 2.0 * kf / (1.0 - kf * self.alpha))
    }

    /// Half-width of the strip each block's plot points must stay in:
    /// `2(A + k/(1 - kα))`.
    pub fn strip_half_width(&self) -> f64 {
        let kf = self.k as f64;
        2.0 * (self.a + kf / (1.0 - kf * self.alpha))
    }
}

fn sizes_balanced(n: &[u64], total: u64, k: usize, alpha: f64) -> bool {
    n.len() == k
        && n.iter()
            .all(|&ni| (ni as f64 - total as f64 / k as f64).abs() <= alpha * total as f64)
}

fn deltas_separated(n: &[u64], delta: &[i64], total: u64, p: &DomParams) -> bool {
    let sep = p.separation();
    for i in 0..delta.len() {
        for j in (i + 1)..delta.len() {
            let si = delta[i] as f64 * total as f64 / n[i] as f64;
            let sj = delta[j] as f64 * total as f64 / n[j] as f64;
            if (si - sj).abs() <= sep {
                return false;
            }
        }
    }
    true
}

/// Membership in `Dom`: balanced block sizes, `|Δ_i| < n_i - B`, every
/// block of both partitions spaced, and the slopes pairwise separated.
pub fn in_dom(t: &DecompTuple, p: &DomParams) -> bool {
    let total = t.total();
    sizes_balanced(t.sizes(), total, p.k, p.alpha)
        && t.deltas()
            .iter()
            .zip(t.sizes())
            .all(|(&d, &ni)| (d.abs() as f64) < ni as f64 - p.b)
        && t.g_blocks().iter().all(|b| in_seq_star_a(b, total, p.a))
        && t.h_blocks().iter().all(|b| in_seq_star_a(b, total, p.a))
        && deltas_separated(t.sizes(), t.deltas(), total, p)
}

/// All offset vectors compatible with `Dom` for fixed block sizes:
/// `ΣΔ_i = 0`, `|Δ_i| < n_i - B`, pairwise separation. Sorted
/// lexicographically.
pub fn enumerate_w(n: &[u64], p: &DomParams) -> Result<Vec<Vec<i64>>> {
    let total: u64 = n.iter().sum();
    let space: u64 = n[..n.len().saturating_sub(1)]
        .iter()
        .map(|&ni| 2 * ni + 1)
        .product();
    const CAP: u64 = 100_000_000;
    if space > CAP {
        return Err(Error::CapExceeded {
            size: space as usize,
            cap: CAP as usize,
        });
    }
    let mut out = Vec::new();
    let mut delta = vec![0i64; n.len()];
    rec_w(n, p, total, 0, 0, &mut delta, &mut out);
    out.sort();
    Ok(out)
}

fn rec_w(
    n: &[u64],
    p: &DomParams,
    total: u64,
    idx: usize,
    sum: i64,
    delta: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    let bound = |ni: u64| -> i64 {
        // largest integer strictly below n_i - B
        let x = (ni as f64 - p.b).ceil() as i64 - 1;
        x.min(ni as i64)
    };
    if idx + 1 == n.len() {
        let d = -sum;
        delta[idx] = d;
        let lim = bound(n[idx]);
        if d.abs() <= lim && deltas_separated(n, delta, total, p) {
            out.push(delta.clone());
        }
        return;
    }
    let lim = bound(n[idx]);
    for d in -lim..=lim {
        delta[idx] = d;
        rec_w(n, p, total, idx + 1, sum + d, delta, out);
    }
}

/// Draws a partition of `[N]` whose every block passes the spacing
/// predicate, by a randomized backtracking scan over positions. Returns
/// `None` if the attempt dead-ends (callers retry).
fn sample_spaced_partition<R: Rng>(
    n: &[u64],
    total: u64,
    a: f64,
    rng: &mut R,
) -> Option<Vec<Vec<i64>>> {
    let k = n.len();
    let mut blocks: Vec<Vec<i64>> = vec![Vec::new(); k];
    fn target(ell: u64, ni: u64, total: u64) -> f64 {
        ell as f64 * (total as f64 + 1.0) / (ni as f64 + 1.0)
    }
    fn go<R: Rng>(
        x: i64,
        n: &[u64],
        total: u64,
        a: f64,
        blocks: &mut Vec<Vec<i64>>,
        rng: &mut R,
    ) -> bool {
        if x > total as i64 {
            return blocks.iter().zip(n).all(|(b, &ni)| b.len() as u64 == ni);
        }
        // a block whose next slot's window has already passed can never
        // be completed
        for (i, b) in blocks.iter().enumerate() {
            if (b.len() as u64) < n[i] {
                let t = target(b.len() as u64 + 1, n[i], total);
                if t + a <= x as f64 {
                    return false;
                }
            }
        }
        let mut candidates: Vec<usize> = (0..n.len())
            .filter(|&i| {
                (blocks[i].len() as u64) < n[i]
                    && (x as f64 - target(blocks[i].len() as u64 + 1, n[i], total)).abs() < a
            })
            .collect();
        candidates.shuffle(rng);
        for i in candidates {
            blocks[i].push(x);
            if go(x + 1, n, total, a, blocks, rng) {
                return true;
            }
            blocks[i].pop();
        }
        false
    }
    if go(1, n, total, a, &mut blocks, rng) {
        Some(blocks)
    } else {
        None
    }
}

/// Draws a uniform-ish random member of `Dom` for size `N`; `None` when
/// repeated attempts find no admissible tuple (the domain may be empty).
pub fn sample_dom_tuple<R: Rng>(p: &DomParams, total: u64, rng: &mut R) -> Option<DecompTuple> {
    let k = p.k;
    let mean = total as f64 / k as f64;
    let lo = (mean - p.alpha * total as f64).ceil() as i64;
    let hi = (mean + p.alpha * total as f64).floor() as i64;
    for _ in 0..200 {
        let mut n: Vec<u64> = Vec::with_capacity(k);
        let mut left = total as i64;
        for _ in 0..k - 1 {
            let v = rng.gen_range(lo..=hi);
            n.push(v as u64);
            left -= v;
        }
        if left < lo.max(1) || left > hi {
            continue;
        }
        n.push(left as u64);
        if !sizes_balanced(&n, total, k, p.alpha) {
            continue;
        }
        let ws = match enumerate_w(&n, p) {
            Ok(ws) => ws,
            Err(_) => continue,
        };
        if ws.is_empty() {
            continue;
        }
        let delta = ws[rng.gen_range(0..ws.len())].clone();
        let g = match sample_spaced_partition(&n, total, p.a, rng) {
            Some(g) => g,
            None => continue,
        };
        let h = match sample_spaced_partition(&n, total, p.a, rng) {
            Some(h) => h,
            None => continue,
        };
        let t = DecompTuple::new(n, g, h, delta).expect("sampler output satisfies the invariants");
        if in_dom(&t, p) {
            return Some(t);
        }
    }
    None
}

/// Confirms that every plot point of the encoded permutation stays within
/// the strip of half-width `strip_half_width` around its block's line.
pub fn strip_bound_holds(t: &DecompTuple, p: &DomParams) -> bool {
    let sigma = psi(t);
    let total = t.total() as f64;
    let width = p.strip_half_width();
    t.g_blocks().iter().enumerate().all(|(i, block)| {
        let slope_shift = t.deltas()[i] as f64 * total / t.sizes()[i] as f64;
        block
            .iter()
            .all(|&g| (sigma.evaluate(g) as f64 - (g as f64 + slope_shift)).abs() < width)
    })
}

/// Outcome of the sampled `k!`-to-1 verification.
#[derive(Debug, Clone)]
pub struct KFactorialReport {
    pub samples: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

fn all_index_perms(k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for rest in all_index_perms(k - 1) {
        for pos in 0..k {
            let mut p = rest.clone();
            p.insert(pos, k - 1);
            out.push(p);
        }
    }
    out
}

/// Samples `Dom` members and checks on each: all `k!` relabelings encode
/// to the same permutation, the decoder returns the canonical relabeling,
/// and distinct sampled block structures never collide on an image.
pub fn verify_k_factorial<R: Rng>(
    p: &DomParams,
    total: u64,
    sample_size: usize,
    rng: &mut R,
) -> Result<KFactorialReport> {
    let perms = all_index_perms(p.k);
    let mut images: std::collections::HashMap<Vec<i64>, DecompTuple> =
        std::collections::HashMap::new();
    for s in 0..sample_size {
        let t = sample_dom_tuple(p, total, rng).ok_or(Error::EmptyDomain {
            size: total as usize,
            alpha: p.alpha,
            a: p.a,
            b: p.b,
        })?;
        let sigma = psi(&t);
        for perm in &perms {
            if psi(&t.relabel(perm)) != sigma {
                return Ok(KFactorialReport {
                    samples: s + 1,
                    passed: false,
                    counterexample: Some(format!("relabeling {perm:?} changed the image of {t:?}")),
                });
            }
        }
        if !sigma.is_bounded() {
            return Ok(KFactorialReport {
                samples: s + 1,
                passed: false,
                counterexample: Some(format!("image of {t:?} is unbounded")),
            });
        }
        let decoded = psi_inverse(&sigma, p.k)?;
        if decoded != t.canonical() {
            return Ok(KFactorialReport {
                samples: s + 1,
                passed: false,
                counterexample: Some(format!("decoder returned {decoded:?} for {t:?}")),
            });
        }
        if let Some(prev) = images.insert(sigma.window().to_vec(), t.canonical()) {
            if prev != t.canonical() {
                return Ok(KFactorialReport {
                    samples: s + 1,
                    passed: false,
                    counterexample: Some(format!(
                        "tuples {prev:?} and {:?} share an image",
                        t.canonical()
                    )),
                });
            }
        }
    }
    Ok(KFactorialReport {
        samples: sample_size,
        passed: true,
        counterexample: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fig6_tuple() -> DecompTuple {
        DecompTuple::new(
            vec![4, 6],
            vec![vec![1, 5, 6, 9], vec![2, 3, 4, 7, 8, 10]],
            vec![vec![2, 3, 6, 10], vec![1, 4, 5, 7, 8, 9]],
            vec![2, -2],
        )
        .unwrap()
    }

    #[test]
    fn psi_fig6_window() {
        let sigma = psi(&fig6_tuple());
        assert_eq!(sigma.window(), &[6, -2, -1, 1, 10, 12, 4, 5, 13, 7]);
        assert!(sigma.is_bounded());
    }

    #[test]
    fn psi_identity_pairing_is_infinite_sum() {
        // G = H, Δ = 0: the image is the periodic extension of the
        // pairing's one-line permutation
        let t = DecompTuple::new(
            vec![2, 2],
            vec![vec![1, 3], vec![2, 4]],
            vec![vec![1, 3], vec![2, 4]],
            vec![0, 0],
        )
        .unwrap();
        assert_eq!(psi(&t).window(), &[1, 2, 3, 4]);
    }

    #[test]
    fn psi_can_produce_unbounded_output() {
        let t = DecompTuple::new(
            vec![1, 2],
            vec![vec![1], vec![2, 3]],
            vec![vec![1], vec![2, 3]],
            vec![1, -1],
        )
        .unwrap();
        let sigma = psi(&t);
        assert_eq!(sigma.window(), &[4, 0, 2]);
        assert!(!sigma.is_bounded());
    }

    #[test]
    fn psi_inverse_fig6_round_trip() {
        let t = fig6_tuple();
        let sigma = psi(&t);
        let decoded = psi_inverse(&sigma, 2).unwrap();
        assert_eq!(decoded, t);
        assert_eq!(psi(&decoded), sigma);
    }

    #[test]
    fn psi_inverse_identity_k1() {
        let id = AffinePermutation::validate((1..=5).collect()).unwrap();
        let t = psi_inverse(&id, 1).unwrap();
        assert_eq!(t.sizes(), &[5]);
        assert_eq!(t.g_blocks(), &[vec![1, 2, 3, 4, 5]]);
        assert_eq!(t.g_blocks(), t.h_blocks());
        assert_eq!(t.deltas(), &[0]);
    }

    #[test]
    fn relabeling_never_changes_the_image() {
        let t = fig6_tuple();
        let swapped = t.relabel(&[1, 0]);
        assert_eq!(psi(&swapped), psi(&t));
        assert_eq!(swapped.canonical(), t);
    }

    #[test]
    fn tuple_validation_rejects_bad_input() {
        assert!(DecompTuple::new(
            vec![2, 1],
            vec![vec![1, 2], vec![3]],
            vec![vec![1, 2], vec![3]],
            vec![1, 0],
        )
        .is_err()); // ΣΔ != 0
        assert!(DecompTuple::new(
            vec![2, 1],
            vec![vec![1, 2], vec![2]],
            vec![vec![1, 2], vec![3]],
            vec![0, 0],
        )
        .is_err()); // overlapping blocks
        assert!(DecompTuple::new(
            vec![1, 1],
            vec![vec![1], vec![2]],
            vec![vec![1], vec![2]],
            vec![2, -2],
        )
        .is_err()); // |Δ| > n_i
    }

    #[test]
    fn seq_star_examples() {
        assert!(in_seq_star_a(&[5, 10, 15], 20, 1.0));
        assert!(!in_seq_star_a(&[1, 2, 3], 20, 1.0));
        // monotone in A
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let w = rng.gen_range(1..=6);
            let mut s: Vec<i64> = Vec::new();
            while s.len() < w {
                let x = rng.gen_range(1..=30);
                if !s.contains(&x) {
                    s.push(x);
                }
            }
            let a = rng.gen_range(0.5..3.0);
            if in_seq_star_a(&s, 30, a) {
                assert!(in_seq_star_a(&s, 30, a + 1.0));
            }
        }
    }

    #[test]
    fn dom_membership_example() {
        let p = DomParams::new(2, 0.1, 1.0, 2.0).unwrap();
        assert!((p.separation() - 28.0).abs() < 1e-12);
        let evens: Vec<i64> = (1..=20).map(|i| 2 * i).collect();
        let odds: Vec<i64> = (1..=20).map(|i| 2 * i - 1).collect();
        let t = DecompTuple::new(
            vec![20, 20],
            vec![evens.clone(), odds.clone()],
            vec![evens, odds],
            vec![10, -10],
        )
        .unwrap();
        assert!(in_dom(&t, &p));
        let bad = DecompTuple::new(
            t.sizes().to_vec(),
            t.g_blocks().to_vec(),
            t.h_blocks().to_vec(),
            vec![20, -20],
        )
        .unwrap();
        assert!(!in_dom(&bad, &p)); // |Δ_i| = n_i violates the margin
    }

    #[test]
    fn enumerate_w_example() {
        let p = DomParams::new(2, 0.1, 1.0, 2.0).unwrap();
        let ws = enumerate_w(&[20, 20], &p).unwrap();
        assert_eq!(ws.len(), 20);
        for d in &ws {
            assert_eq!(d[0] + d[1], 0);
            assert!(d[0].abs() >= 8 && d[0].abs() <= 17, "{d:?}");
        }
        let tight = DomParams::new(2, 0.1, 1.0, 25.0).unwrap();
        assert!(enumerate_w(&[20, 20], &tight).unwrap().is_empty());
    }

    #[test]
    fn sampled_dom_tuples_are_members() {
        let p = DomParams::new(2, 0.1, 1.0, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let t = sample_dom_tuple(&p, 40, &mut rng).expect("domain is non-empty at N=40");
            assert!(in_dom(&t, &p));
            assert!(psi(&t).is_bounded());
            assert!(strip_bound_holds(&t, &p));
        }
    }

    #[test]
    fn k_factorial_sampled_check() {
        let p = DomParams::new(2, 0.1, 1.0, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let report = verify_k_factorial(&p, 40, 25, &mut rng).unwrap();
        assert!(report.passed, "{:?}", report.counterexample);
    }

    #[test]
    fn tuple_json_round_trip() {
        let t = fig6_tuple();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"G\"") && s.contains("\"delta\""));
        let back: DecompTuple = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"n":[1,1],"G":[[1],[2]],"H":[[1],[2]],"delta":[1,0]}"#;
        assert!(serde_json::from_str::<DecompTuple>(bad).is_err());
    }
}
