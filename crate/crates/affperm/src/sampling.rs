//! Uniform sampling of pattern-avoiding bounded affine permutations.
//!
//! Small sizes are sampled exactly from the cached enumeration; beyond
//! the brute-force cap a Metropolis chain runs on the avoider class. Both
//! chain moves (value swap, paired ±N shift) conserve the residue multiset
//! and the window sum, and the proposal is symmetric, so the stationary
//! distribution is uniform on the reachable class; reachability itself is
//! certified by breadth-first search at enumerable sizes.

use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma_ur;

use crate::affine::{AffinePermutation, OrdinaryPermutation};
use crate::counting;
use crate::error::{Error, Result};
use crate::patterns;

/// Metropolis chain parameters. `swap_prob` is the probability of
/// proposing a value swap; the remainder splits evenly between the two
/// shift moves.
#[derive(Debug, Clone, Copy)]
pub struct McmcConfig {
    pub steps: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub seed: u64,
    pub swap_prob: f64,
}

impl McmcConfig {
    /// Burn-in `50N²` and thinning `N²`: enough for the chi-square gate
    /// at enumerable sizes; tunable, not certified beyond it.
    pub fn defaults(n: usize, steps: u64, seed: u64) -> Self {
        let n2 = (n * n) as u64;
        McmcConfig {
            steps,
            burn_in: 50 * n2,
            thin: n2.max(1),
            seed,
            swap_prob: 0.8,
        }
    }
}

/// `Some(m)` iff `tau` is the decreasing pattern `m (m-1) ... 1`.
fn decreasing_length(tau: &OrdinaryPermutation) -> Option<usize> {
    let m = tau.len();
    if m >= 2 && tau.values().iter().enumerate().all(|(i, &v)| v == m - i) {
        Some(m)
    } else {
        None
    }
}

/// Rank clamped at `m`, computed directly on a bounded window with a
/// caller-provided memo buffer (0 = unknown). Clamping caps both the
/// stored values and the scan: the chain only needs to know whether any
/// rank reaches `m`, and a value of `m` means "at least m".
fn capped_rank(window: &[i64], res: usize, m: usize, memo: &mut [u32]) -> usize {
    if memo[res] != 0 {
        return memo[res] as usize;
    }
    let n = window.len() as i64;
    let a = res as i64 + 1;    // representative of the class in [1, N]
    let va = window[res];
    let mut best = 1usize;
    for b in (a + 1)..(a + 2 * n) {
        if best >= m {
            break;
        }
        let rb = ((b - 1) % n) as usize;
        let vb = window[rb] + (b - 1 - (b - 1) % n);
        if vb < va {
            best = best.max(1 + capped_rank(window, rb, m, memo));
        }
    }
    let best = best.min(m);
    memo[res] = best as u32;
    best
}

/// Allocation-free equivalent of the rank criterion for decreasing
/// patterns; cross-checked against the public path in the tests.
fn window_avoids_decreasing(window: &[i64], m: usize, memo: &mut [u32]) -> bool {
    memo.fill(0);
    (0..window.len()).all(|r| capped_rank(window, r, m, memo) < m)
}

fn avoids(sigma: &AffinePermutation, tau: &OrdinaryPermutation) -> bool {
    // decreasing patterns get the rank shortcut; this equivalence is
    // cross-checked against the windowed search in the tests
    if let Some(m) = decreasing_length(tau) {
        patterns::avoids_decreasing(sigma, m).expect("caller passes bounded input")
    } else {
        patterns::contains_affine(sigma, tau)
            .expect("caller passes bounded input")
            .is_none()
    }
}

type Universe = Vec<AffinePermutation>;

fn cache() -> &'static Mutex<HashMap<(usize, Vec<usize>), &'static Universe>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, Vec<usize>), &'static Universe>>> =
        OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All avoiders of `tau` at size `n`, windows in lexicographic order.
/// Cached per `(n, tau)` for the exact sampler.
pub fn enumerate_avoiders(n: usize, tau: &OrdinaryPermutation) -> Result<&'static Universe> {
    let cap = crate::brute_cap();
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    let key = (n, tau.values().to_vec());
    let mut guard = cache().lock().unwrap();
    if let Some(&u) = guard.get(&key) {
        return Ok(u);
    }
    let mut windows: Vec<Vec<i64>> = Vec::new();
    counting::for_each_bounded_window(n, &mut |w| {
        let sigma = AffinePermutation::validate(w.to_vec()).unwrap();
        if avoids(&sigma, tau) {
            windows.push(w.to_vec());
        }
    });
    windows.sort();
    let universe: Universe = windows
        .into_iter()
        .map(|w| AffinePermutation::validate(w).unwrap())
        .collect();
    let leaked: &'static Universe = Box::leak(Box::new(universe));
    guard.insert(key, leaked);
    Ok(leaked)
}

/// Uniform draw over the enumerated avoiders.
pub fn sample_exact<R: Rng>(
    n: usize,
    tau: &OrdinaryPermutation,
    rng: &mut R,
) -> Result<AffinePermutation> {
    let universe = enumerate_avoiders(n, tau)?;
    Ok(universe[rng.gen_range(0..universe.len())].clone())
}

/// The three proposal kinds. All preserve the residue multiset and the
/// window sum; `Swap` and `SwapShift` are involutions, and `Shift` at
/// ordered `(i, j)` inverts as `(j, i)`, so the proposal distribution is
/// symmetric and the stationary distribution on the reachable class is
/// uniform. `SwapShift` is needed for connectivity: at size 5 the
/// 321-avoiders [-3,-2,5,6,9] and [-3,0,1,8,9] have no in-class
/// neighbor under swaps and plain shifts alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    /// Exchange `σ(i)` and `σ(j)`.
    Swap,
    /// `σ(i) += N`, `σ(j) -= N`.
    Shift,
    /// `(σ(i), σ(j)) -> (σ(j) + N, σ(i) - N)`.
    SwapShift,
}

fn apply(window: &mut [i64], i: usize, j: usize, kind: Move) {
    let n = window.len() as i64;
    match kind {
        Move::Swap => window.swap(i, j),
        Move::Shift => {
            window[i] += n;
            window[j] -= n;
        }
        Move::SwapShift => {
            let (a, b) = (window[i], window[j]);
            window[i] = b + n;
            window[j] = a - n;
        }
    }
}

fn propose<R: Rng>(window: &mut [i64], swap_prob: f64, rng: &mut R) -> (usize, usize, Move) {
    let n = window.len();
    let kind = if rng.gen_bool(swap_prob) {
        Move::Swap
    } else if rng.gen_bool(0.5) {
        Move::Shift
    } else {
        Move::SwapShift
    };
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    apply(window, i, j, kind);
    (i, j, kind)
}

fn undo(window: &mut [i64], i: usize, j: usize, kind: Move) {
    match kind {
        Move::Swap | Move::SwapShift => apply(window, i, j, kind),
        Move::Shift => apply(window, j, i, Move::Shift),
    }
}

/// Metropolis chain on the avoider class, started at the identity.
/// Emits a state every `thin` accepted-or-rejected steps after `burn_in`.
/// One Metropolis step in place; returns whether the proposal was
/// accepted. The previous state is bounded and in the class, so only the
/// two changed entries need a boundedness check, and decreasing patterns
/// use the allocation-free capped-rank test.
fn chain_step<R: Rng>(
    window: &mut Vec<i64>,
    memo: &mut [u32],
    decreasing_m: Option<usize>,
    tau: &OrdinaryPermutation,
    swap_prob: f64,
    rng: &mut R,
) -> bool {
    let n = window.len() as i64;
    let (i, j, kind) = propose(window, swap_prob, rng);
    let bounded = (window[i] - (i as i64 + 1)).abs() < n
        && (window[j] - (j as i64 + 1)).abs() < n;
    let accept = bounded
        && match decreasing_m {
            Some(m) => window_avoids_decreasing(window, m, memo),
            None => {
                let candidate = AffinePermutation::validate(window.clone())
                    .expect("all moves preserve residues and the window sum");
                avoids(&candidate, tau)
            }
        };
    if !accept {
        undo(window, i, j, kind);
    }
    accept
}

pub fn mcmc_sample(
    n: usize,
    tau: &OrdinaryPermutation,
    cfg: &McmcConfig,
) -> Vec<AffinePermutation> {
    let identity: Vec<i64> = (1..=n as i64).collect();
    if n == 1 {
        let count = if cfg.thin == 0 { 0 } else { cfg.steps / cfg.thin } as usize;
        return vec![AffinePermutation::validate(identity).unwrap(); count];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut window = identity;
    let mut memo = vec![0u32; n];
    let decreasing_m = decreasing_length(tau);
    let mut out = Vec::new();
    let total = cfg.burn_in + cfg.steps;
    for step in 0..total {
        chain_step(&mut window, &mut memo, decreasing_m, tau, cfg.swap_prob, &mut rng);
        if step >= cfg.burn_in && (step - cfg.burn_in + 1) % cfg.thin == 0 {
            let state = AffinePermutation::validate(window.clone()).unwrap();
            debug_assert!(state.is_bounded() && avoids(&state, tau));
            out.push(state);
        }
    }
    out
}

/// `count` states from `count` independent chains: chain `c` is seeded
/// `seed ^ c`, runs `burn_in` steps from the identity, and emits its last
/// state. No autocorrelation between draws; chains run in parallel under
/// the `parallel` feature with identical output either way.
pub fn mcmc_sample_independent(
    n: usize,
    tau: &OrdinaryPermutation,
    cfg: &McmcConfig,
    count: usize,
) -> Vec<AffinePermutation> {
    let identity = AffinePermutation::validate((1..=n as i64).collect()).unwrap();
    let starts = vec![identity; count];
    mcmc_sample_independent_from(tau, cfg, &starts)
}

/// Like [`mcmc_sample_independent`] but with caller-provided start
/// states, one chain per start (e.g. overdispersed starts drawn from the
/// tuple encoding). Every start must already be bounded and avoid `tau`.
pub fn mcmc_sample_independent_from(
    tau: &OrdinaryPermutation,
    cfg: &McmcConfig,
    starts: &[AffinePermutation],
) -> Vec<AffinePermutation> {
    let decreasing_m = decreasing_length(tau);
    for s in starts {
        assert!(s.is_bounded() && avoids(s, tau), "start state outside the class");
    }
    let n = starts.first().map_or(1, |s| s.size());
    if n == 1 {
        return starts.to_vec();
    }
    let one_chain = |c: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ c as u64);
        let mut window = starts[c].window().to_vec();
        let mut memo = vec![0u32; n];
        for _ in 0..cfg.burn_in {
            chain_step(&mut window, &mut memo, decreasing_m, tau, cfg.swap_prob, &mut rng);
        }
        let state = AffinePermutation::validate(window).unwrap();
        debug_assert!(state.is_bounded() && avoids(&state, tau));
        state
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..starts.len()).into_par_iter().map(one_chain).collect()
    }
    #[cfg(not(feature = "parallel"))]
    (0..starts.len()).map(one_chain).collect()
}

/// Chi-square goodness of fit against the uniform distribution on
/// `universe`.
#[derive(Debug, Clone, Copy)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

pub fn chi_square_uniformity(
    samples: &[AffinePermutation],
    universe: &[AffinePermutation],
) -> Result<ChiSquare> {
    assert!(!universe.is_empty());
    let index: HashMap<&[i64], usize> = universe
        .iter()
        .enumerate()
        .map(|(i, p)| (p.window(), i))
        .collect();
    let mut counts = vec![0u64; universe.len()];
    for (si, s) in samples.iter().enumerate() {
        match index.get(s.window()) {
            Some(&i) => counts[i] += 1,
            None => return Err(Error::SampleOutsideUniverse { index: si }),
        }
    }
    let expected = samples.len() as f64 / universe.len() as f64;
    let statistic: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dof = universe.len() - 1;
    let p_value = if dof == 0 {
        1.0
    } else if statistic == 0.0 {
        1.0
    } else {
        gamma_ur(dof as f64 / 2.0, statistic / 2.0)
    };
    Ok(ChiSquare {
        statistic,
        dof,
        p_value,
    })
}

/// Everything reachable from the identity through accepted chain moves;
/// equality with `enumerate_avoiders` certifies the move set at small
/// sizes.
pub fn bfs_reachable(n: usize, tau: &OrdinaryPermutation) -> Vec<AffinePermutation> {
    let identity: Vec<i64> = (1..=n as i64).collect();
    let mut seen = std::collections::HashSet::new();
    seen.insert(identity.clone());
    let mut queue = std::collections::VecDeque::from([identity]);
    while let Some(window) = queue.pop_front() {
        let mut neighbors: Vec<Vec<i64>> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if i < j {
                    let mut w = window.clone();
                    apply(&mut w, i, j, Move::Swap);
                    neighbors.push(w);
                }
                let mut w = window.clone();
                apply(&mut w, i, j, Move::Shift);
                neighbors.push(w);
                let mut w = window.clone();
                apply(&mut w, i, j, Move::SwapShift);
                neighbors.push(w);
            }
        }
        for w in neighbors {
            if seen.contains(&w) {
                continue;
            }
            let sigma = AffinePermutation::validate(w.clone()).unwrap();
            if sigma.is_bounded() && avoids(&sigma, tau) {
                seen.insert(w.clone());
                queue.push_back(w);
            }
        }
    }
    let mut windows: Vec<Vec<i64>> = seen.into_iter().collect();
    windows.sort();
    windows
        .into_iter()
        .map(|w| AffinePermutation::validate(w).unwrap())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str) -> OrdinaryPermutation {
        OrdinaryPermutation::parse(s).unwrap()
    }

    #[test]
    fn enumerate_small_universe() {
        let u = enumerate_avoiders(2, &perm("321")).unwrap();
        let windows: Vec<&[i64]> = u.iter().map(|p| p.window()).collect();
        assert_eq!(windows, vec![&[0, 3][..], &[1, 2], &[2, 1]]);
        let one = enumerate_avoiders(1, &perm("4321")).unwrap();
        assert_eq!(one.len(), 1);
        let count = counting::brute_avoiders(3, &perm("321")).unwrap();
        assert_eq!(
            enumerate_avoiders(3, &perm("321")).unwrap().len().to_string(),
            count.to_string()
        );
    }

    #[test]
    fn exact_sampler_is_uniform_and_deterministic() {
        let tau = perm("321");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws: Vec<AffinePermutation> =
            (0..30_000).map(|_| sample_exact(2, &tau, &mut rng).unwrap()).collect();
        let u = enumerate_avoiders(2, &tau).unwrap();
        let cs = chi_square_uniformity(&draws, u).unwrap();
        assert!(cs.p_value > 0.01, "p = {}", cs.p_value);
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            assert_eq!(
                sample_exact(3, &tau, &mut r1).unwrap(),
                sample_exact(3, &tau, &mut r2).unwrap()
            );
        }
    }

    #[test]
    fn mcmc_states_stay_in_class() {
        let tau = perm("321");
        let cfg = McmcConfig::defaults(3, 2_000, 7);
        let samples = mcmc_sample(3, &tau, &cfg);
        assert!(!samples.is_empty());
        for s in &samples {
            assert!(s.is_bounded());
            assert!(patterns::avoids_decreasing(s, 3).unwrap());
        }
    }

    #[test]
    fn capped_rank_matches_public_path() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 2..=6usize {
            let mut memo = vec![0u32; n];
            counting::for_each_bounded_window(n.min(4), &mut |w| {
                let sigma = AffinePermutation::validate(w.to_vec()).unwrap();
                for m in 2..=4usize {
                    assert_eq!(
                        window_avoids_decreasing(w, m, &mut vec![0u32; w.len()]),
                        patterns::avoids_decreasing(&sigma, m).unwrap()
                    );
                }
            });
            // longer random walks through the class at full size
            let tau = perm("321");
            let mut window: Vec<i64> = (1..=n as i64).collect();
            for _ in 0..2_000 {
                chain_step(&mut window, &mut memo, Some(3), &tau, 0.8, &mut rng);
                let sigma = AffinePermutation::validate(window.clone()).unwrap();
                assert!(sigma.is_bounded());
                assert!(patterns::avoids_decreasing(&sigma, 3).unwrap());
                assert!(window_avoids_decreasing(&window, 3, &mut memo));
            }
        }
    }

    #[test]
    fn independent_chains_are_deterministic_and_in_class() {
        let tau = perm("4321");
        let cfg = McmcConfig {
            steps: 0,
            burn_in: 500,
            thin: 1,
            seed: 11,
            swap_prob: 0.8,
        };
        let a = mcmc_sample_independent(5, &tau, &cfg, 8);
        let b = mcmc_sample_independent(5, &tau, &cfg, 8);
        assert_eq!(a, b);
        assert!(a.iter().any(|s| s.window() != [1, 2, 3, 4, 5]));
        for s in &a {
            assert!(s.is_bounded());
            assert!(patterns::avoids_decreasing(s, 4).unwrap());
        }
    }

    #[test]
    fn bfs_matches_universe() {
        for n in 2..=4usize {
            let tau = perm("321");
            let reached = bfs_reachable(n, &tau);
            let universe = enumerate_avoiders(n, &tau).unwrap();
            assert_eq!(&reached, universe, "N = {n}");
        }
    }

    #[test]
    fn chi_square_edge_cases() {
        let u = enumerate_avoiders(2, &perm("321")).unwrap();
        // perfectly balanced counts
        let mut samples = Vec::new();
        for p in u.iter() {
            for _ in 0..10 {
                samples.push(p.clone());
            }
        }
        let cs = chi_square_uniformity(&samples, u).unwrap();
        assert_eq!(cs.statistic, 0.0);
        assert_eq!(cs.p_value, 1.0);
        assert_eq!(cs.dof, 2);
        // all mass on one state
        let lopsided = vec![u[0].clone(); 3000];
        let cs = chi_square_uniformity(&lopsided, u).unwrap();
        assert!(cs.statistic > 1000.0);
        assert!(cs.p_value < 1e-6);
        // foreign sample rejected
        let foreign = AffinePermutation::infinite_sum(&perm("321"));
        assert!(matches!(
            chi_square_uniformity(&[foreign], u),
            Err(Error::SampleOutsideUniverse { index: 0 })
        ));
    }

    #[test]
    fn avoids_shortcut_matches_search() {
        let tau = perm("321");
        counting::for_each_bounded_window(4, &mut |w| {
            let sigma = AffinePermutation::validate(w.to_vec()).unwrap();
            let fast = avoids(&sigma, &tau);
            let slow = patterns::contains_affine(&sigma, &tau).unwrap().is_none();
            assert_eq!(fast, slow, "window {w:?}");
        });
    }
}
