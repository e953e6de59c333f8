//! Measures on the parallelogram and Wasserstein distances.
//!
//! The parallelogram is `{(x, y) : 0 <= x <= 1, |y - x| <= 1}`; scaled
//! plots of bounded permutations land inside it. Distances are exact
//! optimal-transport solves with Euclidean ground cost, certified by dual
//! potentials rather than trusted.

use rand::Rng;

use crate::affine::AffinePermutation;
use crate::error::{Error, Result};
use crate::transport;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Diameter of the parallelogram: the distance from `(0, -1)` to `(1, 2)`.
pub const DIAMOND_DIAMETER: f64 = 3.1622776601683795; // sqrt(10)

/// A point of the closed parallelogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiamondPoint {
    pub x: f64,
    pub y: f64,
}

impl DiamondPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) || (y - x).abs() > 1.0 {
            return Err(Error::BadMeasure(format!(
                "point ({x}, {y}) lies outside the parallelogram"
            )));
        }
        Ok(DiamondPoint { x, y })
    }

    pub fn dist(&self, other: &DiamondPoint) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Finitely many weighted atoms in the parallelogram; weights sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<DiamondPoint>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<DiamondPoint>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::BadMeasure(
                "atoms and weights must be non-empty and of equal length".into(),
            ));
        }
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::BadMeasure("weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::BadMeasure(format!("weights sum to {total}, not 1")));
        }
        Ok(DiscreteMeasure { atoms, weights })
    }

    pub fn uniform(atoms: Vec<DiamondPoint>) -> Result<Self> {
        let w = 1.0 / atoms.len() as f64;
        let weights = vec![w; atoms.len()];
        DiscreteMeasure::new(atoms, weights)
    }

    pub fn atoms(&self) -> &[DiamondPoint] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    fn is_uniform(&self) -> bool {
        let w = self.weights[0];
        self.weights.iter().all(|&x| (x - w).abs() < 1e-15)
    }
}

/// The mixture of `k` uniform measures on slope-1 segments with the given
/// intercepts, each `|z_i| <= 1`, mixed with equal weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeOneMixture {
    intercepts: Vec<f64>,
}

impl SlopeOneMixture {
    pub fn new(intercepts: Vec<f64>) -> Result<Self> {
        if intercepts.is_empty() {
            return Err(Error::BadMeasure("mixture needs at least one segment".into()));
        }
        if let Some(z) = intercepts.iter().find(|z| z.abs() > 1.0) {
            return Err(Error::BadMeasure(format!("intercept {z} outside [-1, 1]")));
        }
        Ok(SlopeOneMixture { intercepts })
    }

    pub fn intercepts(&self) -> &[f64] {
        &self.intercepts
    }

    pub fn k(&self) -> usize {
        self.intercepts.len()
    }
}

/// The scaled plot of a bounded permutation: atoms `(i/N, σ(i)/N)` with
/// weight `1/N`.
pub fn empirical_measure(sigma: &AffinePermutation) -> Result<DiscreteMeasure> {
    sigma.require_bounded()?;
    let n = sigma.size() as f64;
    let atoms = sigma
        .window()
        .iter()
        .enumerate()
        .map(|(idx, &v)| {
            DiamondPoint::new((idx as f64 + 1.0) / n, v as f64 / n)
                .expect("bounded windows plot inside the parallelogram")
        })
        .collect();
    DiscreteMeasure::uniform(atoms)
}

/// Midpoint discretization: `M` atoms per segment at `x = (j - 1/2)/M`,
/// each of weight `1/(kM)`. The Wasserstein-1 gap to the continuous
/// mixture is at most `sqrt(2)/(2M)` (each uniform piece moves at most
/// half a cell along the segment).
pub fn discretize(m: &SlopeOneMixture, segments: usize) -> DiscreteMeasure {
    assert!(segments >= 1);
    let total = m.k() * segments;
    let mut atoms = Vec::with_capacity(total);
    for &z in m.intercepts() {
        for j in 1..=segments {
            let x = (j as f64 - 0.5) / segments as f64;
            atoms.push(DiamondPoint::new(x, x + z).expect("segment stays in the parallelogram"));
        }
    }
    DiscreteMeasure::uniform(atoms).expect("positive atom count")
}

/// An optimal coupling: `flow[i][j]` is the mass moved from atom `i` of
/// the first measure to atom `j` of the second.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub flow: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Wass1Result {
    pub distance: f64,
    pub plan: TransportPlan,
}

/// Exact Wasserstein-1 distance with Euclidean ground cost. Equal-count
/// uniform instances go through the assignment solver, everything else
/// through the transportation simplex; both solutions are certified by
/// their dual potentials before being returned.
pub fn wass1(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Wass1Result {
    let cost = |i: usize, j: usize| mu.atoms[i].dist(&nu.atoms[j]);
    if mu.len() == nu.len() && mu.is_uniform() && nu.is_uniform() {
        let n = mu.len();
        let matrix: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| cost(i, j)).collect()).collect();
        let (rows, u, v) = transport::assignment(&matrix);
        let w = 1.0 / n as f64;
        let mut flow = vec![vec![0.0; n]; n];
        let mut distance = 0.0;
        for (i, &j) in rows.iter().enumerate() {
            flow[i][j] = w;
            distance += w * matrix[i][j];
        }
        let sol = transport::Solution {
            flow,
            objective: distance,
            u: u.iter().map(|&x| x * w).collect(),
            v: v.iter().map(|&x| x * w).collect(),
        };
        // potentials certify the assignment LP; rescale checks the
        // transportation form directly
        transport::certify(&sol, mu.weights(), nu.weights(), &|i, j| cost(i, j) * w)
            .expect("assignment solution must certify");
        return Wass1Result {
            distance,
            plan: TransportPlan { flow: sol.flow },
        };
    }
    let sol = transport::transportation(mu.weights(), nu.weights(), &cost);
    transport::certify(&sol, mu.weights(), nu.weights(), &cost)
        .expect("simplex solution must certify");
    Wass1Result {
        distance: sol.objective,
        plan: TransportPlan { flow: sol.flow },
    }
}

/// Uniform draw from the zero-sum slice of the cube: the first `k - 1`
/// intercepts are uniform on `[-1, 1]`, the last is forced, and draws
/// with the forced coordinate outside `[-1, 1]` are rejected. The slice
/// projection is linear with constant Jacobian, so acceptance is uniform.
pub fn sample_q0<R: Rng>(k: usize, rng: &mut R) -> SlopeOneMixture {
    assert!(k >= 1);
    loop {
        let mut z: Vec<f64> = (0..k - 1).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let last: f64 = -z.iter().sum::<f64>();
        if last.abs() <= 1.0 {
            z.push(last);
            return SlopeOneMixture::new(z).expect("coordinates are in range");
        }
    }
}

/// `Wass1` between a discrete measure and the discretized mixture; the
/// additive gap to the continuous mixture is at most `sqrt(2)/(2M)`.
pub fn wass1_to_mixture(mu: &DiscreteMeasure, m: &SlopeOneMixture, segments: usize) -> f64 {
    wass1(mu, &discretize(m, segments)).distance
}

/// Plug-in estimator of the Wasserstein-2 distance between the law of the
/// empirical measure of a random avoider and the limit mixture law: `s`
/// sampled avoiders against `s` independent intercept draws, matched
/// optimally on the pairwise `Wass1` cost matrix, mean matched cost
/// returned. Cost-matrix cells are independent solves and run in
/// parallel when the `parallel` feature is on.
pub fn wass2_estimate<R: Rng>(
    k: usize,
    n: usize,
    s: usize,
    segments: usize,
    rng: &mut R,
    mut sampler: impl FnMut(&mut R) -> Result<AffinePermutation>,
) -> Result<f64> {
    assert!(s >= 1);
    let _ = (k, n);
    let empiricals: Vec<DiscreteMeasure> = (0..s)
        .map(|_| empirical_measure(&sampler(rng)?))
        .collect::<Result<_>>()?;
    let mixtures: Vec<DiscreteMeasure> = (0..s)
        .map(|_| discretize(&sample_q0(k, rng), segments))
        .collect();
    let cell = |i: usize, j: usize| wass1(&empiricals[i], &mixtures[j]).distance;
    let pairs: Vec<(usize, usize)> = (0..s).flat_map(|i| (0..s).map(move |j| (i, j))).collect();
    #[cfg(feature = "parallel")]
    let flat: Vec<f64> = pairs.par_iter().map(|&(i, j)| cell(i, j)).collect();
    #[cfg(not(feature = "parallel"))]
    let flat: Vec<f64> = pairs.iter().map(|&(i, j)| cell(i, j)).collect();
    let matrix: Vec<Vec<f64>> = (0..s).map(|i| flat[i * s..(i + 1) * s].to_vec()).collect();
    let (rows, _, _) = transport::assignment(&matrix);
    let total: f64 = rows.iter().enumerate().map(|(i, &j)| matrix[i][j]).sum();
    Ok(total / s as f64)
}
