//! Exact solvers for the discrete transportation problem.
//!
//! Two solvers: an O(n³) assignment algorithm for the equal-count,
//! equal-weight case, and a transportation simplex (network simplex on
//! the complete bipartite graph) for general marginals. Both return dual
//! potentials so optimality can be certified by complementary slackness
//! instead of trusted.

/// A primal-dual solution: dense flow matrix, objective value, and dual
/// potentials with `u_i + v_j <= cost(i,j)` on every cell.
#[derive(Debug, Clone)]
pub struct Solution {
    pub flow: Vec<Vec<f64>>,
    pub objective: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

pub const DUAL_TOL: f64 = 1e-9;

/// Minimum-cost perfect matching on a square cost matrix, with dual
/// potentials. Row `i` is matched to column `assignment[i]`.
pub fn assignment(cost: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = cost.len();
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1]; // column j -> row, 1-based, 0 = free
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[matched_row[j] - 1] = j - 1;
    }
    (row_to_col, u[1..].to_vec(), v[1..].to_vec())
}

/// Solves min Σ flow·cost subject to the given row and column sums, by
/// the transportation simplex: northwest-corner start, Dantzig entering
/// rule, tree pivots. Supplies must balance; zero-flow basic arcs handle
/// degeneracy.
pub fn transportation(a: &[f64], b: &[f64], cost: &dyn Fn(usize, usize) -> f64) -> Solution {
    let m = a.len();
    let n = b.len();
    debug_assert!((a.iter().sum::<f64>() - b.iter().sum::<f64>()).abs() < 1e-9);
    // basis arcs (source, sink, flow); always a spanning tree of m+n nodes
    let mut basis: Vec<(usize, usize, f64)> = Vec::with_capacity(m + n - 1);
    let mut a_rem = a.to_vec();
    let mut b_rem = b.to_vec();
    let (mut i, mut j) = (0usize, 0usize);
    while i < m && j < n {
        let f = a_rem[i].min(b_rem[j]);
        basis.push((i, j, f));
        a_rem[i] -= f;
        b_rem[j] -= f;
        // advance one side only, so exactly m+n-1 arcs come out
        if a_rem[i] <= b_rem[j] && i + 1 < m {
            i += 1;
        } else if j + 1 < n {
            j += 1;
        } else {
            i += 1;
        }
    }
    debug_assert_eq!(basis.len(), m + n - 1);

    let nodes = m + n;
    let max_pivots = 400 * nodes + 10_000;
    let mut u = vec![0.0f64; m];
    let mut v = vec![0.0f64; n];
    for _pivot in 0..max_pivots {
        // duals from the tree: u_i + v_j = c_ij on basic arcs
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
        for (idx, &(bi, bj, _)) in basis.iter().enumerate() {
            adj[bi].push((m + bj, idx));
            adj[m + bj].push((bi, idx));
        }
        let mut known = vec![false; nodes];
        let mut stack = vec![0usize];
        known[0] = true;
        u[0] = 0.0;
        while let Some(node) = stack.pop() {
            for &(next, arc) in &adj[node] {
                if !known[next] {
                    known[next] = true;
                    let (bi, bj, _) = basis[arc];
                    if next >= m {
                        v[next - m] = cost(bi, bj) - u[bi];
                    } else {
                        u[next] = cost(bi, bj) - v[bj];
                    }
                    stack.push(next);
                }
            }
        }
        debug_assert!(known.iter().all(|&x| x), "basis must span all nodes");

        // entering arc: most negative reduced cost
        let mut best = -DUAL_TOL / 10.0;
        let mut enter: Option<(usize, usize)> = None;
        for ii in 0..m {
            for jj in 0..n {
                let rc = cost(ii, jj) - u[ii] - v[jj];
                if rc < best {
                    best = rc;
                    enter = Some((ii, jj));
                }
            }
        }
        let (ei, ej) = match enter {
            Some(e) => e,
            None => break,
        };

        // unique tree path from source ei to sink ej
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; nodes]; // (prev node, arc)
        let mut seen = vec![false; nodes];
        seen[ei] = true;
        let mut queue = std::collections::VecDeque::from([ei]);
        while let Some(node) = queue.pop_front() {
            if node == m + ej {
                break;
            }
            for &(next, arc) in &adj[node] {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, arc));
                    queue.push_back(next);
                }
            }
        }
        let mut path_arcs = Vec::new();
        let mut node = m + ej;
        while let Some((prev, arc)) = parent[node] {
            path_arcs.push(arc);
            node = prev;
        }
        path_arcs.reverse();

        // alternate signs around the cycle: entering arc is +, the arc
        // meeting it at the sink is -, and so on back to the source
        let mut theta = f64::INFINITY;
        let mut leaving = usize::MAX;
        for (pos, &arc) in path_arcs.iter().rev().enumerate() {
            if pos % 2 == 0 {
                let f = basis[arc].2;
                if f < theta {
                    theta = f;
                    leaving = arc;
                }
            }
        }
        for (pos, &arc) in path_arcs.iter().rev().enumerate() {
            if pos % 2 == 0 {
                basis[arc].2 -= theta;
            } else {
                basis[arc].2 += theta;
            }
        }
        basis[leaving] = (ei, ej, theta);
    }

    let mut flow = vec![vec![0.0f64; n]; m];
    let mut objective = 0.0;
    for &(bi, bj, f) in &basis {
        flow[bi][bj] += f;
        objective += f * cost(bi, bj);
    }
    Solution {
        flow,
        objective,
        u,
        v,
    }
}

/// Checks dual feasibility and complementary slackness; the certificate
/// that the returned plan is optimal.
pub fn certify(
    sol: &Solution,
    a: &[f64],
    b: &[f64],
    cost: &dyn Fn(usize, usize) -> f64,
) -> Result<(), String> {
    let m = a.len();
    let n = b.len();
    for (i, &ai) in a.iter().enumerate() {
        let row: f64 = sol.flow[i].iter().sum();
        if (row - ai).abs() > 1e-9 {
            return Err(format!("row {i} sums to {row}, want {ai}"));
        }
    }
    for (j, &bj) in b.iter().enumerate() {
        let col: f64 = sol.flow.iter().map(|r| r[j]).sum();
        if (col - bj).abs() > 1e-9 {
            return Err(format!("column {j} sums to {col}, want {bj}"));
        }
    }
    for i in 0..m {
        for j in 0..n {
            let rc = cost(i, j) - sol.u[i] - sol.v[j];
            if rc < -DUAL_TOL {
                return Err(format!("dual infeasible at ({i},{j}): reduced cost {rc}"));
            }
            if sol.flow[i][j] > 1e-12 && rc > DUAL_TOL {
                return Err(format!(
                    "slackness violated at ({i},{j}): flow {} with reduced cost {rc}",
                    sol.flow[i][j]
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn assignment_small() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let (rows, u, v) = assignment(&cost);
        let total: f64 = rows.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert!((total - 5.0).abs() < 1e-12);
        for i in 0..3 {
            for j in 0..3 {
                assert!(u[i] + v[j] <= cost[i][j] + 1e-12);
            }
        }
    }

    #[test]
    fn transportation_matches_assignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(2..=6);
            let cost: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(0.0..10.0)).collect())
                .collect();
            let (rows, _, _) = assignment(&cost);
            let best: f64 = rows.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
            let w = vec![1.0 / n as f64; n];
            let sol = transportation(&w, &w, &|i, j| cost[i][j]);
            assert!((sol.objective - best / n as f64).abs() < 1e-9);
            certify(&sol, &w, &w, &|i, j| cost[i][j]).unwrap();
        }
    }

    #[test]
    fn transportation_unbalanced_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let m = rng.gen_range(1..=5);
            let n = rng.gen_range(1..=7);
            let mut a: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
            let mut b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
            let sa: f64 = a.iter().sum();
            let sb: f64 = b.iter().sum();
            a.iter_mut().for_each(|x| *x /= sa);
            b.iter_mut().for_each(|x| *x /= sb);
            let cost: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.gen_range(0.0..10.0)).collect())
                .collect();
            let sol = transportation(&a, &b, &|i, j| cost[i][j]);
            certify(&sol, &a, &b, &|i, j| cost[i][j]).unwrap();
        }
    }
}
