//! Exact minimization over the transportation polytope, independent of the
//! one-dimensional quantile formula.
//!
//! [`transport_simplex`] runs the primal transportation simplex (u-v / MODI
//! method) and stops only when the dual certificate `c_ij ≥ u_i + v_j`
//! holds on every cell. [`exhaustive_vertex_min`] enumerates every basis of
//! tiny instances and is used to check the simplex itself.

use std::collections::VecDeque;

use crate::quantile::Measure1D;
use crate::{Error, Result};

/// Default cap on atoms per side for [`lp_oracle`].
pub const DEFAULT_MAX_ATOMS: usize = 64;

/// Largest side length accepted by [`exhaustive_vertex_min`].
pub const EXHAUSTIVE_MAX_SIDE: usize = 5;

const MAX_PIVOTS: usize = 100_000;

/// Minimum of `Σ π_ij |x_i − y_j|²` over couplings of two atomic measures.
///
/// Returns the squared cost. Starts from the north-west-corner basis on the
/// sorted atoms and pivots until the dual certificate holds.
pub fn lp_oracle(mu: &Measure1D, nu: &Measure1D, max_atoms: usize) -> Result<f64> {
    let (Measure1D::Atoms(a), Measure1D::Atoms(b)) = (mu, nu) else {
        return Err(Error::NotAtomic);
    };
    for side in [a.len(), b.len()] {
        if side > max_atoms {
            return Err(Error::TooLarge {
                got: side,
                max: max_atoms,
            });
        }
    }
    let supply: Vec<f64> = a.iter().map(|x| x.weight).collect();
    let demand: Vec<f64> = b.iter().map(|y| y.weight).collect();
    let cost = squared_distance_costs(
        &a.iter().map(|x| x.position).collect::<Vec<_>>(),
        &b.iter().map(|y| y.position).collect::<Vec<_>>(),
    );
    transport_simplex(&supply, &demand, &cost).map(|s| s.cost)
}

/// `|x_i − y_j|²` for every pair.
pub fn squared_distance_costs(xs: &[f64], ys: &[f64]) -> Vec<Vec<f64>> {
    xs.iter()
        .map(|x| ys.iter().map(|y| (x - y) * (x - y)).collect())
        .collect()
}

/// An optimal basic solution of a transportation problem.
#[derive(Clone, Debug)]
pub struct TransportSolution {
    pub flow: Vec<Vec<f64>>,
    pub cost: f64,
    pub pivots: usize,
}

/// Transportation simplex. Supplies and demands must be positive with equal
/// totals (up to rounding); the last row absorbs any residue.
pub fn transport_simplex(
    supply: &[f64],
    demand: &[f64],
    cost: &[Vec<f64>],
) -> Result<TransportSolution> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 {
        return Err(Error::InvalidMeasure("empty transportation problem".into()));
    }
    if cost.len() != m || cost.iter().any(|r| r.len() != n) {
        return Err(Error::ShapeMismatch {
            expected: m * n,
            got: cost.iter().map(Vec::len).sum(),
        });
    }

    let mut flow = vec![vec![0.0; n]; m];
    let mut basis = north_west_corner(supply, demand, &mut flow);
    let scale = cost
        .iter()
        .flatten()
        .fold(0.0f64, |acc, c| acc.max(c.abs()))
        .max(1.0);
    let tol = 1e-13 * scale;

    let mut pivots = 0;
    loop {
        let (u, v) = potentials(m, n, &basis, cost);
        let mut entering = None;
        let mut best = -tol;
        for i in 0..m {
            for j in 0..n {
                let reduced = cost[i][j] - u[i] - v[j];
                if reduced < best {
                    best = reduced;
                    entering = Some((i, j));
                }
            }
        }
        let Some((p, q)) = entering else { break };
        if pivots == MAX_PIVOTS {
            return Err(Error::DomainError(
                "transportation simplex did not converge".into(),
            ));
        }
        pivots += 1;

        // Tree path from column q back to row p, then close with (p, q).
        let path = tree_path(m, n, &basis, p, q);
        // path[0] is adjacent to column q and takes mass away.
        let (k_leave, theta) = path
            .iter()
            .enumerate()
            .step_by(2)
            .map(|(k, &(i, j))| (k, flow[i][j]))
            .fold((usize::MAX, f64::INFINITY), |acc, x| {
                if x.1 < acc.1 {
                    x
                } else {
                    acc
                }
            });
        for (k, &(i, j)) in path.iter().enumerate() {
            if k % 2 == 0 {
                flow[i][j] = (flow[i][j] - theta).max(0.0);
            } else {
                flow[i][j] += theta;
            }
        }
        let leaving = path[k_leave];
        flow[leaving.0][leaving.1] = 0.0;
        flow[p][q] += theta;
        let slot = basis
            .iter()
            .position(|&c| c == leaving)
            .expect("leaving cell is basic");
        basis[slot] = (p, q);
    }

    let total = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| flow[i][j] * cost[i][j])
        .sum();
    Ok(TransportSolution {
        flow,
        cost: total,
        pivots,
    })
}

fn north_west_corner(supply: &[f64], demand: &[f64], flow: &mut [Vec<f64>]) -> Vec<(usize, usize)> {
    let (m, n) = (supply.len(), demand.len());
    let mut s = supply.to_vec();
    let mut d = demand.to_vec();
    let mut basis = Vec::with_capacity(m + n - 1);
    let (mut i, mut j) = (0, 0);
    loop {
        let x = s[i].min(d[j]);
        flow[i][j] = x;
        basis.push((i, j));
        s[i] -= x;
        d[j] -= x;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if (s[i] <= d[j] && i < m - 1) || j == n - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    // Rounding residue stays on the last cell.
    flow[m - 1][n - 1] += s[m - 1].max(d[n - 1]).max(0.0);
    basis
}

/// Node ids: rows `0..m`, columns `m..m+n`.
fn adjacency(m: usize, n: usize, basis: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); m + n];
    for &(i, j) in basis {
        adj[i].push((m + j, i * n + j));
        adj[m + j].push((i, i * n + j));
    }
    adj
}

fn potentials(
    m: usize,
    n: usize,
    basis: &[(usize, usize)],
    cost: &[Vec<f64>],
) -> (Vec<f64>, Vec<f64>) {
    let adj = adjacency(m, n, basis);
    let mut pot = vec![f64::NAN; m + n];
    pot[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        for &(next, cell) in &adj[node] {
            if pot[next].is_nan() {
                let c = cost[cell / n][cell % n];
                pot[next] = c - pot[node];
                queue.push_back(next);
            }
        }
    }
    let (u, v) = pot.split_at(m);
    (u.to_vec(), v.to_vec())
}

/// Basic cells on the tree path from column `q` to row `p`, starting at the
/// cell incident to column `q`.
fn tree_path(
    m: usize,
    n: usize,
    basis: &[(usize, usize)],
    p: usize,
    q: usize,
) -> Vec<(usize, usize)> {
    let adj = adjacency(m, n, basis);
    let start = m + q;
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if node == p {
            break;
        }
        for &(next, cell) in &adj[node] {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, cell));
                queue.push_back(next);
            }
        }
    }
    let mut cells = Vec::new();
    let mut node = p;
    while node != start {
        let (prev, cell) = parent[node].expect("basis is a spanning tree");
        cells.push((cell / n, cell % n));
        node = prev;
    }
    cells.reverse();
    cells
}

/// Minimum cost over every vertex of the transportation polytope, by
/// enumerating spanning-tree bases and keeping the feasible ones.
/// Limited to [`EXHAUSTIVE_MAX_SIDE`] sources and targets.
pub fn exhaustive_vertex_min(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> Result<f64> {
    let (m, n) = (supply.len(), demand.len());
    for side in [m, n] {
        if side > EXHAUSTIVE_MAX_SIDE {
            return Err(Error::TooLarge {
                got: side,
                max: EXHAUSTIVE_MAX_SIDE,
            });
        }
    }
    if m == 0 || n == 0 {
        return Err(Error::InvalidMeasure("empty transportation problem".into()));
    }
    let mut search = VertexSearch {
        m,
        n,
        supply,
        demand,
        cost,
        chosen: Vec::with_capacity(m + n - 1),
        best: f64::INFINITY,
    };
    let comp: Vec<usize> = (0..m + n).collect();
    search.recurse(0, comp);
    Ok(search.best)
}

struct VertexSearch<'a> {
    m: usize,
    n: usize,
    supply: &'a [f64],
    demand: &'a [f64],
    cost: &'a [Vec<f64>],
    chosen: Vec<(usize, usize)>,
    best: f64,
}

impl VertexSearch<'_> {
    fn recurse(&mut self, next: usize, comp: Vec<usize>) {
        let need = self.m + self.n - 1 - self.chosen.len();
        if need == 0 {
            self.evaluate();
            return;
        }
        let cells = self.m * self.n;
        if cells - next < need {
            return;
        }
        let (i, j) = (next / self.n, next % self.n);
        let (a, b) = (comp[i], comp[self.m + j]);
        if a != b {
            let merged: Vec<usize> = comp.iter().map(|&c| if c == b { a } else { c }).collect();
            self.chosen.push((i, j));
            self.recurse(next + 1, merged);
            self.chosen.pop();
        }
        self.recurse(next + 1, comp);
    }

    /// Solves the basis by peeling leaves; records the cost if feasible.
    fn evaluate(&mut self) {
        let (m, n) = (self.m, self.n);
        let mut remaining: Vec<f64> = self.supply.iter().chain(self.demand).copied().collect();
        let mut alive = vec![true; self.chosen.len()];
        let mut degree = vec![0usize; m + n];
        for &(i, j) in &self.chosen {
            degree[i] += 1;
            degree[m + j] += 1;
        }
        let mut total = 0.0;
        for _ in 0..self.chosen.len() {
            let Some((k, leaf)) = self
                .chosen
                .iter()
                .enumerate()
                .filter(|(k, _)| alive[*k])
                .find_map(|(k, &(i, j))| {
                    if degree[i] == 1 {
                        Some((k, i))
                    } else if degree[m + j] == 1 {
                        Some((k, m + j))
                    } else {
                        None
                    }
                })
            else {
                return;
            };
            let (i, j) = self.chosen[k];
            let x = remaining[leaf];
            if x < -1e-12 {
                return;
            }
            let other = if leaf == i { m + j } else { i };
            remaining[leaf] = 0.0;
            remaining[other] -= x;
            degree[i] -= 1;
            degree[m + j] -= 1;
            alive[k] = false;
            total += x.max(0.0) * self.cost[i][j];
        }
        if total < self.best {
            self.best = total;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_pair() {
        let mu = Measure1D::dirac(0.0).unwrap();
        let nu = Measure1D::dirac(1.0).unwrap();
        assert_eq!(lp_oracle(&mu, &nu, DEFAULT_MAX_ATOMS).unwrap(), 1.0);
    }

    #[test]
    fn two_by_two_by_enumeration() {
        let mu = Measure1D::atomic(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let nu = Measure1D::atomic(&[(0.25, 0.5), (0.75, 0.5)]).unwrap();
        let got = lp_oracle(&mu, &nu, DEFAULT_MAX_ATOMS).unwrap();
        assert!((got - 1.0 / 16.0).abs() < 1e-15);
        // The two vertices: monotone (cost 1/16) and crossed (cost 9/16).
        let cost = squared_distance_costs(&[0.0, 1.0], &[0.25, 0.75]);
        let best = exhaustive_vertex_min(&[0.5, 0.5], &[0.5, 0.5], &cost).unwrap();
        assert!((best - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let big = Measure1D::atomic(&[(0.1, 0.5), (0.2, 0.5)]).unwrap();
        assert_eq!(
            lp_oracle(&big, &big, 1),
            Err(Error::TooLarge { got: 2, max: 1 })
        );
        assert_eq!(
            lp_oracle(&Measure1D::uniform(), &big, 8),
            Err(Error::NotAtomic)
        );
        let six = vec![1.0 / 6.0; 6];
        let cost = vec![vec![0.0; 6]; 6];
        assert!(matches!(
            exhaustive_vertex_min(&six, &six, &cost),
            Err(Error::TooLarge { .. })
        ));
    }

    fn random_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
        let s: f64 = raw.iter().sum();
        raw.iter().map(|w| w / s).collect()
    }

    #[test]
    fn simplex_matches_enumeration_on_arbitrary_costs() {
        // General costs, not just |x − y|², so the pivoting path is exercised.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let m = rng.random_range(1..=4);
            let n = rng.random_range(1..=4);
            let supply = random_weights(&mut rng, m);
            let demand = random_weights(&mut rng, n);
            let cost: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
                .collect();
            let simplex = transport_simplex(&supply, &demand, &cost).unwrap();
            let brute = exhaustive_vertex_min(&supply, &demand, &cost).unwrap();
            assert!(
                (simplex.cost - brute).abs() < 1e-12,
                "{} vs {brute}",
                simplex.cost
            );
            for (i, row) in simplex.flow.iter().enumerate() {
                assert!((row.iter().sum::<f64>() - supply[i]).abs() < 1e-12);
            }
            for j in 0..n {
                let col: f64 = simplex.flow.iter().map(|r| r[j]).sum();
                assert!((col - demand[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn simplex_matches_enumeration_on_five_by_five() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2 {
            let supply = random_weights(&mut rng, 5);
            let demand = random_weights(&mut rng, 5);
            let cost: Vec<Vec<f64>> = (0..5)
                .map(|_| (0..5).map(|_| rng.random::<f64>()).collect())
                .collect();
            let simplex = transport_simplex(&supply, &demand, &cost).unwrap();
            let brute = exhaustive_vertex_min(&supply, &demand, &cost).unwrap();
            assert!((simplex.cost - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_instance() {
        // Equal partial sums make the starting basis degenerate.
        let supply = [0.25, 0.25, 0.5];
        let demand = [0.5, 0.25, 0.25];
        let cost = vec![
            vec![3.0, 1.0, 0.0],
            vec![1.0, 0.0, 2.0],
            vec![0.0, 2.0, 5.0],
        ];
        let simplex = transport_simplex(&supply, &demand, &cost).unwrap();
        let brute = exhaustive_vertex_min(&supply, &demand, &cost).unwrap();
        assert!((simplex.cost - brute).abs() < 1e-12);
    }
}
