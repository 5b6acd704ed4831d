//! Transportation simplex with MODI potentials.

use std::collections::VecDeque;

use super::coupling::northwest_basis;
use super::CostMatrix;
use crate::error::{Error, Result};

/// Reduced costs below `-REDUCED_COST_TOL * max(1, max |c|)` admit a pivot.
const REDUCED_COST_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub flow: Vec<f64>,
    pub basis: Vec<(usize, usize)>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Node ids: rows are `0..m`, columns `m..m+n`.
fn potentials(m: usize, n: usize, basis: &[(usize, usize)], cost: &CostMatrix) -> (Vec<f64>, Vec<f64>) {
    let mut adj = vec![Vec::new(); m + n];
    for &(i, j) in basis {
        adj[i].push(m + j);
        adj[m + j].push(i);
    }
    let mut pot = vec![f64::NAN; m + n];
    pot[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        for &b in &adj[a] {
            if pot[b].is_nan() {
                let c = if a < m { cost.get(a, b - m) } else { cost.get(b, a - m) };
                pot[b] = c - pot[a];
                queue.push_back(b);
            }
        }
    }
    let v = pot.split_off(m);
    (pot, v)
}

/// Tree path from row node `i` to column node `m + j`, as basis cells.
fn tree_path(m: usize, n: usize, basis: &[(usize, usize)], i: usize, j: usize) -> Vec<(usize, usize)> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m + n];
    for (k, &(r, c)) in basis.iter().enumerate() {
        adj[r].push((m + c, k));
        adj[m + c].push((r, k));
    }
    let mut via = vec![usize::MAX; m + n];
    let mut seen = vec![false; m + n];
    seen[i] = true;
    let mut queue = VecDeque::from([i]);
    let target = m + j;
    while let Some(a) = queue.pop_front() {
        if a == target {
            break;
        }
        for &(b, k) in &adj[a] {
            if !seen[b] {
                seen[b] = true;
                via[b] = k;
                queue.push_back(b);
            }
        }
    }
    // walk back from the column to the row
    let mut path = Vec::new();
    let mut node = target;
    while node != i {
        let k = via[node];
        let (r, c) = basis[k];
        path.push((r, c));
        node = if node == m + c { r } else { m + c };
    }
    path.reverse();
    path
}

/// Solves `min Σ c γ` subject to row sums `supply` and column sums `demand`.
pub(crate) fn solve(supply: &[f64], demand: &[f64], cost: &CostMatrix) -> Result<Solution> {
    let (m, n) = (supply.len(), demand.len());
    debug_assert_eq!((cost.rows(), cost.cols()), (m, n));
    let (mut flow, mut basis) = northwest_basis(supply, demand);
    let mut in_basis = vec![false; m * n];
    for &(i, j) in &basis {
        in_basis[i * n + j] = true;
    }
    let scale = cost.data().iter().fold(1.0f64, |acc, c| acc.max(c.abs()));
    let tol = REDUCED_COST_TOL * scale;
    let max_pivots = 1000 + 50 * m * n * (m + n);

    for _ in 0..max_pivots {
        let (u, v) = potentials(m, n, &basis, cost);
        // Bland: first improving cell in row-major order
        let entering = (0..m * n).find(|&k| {
            let (i, j) = (k / n, k % n);
            !in_basis[k] && cost.get(i, j) - u[i] - v[j] < -tol
        });
        let Some(k) = entering else {
            return Ok(Solution { flow, basis, u, v });
        };
        let (ei, ej) = (k / n, k % n);
        // cycle: entering (+), then the tree path from row ei to column ej
        // with alternating signs starting at (-)
        let path = tree_path(m, n, &basis, ei, ej);
        let minus: Vec<(usize, usize)> = path.iter().copied().step_by(2).collect();
        let plus: Vec<(usize, usize)> = path.iter().copied().skip(1).step_by(2).collect();
        let theta = minus.iter().map(|&(i, j)| flow[i * n + j]).fold(f64::INFINITY, f64::min);
        let leaving = minus
            .iter()
            .copied()
            .filter(|&(i, j)| flow[i * n + j] == theta)
            .min_by_key(|&(i, j)| i * n + j)
            .expect("cycle has a minus cell");
        for &(i, j) in &minus {
            flow[i * n + j] -= theta;
        }
        for &(i, j) in &plus {
            flow[i * n + j] += theta;
        }
        flow[k] += theta;
        let (li, lj) = leaving;
        flow[li * n + lj] = 0.0;
        in_basis[li * n + lj] = false;
        in_basis[k] = true;
        let slot = basis.iter().position(|&c| c == leaving).expect("leaving cell is basic");
        basis[slot] = (ei, ej);
    }
    Err(Error::SolverNonconvergence(max_pivots))
}
