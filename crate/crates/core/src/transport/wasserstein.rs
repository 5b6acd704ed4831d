use serde::Serialize;

use super::coupling::Coupling;
use super::flow::max_transport;
use super::simplex;
use super::CostMatrix;
use crate::error::{Error, Result};
use crate::prob::{FiniteDistribution, GroundMetric};
use crate::tolerance::{TAU_MASS, TAU_ZERO};

/// `u[x0] + v[x1] <= c(x0, x1)` with equality on the final basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualPotentials {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportResult {
    pub cost: f64,
    pub coupling: Coupling,
    /// Basic cells of the final simplex tableau.
    pub basis: Vec<(usize, usize)>,
    /// Potentials for the cell costs the solver actually used.
    pub duals: DualPotentials,
}

fn check_shape(lambda: &FiniteDistribution, mu: &FiniteDistribution, cost: &CostMatrix) -> Result<()> {
    if cost.rows() != lambda.len() || cost.cols() != mu.len() {
        return Err(Error::DimensionMismatch(format!(
            "cost matrix is {}x{}, marginals have sizes {} and {}",
            cost.rows(),
            cost.cols(),
            lambda.len(),
            mu.len()
        )));
    }
    Ok(())
}

/// Exact optimal transport for an arbitrary rectangular cost matrix.
pub fn transport(lambda: &FiniteDistribution, mu: &FiniteDistribution, cost: &CostMatrix) -> Result<TransportResult> {
    check_shape(lambda, mu, cost)?;
    let sol = simplex::solve(lambda.probs(), mu.probs(), cost)?;
    let coupling = Coupling::from_flat(lambda.ground().clone(), mu.ground().clone(), sol.flow)?;
    Ok(TransportResult {
        cost: coupling.cost(cost),
        coupling,
        basis: sol.basis,
        duals: DualPotentials { u: sol.u, v: sol.v },
    })
}

/// Optimal transport using only cells where `allowed` is true; `None`
/// when no coupling is supported inside the allowed cells.
pub fn transport_restricted(
    lambda: &FiniteDistribution,
    mu: &FiniteDistribution,
    cost: &CostMatrix,
    allowed: &[bool],
) -> Result<Option<TransportResult>> {
    check_shape(lambda, mu, cost)?;
    if allowed.len() != cost.data().len() {
        return Err(Error::DimensionMismatch("allowed mask size".into()));
    }
    let (value, _) = max_transport(lambda.probs(), mu.probs(), allowed);
    if value < 1.0 - TAU_MASS {
        return Ok(None);
    }
    let (m, n) = (cost.rows(), cost.cols());
    let top = allowed
        .iter()
        .zip(cost.data())
        .filter(|(a, _)| **a)
        .map(|(_, c)| *c)
        .fold(0.0, f64::max);
    // penalty large enough that rerouting around a forbidden cell is cheaper
    let mut penalty = 4.0 * (m + n + 1) as f64 * (top + 1.0);
    for _ in 0..4 {
        let penalised = CostMatrix::from_fn(m, n, |i, j| if allowed[i * n + j] { cost.get(i, j) } else { penalty });
        let sol = simplex::solve(lambda.probs(), mu.probs(), &penalised)?;
        let leaked: f64 = sol
            .flow
            .iter()
            .zip(allowed)
            .filter(|(_, a)| !**a)
            .map(|(f, _)| *f)
            .sum();
        if leaked <= TAU_ZERO {
            let flow: Vec<f64> = sol
                .flow
                .iter()
                .zip(allowed)
                .map(|(&f, &a)| if a { f } else { 0.0 })
                .collect();
            let coupling = Coupling::from_flat(lambda.ground().clone(), mu.ground().clone(), flow)?;
            return Ok(Some(TransportResult {
                cost: coupling.cost(cost),
                coupling,
                basis: sol.basis,
                duals: DualPotentials { u: sol.u, v: sol.v },
            }));
        }
        penalty *= 1e3;
    }
    Err(Error::SolverNonconvergence(0))
}

/// Earth mover's distance `W1`.
pub fn emd(lambda: &FiniteDistribution, mu: &FiniteDistribution, d: &GroundMetric) -> Result<TransportResult> {
    let cost = d.cross_costs(lambda.ground(), mu.ground())?;
    transport(lambda, mu, &cost)
}

/// `W_p` for finite `p >= 1`: the simplex runs on `d^p` and the reported
/// cost is raised to `1/p`.
pub fn wasserstein_p(
    lambda: &FiniteDistribution,
    mu: &FiniteDistribution,
    d: &GroundMetric,
    p: f64,
) -> Result<TransportResult> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must be finite and >= 1")));
    }
    let cost = d.cross_costs(lambda.ground(), mu.ground())?;
    let mut res = transport(lambda, mu, &cost.map(|c| c.powf(p)))?;
    res.cost = res.cost.max(0.0).powf(1.0 / p);
    Ok(res)
}

/// `W∞`: the smallest threshold `t` such that some coupling lives on
/// cells with `d <= t`. The returned coupling is the cheapest (in `W1`
/// terms) among those.
pub fn wasserstein_inf(lambda: &FiniteDistribution, mu: &FiniteDistribution, d: &GroundMetric) -> Result<TransportResult> {
    let cost = d.cross_costs(lambda.ground(), mu.ground())?;
    let mut levels: Vec<f64> = cost.data().to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mask = |t: f64| -> Vec<bool> { cost.data().iter().map(|&c| c <= t).collect() };
    let feasible = |t: f64| max_transport(lambda.probs(), mu.probs(), &mask(t)).0 >= 1.0 - TAU_MASS;
    // the largest level admits every cell, so it is always feasible
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(levels[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let t = levels[lo];
    let mut res = transport_restricted(lambda, mu, &cost, &mask(t))?
        .ok_or(Error::SolverNonconvergence(0))?;
    res.cost = res.coupling.max_cost_on_support(&cost);
    Ok(res)
}

/// `max d(x0, x1)` over `supp(λ) × supp(μ)`.
pub fn diameter(lambda: &FiniteDistribution, mu: &FiniteDistribution, d: &GroundMetric) -> Result<f64> {
    let cost = d.cross_costs(lambda.ground(), mu.ground())?;
    let (ls, ms) = (lambda.support(), mu.support());
    Ok(ls
        .iter()
        .flat_map(|&i| ms.iter().map(move |&j| (i, j)))
        .map(|(i, j)| cost.get(i, j))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Ground;

    fn three_point() -> (FiniteDistribution, FiniteDistribution, GroundMetric) {
        let g = Ground::new(["1", "2", "3"]).unwrap();
        (
            FiniteDistribution::new(g.clone(), vec![0.2, 0.5, 0.3]).unwrap(),
            FiniteDistribution::new(g.clone(), vec![0.3, 0.2, 0.5]).unwrap(),
            GroundMetric::line(g),
        )
    }

    #[test]
    fn fig2_costs() {
        let (l, m, d) = three_point();
        let w1 = emd(&l, &m, &d).unwrap();
        assert!((w1.cost - 0.3).abs() < 1e-12);
        assert!(w1.coupling.has_marginals(&l, &m).unwrap());
        let w2 = wasserstein_p(&l, &m, &d, 2.0).unwrap();
        assert!((w2.cost - 0.3f64.sqrt()).abs() < 1e-12);
        let winf = wasserstein_inf(&l, &m, &d).unwrap();
        assert!((winf.cost - 1.0).abs() < 1e-12);
        assert!(winf.coupling.has_marginals(&l, &m).unwrap());
        assert!((diameter(&l, &m, &d).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn identical_marginals_cost_nothing() {
        let (l, _, d) = three_point();
        assert!(emd(&l, &l, &d).unwrap().cost.abs() < 1e-15);
        assert_eq!(wasserstein_inf(&l, &l, &d).unwrap().cost, 0.0);
    }

    #[test]
    fn point_masses_cost_their_distance() {
        let (_, _, d) = three_point();
        let g = d.ground().clone();
        let a = FiniteDistribution::point(&"1".into(), g.clone()).unwrap();
        let b = FiniteDistribution::point(&"3".into(), g).unwrap();
        for p in [1.0, 2.0, 3.5] {
            assert!((wasserstein_p(&a, &b, &d, p).unwrap().cost - 2.0).abs() < 1e-12);
        }
        assert_eq!(wasserstein_inf(&a, &b, &d).unwrap().cost, 2.0);
        assert_eq!(diameter(&a, &b, &d).unwrap(), 2.0);
    }

    #[test]
    fn rejects_bad_p() {
        let (l, m, d) = three_point();
        assert!(wasserstein_p(&l, &m, &d, 0.5).is_err());
        assert!(wasserstein_p(&l, &m, &d, f64::INFINITY).is_err());
    }

    #[test]
    fn restricted_transport_respects_mask() {
        let (l, m, d) = three_point();
        let cost = d.as_cost_matrix();
        // forbid the move 2 -> 1
        let allowed: Vec<bool> = (0..9).map(|k| k != 3).collect();
        let r = transport_restricted(&l, &m, &cost, &allowed).unwrap().unwrap();
        assert!((r.cost - 0.5).abs() < 1e-12);
        for (i, j) in r.coupling.support() {
            assert!(allowed[i * 3 + j]);
        }
        let diag: Vec<bool> = (0..9).map(|k| k % 4 == 0).collect();
        assert!(transport_restricted(&l, &m, &cost, &diag).unwrap().is_none());
    }
}
