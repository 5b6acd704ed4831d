use std::collections::VecDeque;

use crate::error::Result;
use crate::prob::{DistributionPairRelation, FiniteDistribution, StochasticKernel};
use crate::tolerance::TAU_NUM;
use crate::transport::DistributionMetric;

/// `W(T#λ0, T#λ1) <= c·W(λ0, λ1)` on every supplied pair.
pub fn is_metric_stable(
    t: &StochasticKernel,
    pairs: &[(FiniteDistribution, FiniteDistribution)],
    metric: DistributionMetric,
    c: f64,
) -> Result<bool> {
    for (l0, l1) in pairs {
        let before = metric.distance(l0, l1)?;
        let after = metric.distance(&t.lift(l0)?, &t.lift(l1)?)?;
        if after > c * before + TAU_NUM {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For every `(λ0, λ1) ∈ Ψ`, `T#λ0` is reachable from `T#λ1` in at most
/// `c` steps of `Ψ`. Edges are traversed in both directions and nodes are
/// identified up to `TAU_NUM`.
pub fn is_relation_stable(t: &StochasticKernel, psi: &DistributionPairRelation, c: usize) -> Result<bool> {
    let mut nodes: Vec<FiniteDistribution> = Vec::new();
    let node_of = |d: &FiniteDistribution, nodes: &mut Vec<FiniteDistribution>| -> usize {
        match nodes.iter().position(|n| n.approx_eq(d, TAU_NUM)) {
            Some(i) => i,
            None => {
                nodes.push(d.clone());
                nodes.len() - 1
            }
        }
    };
    let mut edges = Vec::new();
    for p in psi.pairs() {
        let a = node_of(&p.left.dist, &mut nodes);
        let b = node_of(&p.right.dist, &mut nodes);
        edges.push((a, b));
    }
    let mut adj = vec![Vec::new(); nodes.len()];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let find = |d: &FiniteDistribution| nodes.iter().position(|n| n.approx_eq(d, TAU_NUM));
    for p in psi.pairs() {
        let (i0, i1) = (t.lift(&p.left.dist)?, t.lift(&p.right.dist)?);
        if i0.approx_eq(&i1, TAU_NUM) {
            continue;
        }
        let (Some(src), Some(dst)) = (find(&i1), find(&i0)) else {
            return Ok(false);
        };
        let mut dist = vec![usize::MAX; nodes.len()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            if dist[u] >= c {
                continue;
            }
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if dist[dst] > c {
            return Ok(false);
        }
    }
    Ok(true)
}
