//! Membership in the lifted relations `Φ#` and `Φ#_W1`.

use super::coupling::Coupling;
use super::flow::max_transport;
use super::wasserstein::{emd, transport_restricted};
use crate::error::Result;
use crate::prob::{ensure_same, FiniteDistribution, GroundMetric, PointRelation};
use crate::tolerance::{TAU_MASS, TAU_NUM};

fn check(phi: &PointRelation, l0: &FiniteDistribution, l1: &FiniteDistribution) -> Result<()> {
    ensure_same(phi.ground(), l0.ground(), "relation and left distribution")?;
    ensure_same(phi.ground(), l1.ground(), "relation and right distribution")
}

/// A coupling of `(λ0, λ1)` supported inside `Φ`, if one exists.
pub fn lifted_coupling(phi: &PointRelation, l0: &FiniteDistribution, l1: &FiniteDistribution) -> Result<Option<Coupling>> {
    check(phi, l0, l1)?;
    let (value, flow) = max_transport(l0.probs(), l1.probs(), &phi.mask());
    if value < 1.0 - TAU_MASS {
        return Ok(None);
    }
    Ok(Some(Coupling::from_flat(l0.ground().clone(), l1.ground().clone(), flow)?))
}

/// `(λ0, λ1) ∈ Φ#`: some coupling has its support inside `Φ`.
pub fn lifted_member(phi: &PointRelation, l0: &FiniteDistribution, l1: &FiniteDistribution) -> Result<bool> {
    Ok(lifted_coupling(phi, l0, l1)?.is_some())
}

/// `(λ0, λ1) ∈ Φ#_W1`: some `W1`-optimal coupling has its support inside `Φ`.
pub fn lifted_w1_member(
    phi: &PointRelation,
    l0: &FiniteDistribution,
    l1: &FiniteDistribution,
    d: &GroundMetric,
) -> Result<bool> {
    check(phi, l0, l1)?;
    let cost = d.cross_costs(l0.ground(), l1.ground())?;
    let Some(restricted) = transport_restricted(l0, l1, &cost, &phi.mask())? else {
        return Ok(false);
    };
    let best = emd(l0, l1, d)?;
    Ok(restricted.cost <= best.cost + TAU_NUM)
}
