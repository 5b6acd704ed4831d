//! Auditors for divergence DP, XDP, DistP and XDistP.
//!
//! Every pair is evaluated in both directions and the larger value is
//! kept. Infinite values are legitimate results and are reported with the
//! offending pair, never raised as errors.

mod cp_theorem;
mod report;
mod utility;

pub use cp_theorem::{check_cp_theorem, closeness_epsilon, CpBoundCheck, CpTheoremReport};
pub use report::{AuditReport, Notion, PairId, PairRecord, Verdict};
pub use utility::{expected_utility_loss, worst_case_loss};

use crate::divergence::Divergence;
use crate::error::{Error, Result};
use crate::mechanism::AuxIndexedKernel;
use crate::prob::{
    ensure_same, DistributionPairRelation, FiniteDistribution, GroundMetric, PointRelation, StochasticKernel,
    TaggedDistribution,
};
use crate::tolerance::TAU_NUM;
use crate::transport::DistributionMetric;

/// Mechanisms whose lifting can be applied to (possibly aux-tagged) inputs.
pub trait Lifting {
    fn lift_tagged(&self, input: &TaggedDistribution) -> Result<FiniteDistribution>;
}

impl Lifting for StochasticKernel {
    fn lift_tagged(&self, input: &TaggedDistribution) -> Result<FiniteDistribution> {
        self.lift(&input.dist)
    }
}

impl Lifting for AuxIndexedKernel {
    fn lift_tagged(&self, input: &TaggedDistribution) -> Result<FiniteDistribution> {
        let s = input
            .aux
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("auxiliary mechanism needs aux-tagged inputs".into()))?;
        self.lift(s, &input.dist)
    }
}

struct Candidate {
    left: String,
    right: String,
    a: FiniteDistribution,
    b: FiniteDistribution,
    distance: Option<f64>,
}

fn evaluate(notion: Notion, divergence: &Divergence, metric: Option<&str>, cands: Vec<Candidate>) -> Result<AuditReport> {
    if cands.is_empty() {
        return Err(Error::EmptyRelation);
    }
    let mut per_pair = Vec::with_capacity(cands.len());
    for (index, c) in cands.into_iter().enumerate() {
        let forward = divergence.evaluate(&c.a, &c.b)?;
        let backward = divergence.evaluate(&c.b, &c.a)?;
        let raw = forward.max(backward);
        let value = match c.distance {
            None => raw,
            Some(d) if d <= TAU_NUM => {
                if raw <= TAU_NUM {
                    raw.min(0.0)
                } else {
                    f64::INFINITY
                }
            }
            Some(d) => raw / d,
        };
        per_pair.push(PairRecord {
            index,
            left: c.left,
            right: c.right,
            forward,
            backward,
            distance: c.distance,
            value,
            bound: None,
            pass: true,
        });
    }
    Ok(AuditReport::from_records(
        notion,
        divergence.name(),
        metric.map(str::to_owned),
        per_pair,
    ))
}

/// `max_{(x,x') ∈ Φ} max(D(A(x)‖A(x')), D(A(x')‖A(x)))`.
pub fn audit_div_dp(kernel: &StochasticKernel, phi: &PointRelation, divergence: &Divergence) -> Result<AuditReport> {
    ensure_same(kernel.inputs(), phi.ground(), "relation and kernel inputs")?;
    let g = phi.ground();
    let cands = phi
        .pairs()
        .iter()
        .map(|&(x, y)| Candidate {
            left: g.label(x).to_string(),
            right: g.label(y).to_string(),
            a: kernel.row(x).clone(),
            b: kernel.row(y).clone(),
            distance: None,
        })
        .collect();
    evaluate(Notion::Dp, divergence, None, cands)
}

/// Like [`audit_div_dp`] with every value divided by `d(x, x')`.
pub fn audit_div_xdp(
    kernel: &StochasticKernel,
    phi: &PointRelation,
    d: &GroundMetric,
    divergence: &Divergence,
) -> Result<AuditReport> {
    ensure_same(kernel.inputs(), phi.ground(), "relation and kernel inputs")?;
    let g = phi.ground();
    let cost = d.cross_costs(g, g)?;
    let cands = phi
        .pairs()
        .iter()
        .map(|&(x, y)| Candidate {
            left: g.label(x).to_string(),
            right: g.label(y).to_string(),
            a: kernel.row(x).clone(),
            b: kernel.row(y).clone(),
            distance: Some(cost.get(x, y)),
        })
        .collect();
    evaluate(Notion::Xdp, divergence, Some("d"), cands)
}

fn side_name(t: &TaggedDistribution, side: &str, i: usize) -> String {
    match &t.aux {
        Some(s) => format!("{s}@{side}[{i}]"),
        None => format!("{side}[{i}]"),
    }
}

fn lifted_candidates<M: Lifting + ?Sized>(
    mech: &M,
    psi: &DistributionPairRelation,
    metric: Option<&DistributionMetric>,
) -> Result<Vec<Candidate>> {
    psi.pairs()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let distance = metric.map(|m| m.distance(&p.left.dist, &p.right.dist)).transpose()?;
            Ok(Candidate {
                left: side_name(&p.left, "lhs", i),
                right: side_name(&p.right, "rhs", i),
                a: mech.lift_tagged(&p.left)?,
                b: mech.lift_tagged(&p.right)?,
                distance,
            })
        })
        .collect()
}

/// Divergence between lifted outputs, for every pair of `Ψ`.
pub fn audit_distp<M: Lifting + ?Sized>(
    mech: &M,
    psi: &DistributionPairRelation,
    divergence: &Divergence,
) -> Result<AuditReport> {
    if psi.is_empty() {
        return Err(Error::EmptyRelation);
    }
    evaluate(Notion::DistP, divergence, None, lifted_candidates(mech, psi, None)?)
}

/// Divergence between lifted outputs divided by the input distance.
pub fn audit_xdistp<M: Lifting + ?Sized>(
    mech: &M,
    psi: &DistributionPairRelation,
    metric: DistributionMetric,
    divergence: &Divergence,
) -> Result<AuditReport> {
    if psi.is_empty() {
        return Err(Error::EmptyRelation);
    }
    let cands = lifted_candidates(mech, psi, Some(&metric))?;
    evaluate(Notion::XDistP, divergence, Some(metric.name()), cands)
}
