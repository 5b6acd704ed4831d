use serde::Serialize;

use crate::serde_ext::{ext_f64, ext_f64_opt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Notion {
    Dp,
    Xdp,
    DistP,
    XDistP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairId {
    pub index: usize,
    pub left: String,
    pub right: String,
}

/// One audited pair. `value` is `max(forward, backward)`, divided by
/// `distance` for the extended notions; `bound` is the claimed ε.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub index: usize,
    pub left: String,
    pub right: String,
    #[serde(with = "ext_f64")]
    pub forward: f64,
    #[serde(with = "ext_f64")]
    pub backward: f64,
    #[serde(serialize_with = "ext_f64_opt::serialize", skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(with = "ext_f64")]
    pub value: f64,
    #[serde(serialize_with = "ext_f64_opt::serialize")]
    pub bound: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub notion: Notion,
    pub divergence: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    #[serde(serialize_with = "ext_f64_opt::serialize")]
    pub claimed_eps: Option<f64>,
    #[serde(with = "ext_f64")]
    pub observed_eps: f64,
    pub worst_pair: Option<PairId>,
    pub per_pair: Vec<PairRecord>,
    pub verdict: Verdict,
}

impl AuditReport {
    pub(crate) fn from_records(
        notion: Notion,
        divergence: String,
        metric: Option<String>,
        per_pair: Vec<PairRecord>,
    ) -> Self {
        let worst = per_pair
            .iter()
            .fold(None::<&PairRecord>, |best, p| match best {
                Some(b) if b.value >= p.value => Some(b),
                _ => Some(p),
            })
            .map(|p| PairId {
                index: p.index,
                left: p.left.clone(),
                right: p.right.clone(),
            });
        let observed_eps = per_pair.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
        AuditReport {
            notion,
            divergence,
            metric,
            claimed_eps: None,
            observed_eps,
            worst_pair: worst,
            per_pair,
            verdict: Verdict::Pass,
        }
    }

    /// Judges every pair against `claimed + tol`.
    pub fn with_claim(mut self, claimed: f64, tol: f64) -> Self {
        for p in &mut self.per_pair {
            p.bound = Some(claimed);
            p.pass = p.value <= claimed + tol;
        }
        self.claimed_eps = Some(claimed);
        self.verdict = if self.observed_eps <= claimed + tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}
