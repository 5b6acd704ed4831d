use serde::Serialize;

use super::{audit_distp, AuditReport};
use crate::divergence::{max_divergence, Divergence, FDivergence};
use crate::error::{Error, Result};
use crate::mechanism::CouplingMechanismSpec;
use crate::prob::{ensure_same, DistributionPair, DistributionPairRelation, FiniteDistribution, Label, TaggedDistribution};
use crate::serde_ext::{ext_f64, ext_f64_opt};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpBoundCheck {
    pub divergence: String,
    /// Which of the three bounds: `2ε`, `2ε·e^ε` or `e^ε·f(e^{2ε})`.
    pub form: &'static str,
    #[serde(with = "ext_f64")]
    pub bound: f64,
    /// `e^ε · max(f(e^{2ε}), f(e^{-2ε}))`, the bound with both endpoints of
    /// the likelihood-ratio range. Only set for f-divergences.
    #[serde(serialize_with = "ext_f64_opt::serialize")]
    pub range_bound: Option<f64>,
    #[serde(with = "ext_f64")]
    pub observed: f64,
    pub pass: bool,
    pub report: AuditReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpTheoremReport {
    #[serde(with = "ext_f64")]
    pub epsilon: f64,
    pub checks: Vec<CpBoundCheck>,
    pub pass: bool,
}

impl CpTheoremReport {
    pub fn check(&self, divergence: &str, form: &str) -> Option<&CpBoundCheck> {
        self.checks.iter().find(|c| c.divergence == divergence && c.form == form)
    }
}

/// `max_s max(D∞(λ̂_s‖λ_s), D∞(λ_s‖λ̂_s))`.
pub fn closeness_epsilon(spec: &CouplingMechanismSpec, actual: &[(Label, FiniteDistribution)]) -> Result<f64> {
    let mut eps = 0.0_f64;
    for (s, lambda) in actual {
        let lhat = &spec.entry(s)?.approx_input;
        ensure_same(lhat.ground(), lambda.ground(), "approximate and actual inputs")?;
        let e = max_divergence(lhat, lambda)?.max(max_divergence(lambda, lhat)?);
        if e.is_infinite() {
            return Err(Error::InfiniteEpsilon(s.to_string()));
        }
        eps = eps.max(e);
    }
    Ok(eps)
}

/// Audits the coupling mechanism of `spec` on all ordered pairs of the
/// actual inputs `(s, λ_s)` against the three closeness bounds:
/// `D∞ <= 2ε`, `KL <= 2ε e^ε` and `Df <= e^ε f(e^{2ε})` for each f.
pub fn check_cp_theorem(
    spec: &CouplingMechanismSpec,
    actual: &[(Label, FiniteDistribution)],
    tol: f64,
) -> Result<CpTheoremReport> {
    if actual.is_empty() {
        return Err(Error::EmptyRelation);
    }
    let eps = closeness_epsilon(spec, actual)?;
    let mech = spec.to_aux_kernel()?;
    let tagged: Vec<TaggedDistribution> = actual
        .iter()
        .map(|(s, l)| TaggedDistribution::tagged(s.clone(), l.clone()))
        .collect();
    let mut pairs = Vec::with_capacity(tagged.len() * tagged.len());
    for a in &tagged {
        for b in &tagged {
            pairs.push(DistributionPair {
                left: a.clone(),
                right: b.clone(),
            });
        }
    }
    let psi = DistributionPairRelation::new(pairs)?;

    let e = eps.exp();
    let mut checks = Vec::new();
    let mut push = |div: Divergence, form: &'static str, bound: f64, range_bound: Option<f64>| -> Result<()> {
        let bound = bound + 0.0;
        let report = audit_distp(&mech, &psi, &div)?.with_claim(bound, tol);
        checks.push(CpBoundCheck {
            divergence: div.name(),
            form,
            bound,
            range_bound,
            observed: report.observed_eps,
            pass: report.passed(),
            report,
        });
        Ok(())
    };
    push(Divergence::MAX, "2ε", 2.0 * eps, None)?;
    push(FDivergence::Kl.into(), "2ε·e^ε", 2.0 * eps * e, None)?;
    for f in FDivergence::TABLE {
        let hi = f.generator((2.0 * eps).exp());
        let lo = f.generator((-2.0 * eps).exp());
        push(f.into(), "e^ε·f(e^{2ε})", e * hi, Some(e * hi.max(lo)))?;
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(CpTheoremReport { epsilon: eps, checks, pass })
}
