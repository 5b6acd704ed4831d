use serde::{Deserialize, Serialize};

use super::AuxIndexedKernel;
use crate::error::{Error, Result};
use crate::prob::{ensure_same, FiniteDistribution, GroundMetric, Label, StochasticKernel};
use crate::tolerance::{TAU_MASS, TAU_ZERO};
use crate::transport::{emd, northwest_corner, validate_coupling, wasserstein_inf, Coupling};

/// What a CP row does for an input the approximate distribution gives no mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    #[default]
    Error,
    SampleTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxCoupling {
    pub s: Label,
    pub approx_input: FiniteDistribution,
    pub coupling: Coupling,
}

/// Target `μ` plus one coupling `γ_s ∈ cp(λ̂_s, μ)` per auxiliary input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct CouplingMechanismSpec {
    pub target: FiniteDistribution,
    pub aux: Vec<AuxCoupling>,
    #[serde(default)]
    pub fallback: Fallback,
}

#[derive(Deserialize)]
struct RawSpec {
    target: FiniteDistribution,
    aux: Vec<AuxCoupling>,
    #[serde(default)]
    fallback: Fallback,
}

impl TryFrom<RawSpec> for CouplingMechanismSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        CouplingMechanismSpec::new(raw.target, raw.aux, raw.fallback)
    }
}

impl CouplingMechanismSpec {
    pub fn new(target: FiniteDistribution, aux: Vec<AuxCoupling>, fallback: Fallback) -> Result<Self> {
        if aux.is_empty() {
            return Err(Error::InvalidParameter("coupling mechanism needs at least one auxiliary input".into()));
        }
        for (i, a) in aux.iter().enumerate() {
            if aux[..i].iter().any(|b| b.s == a.s) {
                return Err(Error::DuplicateLabel(a.s.to_string()));
            }
            ensure_same(aux[0].approx_input.ground(), a.approx_input.ground(), "approximate inputs")?;
            if !validate_coupling(&a.coupling, &a.approx_input, &target)? {
                return Err(Error::InvalidCoupling(format!(
                    "coupling for `{}` does not have marginals (approx_input, target)",
                    a.s
                )));
            }
        }
        Ok(CouplingMechanismSpec { target, aux, fallback })
    }

    pub fn aux_labels(&self) -> Vec<Label> {
        self.aux.iter().map(|a| a.s.clone()).collect()
    }

    pub fn entry(&self, s: &Label) -> Result<&AuxCoupling> {
        self.aux
            .iter()
            .find(|a| &a.s == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }

    pub fn kernel(&self, s: &Label) -> Result<StochasticKernel> {
        cp_kernel(self, s)
    }

    pub fn to_aux_kernel(&self) -> Result<AuxIndexedKernel> {
        let kernels = self
            .aux
            .iter()
            .map(|a| cp_kernel(self, &a.s))
            .collect::<Result<Vec<_>>>()?;
        AuxIndexedKernel::new(self.aux_labels(), kernels)
    }
}

/// How each `γ_s` is chosen.
#[derive(Debug, Clone)]
pub enum CouplingMode<'a> {
    /// An EMD-optimal coupling (utility-optimal CP).
    Optimal(&'a GroundMetric),
    /// A W∞-optimal coupling, minimising the worst-case loss.
    OptimalWorstCase(&'a GroundMetric),
    NorthWest,
    /// Couplings supplied by the caller, in the order of the inputs.
    Given(Vec<Coupling>),
}

pub fn build_coupling_mechanism(
    target: FiniteDistribution,
    approx_inputs: Vec<(Label, FiniteDistribution)>,
    mode: CouplingMode,
    fallback: Fallback,
) -> Result<CouplingMechanismSpec> {
    let mut given = match &mode {
        CouplingMode::Given(cs) => {
            if cs.len() != approx_inputs.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} couplings for {} auxiliary inputs",
                    cs.len(),
                    approx_inputs.len()
                )));
            }
            cs.clone().into_iter()
        }
        _ => Vec::new().into_iter(),
    };
    let aux = approx_inputs
        .into_iter()
        .map(|(s, lhat)| {
            let coupling = match &mode {
                CouplingMode::Optimal(d) => emd(&lhat, &target, d)?.coupling,
                CouplingMode::OptimalWorstCase(d) => wasserstein_inf(&lhat, &target, d)?.coupling,
                CouplingMode::NorthWest => northwest_corner(&lhat, &target),
                CouplingMode::Given(_) => given.next().expect("length checked above"),
            };
            Ok(AuxCoupling {
                s,
                approx_input: lhat,
                coupling,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CouplingMechanismSpec::new(target, aux, fallback)
}

/// `CP(s, x)[y] = γ_s[x, y] / λ̂_s[x]`.
///
/// Each row is normalised by the coupling's own row mass, which equals
/// `λ̂_s[x]` up to the marginal tolerance.
pub fn cp_kernel(spec: &CouplingMechanismSpec, s: &Label) -> Result<StochasticKernel> {
    let entry = spec.entry(s)?;
    let inputs = entry.approx_input.ground().clone();
    let gamma = &entry.coupling;
    let rows = (0..inputs.len())
        .map(|x| {
            if entry.approx_input.get(x) <= TAU_ZERO {
                return match spec.fallback {
                    Fallback::SampleTarget => Ok(spec.target.clone()),
                    Fallback::Error => Err(Error::UnsupportedInput {
                        aux: s.to_string(),
                        input: inputs.label(x).to_string(),
                    }),
                };
            }
            let row = gamma.row(x);
            let mass: f64 = row.iter().sum();
            let probs = row.iter().map(|&g| g / mass).collect();
            FiniteDistribution::with_tolerance(spec.target.ground().clone(), probs, TAU_MASS)
        })
        .collect::<Result<Vec<_>>>()?;
    StochasticKernel::from_rows(inputs, rows)
}
