//! Obfuscation mechanisms and their compositions.

mod baseline;
mod compose;
mod coupling_mech;
mod stability;

pub use baseline::{geometric_mechanism, randomized_response, GeometricMechanism};
pub use compose::{liftseq_compose, post_process, pre_process, seq_compose, AdaptiveKernel, Branch};
pub use coupling_mech::{build_coupling_mechanism, cp_kernel, AuxCoupling, CouplingMechanismSpec, CouplingMode, Fallback};
pub use stability::{is_metric_stable, is_relation_stable};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{ensure_same, FiniteDistribution, Ground, Label, StochasticKernel};

/// A mechanism `S × X -> ΔY`: one kernel per auxiliary input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAux", into = "RawAux")]
pub struct AuxIndexedKernel {
    aux: Vec<Label>,
    kernels: Vec<StochasticKernel>,
}

#[derive(Serialize, Deserialize)]
struct RawAux {
    aux: Vec<AuxEntry>,
}

#[derive(Serialize, Deserialize)]
struct AuxEntry {
    s: Label,
    kernel: StochasticKernel,
}

impl TryFrom<RawAux> for AuxIndexedKernel {
    type Error = Error;

    fn try_from(raw: RawAux) -> Result<Self> {
        let (aux, kernels) = raw.aux.into_iter().map(|e| (e.s, e.kernel)).unzip();
        AuxIndexedKernel::new(aux, kernels)
    }
}

impl From<AuxIndexedKernel> for RawAux {
    fn from(k: AuxIndexedKernel) -> Self {
        RawAux {
            aux: k
                .aux
                .into_iter()
                .zip(k.kernels)
                .map(|(s, kernel)| AuxEntry { s, kernel })
                .collect(),
        }
    }
}

impl AuxIndexedKernel {
    pub fn new(aux: Vec<Label>, kernels: Vec<StochasticKernel>) -> Result<Self> {
        if aux.is_empty() || aux.len() != kernels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} auxiliary labels for {} kernels",
                aux.len(),
                kernels.len()
            )));
        }
        for (i, s) in aux.iter().enumerate() {
            if aux[..i].contains(s) {
                return Err(Error::DuplicateLabel(s.to_string()));
            }
        }
        for k in &kernels[1..] {
            ensure_same(kernels[0].inputs(), k.inputs(), "auxiliary kernel inputs")?;
            ensure_same(kernels[0].outputs(), k.outputs(), "auxiliary kernel outputs")?;
        }
        Ok(AuxIndexedKernel { aux, kernels })
    }

    pub fn aux(&self) -> &[Label] {
        &self.aux
    }

    pub fn kernels(&self) -> &[StochasticKernel] {
        &self.kernels
    }

    pub fn inputs(&self) -> &Arc<Ground> {
        self.kernels[0].inputs()
    }

    pub fn outputs(&self) -> &Arc<Ground> {
        self.kernels[0].outputs()
    }

    pub fn kernel(&self, s: &Label) -> Result<&StochasticKernel> {
        self.aux
            .iter()
            .position(|a| a == s)
            .map(|i| &self.kernels[i])
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }

    /// `A#(s, λ)`.
    pub fn lift(&self, s: &Label, lambda: &FiniteDistribution) -> Result<FiniteDistribution> {
        self.kernel(s)?.lift(lambda)
    }
}
