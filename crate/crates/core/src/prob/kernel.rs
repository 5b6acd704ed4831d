use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use super::{ensure_same, FiniteDistribution, Ground, Label};
use crate::error::{Error, Result};
use crate::tolerance::TAU_MASS;

/// A row-stochastic matrix `X -> ΔY`: one output distribution per input.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticKernel {
    inputs: Arc<Ground>,
    outputs: Arc<Ground>,
    rows: Vec<FiniteDistribution>,
}

impl StochasticKernel {
    pub fn new(inputs: Arc<Ground>, outputs: Arc<Ground>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != inputs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows for {} inputs",
                rows.len(),
                inputs.len()
            )));
        }
        let rows = rows
            .into_iter()
            .map(|r| FiniteDistribution::new(outputs.clone(), r))
            .collect::<Result<Vec<_>>>()?;
        Ok(StochasticKernel { inputs, outputs, rows })
    }

    pub fn from_rows(inputs: Arc<Ground>, rows: Vec<FiniteDistribution>) -> Result<Self> {
        let outputs = rows
            .first()
            .map(|r| r.ground().clone())
            .ok_or_else(|| Error::InvalidParameter("kernel needs at least one row".into()))?;
        if rows.len() != inputs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows for {} inputs",
                rows.len(),
                inputs.len()
            )));
        }
        for r in &rows {
            ensure_same(&outputs, r.ground(), "kernel rows")?;
        }
        Ok(StochasticKernel { inputs, outputs, rows })
    }

    pub fn identity(ground: Arc<Ground>) -> Self {
        let rows = (0..ground.len())
            .map(|i| FiniteDistribution::point_at(i, ground.clone()))
            .collect();
        StochasticKernel {
            inputs: ground.clone(),
            outputs: ground,
            rows,
        }
    }

    /// Every input is mapped to `output`.
    pub fn constant(inputs: Arc<Ground>, output: FiniteDistribution) -> Self {
        let rows = vec![output.clone(); inputs.len()];
        StochasticKernel {
            inputs,
            outputs: output.ground().clone(),
            rows,
        }
    }

    pub fn inputs(&self) -> &Arc<Ground> {
        &self.inputs
    }

    pub fn outputs(&self) -> &Arc<Ground> {
        &self.outputs
    }

    pub fn row(&self, x: usize) -> &FiniteDistribution {
        &self.rows[x]
    }

    pub fn row_of(&self, x: &Label) -> Result<&FiniteDistribution> {
        Ok(&self.rows[self.inputs.index_of(x)?])
    }

    pub fn rows(&self) -> &[FiniteDistribution] {
        &self.rows
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.rows[x].get(y)
    }

    /// The lifting `A#(λ)[y] = Σ_x λ[x] A(x)[y]`.
    pub fn lift(&self, lambda: &FiniteDistribution) -> Result<FiniteDistribution> {
        ensure_same(&self.inputs, lambda.ground(), "lift input")?;
        let mut out = vec![0.0; self.outputs.len()];
        for (w, row) in lambda.probs().iter().zip(&self.rows) {
            if *w == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(row.probs()) {
                *o += w * p;
            }
        }
        FiniteDistribution::with_tolerance(self.outputs.clone(), out, TAU_MASS)
    }

    /// `(B ∘ A)(x)[z] = Σ_y A(x)[y] B(y)[z]` where `self` is `A`.
    pub fn then(&self, next: &StochasticKernel) -> Result<StochasticKernel> {
        ensure_same(&self.outputs, &next.inputs, "post-processing kernel inputs")?;
        let rows = self
            .rows
            .iter()
            .map(|r| next.lift(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(StochasticKernel {
            inputs: self.inputs.clone(),
            outputs: next.outputs.clone(),
            rows,
        })
    }
}

pub fn lift(kernel: &StochasticKernel, lambda: &FiniteDistribution) -> Result<FiniteDistribution> {
    kernel.lift(lambda)
}

#[derive(Serialize, Deserialize)]
struct RawKernel {
    inputs: Vec<Label>,
    outputs: Vec<Label>,
    rows: Vec<Vec<f64>>,
}

impl Serialize for StochasticKernel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawKernel {
            inputs: self.inputs.labels().to_vec(),
            outputs: self.outputs.labels().to_vec(),
            rows: self.rows.iter().map(|r| r.probs().to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StochasticKernel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawKernel::deserialize(d)?;
        let build = || -> Result<StochasticKernel> {
            StochasticKernel::new(Ground::new(raw.inputs)?, Ground::new(raw.outputs)?, raw.rows)
        };
        build().map_err(serde::de::Error::custom)
    }
}
