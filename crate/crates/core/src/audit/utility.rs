use crate::error::Result;
use crate::prob::{ensure_same, FiniteDistribution, GroundMetric, StochasticKernel};
use crate::tolerance::TAU_ZERO;

/// `Σ_{x,y} λ[x] A(x)[y] d(x, y)`. `d` must cover the labels of both the
/// input and output grounds.
pub fn expected_utility_loss(kernel: &StochasticKernel, lambda: &FiniteDistribution, d: &GroundMetric) -> Result<f64> {
    ensure_same(kernel.inputs(), lambda.ground(), "utility input")?;
    let cost = d.cross_costs(kernel.inputs(), kernel.outputs())?;
    let mut total = 0.0;
    for (x, &w) in lambda.probs().iter().enumerate() {
        for (y, &p) in kernel.row(x).probs().iter().enumerate() {
            total += w * p * cost.get(x, y);
        }
    }
    Ok(total)
}

/// Largest `d(x, y)` over pairs that occur with positive probability.
pub fn worst_case_loss(kernel: &StochasticKernel, lambda: &FiniteDistribution, d: &GroundMetric) -> Result<f64> {
    ensure_same(kernel.inputs(), lambda.ground(), "utility input")?;
    let cost = d.cross_costs(kernel.inputs(), kernel.outputs())?;
    let mut worst = 0.0_f64;
    for (x, &w) in lambda.probs().iter().enumerate() {
        for (y, &p) in kernel.row(x).probs().iter().enumerate() {
            if w * p > TAU_ZERO {
                worst = worst.max(cost.get(x, y));
            }
        }
    }
    Ok(worst)
}
