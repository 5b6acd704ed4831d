use std::sync::Arc;

use serde::Serialize;

use crate::audit::audit_div_xdp;
use crate::divergence::Divergence;
use crate::error::{Error, Result};
use crate::prob::{ensure_same, Ground, GroundMetric, PointRelation, StochasticKernel};
use crate::serde_ext::ext_f64;

/// `A(x)[x] = e^ε/(e^ε+k-1)` and `1/(e^ε+k-1)` elsewhere.
pub fn randomized_response(ground: Arc<Ground>, epsilon: f64) -> Result<StochasticKernel> {
    if !(epsilon >= 0.0) || epsilon.is_infinite() {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let k = ground.len();
    if k < 2 {
        return Err(Error::InvalidParameter("randomized response needs at least two labels".into()));
    }
    // divide through by e^ε so large ε stays finite
    let other = (-epsilon).exp();
    let z = 1.0 + (k - 1) as f64 * other;
    let rows = (0..k)
        .map(|x| (0..k).map(|y| if x == y { 1.0 / z } else { other / z }).collect())
        .collect();
    StochasticKernel::new(ground.clone(), ground, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricMechanism {
    pub kernel: StochasticKernel,
    /// Audited XDP constant of `kernel` against `d` over all pairs.
    #[serde(with = "ext_f64")]
    pub effective_epsilon: f64,
}

/// `A(x)[y] ∝ e^{-ε d(x,y)}`, rows normalized.
pub fn geometric_mechanism(ground: Arc<Ground>, epsilon: f64, d: &GroundMetric) -> Result<GeometricMechanism> {
    if !(epsilon > 0.0) || epsilon.is_infinite() {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    ensure_same(&ground, d.ground(), "geometric mechanism metric")?;
    let n = ground.len();
    let rows = (0..n)
        .map(|x| {
            let w: Vec<f64> = (0..n).map(|y| (-epsilon * d.cost(x, y)).exp()).collect();
            let z: f64 = w.iter().sum();
            w.into_iter().map(|v| v / z).collect()
        })
        .collect();
    let kernel = StochasticKernel::new(ground.clone(), ground.clone(), rows)?;
    let effective_epsilon = audit_div_xdp(&kernel, &PointRelation::full(ground), d, &Divergence::MAX)?.observed_eps;
    Ok(GeometricMechanism { kernel, effective_epsilon })
}
