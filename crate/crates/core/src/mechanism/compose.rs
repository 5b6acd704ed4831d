use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{ensure_same, Ground, Label, StochasticKernel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub y0: Label,
    pub kernel: StochasticKernel,
}

/// `A1 : Y0 × X -> ΔY1`, as one kernel per first-stage output `y0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAdaptive", into = "RawAdaptive")]
pub struct AdaptiveKernel {
    y0: Arc<Ground>,
    branches: Vec<StochasticKernel>,
}

#[derive(Serialize, Deserialize)]
struct RawAdaptive {
    branches: Vec<Branch>,
}

impl TryFrom<RawAdaptive> for AdaptiveKernel {
    type Error = Error;

    fn try_from(raw: RawAdaptive) -> Result<Self> {
        let (labels, kernels): (Vec<_>, Vec<_>) = raw.branches.into_iter().map(|b| (b.y0, b.kernel)).unzip();
        AdaptiveKernel::new(Ground::new(labels)?, kernels)
    }
}

impl From<AdaptiveKernel> for RawAdaptive {
    fn from(k: AdaptiveKernel) -> Self {
        RawAdaptive {
            branches: k
                .y0
                .labels()
                .iter()
                .cloned()
                .zip(k.branches)
                .map(|(y0, kernel)| Branch { y0, kernel })
                .collect(),
        }
    }
}

impl AdaptiveKernel {
    pub fn new(y0: Arc<Ground>, branches: Vec<StochasticKernel>) -> Result<Self> {
        if branches.len() != y0.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} branches for {} first-stage outputs",
                branches.len(),
                y0.len()
            )));
        }
        for b in &branches[1..] {
            ensure_same(branches[0].inputs(), b.inputs(), "branch inputs")?;
            ensure_same(branches[0].outputs(), b.outputs(), "branch outputs")?;
        }
        Ok(AdaptiveKernel { y0, branches })
    }

    /// The same kernel whatever `y0` was.
    pub fn constant(y0: Arc<Ground>, kernel: StochasticKernel) -> Self {
        let branches = vec![kernel; y0.len()];
        AdaptiveKernel { y0, branches }
    }

    pub fn y0(&self) -> &Arc<Ground> {
        &self.y0
    }

    pub fn branches(&self) -> &[StochasticKernel] {
        &self.branches
    }

    pub fn branch(&self, y0: usize) -> &StochasticKernel {
        &self.branches[y0]
    }

    pub fn inputs(&self) -> &Arc<Ground> {
        self.branches[0].inputs()
    }

    pub fn outputs(&self) -> &Arc<Ground> {
        self.branches[0].outputs()
    }
}

fn joint_rows(a0: &StochasticKernel, a1: &AdaptiveKernel, x0: usize, x1: usize) -> Vec<f64> {
    let n1 = a1.outputs().len();
    let mut row = Vec::with_capacity(a0.outputs().len() * n1);
    for (y0, &p0) in a0.row(x0).probs().iter().enumerate() {
        row.extend(a1.branch(y0).row(x1).probs().iter().map(|&p1| p0 * p1));
    }
    row
}

fn marginal(row: &[f64], n1: usize) -> Vec<f64> {
    let mut out = vec![0.0; n1];
    for chunk in row.chunks(n1) {
        for (o, p) in out.iter_mut().zip(chunk) {
            *o += p;
        }
    }
    out
}

/// Sequential composition `A1 •∘ A0`. The output is the joint `(y0, y1)`
/// unless `marginalize` is set, in which case only `y1` is kept.
pub fn seq_compose(a0: &StochasticKernel, a1: &AdaptiveKernel, marginalize: bool) -> Result<StochasticKernel> {
    ensure_same(a0.outputs(), a1.y0(), "adaptive branches and first-stage outputs")?;
    ensure_same(a0.inputs(), a1.inputs(), "adaptive kernel inputs")?;
    let n1 = a1.outputs().len();
    let rows = (0..a0.inputs().len())
        .map(|x| {
            let joint = joint_rows(a0, a1, x, x);
            if marginalize {
                marginal(&joint, n1)
            } else {
                joint
            }
        })
        .collect();
    let outputs = if marginalize {
        a1.outputs().clone()
    } else {
        Ground::product(a0.outputs(), a1.outputs())
    };
    StochasticKernel::new(a0.inputs().clone(), outputs, rows)
}

/// `(A1 ⊗∘ A0)(x0, x1)`: inputs `X0 × X1`, joint outputs `(y0, y1)`.
pub fn liftseq_compose(a0: &StochasticKernel, a1: &AdaptiveKernel) -> Result<StochasticKernel> {
    ensure_same(a0.outputs(), a1.y0(), "adaptive branches and first-stage outputs")?;
    let (n0, n1) = (a0.inputs().len(), a1.inputs().len());
    let rows = (0..n0)
        .flat_map(|x0| (0..n1).map(move |x1| (x0, x1)))
        .map(|(x0, x1)| joint_rows(a0, a1, x0, x1))
        .collect();
    StochasticKernel::new(
        Ground::product(a0.inputs(), a1.inputs()),
        Ground::product(a0.outputs(), a1.outputs()),
        rows,
    )
}

/// `B ∘ A`.
pub fn post_process(a: &StochasticKernel, b: &StochasticKernel) -> Result<StochasticKernel> {
    a.then(b)
}

/// `A ∘ T` for a transformation `T` acting on inputs by lifting.
pub fn pre_process(t: &StochasticKernel, a: &StochasticKernel) -> Result<StochasticKernel> {
    t.then(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::randomized_response;
    use crate::prob::FiniteDistribution;

    #[test]
    fn constant_second_stage_is_a_product() {
        let g = Ground::indexed(2);
        let a0 = randomized_response(g.clone(), 1.0).unwrap();
        let nu = FiniteDistribution::new(Ground::indexed(3), vec![0.1, 0.6, 0.3]).unwrap();
        let a1 = AdaptiveKernel::constant(g.clone(), StochasticKernel::constant(g.clone(), nu.clone()));
        let joint = seq_compose(&a0, &a1, false).unwrap();
        for x in 0..2 {
            assert!(joint.row(x).approx_eq(&a0.row(x).product(&nu), 1e-15));
        }
        let marg = seq_compose(&a0, &a1, true).unwrap();
        assert!(marg.row(0).approx_eq(&nu, 1e-15));
    }

    #[test]
    fn identity_then_point_branch_is_diagonal() {
        let g = Ground::indexed(3);
        let id = StochasticKernel::identity(g.clone());
        let branches = (0..3)
            .map(|y| StochasticKernel::constant(g.clone(), FiniteDistribution::point_at(y, g.clone())))
            .collect();
        let a1 = AdaptiveKernel::new(g.clone(), branches).unwrap();
        let joint = seq_compose(&id, &a1, false).unwrap();
        for x in 0..3 {
            assert_eq!(joint.get(x, x * 3 + x), 1.0);
        }
    }

    #[test]
    fn liftseq_matches_double_sum_on_products() {
        let g = Ground::indexed(2);
        let a0 = randomized_response(g.clone(), 0.5).unwrap();
        let a1 = AdaptiveKernel::new(
            g.clone(),
            vec![randomized_response(g.clone(), 1.0).unwrap(), randomized_response(g.clone(), 2.0).unwrap()],
        )
        .unwrap();
        let k = liftseq_compose(&a0, &a1).unwrap();
        let l0 = FiniteDistribution::new(g.clone(), vec![0.3, 0.7]).unwrap();
        let l1 = FiniteDistribution::new(g.clone(), vec![0.9, 0.1]).unwrap();
        let out = k.lift(&l0.product(&l1)).unwrap();
        for y0 in 0..2 {
            for y1 in 0..2 {
                let mut expect = 0.0;
                for x0 in 0..2 {
                    for x1 in 0..2 {
                        expect += l0.get(x0) * l1.get(x1) * a0.get(x0, y0) * a1.branch(y0).get(x1, y1);
                    }
                }
                assert!((out.get(y0 * 2 + y1) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn adaptive_json_round_trip() {
        let g = Ground::indexed(2);
        let a1 = AdaptiveKernel::constant(g.clone(), randomized_response(g, 1.0).unwrap());
        let json = serde_json::to_string(&a1).unwrap();
        assert!(json.starts_with(r#"{"branches":[{"y0":"0","kernel":"#));
        let back: AdaptiveKernel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a1);
    }

    #[test]
    fn grounds_must_line_up() {
        let a0 = randomized_response(Ground::indexed(2), 1.0).unwrap();
        let a1 = AdaptiveKernel::constant(Ground::indexed(3), randomized_response(Ground::indexed(2), 1.0).unwrap());
        assert!(matches!(seq_compose(&a0, &a1, false), Err(Error::GroundMismatch(_))));
    }
}
