use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use super::CostMatrix;
use crate::error::{Error, Result};
use crate::prob::{FiniteDistribution, Ground, Label};
use crate::tolerance::{TAU_MASS, TAU_ZERO};

/// A joint distribution over `X0 × X1`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    rows: Arc<Ground>,
    cols: Arc<Ground>,
    mass: Vec<f64>,
}

impl Coupling {
    pub fn new(rows: Arc<Ground>, cols: Arc<Ground>, mass: Vec<Vec<f64>>) -> Result<Self> {
        if mass.len() != rows.len() || mass.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::DimensionMismatch(format!(
                "coupling mass must be {}x{}",
                rows.len(),
                cols.len()
            )));
        }
        Self::from_flat(rows, cols, mass.into_iter().flatten().collect())
    }

    pub(crate) fn from_flat(rows: Arc<Ground>, cols: Arc<Ground>, mut mass: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(mass.len(), rows.len() * cols.len());
        for m in mass.iter_mut() {
            if !m.is_finite() || *m < -TAU_ZERO {
                return Err(Error::InvalidCoupling(format!("mass entry {m}")));
            }
            if *m < 0.0 {
                *m = 0.0;
            }
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 2.0 * TAU_MASS {
            return Err(Error::MassOutOfTolerance {
                mass: total,
                tolerance: 2.0 * TAU_MASS,
            });
        }
        Ok(Coupling { rows, cols, mass })
    }

    /// `λ ⊗ μ`.
    pub fn independent(lambda: &FiniteDistribution, mu: &FiniteDistribution) -> Self {
        let mass = lambda
            .probs()
            .iter()
            .flat_map(|p| mu.probs().iter().map(move |q| p * q))
            .collect();
        Coupling {
            rows: lambda.ground().clone(),
            cols: mu.ground().clone(),
            mass,
        }
    }

    pub fn rows(&self) -> &Arc<Ground> {
        &self.rows
    }

    pub fn cols(&self) -> &Arc<Ground> {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.cols.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.cols.len();
        &self.mass[i * n..(i + 1) * n]
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.mass.chunks(self.cols.len()).map(<[f64]>::to_vec).collect()
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        self.mass.chunks(self.cols.len()).map(|r| r.iter().sum()).collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        let n = self.cols.len();
        let mut out = vec![0.0; n];
        for (k, m) in self.mass.iter().enumerate() {
            out[k % n] += m;
        }
        out
    }

    /// Cells with mass above `TAU_ZERO`.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let n = self.cols.len();
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > TAU_ZERO)
            .map(|(k, _)| (k / n, k % n))
            .collect()
    }

    /// `Σ c(x0,x1) γ[x0,x1]`.
    pub fn cost(&self, cost: &CostMatrix) -> f64 {
        self.mass.iter().zip(cost.data()).map(|(m, c)| m * c).sum()
    }

    /// Largest cost among support cells, 0 for an empty support.
    pub fn max_cost_on_support(&self, cost: &CostMatrix) -> f64 {
        self.support()
            .into_iter()
            .map(|(i, j)| cost.get(i, j))
            .fold(0.0, f64::max)
    }

    /// Both marginal constraints within `TAU_MASS`.
    pub fn has_marginals(&self, lambda: &FiniteDistribution, mu: &FiniteDistribution) -> Result<bool> {
        if lambda.len() != self.rows.len() || mu.len() != self.cols.len() {
            return Err(Error::DimensionMismatch(format!(
                "coupling is {}x{}, marginals have sizes {} and {}",
                self.rows.len(),
                self.cols.len(),
                lambda.len(),
                mu.len()
            )));
        }
        if !Ground::same(&self.rows, lambda.ground()) || !Ground::same(&self.cols, mu.ground()) {
            return Err(Error::GroundMismatch("coupling marginals".into()));
        }
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= TAU_MASS);
        Ok(close(&self.row_marginal(), lambda.probs()) && close(&self.col_marginal(), mu.probs()))
    }
}

pub fn validate_coupling(gamma: &Coupling, lambda: &FiniteDistribution, mu: &FiniteDistribution) -> Result<bool> {
    gamma.has_marginals(lambda, mu)
}

/// Greedy north-west corner staircase. Returns the flow and its
/// `rows + cols - 1` basic cells (degenerate cells carry zero mass).
pub(crate) fn northwest_basis(supply: &[f64], demand: &[f64]) -> (Vec<f64>, Vec<(usize, usize)>) {
    let (m, n) = (supply.len(), demand.len());
    let mut a = supply.to_vec();
    let mut b = demand.to_vec();
    let mut flow = vec![0.0; m * n];
    let mut basis = Vec::with_capacity(m + n - 1);
    let (mut i, mut j) = (0, 0);
    loop {
        let q = a[i].min(b[j]).max(0.0);
        flow[i * n + j] = q;
        basis.push((i, j));
        a[i] -= q;
        b[j] -= q;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if i == m - 1 {
            j += 1;
        } else if j == n - 1 || a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    // residual drift goes to the largest cell of its row / column
    for (r, &left) in a.iter().enumerate() {
        if left > 0.0 {
            let k = (0..n).max_by(|&x, &y| flow[r * n + x].total_cmp(&flow[r * n + y])).unwrap();
            flow[r * n + k] += left;
        }
    }
    for (c, &left) in b.iter().enumerate() {
        if left > 0.0 {
            let k = (0..m).max_by(|&x, &y| flow[x * n + c].total_cmp(&flow[y * n + c])).unwrap();
            flow[k * n + c] += left;
        }
    }
    (flow, basis)
}

/// The north-west corner coupling of `λ` and `μ` in their given orders.
pub fn northwest_corner(lambda: &FiniteDistribution, mu: &FiniteDistribution) -> Coupling {
    let (flow, _) = northwest_basis(lambda.probs(), mu.probs());
    Coupling {
        rows: lambda.ground().clone(),
        cols: mu.ground().clone(),
        mass: flow,
    }
}

#[derive(Serialize, Deserialize)]
struct RawCoupling {
    rows: Vec<Label>,
    cols: Vec<Label>,
    mass: Vec<Vec<f64>>,
}

impl Serialize for Coupling {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawCoupling {
            rows: self.rows.labels().to_vec(),
            cols: self.cols.labels().to_vec(),
            mass: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Coupling {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawCoupling::deserialize(d)?;
        let build = || -> Result<Coupling> { Coupling::new(Ground::new(raw.rows)?, Ground::new(raw.cols)?, raw.mass) };
        build().map_err(serde::de::Error::custom)
    }
}
