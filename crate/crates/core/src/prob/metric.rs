use std::sync::Arc;

use super::{Ground, Label};
use crate::error::{Error, Result};
use crate::tolerance::TAU_NUM;
use crate::transport::CostMatrix;

/// A nonnegative cost matrix over one ordered ground set.
///
/// Only nonnegativity and a zero diagonal are enforced. Symmetry, the
/// triangle inequality and submodularity are predicates callers may check.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundMetric {
    ground: Arc<Ground>,
    cost: Vec<f64>,
}

impl GroundMetric {
    pub fn new(ground: Arc<Ground>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = ground.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("cost matrix must be {n}x{n}")));
        }
        let cost: Vec<f64> = rows.into_iter().flatten().collect();
        for (k, &c) in cost.iter().enumerate() {
            let (i, j) = (k / n, k % n);
            if !c.is_finite() || c < 0.0 || (i == j && c != 0.0) {
                return Err(Error::InvalidCost { row: i, col: j, value: c });
            }
        }
        Ok(GroundMetric { ground, cost })
    }

    /// `d(i, j) = |i - j|` by ground index.
    pub fn line(ground: Arc<Ground>) -> Self {
        let positions: Vec<f64> = (0..ground.len()).map(|i| i as f64).collect();
        Self::on_line(ground, &positions).expect("index positions are finite")
    }

    /// `d(i, j) = |p_i - p_j|` for the given positions.
    pub fn on_line(ground: Arc<Ground>, positions: &[f64]) -> Result<Self> {
        if positions.len() != ground.len() {
            return Err(Error::DimensionMismatch("one position per label".into()));
        }
        let rows = positions
            .iter()
            .map(|p| positions.iter().map(|q| (p - q).abs()).collect())
            .collect();
        Self::new(ground, rows)
    }

    /// The 0/1 metric.
    pub fn discrete(ground: Arc<Ground>) -> Self {
        let n = ground.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(ground, rows).expect("0/1 costs are valid")
    }

    pub fn ground(&self) -> &Arc<Ground> {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.len() + j]
    }

    pub fn cost_of(&self, a: &Label, b: &Label) -> Result<f64> {
        Ok(self.cost(self.ground.index_of(a)?, self.ground.index_of(b)?))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.cost.chunks(self.len()).map(<[f64]>::to_vec).collect()
    }

    /// Costs from every label of `rows` to every label of `cols`. Both
    /// grounds must be made of labels of this metric.
    pub fn cross_costs(&self, rows: &Ground, cols: &Ground) -> Result<CostMatrix> {
        let ri = rows
            .labels()
            .iter()
            .map(|l| self.ground.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        let ci = cols
            .labels()
            .iter()
            .map(|l| self.ground.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        let data = ri
            .iter()
            .flat_map(|&i| ci.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.cost(i, j))
            .collect();
        Ok(CostMatrix::new(ri.len(), ci.len(), data))
    }

    pub fn as_cost_matrix(&self) -> CostMatrix {
        CostMatrix::new(self.len(), self.len(), self.cost.clone())
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| (self.cost(i, j) - self.cost(j, i)).abs() <= TAU_NUM))
    }

    pub fn satisfies_triangle_inequality(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| self.cost(i, k) <= self.cost(i, j) + self.cost(j, k) + TAU_NUM))
        })
    }

    /// `d(x0,x1) + d(x0',x1') <= d(x0',x1) + d(x0,x1')` for all `x0 < x0'`, `x1 < x1'`.
    pub fn is_submodular(&self) -> bool {
        self.as_cost_matrix().is_submodular()
    }
}

pub fn is_submodular(d: &GroundMetric) -> bool {
    d.is_submodular()
}
