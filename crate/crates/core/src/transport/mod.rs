//! Couplings and exact discrete optimal transport.
//!
//! The solver is a transportation simplex (MODI potentials) started from the
//! north-west corner basis, with Bland's rule for entering and leaving
//! cells. Restricted problems (arcs limited to a relation, or to cells under
//! a cost threshold) are checked for feasibility with a max-flow first and
//! then solved with a penalty cost on forbidden cells.

mod coupling;
mod flow;
mod lifted;
mod simplex;
mod wasserstein;

pub use coupling::{northwest_corner, validate_coupling, Coupling};
pub use lifted::{lifted_coupling, lifted_member, lifted_w1_member};
pub use wasserstein::{
    diameter, emd, transport, transport_restricted, wasserstein_inf, wasserstein_p, DualPotentials,
    TransportResult,
};

use crate::tolerance::TAU_NUM;

/// Rectangular cost matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "cost matrix data has the wrong length");
        CostMatrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        CostMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> CostMatrix {
        CostMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Monge property over the given row and column orders.
    pub fn is_submodular(&self) -> bool {
        for i in 0..self.rows {
            for i2 in i + 1..self.rows {
                for j in 0..self.cols {
                    for j2 in j + 1..self.cols {
                        let lhs = self.get(i, j) + self.get(i2, j2);
                        let rhs = self.get(i2, j) + self.get(i, j2);
                        if lhs > rhs + TAU_NUM {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// A distance between distributions over one ground set.
#[derive(Debug, Clone, Copy)]
pub enum DistributionMetric<'a> {
    W1(&'a crate::prob::GroundMetric),
    Winf(&'a crate::prob::GroundMetric),
}

impl DistributionMetric<'_> {
    pub fn distance(
        &self,
        a: &crate::prob::FiniteDistribution,
        b: &crate::prob::FiniteDistribution,
    ) -> crate::error::Result<f64> {
        Ok(match self {
            DistributionMetric::W1(d) => emd(a, b, d)?.cost,
            DistributionMetric::Winf(d) => wasserstein_inf(a, b, d)?.cost,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistributionMetric::W1(_) => "w1",
            DistributionMetric::Winf(_) => "winf",
        }
    }
}
