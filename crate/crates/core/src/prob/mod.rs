//! Labeled finite probability distributions, stochastic kernels, relations
//! and ground metrics.
//!
//! Ground sets are ordered: every label has a fixed index, and all
//! numerical work is done on index-addressed vectors. Labels only matter at
//! the boundaries (files, reports, lookups).

mod kernel;
mod metric;
mod relation;

pub use kernel::{lift, StochasticKernel};
pub use metric::{is_submodular, GroundMetric};
pub use relation::{DistributionPair, DistributionPairRelation, PointRelation, TaggedDistribution};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tolerance::{TAU_MASS, TAU_ZERO};

/// Identifier of one element of a ground set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(id: impl Into<String>) -> Self {
        Label(id.into())
    }

    /// Label of the pair `(a, b)` in a product ground set.
    pub fn pair(a: &Label, b: &Label) -> Self {
        Label(format!("({},{})", a.0, b.0))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

/// An ordered, duplicate-free list of labels.
#[derive(Debug)]
pub struct Ground {
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
}

impl Ground {
    pub fn new<L: Into<Label>>(labels: impl IntoIterator<Item = L>) -> Result<Arc<Ground>> {
        let labels: Vec<Label> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
        if labels.is_empty() {
            return Err(Error::InvalidParameter("ground set must be non-empty".into()));
        }
        Ok(Arc::new(Ground { labels, index }))
    }

    /// Ground `{"0", "1", ..., "n-1"}`.
    pub fn indexed(n: usize) -> Arc<Ground> {
        Ground::new((0..n).map(|i| i.to_string())).expect("indexed labels are distinct")
    }

    /// Ground of all pairs `(a, b)` in row-major order.
    pub fn product(a: &Ground, b: &Ground) -> Arc<Ground> {
        let labels = a
            .labels
            .iter()
            .flat_map(|x| b.labels.iter().map(move |y| Label::pair(x, y)));
        Ground::new(labels).expect("pair labels of distinct labels are distinct")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &Label) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.index.contains_key(label)
    }

    /// Two grounds are the same when they list the same labels in the same order.
    pub fn same(a: &Arc<Ground>, b: &Arc<Ground>) -> bool {
        Arc::ptr_eq(a, b) || a.labels == b.labels
    }
}

impl PartialEq for Ground {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for Ground {}

pub(crate) fn ensure_same(a: &Arc<Ground>, b: &Arc<Ground>, what: &str) -> Result<()> {
    if Ground::same(a, b) {
        Ok(())
    } else {
        Err(Error::GroundMismatch(what.to_owned()))
    }
}

/// A probability vector over an ordered ground set.
#[derive(Debug, Clone)]
pub struct FiniteDistribution {
    ground: Arc<Ground>,
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(ground: Arc<Ground>, probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(ground, probs, TAU_MASS)
    }

    /// Builds a distribution, rejecting it when the total mass differs from
    /// 1 by more than `mass_tol`. Negative entries no larger than `TAU_ZERO`
    /// in magnitude are clamped to 0.
    pub fn with_tolerance(ground: Arc<Ground>, mut probs: Vec<f64>, mass_tol: f64) -> Result<Self> {
        if probs.len() != ground.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {} labels",
                probs.len(),
                ground.len()
            )));
        }
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -TAU_ZERO || *p > 1.0 + mass_tol {
                return Err(Error::InvalidProbability {
                    label: ground.label(i).to_string(),
                    value: *p,
                });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let mass: f64 = probs.iter().sum();
        if (mass - 1.0).abs() > mass_tol {
            return Err(Error::MassOutOfTolerance { mass, tolerance: mass_tol });
        }
        Ok(FiniteDistribution { ground, probs })
    }

    pub fn from_labels<L: Into<Label>>(labels: impl IntoIterator<Item = L>, probs: Vec<f64>) -> Result<Self> {
        Self::new(Ground::new(labels)?, probs)
    }

    /// The point distribution concentrated on `x`.
    pub fn point(x: &Label, ground: Arc<Ground>) -> Result<Self> {
        let i = ground.index_of(x)?;
        Ok(Self::point_at(i, ground))
    }

    pub(crate) fn point_at(i: usize, ground: Arc<Ground>) -> Self {
        let mut probs = vec![0.0; ground.len()];
        probs[i] = 1.0;
        FiniteDistribution { ground, probs }
    }

    pub fn uniform(ground: Arc<Ground>) -> Self {
        let n = ground.len();
        FiniteDistribution {
            probs: vec![1.0 / n as f64; n],
            ground,
        }
    }

    pub fn ground(&self) -> &Arc<Ground> {
        &self.ground
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn prob_of(&self, label: &Label) -> Result<f64> {
        Ok(self.probs[self.ground.index_of(label)?])
    }

    pub fn in_support(&self, i: usize) -> bool {
        self.probs[i] > TAU_ZERO
    }

    /// Indices of the support, in ground order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_support(i)).collect()
    }

    /// Total mass of the event `event`.
    pub fn event_probability(&self, event: &[Label]) -> Result<f64> {
        let mut seen = vec![false; self.len()];
        let mut total = 0.0;
        for l in event {
            let i = self.ground.index_of(l)?;
            if !seen[i] {
                seen[i] = true;
                total += self.probs[i];
            }
        }
        Ok(total)
    }

    /// `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, alpha: f64, other: &FiniteDistribution) -> Result<Self> {
        ensure_same(&self.ground, &other.ground, "mixture components")?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("mixture weight {alpha} outside [0,1]")));
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| alpha * p + (1.0 - alpha) * q)
            .collect();
        Self::new(self.ground.clone(), probs)
    }

    /// The product distribution over `X0 × X1`, row-major.
    pub fn product(&self, other: &FiniteDistribution) -> Self {
        let ground = Ground::product(&self.ground, &other.ground);
        let probs = self
            .probs
            .iter()
            .flat_map(|p| other.probs.iter().map(move |q| p * q))
            .collect();
        FiniteDistribution { ground, probs }
    }

    /// Elementwise equality within `tol` over the same ground.
    pub fn approx_eq(&self, other: &FiniteDistribution, tol: f64) -> bool {
        Ground::same(&self.ground, &other.ground)
            && self.probs.iter().zip(&other.probs).all(|(a, b)| (a - b).abs() <= tol)
    }
}

impl PartialEq for FiniteDistribution {
    fn eq(&self, other: &Self) -> bool {
        Ground::same(&self.ground, &other.ground) && self.probs == other.probs
    }
}

pub fn point_distribution(x: &Label, ground: Arc<Ground>) -> Result<FiniteDistribution> {
    FiniteDistribution::point(x, ground)
}

pub fn product_distribution(a: &FiniteDistribution, b: &FiniteDistribution) -> FiniteDistribution {
    a.product(b)
}

#[derive(Deserialize)]
struct RawDistribution {
    ground: Vec<Label>,
    probs: Vec<f64>,
}

impl Serialize for FiniteDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            ground: &'a [Label],
            probs: &'a [f64],
        }
        Out {
            ground: self.ground.labels(),
            probs: &self.probs,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDistribution::deserialize(d)?;
        FiniteDistribution::from_labels(raw.ground, raw.probs).map_err(serde::de::Error::custom)
    }
}
