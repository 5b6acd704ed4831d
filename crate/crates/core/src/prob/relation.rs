use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ensure_same, FiniteDistribution, Ground, Label};
use crate::error::{Error, Result};

/// An explicit adjacency relation `Φ ⊆ X × X`. Order of insertion is kept,
/// duplicates are dropped. The relation may be asymmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRelation {
    ground: Arc<Ground>,
    pairs: Vec<(usize, usize)>,
}

impl PointRelation {
    pub fn new(ground: Arc<Ground>, pairs: &[(Label, Label)]) -> Result<Self> {
        let idx = pairs
            .iter()
            .map(|(a, b)| Ok((ground.index_of(a)?, ground.index_of(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(ground, idx)
    }

    pub fn from_indices(ground: Arc<Ground>, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = ground.len();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::DimensionMismatch(format!("pair ({a},{b}) outside ground of size {n}")));
            }
            if seen.insert((a, b)) {
                out.push((a, b));
            }
        }
        Ok(PointRelation { ground, pairs: out })
    }

    /// `X × X`.
    pub fn full(ground: Arc<Ground>) -> Self {
        let n = ground.len();
        let pairs = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        PointRelation { ground, pairs }
    }

    /// `{(x, x)}`.
    pub fn identity(ground: Arc<Ground>) -> Self {
        let pairs = (0..ground.len()).map(|a| (a, a)).collect();
        PointRelation { ground, pairs }
    }

    pub fn ground(&self) -> &Arc<Ground> {
        &self.ground
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn label_pairs(&self) -> Vec<(Label, Label)> {
        self.pairs
            .iter()
            .map(|&(a, b)| (self.ground.label(a).clone(), self.ground.label(b).clone()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a, b))
    }

    /// Dense membership mask, row-major over `X × X`.
    pub(crate) fn mask(&self) -> Vec<bool> {
        let n = self.ground.len();
        let mut m = vec![false; n * n];
        for &(a, b) in &self.pairs {
            m[a * n + b] = true;
        }
        m
    }
}

/// A distribution, optionally tagged with an auxiliary input `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedDistribution {
    #[serde(rename = "s", default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<Label>,
    #[serde(flatten)]
    pub dist: FiniteDistribution,
}

impl TaggedDistribution {
    pub fn plain(dist: FiniteDistribution) -> Self {
        TaggedDistribution { aux: None, dist }
    }

    pub fn tagged(aux: impl Into<Label>, dist: FiniteDistribution) -> Self {
        TaggedDistribution { aux: Some(aux.into()), dist }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionPair {
    pub left: TaggedDistribution,
    pub right: TaggedDistribution,
}

/// An explicit relation `Ψ` over distributions (possibly aux-tagged).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DistributionPairRelation {
    pairs: Vec<DistributionPair>,
}

impl DistributionPairRelation {
    pub fn new(pairs: Vec<DistributionPair>) -> Result<Self> {
        for p in &pairs {
            ensure_same(p.left.dist.ground(), p.right.dist.ground(), "distribution pair")?;
        }
        Ok(DistributionPairRelation { pairs })
    }

    pub fn from_pairs(pairs: Vec<(FiniteDistribution, FiniteDistribution)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(l, r)| DistributionPair {
                    left: TaggedDistribution::plain(l),
                    right: TaggedDistribution::plain(r),
                })
                .collect(),
        )
    }

    /// Pairs of point distributions `(η_x, η_x')` for `(x, x') ∈ Φ`.
    pub fn points(phi: &PointRelation) -> Self {
        let g = phi.ground().clone();
        let pairs = phi
            .pairs()
            .iter()
            .map(|&(a, b)| DistributionPair {
                left: TaggedDistribution::plain(FiniteDistribution::point_at(a, g.clone())),
                right: TaggedDistribution::plain(FiniteDistribution::point_at(b, g.clone())),
            })
            .collect();
        DistributionPairRelation { pairs }
    }

    /// `Ψ0 ⋄ Ψ1 = {(λ0×λ1, λ0'×λ1')}`.
    pub fn diamond(first: &Self, second: &Self) -> Self {
        let mut pairs = Vec::with_capacity(first.len() * second.len());
        for p in &first.pairs {
            for q in &second.pairs {
                pairs.push(DistributionPair {
                    left: TaggedDistribution::plain(p.left.dist.product(&q.left.dist)),
                    right: TaggedDistribution::plain(p.right.dist.product(&q.right.dist)),
                });
            }
        }
        DistributionPairRelation { pairs }
    }

    pub fn pairs(&self) -> &[DistributionPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The auxiliary tags used, checked against a declared set `S`.
    pub fn check_aux(&self, declared: &[Label]) -> Result<()> {
        for p in &self.pairs {
            for t in [&p.left, &p.right] {
                if let Some(s) = &t.aux {
                    if !declared.contains(s) {
                        return Err(Error::UnknownLabel(s.to_string()));
                    }
                }
            }
        }
        Ok(())
    }
}
