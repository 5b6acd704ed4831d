//! File formats used by the command-line tool.
//!
//! * Cost matrices are CSV: a header of labels, then one row of costs per
//!   label. A header starting with an empty cell means every row starts
//!   with its own label, which must follow the header order.
//! * Relations are JSON lists of two-element arrays. Elements are either
//!   labels (a point relation) or distributions, optionally tagged with an
//!   auxiliary input `s`.
//! * Mechanism files hold a kernel `{inputs, outputs, rows}`, an
//!   auxiliary-indexed kernel `{aux: [{s, kernel}]}` or a coupling
//!   mechanism `{target, aux: [{s, approx_input, coupling}], fallback}`.

use std::io::Read;
use std::sync::Arc;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::mechanism::{AuxIndexedKernel, CouplingMechanismSpec};
use crate::prob::{
    DistributionPair, DistributionPairRelation, FiniteDistribution, Ground, GroundMetric, Label, PointRelation,
    StochasticKernel, TaggedDistribution,
};

pub fn read_cost_csv(reader: impl Read) -> Result<GroundMetric> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let labelled = header.first().is_some_and(String::is_empty);
    let labels: Vec<String> = if labelled { header[1..].to_vec() } else { header };
    let ground = Ground::new(labels)?;
    let mut rows = Vec::with_capacity(ground.len());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let mut cells = rec.iter();
        if labelled {
            let name = cells.next().unwrap_or_default();
            if i >= ground.len() || ground.label(i).as_str() != name {
                return Err(Error::Parse(format!("cost row {} is labelled `{name}`", i + 1)));
            }
        }
        let row = cells
            .map(|c| c.parse::<f64>().map_err(|_| Error::Parse(format!("cost `{c}` in row {} is not a number", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != ground.len() {
            return Err(Error::DimensionMismatch(format!(
                "cost row {} has {} entries, expected {}",
                i + 1,
                row.len(),
                ground.len()
            )));
        }
        rows.push(row);
    }
    if rows.len() != ground.len() {
        return Err(Error::DimensionMismatch(format!(
            "cost matrix has {} rows for {} labels",
            rows.len(),
            ground.len()
        )));
    }
    GroundMetric::new(ground, rows)
}

pub fn write_cost_csv(d: &GroundMetric) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(d.ground().labels().iter().map(Label::as_str))?;
    for row in d.rows() {
        w.write_record(row.iter().map(f64::to_string))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// A relation file, either over points or over distributions.
#[derive(Debug, Clone, PartialEq)]
pub enum RelationFile {
    Points(Vec<(Label, Label)>),
    Distributions(DistributionPairRelation),
}

impl RelationFile {
    /// The distribution-pair view; point pairs become point masses over `ground`.
    pub fn to_distribution_pairs(&self, ground: &Arc<Ground>) -> Result<DistributionPairRelation> {
        match self {
            RelationFile::Points(pairs) => Ok(DistributionPairRelation::points(&PointRelation::new(
                ground.clone(),
                pairs,
            )?)),
            RelationFile::Distributions(psi) => Ok(psi.clone()),
        }
    }
}

pub fn parse_relation(json: &str) -> Result<RelationFile> {
    let items: Vec<Value> = serde_json::from_str(json)?;
    if items.is_empty() {
        return Err(Error::EmptyRelation);
    }
    let pair = |v: &Value| -> Result<(Value, Value)> {
        match v.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok((a.clone(), b.clone())),
            _ => Err(Error::Parse(format!("relation entry `{v}` is not a two-element array"))),
        }
    };
    if items.iter().all(|v| pair(v).is_ok_and(|(a, b)| a.is_string() && b.is_string())) {
        let pairs = items
            .iter()
            .map(|v| {
                let (a, b) = pair(v)?;
                Ok((Label::from(a.as_str().unwrap_or_default()), Label::from(b.as_str().unwrap_or_default())))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(RelationFile::Points(pairs));
    }
    let pairs = items
        .iter()
        .map(|v| {
            let (a, b) = pair(v)?;
            Ok(DistributionPair {
                left: serde_json::from_value::<TaggedDistribution>(a)?,
                right: serde_json::from_value::<TaggedDistribution>(b)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RelationFile::Distributions(DistributionPairRelation::new(pairs)?))
}

/// A JSON list of (usually tagged) distributions.
pub fn parse_inputs(json: &str) -> Result<Vec<TaggedDistribution>> {
    Ok(serde_json::from_str(json)?)
}

/// Any mechanism the tool can audit or sample from.
#[derive(Debug, Clone)]
pub enum MechanismFile {
    Kernel(StochasticKernel),
    Aux(AuxIndexedKernel),
    Coupling(CouplingMechanismSpec),
}

impl MechanismFile {
    pub fn inputs(&self) -> Arc<Ground> {
        match self {
            MechanismFile::Kernel(k) => k.inputs().clone(),
            MechanismFile::Aux(k) => k.inputs().clone(),
            MechanismFile::Coupling(s) => s.aux[0].approx_input.ground().clone(),
        }
    }

    pub fn aux_labels(&self) -> Vec<Label> {
        match self {
            MechanismFile::Kernel(_) => Vec::new(),
            MechanismFile::Aux(k) => k.aux().to_vec(),
            MechanismFile::Coupling(s) => s.aux_labels(),
        }
    }

    /// The kernel used for auxiliary input `s`, or the only kernel.
    pub fn kernel(&self, s: Option<&Label>) -> Result<StochasticKernel> {
        match (self, s) {
            (MechanismFile::Kernel(k), _) => Ok(k.clone()),
            (MechanismFile::Aux(k), Some(s)) => Ok(k.kernel(s)?.clone()),
            (MechanismFile::Coupling(spec), Some(s)) => spec.kernel(s),
            (_, None) => Err(Error::InvalidParameter("this mechanism needs an auxiliary input".into())),
        }
    }

    pub fn to_aux_kernel(&self) -> Result<Option<AuxIndexedKernel>> {
        match self {
            MechanismFile::Kernel(_) => Ok(None),
            MechanismFile::Aux(k) => Ok(Some(k.clone())),
            MechanismFile::Coupling(s) => s.to_aux_kernel().map(Some),
        }
    }
}

pub fn parse_mechanism(json: &str) -> Result<MechanismFile> {
    let v: Value = serde_json::from_str(json)?;
    let has = |k: &str| v.get(k).is_some();
    if has("target") {
        Ok(MechanismFile::Coupling(serde_json::from_value(v)?))
    } else if has("rows") {
        Ok(MechanismFile::Kernel(serde_json::from_value(v)?))
    } else if has("aux") {
        Ok(MechanismFile::Aux(serde_json::from_value(v)?))
    } else {
        Err(Error::Parse(
            "mechanism must have `rows`, `aux` or `target`".into(),
        ))
    }
}

pub fn parse_distribution(json: &str) -> Result<FiniteDistribution> {
    Ok(serde_json::from_str(json)?)
}

/// Labels from a CSV with a single column headed `x`.
pub fn read_label_csv(reader: impl Read) -> Result<Vec<Label>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() != 1 || &header[0] != "x" {
        return Err(Error::Parse("data file must have the single header `x`".into()));
    }
    rdr.records()
        .map(|r| Ok(Label::from(r?.get(0).unwrap_or_default())))
        .collect()
}
