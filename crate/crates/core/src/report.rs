//! The JSON report that accompanies every analysis run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::info::EntropyLattice;
use crate::prob::Estimator;
use crate::search::InteractionScore;
use crate::significance::test_dependence;
use crate::viz::{TOOL_NAME, TOOL_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub attributes: Vec<AttributeEntry>,
    pub measures: Vec<MeasureEntry>,
    /// Emitted files, relative to the output directory.
    pub diagrams: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeEntry {
    pub name: String,
    pub cardinality: usize,
    pub is_label: bool,
    pub entropy: f64,
    /// Percentage of the label's entropy explained by this attribute.
    pub relative_mi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEntry {
    /// Which scan produced the entry: interaction, conditional, star or measure.
    pub group: String,
    pub subset: Vec<String>,
    pub context: Vec<String>,
    /// Interaction information I(subset | context).
    pub bits: f64,
    /// Signed, divided by H(subset | context).
    pub normed: f64,
    pub relative_pct: Option<f64>,
    pub g: Option<f64>,
    pub df: Option<u64>,
    pub p: Option<f64>,
    pub significant: Option<bool>,
    /// For triples: each pair's conditional mutual information given the
    /// third attribute (and the context).
    pub constituents: Vec<Constituent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constituent {
    pub pair: Vec<String>,
    pub given: Vec<String>,
    pub bits: f64,
    pub g: Option<f64>,
    pub df: Option<u64>,
    pub p: Option<f64>,
    pub significant: Option<bool>,
}

impl Report {
    pub fn new(command: &str, parameters: BTreeMap<String, String>) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: command.into(),
            parameters,
            attributes: Vec::new(),
            measures: Vec::new(),
            diagrams: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn attribute_entries(dataset: &Dataset, est: Estimator) -> Result<Vec<AttributeEntry>> {
    let y = dataset.label();
    (0..dataset.n_attributes())
        .map(|a| {
            let mut attrs = vec![a];
            if let Some(y) = y.filter(|&y| y != a) {
                attrs.push(y);
            }
            let lattice = EntropyLattice::from_dataset(dataset, &attrs, est)?;
            let relative_mi = match y {
                Some(y) if y != a => match lattice.relative_mutual_information(&[a], y) {
                    Ok(v) => Some(v),
                    Err(Error::DegenerateLabel) => None,
                    Err(e) => return Err(e),
                },
                _ => None,
            };
            Ok(AttributeEntry {
                name: dataset.name(a).to_string(),
                cardinality: dataset.cardinality(a),
                is_label: Some(a) == y,
                entropy: lattice.entropy(&[a])?.0,
                relative_mi,
            })
        })
        .collect()
}

fn names(dataset: &Dataset, s: &[usize]) -> Vec<String> {
    s.iter().map(|&a| dataset.name(a).to_string()).collect()
}

pub fn measure_entry(
    dataset: &Dataset,
    group: &str,
    score: &InteractionScore,
    est: Estimator,
    alpha: f64,
) -> Result<MeasureEntry> {
    let mut all = score.subset.clone();
    all.extend_from_slice(&score.context);
    let lattice = EntropyLattice::from_dataset(dataset, &all, est)?;
    let normed = lattice.normed_interaction(&score.subset, &score.context)?;
    let sig = score.significance;

    let mut constituents = Vec::new();
    if score.subset.len() == 3 {
        for drop in 0..3 {
            let pair: Vec<usize> = (0..3)
                .filter(|&i| i != drop)
                .map(|i| score.subset[i])
                .collect();
            let mut given = vec![score.subset[drop]];
            given.extend_from_slice(&score.context);
            let bits = lattice
                .conditional_mutual_information(&pair[..1], &pair[1..], &given)?
                .0;
            let test = match test_dependence(dataset, &pair[..1], &pair[1..], &given) {
                Ok(t) => Some(t),
                Err(Error::Untestable) => None,
                Err(e) => return Err(e),
            };
            constituents.push(Constituent {
                pair: names(dataset, &pair),
                given: names(dataset, &given),
                bits,
                g: test.map(|t| t.g),
                df: test.map(|t| t.df),
                p: test.map(|t| t.p_value),
                significant: test.map(|t| t.is_significant(alpha)),
            });
        }
    }

    Ok(MeasureEntry {
        group: group.into(),
        subset: names(dataset, &score.subset),
        context: names(dataset, &score.context),
        bits: score.info.0,
        normed,
        relative_pct: score.relative_to_label,
        g: sig.map(|s| s.g),
        df: sig.map(|s| s.df),
        p: sig.map(|s| s.p_value),
        significant: sig.map(|s| s.is_significant(alpha)),
        constituents,
    })
}
