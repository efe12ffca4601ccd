//! Exhaustive ranking of interactions up to a maximum order.
//!
//! Interaction information is not monotone over subsets, so nothing is pruned
//! unless a low-order gate is requested explicitly. Candidates are scored
//! independently (in parallel) and merged by a total, deterministic order.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::info::{Bits, EntropyLattice};
use crate::prob::Estimator;
use crate::significance::{
    chi2_pvalue, dependence_df, g_statistic, test_dependence, SignificanceResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RankBy {
    #[default]
    Magnitude,
    NormedMagnitude,
}

impl RankBy {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "magnitude" => Ok(Self::Magnitude),
            "normed" | "normed-magnitude" => Ok(Self::NormedMagnitude),
            other => Err(Error::InvalidArgument(format!("unknown ranking {other:?}"))),
        }
    }
}

/// One scored attribute subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionScore {
    /// Sorted ascending.
    pub subset: Vec<usize>,
    pub context: Vec<usize>,
    /// Interaction information I(subset | context).
    pub info: Bits,
    pub magnitude: Bits,
    /// |I(S|Z)| / H(S|Z).
    pub normed_magnitude: f64,
    /// Percentage of the label's entropy, for unconditional subsets that
    /// contain the label.
    pub relative_to_label: Option<f64>,
    /// G-test of the pair's (conditional) dependence; pairs only.
    pub significance: Option<SignificanceResult>,
}

impl InteractionScore {
    pub fn order(&self) -> usize {
        self.subset.len()
    }

    fn rank_value(&self, by: RankBy) -> f64 {
        match by {
            RankBy::Magnitude => self.magnitude.0,
            RankBy::NormedMagnitude => self.normed_magnitude,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub max_order: usize,
    pub top_n: usize,
    pub require_label: bool,
    pub context: Vec<usize>,
    pub rank_by: RankBy,
    pub estimator: Estimator,
    /// When set, a candidate of order >= 3 is scored only if one of its
    /// scored sub-interactions one order lower reaches this magnitude in bits.
    pub low_order_gate: Option<f64>,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            max_order: 3,
            top_n: 16,
            require_label: false,
            context: Vec::new(),
            rank_by: RankBy::Magnitude,
            estimator: Estimator::Ml,
            low_order_gate: None,
        }
    }
}

/// Descending by the ranking value, ties broken by ascending subset.
pub fn rank_order(by: RankBy) -> impl Fn(&InteractionScore, &InteractionScore) -> Ordering {
    move |a, b| {
        b.rank_value(by)
            .total_cmp(&a.rank_value(by))
            .then_with(|| a.subset.cmp(&b.subset))
    }
}

/// All `r`-element combinations of `pool` in lexicographic order.
pub fn combinations(pool: &[usize], r: usize) -> Vec<Vec<usize>> {
    fn rec(
        pool: &[usize],
        r: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < r - cur.len() {
                break;
            }
            cur.push(pool[i]);
            rec(pool, r, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r <= pool.len() {
        rec(pool, r, 0, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

/// Scores one subset in isolation from its own contingency table.
pub fn score_interaction(
    dataset: &Dataset,
    subset: &[usize],
    context: &[usize],
    est: Estimator,
) -> Result<InteractionScore> {
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    let mut all = subset.clone();
    all.extend_from_slice(context);
    let lattice = EntropyLattice::from_dataset(dataset, &all, est)?;
    let info = lattice.interaction_information(&subset, context)?;
    let normed = lattice.normed_interaction(&subset, context)?.abs();

    let relative_to_label = match dataset.label() {
        Some(y) if context.is_empty() && subset.contains(&y) => {
            let rest: Vec<usize> = subset.iter().copied().filter(|&a| a != y).collect();
            match lattice.relative_interaction(&rest, y) {
                Ok(v) => Some(v),
                Err(Error::DegenerateLabel) => None,
                Err(e) => return Err(e),
            }
        }
        _ => None,
    };

    let significance = if subset.len() == 2 {
        let (a, b) = (&subset[..1], &subset[1..]);
        let df = dependence_df(dataset, a, b, context);
        if df == 0 {
            None
        } else if est == Estimator::Ml {
            // for a pair, I(S|Z) is the ML conditional mutual information
            let g = g_statistic(Bits(info.0.max(0.0)), dataset.n_instances())?;
            Some(SignificanceResult {
                g,
                df,
                p_value: chi2_pvalue(g, df)?,
            })
        } else {
            Some(test_dependence(dataset, a, b, context)?)
        }
    } else {
        None
    };

    Ok(InteractionScore {
        subset,
        context: context.to_vec(),
        info,
        magnitude: info.abs(),
        normed_magnitude: normed,
        relative_to_label,
        significance,
    })
}

fn validate(dataset: &Dataset, spec: &SearchSpec) -> Result<()> {
    if spec.max_order < 2 {
        return Err(Error::InvalidArgument(format!(
            "maximum order must be at least 2, got {}",
            spec.max_order
        )));
    }
    if spec.top_n == 0 {
        return Err(Error::InvalidArgument("top_n must be at least 1".into()));
    }
    for (i, &c) in spec.context.iter().enumerate() {
        if c >= dataset.n_attributes() {
            return Err(Error::InvalidAttribute(c));
        }
        if spec.context[..i].contains(&c) {
            return Err(Error::DuplicateAttribute(c));
        }
    }
    let pool = dataset.n_attributes() - spec.context.len();
    if spec.max_order > pool {
        return Err(Error::InvalidArgument(format!(
            "maximum order {} exceeds the {pool} available attributes",
            spec.max_order
        )));
    }
    if spec.require_label {
        let y = dataset.label().ok_or(Error::NoLabel)?;
        if spec.context.contains(&y) {
            return Err(Error::InvalidArgument(
                "the label cannot be both required and conditioned on".into(),
            ));
        }
    }
    Ok(())
}

/// Ranks all interactions of order 2..=max_order.
pub fn enumerate_interactions(
    dataset: &Dataset,
    spec: &SearchSpec,
) -> Result<Vec<InteractionScore>> {
    validate(dataset, spec)?;
    let pool: Vec<usize> = (0..dataset.n_attributes())
        .filter(|a| !spec.context.contains(a))
        .collect();
    let label = dataset.label();
    let mut scored: Vec<InteractionScore> = Vec::new();
    for order in 2..=spec.max_order {
        let mut candidates = combinations(&pool, order);
        if spec.require_label {
            let y = label.ok_or(Error::NoLabel)?;
            candidates.retain(|c| c.contains(&y));
        }
        if let (Some(gate), true) = (spec.low_order_gate, order >= 3) {
            let lower: Vec<&InteractionScore> =
                scored.iter().filter(|s| s.order() == order - 1).collect();
            candidates.retain(|c| {
                lower
                    .iter()
                    .any(|s| s.magnitude.0 >= gate && s.subset.iter().all(|a| c.contains(a)))
            });
        }
        let batch = candidates
            .par_iter()
            .map(|c| score_interaction(dataset, c, &spec.context, spec.estimator))
            .collect::<Result<Vec<_>>>()?;
        scored.extend(batch);
    }
    scored.sort_by(rank_order(spec.rank_by));
    scored.truncate(spec.top_n);
    Ok(scored)
}

/// Pairs and triples of non-label attributes scored in the context of the
/// label: I(A;B|Y) and I(A;B;C|Y).
pub fn conditional_scan(
    dataset: &Dataset,
    max_order: usize,
    top_n: usize,
    rank_by: RankBy,
    est: Estimator,
) -> Result<Vec<InteractionScore>> {
    let y = dataset.label().ok_or(Error::NoLabel)?;
    if !(2..=3).contains(&max_order) {
        return Err(Error::InvalidArgument(format!(
            "conditional scan supports orders 2 and 3, got {max_order}"
        )));
    }
    enumerate_interactions(
        dataset,
        &SearchSpec {
            max_order,
            top_n,
            require_label: false,
            context: vec![y],
            rank_by,
            estimator: est,
            low_order_gate: None,
        },
    )
}

/// Interactions around a reference attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarScan {
    pub anchor: usize,
    /// Strongest pairs {anchor, X}, by magnitude.
    pub pairs: Vec<InteractionScore>,
    /// Triples {anchor, X, W} over the partners found above, by normed magnitude.
    pub triples: Vec<InteractionScore>,
}

pub fn star_scan(
    dataset: &Dataset,
    anchor: usize,
    k_pairs: usize,
    k_triples: usize,
    est: Estimator,
) -> Result<StarScan> {
    if anchor >= dataset.n_attributes() {
        return Err(Error::InvalidAttribute(anchor));
    }
    let others: Vec<usize> = (0..dataset.n_attributes())
        .filter(|&a| a != anchor)
        .collect();
    let mut pairs = others
        .par_iter()
        .map(|&x| score_interaction(dataset, &[anchor, x], &[], est))
        .collect::<Result<Vec<_>>>()?;
    pairs.sort_by(rank_order(RankBy::Magnitude));
    pairs.truncate(k_pairs);

    let mut partners: Vec<usize> = pairs
        .iter()
        .flat_map(|s| s.subset.iter().copied())
        .filter(|&a| a != anchor)
        .collect();
    partners.sort_unstable();
    let candidates: Vec<Vec<usize>> = combinations(&partners, 2)
        .into_iter()
        .map(|p| vec![anchor, p[0], p[1]])
        .collect();
    let mut triples = candidates
        .par_iter()
        .map(|c| score_interaction(dataset, c, &[], est))
        .collect::<Result<Vec<_>>>()?;
    triples.sort_by(rank_order(RankBy::NormedMagnitude));
    triples.truncate(k_triples);
    Ok(StarScan {
        anchor,
        pairs,
        triples,
    })
}
