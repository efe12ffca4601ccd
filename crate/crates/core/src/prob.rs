//! Sparse contingency tables and joint probability estimates.
//!
//! Cells are addressed by a mixed-radix code over the table's attributes, the
//! first attribute being the most significant digit. Only nonzero cells are
//! stored, sorted by code, so every traversal is in a fixed order.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Dense counting is used below this many joint cells.
const DENSE_LIMIT: u64 = 1 << 20;

/// Maps value tuples to cell codes and back.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Radix {
    cards: Vec<usize>,
    strides: Vec<u64>,
}

impl Radix {
    fn new(cards: &[usize]) -> Result<Self> {
        let mut strides = vec![0u64; cards.len()];
        let mut acc: u64 = 1;
        for i in (0..cards.len()).rev() {
            strides[i] = acc;
            acc = acc
                .checked_mul(cards[i] as u64)
                .ok_or(Error::TableTooLarge)?;
        }
        Ok(Self {
            cards: cards.to_vec(),
            strides,
        })
    }

    fn encode(&self, tuple: &[u32]) -> u64 {
        tuple
            .iter()
            .zip(&self.strides)
            .map(|(&v, &s)| v as u64 * s)
            .sum()
    }

    fn decode(&self, code: u64) -> Vec<u32> {
        self.strides
            .iter()
            .zip(&self.cards)
            .map(|(&s, &c)| ((code / s) % c as u64) as u32)
            .collect()
    }

    fn size(&self) -> f64 {
        self.cards.iter().map(|&c| c as f64).product()
    }
}

fn check_attrs(attrs: &[usize], n_attributes: usize) -> Result<()> {
    if attrs.is_empty() {
        return Err(Error::EmptySet);
    }
    for (i, &a) in attrs.iter().enumerate() {
        if a >= n_attributes {
            return Err(Error::InvalidAttribute(a));
        }
        if attrs[..i].contains(&a) {
            return Err(Error::DuplicateAttribute(a));
        }
    }
    Ok(())
}

/// Co-occurrence counts over an ordered attribute subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    attrs: Vec<usize>,
    radix: Radix,
    cells: Vec<(u64, u64)>,
    total: u64,
}

/// Counts value co-occurrences of `attrs` over every instance.
pub fn count_table(dataset: &Dataset, attrs: &[usize]) -> Result<ContingencyTable> {
    check_attrs(attrs, dataset.n_attributes())?;
    let cards: Vec<usize> = attrs.iter().map(|&a| dataset.cardinality(a)).collect();
    let radix = Radix::new(&cards)?;
    let n = dataset.n_instances();
    let mut codes = vec![0u64; n];
    for (&a, &stride) in attrs.iter().zip(&radix.strides) {
        for (code, &v) in codes.iter_mut().zip(dataset.column(a)) {
            *code += v as u64 * stride;
        }
    }
    let size = radix.size();
    let cells: Vec<(u64, u64)> = if size <= DENSE_LIMIT as f64 {
        let mut dense = vec![0u64; size as usize];
        for &c in &codes {
            dense[c as usize] += 1;
        }
        dense
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(k, c)| (k as u64, c))
            .collect()
    } else {
        let mut map: HashMap<u64, u64> = HashMap::new();
        for &c in &codes {
            *map.entry(c).or_default() += 1;
        }
        let mut cells: Vec<_> = map.into_iter().collect();
        cells.sort_unstable();
        cells
    };
    Ok(ContingencyTable {
        attrs: attrs.to_vec(),
        radix,
        cells,
        total: n as u64,
    })
}

impl ContingencyTable {
    pub fn attrs(&self) -> &[usize] {
        &self.attrs
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.radix.cards
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of stored (nonzero) cells.
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn count(&self, tuple: &[u32]) -> u64 {
        let code = self.radix.encode(tuple);
        self.cells
            .binary_search_by_key(&code, |&(c, _)| c)
            .map(|i| self.cells[i].1)
            .unwrap_or(0)
    }

    /// Nonzero cells as (value tuple, count), in code order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<u32>, u64)> + '_ {
        self.cells.iter().map(|&(c, n)| (self.radix.decode(c), n))
    }
}

/// Probability estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Estimator {
    /// Relative frequencies.
    #[default]
    Ml,
    /// Symmetric Dirichlet prior with `alpha` pseudo-counts per joint cell;
    /// `alpha = 1` is Laplace's rule of succession.
    Dirichlet { alpha: f64 },
}

impl Estimator {
    pub fn dirichlet(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dirichlet alpha must be positive, got {alpha}"
            )));
        }
        Ok(Self::Dirichlet { alpha })
    }

    /// Parses `ml`, `laplace`, `dirichlet` or `dirichlet:ALPHA`.
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "ml" => Ok(Self::Ml),
            "laplace" | "dirichlet" => Self::dirichlet(1.0),
            other => {
                match other.strip_prefix("dirichlet:") {
                    Some(a) => Self::dirichlet(a.parse().map_err(|_| {
                        Error::InvalidArgument(format!("bad dirichlet alpha {a:?}"))
                    })?),
                    None => Err(Error::InvalidArgument(format!(
                        "unknown estimator {other:?}"
                    ))),
                }
            }
        }
    }

    fn pseudo_count(&self) -> f64 {
        match *self {
            Self::Ml => 0.0,
            Self::Dirichlet { alpha } => alpha,
        }
    }
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Ml => write!(f, "ml"),
            Self::Dirichlet { alpha } => write!(f, "dirichlet:{alpha}"),
        }
    }
}

/// Probability mass over an attribute subset.
///
/// Stored as nonnegative cell weights plus a shared pseudo-count carried by
/// every cell of the joint space: `p(v) = (w(v) + pseudo) / (total + pseudo * M)`
/// where `M` is the number of joint cells. Cells without stored weight are the
/// implicit cells; under ML their pseudo-count is zero. Keeping weights rather
/// than probabilities makes ML marginals exact.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    attrs: Vec<usize>,
    radix: Radix,
    cells: Vec<(u64, f64)>,
    total: f64,
    pseudo: f64,
    estimator: Estimator,
}

/// Converts a contingency table into a joint distribution.
pub fn estimate_joint(table: &ContingencyTable, est: Estimator) -> JointDistribution {
    JointDistribution {
        attrs: table.attrs.clone(),
        radix: table.radix.clone(),
        cells: table.cells.iter().map(|&(c, n)| (c, n as f64)).collect(),
        total: table.total as f64,
        pseudo: est.pseudo_count(),
        estimator: est,
    }
}

/// Estimates the joint of `attrs` straight from the dataset.
pub fn joint(dataset: &Dataset, attrs: &[usize], est: Estimator) -> Result<JointDistribution> {
    Ok(estimate_joint(&count_table(dataset, attrs)?, est))
}

impl JointDistribution {
    /// Builds an exact distribution from explicit cell probabilities.
    /// `attrs` are labels for the coordinates; repeated tuples accumulate.
    pub fn from_probabilities(
        attrs: Vec<usize>,
        cardinalities: Vec<usize>,
        cells: impl IntoIterator<Item = (Vec<u32>, f64)>,
    ) -> Result<Self> {
        if attrs.len() != cardinalities.len() {
            return Err(Error::InvalidArgument(
                "one cardinality per attribute".into(),
            ));
        }
        check_attrs(&attrs, usize::MAX)?;
        let radix = Radix::new(&cardinalities)?;
        let mut acc: HashMap<u64, f64> = HashMap::new();
        let mut order = Vec::new();
        for (tuple, p) in cells {
            if tuple.len() != attrs.len()
                || tuple
                    .iter()
                    .zip(&cardinalities)
                    .any(|(&v, &c)| v as usize >= c)
            {
                return Err(Error::InvalidArgument(format!(
                    "tuple {tuple:?} out of range"
                )));
            }
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidArgument(format!("bad probability {p}")));
            }
            let code = radix.encode(&tuple);
            if !acc.contains_key(&code) {
                order.push(code);
            }
            *acc.entry(code).or_default() += p;
        }
        order.sort_unstable();
        let cells: Vec<(u64, f64)> = order
            .into_iter()
            .map(|c| (c, acc[&c]))
            .filter(|&(_, p)| p > 0.0)
            .collect();
        let total: f64 = cells.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self {
            attrs,
            radix,
            cells,
            total,
            pseudo: 0.0,
            estimator: Estimator::Ml,
        })
    }

    pub fn attrs(&self) -> &[usize] {
        &self.attrs
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.radix.cards
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator
    }

    /// Size of the joint cell space.
    pub fn n_joint_cells(&self) -> f64 {
        self.radix.size()
    }

    pub fn n_stored(&self) -> usize {
        self.cells.len()
    }

    /// Cells not stored explicitly.
    pub fn n_implicit(&self) -> f64 {
        self.radix.size() - self.cells.len() as f64
    }

    fn denominator(&self) -> f64 {
        self.total + self.pseudo * self.radix.size()
    }

    /// Probability of each implicit cell (zero under ML).
    pub fn implicit_prob(&self) -> f64 {
        self.pseudo / self.denominator()
    }

    pub fn prob(&self, tuple: &[u32]) -> f64 {
        let code = self.radix.encode(tuple);
        let w = self
            .cells
            .binary_search_by_key(&code, |&(c, _)| c)
            .map(|i| self.cells[i].1)
            .unwrap_or(0.0);
        (w + self.pseudo) / self.denominator()
    }

    /// Stored cells as (value tuple, probability), in code order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<u32>, f64)> + '_ {
        let d = self.denominator();
        self.cells
            .iter()
            .map(move |&(c, w)| (self.radix.decode(c), (w + self.pseudo) / d))
    }

    /// Total probability, implicit mass included.
    pub fn total_mass(&self) -> f64 {
        let d = self.denominator();
        let stored: f64 = self.cells.iter().map(|&(_, w)| (w + self.pseudo) / d).sum();
        stored + self.n_implicit() * self.implicit_prob()
    }

    /// Shannon entropy in bits. Zero cells contribute nothing; implicit cells
    /// are accounted for analytically.
    pub fn entropy_bits(&self) -> f64 {
        let d = self.denominator();
        let mut h = 0.0;
        for &(_, w) in &self.cells {
            let p = (w + self.pseudo) / d;
            if p > 0.0 {
                h -= p * p.log2();
            }
        }
        let p0 = self.implicit_prob();
        if p0 > 0.0 {
            h -= self.n_implicit() * p0 * p0.log2();
        }
        h
    }

    /// Sums probability over the coordinates not in `keep`.
    /// The result's coordinates follow the order of `keep`.
    pub fn marginalize(&self, keep: &[usize]) -> Result<JointDistribution> {
        if keep.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut positions = Vec::with_capacity(keep.len());
        for (i, a) in keep.iter().enumerate() {
            if keep[..i].contains(a) {
                return Err(Error::DuplicateAttribute(*a));
            }
            let pos = self.attrs.iter().position(|x| x == a).ok_or_else(|| {
                Error::InvalidArgument(format!("attribute {a} is not in the distribution"))
            })?;
            positions.push(pos);
        }
        let cards: Vec<usize> = positions.iter().map(|&p| self.radix.cards[p]).collect();
        let radix = Radix::new(&cards)?;
        let mut acc: HashMap<u64, f64> = HashMap::new();
        for &(code, w) in &self.cells {
            let full = self.radix.decode(code);
            let sub: u64 = positions
                .iter()
                .zip(&radix.strides)
                .map(|(&p, &s)| full[p] as u64 * s)
                .sum();
            *acc.entry(sub).or_default() += w;
        }
        let mut cells: Vec<(u64, f64)> = acc.into_iter().collect();
        cells.sort_unstable_by_key(|&(c, _)| c);
        // Each kept cell absorbs the pseudo-counts of all joint cells above it.
        let dropped: f64 = (0..self.attrs.len())
            .filter(|i| !positions.contains(i))
            .map(|i| self.radix.cards[i] as f64)
            .product();
        Ok(JointDistribution {
            attrs: keep.to_vec(),
            radix,
            cells,
            total: self.total,
            pseudo: self.pseudo * dropped,
            estimator: self.estimator,
        })
    }
}
