//! Interaction dendrograms: Ward clustering of attributes under the
//! reciprocal of their normed interaction magnitude with the label.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::info::EntropyLattice;
use crate::prob::Estimator;
use crate::search::combinations;

pub const DEFAULT_CAP: f64 = 1000.0;
/// Relative mutual information (percentage points) per asterisk.
pub const PERCENT_PER_ASTERISK: f64 = 2.0;
pub const MAX_ASTERISKS: u8 = 10;
/// Normed interaction at which node colors saturate.
pub const COLOR_SATURATION: f64 = 0.2;
/// Positive normed interaction above which an attribute is kept even when
/// it carries no information about the label on its own.
pub const ELIMINATION_INTERACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub const GREEN: Rgb = Rgb(0, 170, 0);
    pub const RED: Rgb = Rgb(220, 0, 0);
    pub const BLUE: Rgb = Rgb(0, 0, 220);

    pub fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }

    fn lerp(self, other: Rgb, t: f64) -> Rgb {
        let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
        Rgb(
            mix(self.0, other.0),
            mix(self.1, other.1),
            mix(self.2, other.2),
        )
    }
}

/// Green for zero, shading to red for positive and blue for negative values.
pub fn interaction_color(signed_normed: f64) -> Rgb {
    let t = (signed_normed.abs() / COLOR_SATURATION).min(1.0);
    if signed_normed >= 0.0 {
        Rgb::GREEN.lerp(Rgb::RED, t)
    } else {
        Rgb::GREEN.lerp(Rgb::BLUE, t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissimilarityMatrix {
    attrs: Vec<usize>,
    names: Vec<String>,
    /// Row-major n x n.
    d: Vec<f64>,
    /// Signed normed interaction I(A;B;Y)/H(ABY) behind each entry, when known.
    signed: Option<Vec<f64>>,
    cap: f64,
}

impl DissimilarityMatrix {
    /// Builds `d(A,B) = min(K, 1/||I(A;B;Y)||)` over all non-label attributes.
    pub fn from_dataset(dataset: &Dataset, est: Estimator, cap: f64) -> Result<Self> {
        let y = dataset.label().ok_or(Error::NoLabel)?;
        if !(cap > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dissimilarity cap must be positive, got {cap}"
            )));
        }
        let attrs = dataset.non_label_attributes();
        let n = attrs.len();
        if n < 2 {
            return Err(Error::InvalidArgument(
                "clustering needs at least two non-label attributes".into(),
            ));
        }
        let pairs = combinations(&(0..n).collect::<Vec<_>>(), 2);
        let values = pairs
            .par_iter()
            .map(|p| {
                let (a, b) = (attrs[p[0]], attrs[p[1]]);
                EntropyLattice::from_dataset(dataset, &[a, b, y], est)?
                    .normed_interaction(&[a, b, y], &[])
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut d = vec![0.0; n * n];
        let mut signed = vec![0.0; n * n];
        for (p, v) in pairs.iter().zip(values) {
            let dist = reciprocal_capped(v.abs(), cap);
            let (i, j) = (p[0], p[1]);
            d[i * n + j] = dist;
            d[j * n + i] = dist;
            signed[i * n + j] = v;
            signed[j * n + i] = v;
        }
        Ok(Self {
            names: attrs.iter().map(|&a| dataset.name(a).to_string()).collect(),
            attrs,
            d,
            signed: Some(signed),
            cap,
        })
    }

    /// A matrix given directly; `rows` must be square, symmetric, with a
    /// zero diagonal and entries in [0, cap].
    pub fn from_values(names: Vec<String>, rows: Vec<Vec<f64>>, cap: f64) -> Result<Self> {
        let n = names.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(
                "dissimilarity matrix must be square".into(),
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(Error::InvalidArgument(format!("nonzero diagonal at {i}")));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(v >= 0.0 && v <= cap) || v != rows[j][i] {
                    return Err(Error::InvalidArgument(format!(
                        "invalid dissimilarity at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            attrs: (0..n).collect(),
            names,
            d: rows.into_iter().flatten().collect(),
            signed: None,
            cap,
        })
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn attrs(&self) -> &[usize] {
        &self.attrs
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    /// Entry by position (not attribute index).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.len() + j]
    }

    pub fn signed_interaction(&self, i: usize, j: usize) -> Option<f64> {
        self.signed.as_ref().map(|s| s[i * self.len() + j])
    }
}

pub fn reciprocal_capped(normed_magnitude: f64, cap: f64) -> f64 {
    if normed_magnitude <= 0.0 {
        cap
    } else {
        (1.0 / normed_magnitude).min(cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "kebab-case")]
pub enum NodeRef {
    Leaf(usize),
    Merge(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafAnnotation {
    pub relative_mi: f64,
    pub asterisks: u8,
    pub elimination_candidate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub attr: usize,
    pub name: String,
    pub annotation: Option<LeafAnnotation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: NodeRef,
    pub right: NodeRef,
    /// Monotone height used for rendering.
    pub height: f64,
    /// Height produced by the Ward update before inversions are flattened.
    pub raw_height: f64,
    pub size: usize,
    /// Mean signed normed interaction with the label over member pairs.
    pub mean_interaction: Option<f64>,
    pub color: Option<Rgb>,
}

/// Binary merge tree. Leaves are in matrix order; merges are in the order
/// performed, so the last merge is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: Vec<Leaf>,
    pub merges: Vec<Merge>,
    #[serde(skip)]
    signed: Option<Vec<f64>>,
}

impl Dendrogram {
    pub fn root(&self) -> NodeRef {
        match self.merges.len() {
            0 => NodeRef::Leaf(0),
            m => NodeRef::Merge(m - 1),
        }
    }

    pub fn height(&self, node: NodeRef) -> f64 {
        match node {
            NodeRef::Leaf(_) => 0.0,
            NodeRef::Merge(m) => self.merges[m].height,
        }
    }

    /// Leaf positions under `node`, left to right.
    pub fn members(&self, node: NodeRef) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            match n {
                NodeRef::Leaf(l) => out.push(l),
                NodeRef::Merge(m) => {
                    stack.push(self.merges[m].right);
                    stack.push(self.merges[m].left);
                }
            }
        }
        out
    }

    /// Leaf positions in left-to-right traversal order.
    pub fn leaf_order(&self) -> Vec<usize> {
        self.members(self.root())
    }

    /// Partition into `k` clusters by undoing the last `k - 1` merges. Each
    /// cluster is a sorted list of attribute indices; clusters are sorted.
    pub fn cut(&self, k: usize) -> Result<Vec<Vec<usize>>> {
        let n = self.leaves.len();
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!(
                "cannot cut {n} leaves into {k} clusters"
            )));
        }
        let mut group: Vec<usize> = (0..n).collect();
        for m in 0..n - k {
            let members = self.members(NodeRef::Merge(m));
            let g = group[members[0]];
            for l in members {
                group[l] = g;
            }
        }
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for (l, g) in group.into_iter().enumerate() {
            match groups.iter_mut().find(|(t, _)| *t == g) {
                Some((_, members)) => members.push(self.leaves[l].attr),
                None => groups.push((g, vec![self.leaves[l].attr])),
            }
        }
        let mut out: Vec<Vec<usize>> = groups
            .into_iter()
            .map(|(_, mut g)| {
                g.sort_unstable();
                g
            })
            .collect();
        out.sort();
        Ok(out)
    }

    /// Same as [`Dendrogram::cut`] but with attribute names.
    pub fn cut_names(&self, k: usize) -> Result<Vec<Vec<String>>> {
        let name_of = |a: usize| {
            self.leaves
                .iter()
                .find(|l| l.attr == a)
                .map(|l| l.name.clone())
                .unwrap_or_default()
        };
        let mut out: Vec<Vec<String>> = self
            .cut(k)?
            .into_iter()
            .map(|g| {
                let mut names: Vec<String> = g.into_iter().map(name_of).collect();
                names.sort();
                names
            })
            .collect();
        out.sort();
        Ok(out)
    }
}

struct Active {
    node: NodeRef,
    /// Leaf positions.
    members: Vec<usize>,
    /// Smallest member name, the canonical key of the cluster.
    key: String,
}

/// Ward agglomeration with the Lance–Williams update applied to the
/// dissimilarities directly.
///
/// The closest pair is merged first; equal distances go to the pair with
/// the smallest member names. Within a merge the child with the smaller key
/// is placed left and takes the first role in the update, which makes the
/// result independent of the input attribute order down to the last bit.
pub fn ward_cluster(m: &DissimilarityMatrix) -> Dendrogram {
    let n = m.len();
    let leaves: Vec<Leaf> = (0..n)
        .map(|i| Leaf {
            attr: m.attrs[i],
            name: m.names[i].clone(),
            annotation: None,
        })
        .collect();
    let mut active: Vec<Active> = (0..n)
        .map(|i| Active {
            node: NodeRef::Leaf(i),
            members: vec![i],
            key: m.names[i].clone(),
        })
        .collect();
    // distances between active clusters, indexed like `active`
    let mut dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j)).collect())
        .collect();
    let mut merges: Vec<Merge> = Vec::with_capacity(n.saturating_sub(1));

    while active.len() > 1 {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..active.len() {
            for j in i + 1..active.len() {
                let (a, b) = ordered(&active, i, j);
                best = match best {
                    None => Some((a, b)),
                    Some((ba, bb)) => {
                        let ord = dist[a][b]
                            .total_cmp(&dist[ba][bb])
                            .then_with(|| active[a].key.cmp(&active[ba].key))
                            .then_with(|| active[b].key.cmp(&active[bb].key));
                        if ord.is_lt() {
                            Some((a, b))
                        } else {
                            Some((ba, bb))
                        }
                    }
                };
            }
        }
        let (a, b) = best.expect("at least two active clusters");
        let (na, nb) = (
            active[a].members.len() as f64,
            active[b].members.len() as f64,
        );
        let dab = dist[a][b];

        let mut updated: Vec<f64> = Vec::with_capacity(active.len());
        for k in 0..active.len() {
            if k == a || k == b {
                updated.push(f64::NAN);
                continue;
            }
            let nk = active[k].members.len() as f64;
            let v = ((na + nk) * dist[k][a] + (nb + nk) * dist[k][b] - nk * dab) / (na + nb + nk);
            updated.push(v);
        }

        let child_height = |node: NodeRef| match node {
            NodeRef::Leaf(_) => 0.0,
            NodeRef::Merge(i) => merges[i].height,
        };
        let height = dab
            .max(child_height(active[a].node))
            .max(child_height(active[b].node));
        let mut members = active[a].members.clone();
        members.extend_from_slice(&active[b].members);
        merges.push(Merge {
            left: active[a].node,
            right: active[b].node,
            height,
            raw_height: dab,
            size: members.len(),
            mean_interaction: None,
            color: None,
        });
        let merged = Active {
            node: NodeRef::Merge(merges.len() - 1),
            members,
            key: active[a].key.clone(),
        };

        // replace `a` with the merged cluster, drop `b`
        for k in 0..active.len() {
            if k != a && k != b {
                dist[a][k] = updated[k];
                dist[k][a] = updated[k];
            }
        }
        active[a] = merged;
        active.remove(b);
        dist.remove(b);
        for row in dist.iter_mut() {
            row.remove(b);
        }
    }

    Dendrogram {
        leaves,
        merges,
        signed: m.signed.clone(),
    }
}

/// Orders two active clusters by key so the smaller comes first.
fn ordered(active: &[Active], i: usize, j: usize) -> (usize, usize) {
    if active[j].key < active[i].key {
        (j, i)
    } else {
        (i, j)
    }
}

/// Attaches informativeness to leaves and interaction colors to merges.
pub fn annotate_leaves(
    dendrogram: &Dendrogram,
    dataset: &Dataset,
    est: Estimator,
) -> Result<Dendrogram> {
    let y = dataset.label().ok_or(Error::NoLabel)?;
    let mut out = dendrogram.clone();
    let n = out.leaves.len();
    let signed = |i: usize, j: usize| out_signed(dendrogram, n, i, j);

    for (pos, leaf) in out.leaves.iter_mut().enumerate() {
        let lattice = EntropyLattice::from_dataset(dataset, &[leaf.attr, y], est)?;
        let relative_mi = match lattice.relative_mutual_information(&[leaf.attr], y) {
            Ok(v) => v,
            Err(Error::DegenerateLabel) => 0.0,
            Err(e) => return Err(e),
        };
        let asterisks = asterisk_count(relative_mi);
        let synergy = (0..n)
            .filter(|&o| o != pos)
            .filter_map(|o| signed(pos, o))
            .any(|v| v > ELIMINATION_INTERACTION);
        leaf.annotation = Some(LeafAnnotation {
            relative_mi,
            asterisks,
            elimination_candidate: asterisks == 0 && !synergy,
        });
    }

    for m in 0..out.merges.len() {
        let members = out.members(NodeRef::Merge(m));
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut known = true;
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                match signed(i, j) {
                    Some(v) => {
                        sum += v;
                        count += 1;
                    }
                    None => known = false,
                }
            }
        }
        if known && count > 0 {
            let mean = sum / count as f64;
            out.merges[m].mean_interaction = Some(mean);
            out.merges[m].color = Some(interaction_color(mean));
        }
    }
    Ok(out)
}

fn out_signed(d: &Dendrogram, n: usize, i: usize, j: usize) -> Option<f64> {
    d.signed.as_ref().map(|s| s[i * n + j])
}

pub fn asterisk_count(relative_mi: f64) -> u8 {
    if !(relative_mi > 0.0) {
        return 0;
    }
    ((relative_mi / PERCENT_PER_ASTERISK).floor() as u64).min(MAX_ASTERISKS as u64) as u8
}
