//! Diagram emission. Every family is first built as a [`GraphDoc`] and then
//! rendered as DOT; dendrograms can also be written as Newick.
//!
//! Output is byte-deterministic: nodes follow attribute order, edges follow
//! the order of the scores given, and reals are printed with fixed decimals.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cluster::{Dendrogram, NodeRef};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::info::{EntropyLattice, NONNEG_TOLERANCE};
use crate::prob::Estimator;
use crate::search::{combinations, InteractionScore};

pub const TOOL_NAME: &str = "interinfo";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Node diameter per square root bit.
pub const DIAMETER_SCALE: f64 = 0.6;
/// Quantities below this many bits are not drawn.
pub const SUPPRESS_BITS: f64 = 0.001;
pub const DEFAULT_CONDITIONAL_THRESHOLD: f64 = 0.01;

pub fn diameter(bits: f64) -> f64 {
    DIAMETER_SCALE * bits.max(0.0).sqrt()
}

/// Fixed three-decimal formatting without a negative zero.
pub fn fmt3(v: f64) -> String {
    let s = format!("{:.3}", v);
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

pub fn fmt_percent(v: f64) -> String {
    let s = format!("{:+.1}%", v);
    if s == "-0.0%" {
        "+0.0%".into()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fill {
    Gray,
    White,
    Rgb(String),
}

impl Fill {
    fn dot(&self) -> &str {
        match self {
            Fill::Gray => "gray80",
            Fill::White => "white",
            Fill::Rgb(hex) => hex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Circle,
    Box,
    Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub label: String,
    pub shape: Shape,
    /// Bits represented by the node's surface, when it has one.
    pub area: Option<f64>,
    pub fill: Fill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeStyle {
    Solid,
    Dashed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub style: EdgeStyle,
    pub label: Option<String>,
    pub color: Option<String>,
    /// Set when the edge is one arm of an expanded hyperedge.
    pub hyperedge: Option<String>,
}

impl Edge {
    fn plain(from: &str, to: &str) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            style: EdgeStyle::Solid,
            label: None,
            color: None,
            hyperedge: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub name: String,
    /// Comment lines written at the top of the file.
    pub header: Vec<String>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    /// Extra graph-level attributes, e.g. `rankdir=LR`.
    pub graph_attrs: Vec<(String, String)>,
}

impl GraphDoc {
    fn new(name: &str, kind: &str, params: &[(String, String)]) -> Self {
        let mut header = vec![format!("{TOOL_NAME} {TOOL_VERSION}"), kind.to_string()];
        header.extend(params.iter().map(|(k, v)| format!("{k}: {v}")));
        Self {
            name: name.into(),
            header,
            nodes: Vec::new(),
            edges: Vec::new(),
            graph_attrs: Vec::new(),
        }
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }
}

pub fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn render_dot(doc: &GraphDoc) -> String {
    let mut s = String::new();
    for line in &doc.header {
        let _ = writeln!(s, "// {line}");
    }
    let _ = writeln!(s, "graph {} {{", quote(&doc.name));
    for (k, v) in &doc.graph_attrs {
        let _ = writeln!(s, "  {k}={};", quote(v));
    }
    let _ = writeln!(s, "  node [style=filled, fontname=\"Helvetica\"];");
    for n in &doc.nodes {
        let mut attrs = vec![format!("label={}", quote(&n.label))];
        attrs.push(
            match n.shape {
                Shape::Circle => "shape=circle",
                Shape::Box => "shape=box",
                Shape::Point => "shape=point",
            }
            .into(),
        );
        if let Some(area) = n.area {
            let d = fmt3(diameter(area));
            attrs.push(format!("width={d}, height={d}, fixedsize=true"));
            attrs.push(format!("area_bits={}", quote(&fmt3(area))));
        }
        attrs.push(format!("fillcolor={}", quote(n.fill.dot())));
        let _ = writeln!(s, "  {} [{}];", quote(&n.id), attrs.join(", "));
    }
    for e in &doc.edges {
        let mut attrs = vec![format!(
            "style={}",
            match e.style {
                EdgeStyle::Solid => "solid",
                EdgeStyle::Dashed => "dashed",
            }
        )];
        if let Some(label) = &e.label {
            attrs.push(format!("label={}", quote(label)));
        }
        if let Some(color) = &e.color {
            attrs.push(format!("color={}", quote(color)));
        }
        let _ = writeln!(
            s,
            "  {} -- {} [{}];",
            quote(&e.from),
            quote(&e.to),
            attrs.join(", ")
        );
    }
    s.push_str("}\n");
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn attr_id(dataset: &Dataset, a: usize) -> String {
    dataset.name(a).to_string()
}

fn subset_id(dataset: &Dataset, s: &[usize]) -> String {
    let names: Vec<&str> = s.iter().map(|&a| dataset.name(a)).collect();
    format!("I({})", names.join(";"))
}

/// Entropy circles for each attribute and one circle per interaction among
/// them, white when positive and gray when negative.
pub fn information_graph(
    dataset: &Dataset,
    attrs: &[usize],
    est: Estimator,
    params: &[(String, String)],
) -> Result<GraphDoc> {
    if !(2..=4).contains(&attrs.len()) {
        return Err(Error::InvalidArgument(format!(
            "information graphs take 2 to 4 attributes, got {}",
            attrs.len()
        )));
    }
    let mut sorted = attrs.to_vec();
    sorted.sort_unstable();
    let lattice = EntropyLattice::from_dataset(dataset, &sorted, est)?;
    let mut doc = GraphDoc::new("information", "information graph", params);
    doc.header.push(format!(
        "node diameter = {DIAMETER_SCALE} * sqrt(bits); quantities below {SUPPRESS_BITS} bits are omitted"
    ));
    doc.header
        .push("gray: entropy or negative interaction; white: positive interaction".into());

    for &a in &sorted {
        let h = lattice.entropy(&[a])?.0;
        doc.nodes.push(Node {
            id: attr_id(dataset, a),
            label: format!("{}\n{}", dataset.name(a), fmt3(h)),
            shape: Shape::Circle,
            area: Some(h),
            fill: Fill::Gray,
        });
    }
    let mut drawn: Vec<Vec<usize>> = Vec::new();
    for order in 2..=sorted.len() {
        for s in combinations(&sorted, order) {
            let v = lattice.interaction_information(&s, &[])?.0;
            if v.abs() < SUPPRESS_BITS {
                continue;
            }
            let id = subset_id(dataset, &s);
            doc.nodes.push(Node {
                id: id.clone(),
                label: fmt3(v),
                shape: Shape::Circle,
                area: Some(v.abs()),
                fill: if v > 0.0 { Fill::White } else { Fill::Gray },
            });
            let mut targets: Vec<String> = Vec::new();
            for sub in combinations(&s, order - 1) {
                if order == 2 || !drawn.contains(&sub) {
                    for &a in &sub {
                        targets.push(attr_id(dataset, a));
                    }
                } else {
                    targets.push(subset_id(dataset, &sub));
                }
            }
            let mut seen = Vec::new();
            for t in targets {
                if !seen.contains(&t) {
                    doc.edges.push(Edge::plain(&id, &t));
                    seen.push(t);
                }
            }
            drawn.push(s);
        }
    }
    Ok(doc)
}

fn relative_mi(dataset: &Dataset, a: usize, y: usize, est: Estimator) -> Result<f64> {
    match EntropyLattice::from_dataset(dataset, &[a, y], est)?.relative_mutual_information(&[a], y)
    {
        Ok(v) => Ok(v),
        Err(Error::DegenerateLabel) => Ok(0.0),
        Err(e) => Err(e),
    }
}

fn label_nodes(
    dataset: &Dataset,
    involved: &mut Vec<usize>,
    y: usize,
    est: Estimator,
) -> Result<Vec<Node>> {
    involved.sort_unstable();
    involved.dedup();
    involved
        .iter()
        .map(|&a| {
            Ok(Node {
                id: attr_id(dataset, a),
                label: format!(
                    "{}\n{}",
                    dataset.name(a),
                    fmt_percent(relative_mi(dataset, a, y, est)?)
                ),
                shape: Shape::Circle,
                area: None,
                fill: Fill::White,
            })
        })
        .collect()
}

fn connect(
    doc: &mut GraphDoc,
    dataset: &Dataset,
    members: &[usize],
    id: String,
    style: EdgeStyle,
    caption: String,
) {
    if members.len() == 2 {
        doc.edges.push(Edge {
            from: attr_id(dataset, members[0]),
            to: attr_id(dataset, members[1]),
            style,
            label: Some(caption),
            color: None,
            hyperedge: None,
        });
        return;
    }
    doc.nodes.push(Node {
        id: id.clone(),
        label: caption,
        shape: Shape::Box,
        area: None,
        fill: Fill::White,
    });
    for &a in members {
        doc.edges.push(Edge {
            from: id.clone(),
            to: attr_id(dataset, a),
            style,
            label: None,
            color: None,
            hyperedge: Some(id.clone()),
        });
    }
}

/// Attributes captioned with their relative mutual information with the
/// label; each scored interaction with the label becomes an edge between the
/// other participants (or a hyperedge node when there are more than two).
pub fn interaction_graph(
    dataset: &Dataset,
    scores: &[InteractionScore],
    est: Estimator,
    params: &[(String, String)],
) -> Result<GraphDoc> {
    let y = dataset.label().ok_or(Error::NoLabel)?;
    let mut doc = GraphDoc::new("interaction", "interaction graph", params);
    doc.header.push(format!(
        "node caption: relative mutual information with {}; edge caption: signed interaction relative to H({})",
        dataset.name(y),
        dataset.name(y)
    ));
    doc.header
        .push("solid: positive interaction; dashed: negative interaction".into());
    let mut involved = Vec::new();
    let mut links: Vec<(Vec<usize>, &InteractionScore)> = Vec::new();
    for s in scores
        .iter()
        .filter(|s| s.context.is_empty() && s.subset.contains(&y))
    {
        let others: Vec<usize> = s.subset.iter().copied().filter(|&a| a != y).collect();
        involved.extend_from_slice(&others);
        if others.len() >= 2 {
            links.push((others, s));
        }
    }
    doc.nodes = label_nodes(dataset, &mut involved, y, est)?;
    for (others, s) in links {
        let pct = s.relative_to_label.unwrap_or(0.0);
        let style = if s.info.0 < 0.0 {
            EdgeStyle::Dashed
        } else {
            EdgeStyle::Solid
        };
        connect(
            &mut doc,
            dataset,
            &others,
            subset_id(dataset, &s.subset),
            style,
            fmt_percent(pct),
        );
    }
    Ok(doc)
}

/// Interactions conditioned on the label whose magnitude reaches
/// `threshold` bits. Attributes outside every drawn interaction are left out.
pub fn conditional_graph(
    dataset: &Dataset,
    scores: &[InteractionScore],
    threshold: f64,
    est: Estimator,
    params: &[(String, String)],
) -> Result<GraphDoc> {
    let y = dataset.label().ok_or(Error::NoLabel)?;
    if !(threshold >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be nonnegative, got {threshold}"
        )));
    }
    let mut doc = GraphDoc::new("conditional", "conditional interaction graph", params);
    doc.header.push(format!(
        "context: {}; threshold: {} bits; edge caption: interaction in bits given the context",
        dataset.name(y),
        fmt3(threshold)
    ));
    doc.header
        .push("solid: positive interaction; dashed: negative interaction".into());
    let kept: Vec<&InteractionScore> = scores
        .iter()
        .filter(|s| s.context == [y] && s.magnitude.0 + NONNEG_TOLERANCE >= threshold)
        .collect();
    let mut involved: Vec<usize> = kept.iter().flat_map(|s| s.subset.iter().copied()).collect();
    doc.nodes = label_nodes(dataset, &mut involved, y, est)?;
    for s in kept {
        let style = if s.info.0 < 0.0 {
            EdgeStyle::Dashed
        } else {
            EdgeStyle::Solid
        };
        let id = format!("{}|{}", subset_id(dataset, &s.subset), dataset.name(y));
        connect(&mut doc, dataset, &s.subset, id, style, fmt3(s.info.0));
    }
    Ok(doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DendrogramFormat {
    Newick,
    Dot,
}

impl DendrogramFormat {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "newick" | "nwk" => Ok(Self::Newick),
            "dot" => Ok(Self::Dot),
            other => Err(Error::InvalidArgument(format!(
                "unknown dendrogram format {other:?}"
            ))),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Self::Newick => "nwk",
            Self::Dot => "dot",
        }
    }
}

/// Leaf caption: the name followed by its asterisks.
pub fn leaf_caption(dendrogram: &Dendrogram, leaf: usize) -> String {
    let l = &dendrogram.leaves[leaf];
    match l.annotation.as_ref().map(|a| a.asterisks).unwrap_or(0) {
        0 => l.name.clone(),
        n => format!("{} {}", l.name, "*".repeat(n as usize)),
    }
}

fn newick_label(text: &str) -> String {
    if text
        .chars()
        .any(|c| c.is_whitespace() || "()[]':;,".contains(c))
    {
        format!("'{}'", text.replace('\'', "''"))
    } else {
        text.to_string()
    }
}

fn fmt_length(v: f64) -> String {
    let s = format!("{:.6}", v);
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Newick with branch lengths equal to merge-height differences.
pub fn newick(dendrogram: &Dendrogram) -> String {
    fn rec(d: &Dendrogram, node: NodeRef, out: &mut String) {
        match node {
            NodeRef::Leaf(l) => out.push_str(&newick_label(&leaf_caption(d, l))),
            NodeRef::Merge(m) => {
                let merge = &d.merges[m];
                out.push('(');
                for (i, child) in [merge.left, merge.right].into_iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    rec(d, child, out);
                    out.push(':');
                    out.push_str(&fmt_length(merge.height - d.height(child)));
                }
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    rec(dendrogram, dendrogram.root(), &mut out);
    out.push_str(";\n");
    out
}

pub fn dendrogram_graph(dendrogram: &Dendrogram, params: &[(String, String)]) -> GraphDoc {
    let mut doc = GraphDoc::new("dendrogram", "interaction dendrogram", params);
    doc.header.push(
        "leaves: one asterisk per 2 percentage points of relative mutual information with the label, at most 10".into(),
    );
    doc.header.push(
        "merge color: mean signed normed interaction with the label; green zero, red positive, blue negative, saturating at 0.2"
            .into(),
    );
    doc.graph_attrs.push(("rankdir".into(), "LR".into()));
    let id = |n: NodeRef| match n {
        NodeRef::Leaf(l) => format!("leaf{l}"),
        NodeRef::Merge(m) => format!("merge{m}"),
    };
    for l in dendrogram.leaf_order() {
        let elim = dendrogram.leaves[l]
            .annotation
            .as_ref()
            .is_some_and(|a| a.elimination_candidate);
        let mut label = leaf_caption(dendrogram, l);
        if elim {
            label.push_str(" (candidate for elimination)");
        }
        doc.nodes.push(Node {
            id: id(NodeRef::Leaf(l)),
            label,
            shape: Shape::Box,
            area: None,
            fill: Fill::White,
        });
    }
    for (m, merge) in dendrogram.merges.iter().enumerate() {
        let color = merge.color.map(|c| c.hex());
        doc.nodes.push(Node {
            id: id(NodeRef::Merge(m)),
            label: fmt3(merge.height),
            shape: Shape::Point,
            area: None,
            fill: color.clone().map(Fill::Rgb).unwrap_or(Fill::Gray),
        });
        for child in [merge.left, merge.right] {
            let mut e = Edge::plain(&id(NodeRef::Merge(m)), &id(child));
            e.label = Some(fmt3(merge.height - dendrogram.height(child)));
            e.color = color.clone();
            doc.edges.push(e);
        }
    }
    doc
}

pub fn render_dendrogram(
    dendrogram: &Dendrogram,
    format: DendrogramFormat,
    params: &[(String, String)],
) -> String {
    match format {
        DendrogramFormat::Newick => newick(dendrogram),
        DendrogramFormat::Dot => render_dot(&dendrogram_graph(dendrogram, params)),
    }
}
