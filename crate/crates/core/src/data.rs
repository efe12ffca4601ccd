//! Categorical dataset ingestion.
//!
//! Every column is treated as a categorical attribute whose alphabet is the
//! set of distinct observed tokens in first-occurrence order. Numeric columns
//! can be discretized into equal-frequency bins on the way in.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Token used for missing values unless configured otherwise.
pub const DEFAULT_MISSING_MARKER: &str = "?";

/// Number of bins used when a `--bin` directive omits the count.
pub const DEFAULT_BINS: usize = 5;

/// One categorical attribute of a [`Dataset`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub name: String,
    /// Category labels in first-occurrence order. Indices stored in the
    /// dataset refer to positions in this list.
    pub alphabet: Vec<String>,
    pub index: usize,
    pub is_label: bool,
}

impl AttributeSchema {
    pub fn cardinality(&self) -> usize {
        self.alphabet.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingMode {
    /// The marker is an ordinary category.
    AsCategory,
    /// Rows containing the marker in any column are removed.
    DropRow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingPolicy {
    pub mode: MissingMode,
    pub marker: String,
}

impl Default for MissingPolicy {
    fn default() -> Self {
        Self {
            mode: MissingMode::AsCategory,
            marker: DEFAULT_MISSING_MARKER.to_string(),
        }
    }
}

impl MissingPolicy {
    pub fn drop_rows() -> Self {
        Self {
            mode: MissingMode::DropRow,
            ..Self::default()
        }
    }
}

/// Columns to discretize and the number of equal-frequency bins for each.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BinSpec {
    pub columns: Vec<(String, usize)>,
}

impl BinSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, column: impl Into<String>, n_bins: usize) -> Self {
        self.columns.push((column.into(), n_bins));
        self
    }

    /// Parses a `col:k` or bare `col` directive (the latter uses [`DEFAULT_BINS`]).
    pub fn parse_directive(directive: &str) -> Result<(String, usize)> {
        match directive.rsplit_once(':') {
            Some((col, k)) => {
                let k: usize = k.trim().parse().map_err(|_| {
                    Error::InvalidArgument(format!("bad bin directive {directive:?}"))
                })?;
                Ok((col.trim().to_string(), k))
            }
            None => Ok((directive.trim().to_string(), DEFAULT_BINS)),
        }
    }

    fn bins_for(&self, column: &str) -> Option<usize> {
        self.columns
            .iter()
            .find(|(c, _)| c == column)
            .map(|&(_, k)| k)
    }
}

/// Immutable table of categorical instances.
///
/// Values are stored column-major as indices into each attribute's alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    schemas: Vec<AttributeSchema>,
    columns: Vec<Vec<u32>>,
    n_instances: usize,
    warnings: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from string cells. Alphabets follow first occurrence.
    pub fn from_rows(
        names: Vec<String>,
        rows: Vec<Vec<String>>,
        label: Option<&str>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyFile);
        }
        check_names(&names)?;
        let label_idx = match label {
            Some(l) => Some(
                names
                    .iter()
                    .position(|n| n == l)
                    .ok_or_else(|| Error::UnknownLabel(l.to_string()))?,
            ),
            None => None,
        };
        let width = names.len();
        let mut lookups: Vec<HashMap<String, u32>> = vec![HashMap::new(); width];
        let mut alphabets: Vec<Vec<String>> = vec![Vec::new(); width];
        let mut columns: Vec<Vec<u32>> = vec![Vec::with_capacity(rows.len()); width];
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(Error::RaggedRow {
                    row: r + 1,
                    expected: width,
                    found: row.len(),
                });
            }
            for (c, cell) in row.into_iter().enumerate() {
                let next = alphabets[c].len() as u32;
                let idx = *lookups[c].entry(cell).or_insert_with_key(|k| {
                    alphabets[c].push(k.clone());
                    next
                });
                columns[c].push(idx);
            }
        }
        let n_instances = columns[0].len();
        let schemas = names
            .into_iter()
            .zip(alphabets)
            .enumerate()
            .map(|(index, (name, alphabet))| AttributeSchema {
                name,
                alphabet,
                index,
                is_label: Some(index) == label_idx,
            })
            .collect();
        Ok(Self {
            schemas,
            columns,
            n_instances,
            warnings: Vec::new(),
        })
    }

    /// Builds a dataset directly from alphabets and index columns.
    pub fn from_indices(schemas: Vec<AttributeSchema>, columns: Vec<Vec<u32>>) -> Result<Self> {
        if schemas.len() != columns.len() || schemas.is_empty() {
            return Err(Error::InvalidArgument(
                "one index column per schema is required".into(),
            ));
        }
        let n_instances = columns[0].len();
        if n_instances == 0 {
            return Err(Error::EmptyFile);
        }
        if schemas.iter().filter(|s| s.is_label).count() > 1 {
            return Err(Error::InvalidArgument("at most one label attribute".into()));
        }
        check_names(&schemas.iter().map(|s| s.name.clone()).collect::<Vec<_>>())?;
        for (i, (schema, column)) in schemas.iter().zip(&columns).enumerate() {
            if schema.index != i {
                return Err(Error::InvalidArgument(format!(
                    "schema {:?} has index {} at position {i}",
                    schema.name, schema.index
                )));
            }
            if schema.alphabet.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "attribute {:?} has an empty alphabet",
                    schema.name
                )));
            }
            let mut seen = std::collections::HashSet::new();
            if !schema
                .alphabet
                .iter()
                .all(|a| !a.is_empty() && seen.insert(a))
            {
                return Err(Error::InvalidArgument(format!(
                    "attribute {:?} has empty or repeated categories",
                    schema.name
                )));
            }
            if column.len() != n_instances {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: n_instances,
                    found: column.len(),
                });
            }
            if column.iter().any(|&v| v as usize >= schema.alphabet.len()) {
                return Err(Error::InvalidArgument(format!(
                    "attribute {:?} has an index beyond its alphabet",
                    schema.name
                )));
            }
        }
        Ok(Self {
            schemas,
            columns,
            n_instances,
            warnings: Vec::new(),
        })
    }

    pub fn n_instances(&self) -> usize {
        self.n_instances
    }

    pub fn n_attributes(&self) -> usize {
        self.schemas.len()
    }

    pub fn schemas(&self) -> &[AttributeSchema] {
        &self.schemas
    }

    pub fn schema(&self, attr: usize) -> &AttributeSchema {
        &self.schemas[attr]
    }

    pub fn name(&self, attr: usize) -> &str {
        &self.schemas[attr].name
    }

    pub fn cardinality(&self, attr: usize) -> usize {
        self.schemas[attr].alphabet.len()
    }

    pub fn column(&self, attr: usize) -> &[u32] {
        &self.columns[attr]
    }

    /// Category indices of one instance, in attribute order.
    pub fn instance(&self, row: usize) -> Vec<u32> {
        self.columns.iter().map(|c| c[row]).collect()
    }

    pub fn value(&self, row: usize, attr: usize) -> &str {
        &self.schemas[attr].alphabet[self.columns[attr][row] as usize]
    }

    pub fn label(&self) -> Option<usize> {
        self.schemas.iter().position(|s| s.is_label)
    }

    pub fn attr_index(&self, name: &str) -> Option<usize> {
        self.schemas.iter().position(|s| s.name == name)
    }

    /// Resolves attribute names to indices.
    pub fn resolve(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.attr_index(n)
                    .ok_or_else(|| Error::UnknownAttribute(n.to_string()))
            })
            .collect()
    }

    pub fn non_label_attributes(&self) -> Vec<usize> {
        (0..self.n_attributes())
            .filter(|&a| !self.schemas[a].is_label)
            .collect()
    }

    /// Returns a copy with `name` designated as the label (or none).
    pub fn with_label(&self, name: Option<&str>) -> Result<Self> {
        let idx = match name {
            Some(n) => Some(
                self.attr_index(n)
                    .ok_or_else(|| Error::UnknownLabel(n.to_string()))?,
            ),
            None => None,
        };
        let mut out = self.clone();
        for s in &mut out.schemas {
            s.is_label = Some(s.index) == idx;
        }
        Ok(out)
    }

    /// Ingestion notes such as binning fallbacks.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Writes the dataset back as CSV using category labels.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(self.schemas.iter().map(|s| s.name.as_str()))?;
        for row in 0..self.n_instances {
            w.write_record((0..self.n_attributes()).map(|a| self.value(row, a)))?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<csv output>".into(),
            source,
        })?;
        Ok(())
    }
}

fn check_names(names: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() {
            return Err(Error::EmptyColumnName(i));
        }
        if !seen.insert(n.as_str()) {
            return Err(Error::DuplicateColumn(n.clone()));
        }
    }
    Ok(())
}

/// Applies the missing-value policy to raw string rows.
pub fn apply_missing_policy(rows: Vec<Vec<String>>, policy: &MissingPolicy) -> Vec<Vec<String>> {
    match policy.mode {
        MissingMode::AsCategory => rows,
        MissingMode::DropRow => rows
            .into_iter()
            .filter(|row| !row.contains(&policy.marker))
            .collect(),
    }
}

/// Outcome of discretizing one numeric column.
#[derive(Debug, Clone, PartialEq)]
pub struct Binning {
    /// Bin label per input value, `b0` holding the smallest values.
    pub labels: Vec<String>,
    pub n_bins: usize,
    pub warning: Option<String>,
}

/// Equal-frequency discretization. Cut points always fall between distinct
/// values, so equal values never straddle two bins.
pub fn bin_numeric(values: &[f64], n_bins: usize) -> Result<Binning> {
    if n_bins < 2 {
        return Err(Error::InvalidBins(n_bins));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut distinct = sorted.clone();
    distinct.dedup();

    let mut warning = None;
    let cuts: Vec<f64> = if distinct.len() < n_bins {
        warning = Some(format!(
            "{} distinct values for {n_bins} bins; using one bin per value",
            distinct.len()
        ));
        distinct.iter().skip(1).copied().collect()
    } else {
        // Candidate boundaries b split sorted[..b] from sorted[b..].
        let boundaries: Vec<usize> = (1..n).filter(|&b| sorted[b - 1] < sorted[b]).collect();
        let mut chosen: Vec<usize> = (1..n_bins)
            .filter_map(|j| {
                let target = j * n / n_bins;
                boundaries
                    .iter()
                    .copied()
                    .min_by_key(|&b| (b.abs_diff(target), b))
            })
            .collect();
        chosen.sort_unstable();
        chosen.dedup();
        if chosen.len() + 1 < n_bins {
            warning = Some(format!(
                "ties leave {} of {n_bins} requested bins",
                chosen.len() + 1
            ));
        }
        chosen.into_iter().map(|b| sorted[b]).collect()
    };
    let labels = values
        .iter()
        .map(|v| format!("b{}", cuts.partition_point(|c| c <= v)))
        .collect();
    Ok(Binning {
        labels,
        n_bins: cuts.len() + 1,
        warning,
    })
}

/// Reads a CSV file into a [`Dataset`].
pub fn load_csv(
    path: impl AsRef<Path>,
    label: Option<&str>,
    missing: &MissingPolicy,
    bins: &BinSpec,
) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, label, missing, bins)
}

/// Like [`load_csv`] but from any reader.
pub fn read_csv<R: std::io::Read>(
    reader: R,
    label: Option<&str>,
    missing: &MissingPolicy,
    bins: &BinSpec,
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if names.is_empty() || (names.len() == 1 && names[0].is_empty()) {
        return Err(Error::EmptyFile);
    }
    check_names(&names)?;
    if let Some(l) = label {
        if !names.iter().any(|n| n == l) {
            return Err(Error::UnknownLabel(l.to_string()));
        }
    }
    for (col, _) in &bins.columns {
        if !names.iter().any(|n| n == col) {
            return Err(Error::UnknownAttribute(col.clone()));
        }
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != names.len() {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: names.len(),
                found: rec.len(),
            });
        }
        rows.push(rec.iter().map(str::to_string).collect::<Vec<_>>());
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile);
    }
    let mut rows = apply_missing_policy(rows, missing);
    if rows.is_empty() {
        return Err(Error::AllRowsDropped);
    }

    let mut warnings = Vec::new();
    for (c, name) in names.iter().enumerate() {
        let Some(k) = bins.bins_for(name) else {
            continue;
        };
        // Missing markers surviving the policy stay a category of their own.
        let mut present = Vec::new();
        let mut values = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            if row[c] == missing.marker {
                continue;
            }
            let v: f64 = row[c]
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::NotNumeric {
                    column: name.clone(),
                    row: r + 1,
                    value: row[c].clone(),
                })?;
            present.push(r);
            values.push(v);
        }
        if values.is_empty() {
            continue;
        }
        let binning = bin_numeric(&values, k)?;
        if let Some(w) = binning.warning {
            warnings.push(format!("column {name:?}: {w}"));
        }
        for (r, lab) in present.into_iter().zip(binning.labels) {
            rows[r][c] = lab;
        }
    }

    let mut ds = Dataset::from_rows(names, rows, label)?;
    ds.warnings = warnings;
    Ok(ds)
}
