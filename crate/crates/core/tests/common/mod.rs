#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use interinfo::prob::JointDistribution;
use rand::Rng;

pub fn uci(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/uci")
        .join(name)
}

/// A joint distribution spelled out cell by cell, for brute-force oracles.
#[derive(Debug, Clone)]
pub struct Table {
    pub cards: Vec<usize>,
    pub cells: Vec<(Vec<u32>, f64)>,
}

impl Table {
    pub fn random<R: Rng>(rng: &mut R, n_attrs: usize, max_card: usize) -> Self {
        let cards: Vec<usize> = (0..n_attrs).map(|_| rng.gen_range(2..=max_card)).collect();
        let mut tuples = vec![vec![]];
        for &c in &cards {
            tuples = tuples
                .into_iter()
                .flat_map(|t: Vec<u32>| {
                    (0..c as u32).map(move |v| {
                        let mut t = t.clone();
                        t.push(v);
                        t
                    })
                })
                .collect();
        }
        let mut weights: Vec<f64> = tuples
            .iter()
            .map(|_| {
                if rng.gen_bool(0.2) {
                    0.0
                } else {
                    rng.gen::<f64>()
                }
            })
            .collect();
        if weights.iter().all(|&w| w == 0.0) {
            weights[0] = 1.0;
        }
        let total: f64 = weights.iter().sum();
        let cells = tuples
            .into_iter()
            .zip(weights)
            .map(|(t, w)| (t, w / total))
            .collect();
        Self { cards, cells }
    }

    pub fn joint(&self) -> JointDistribution {
        JointDistribution::from_probabilities(
            (0..self.cards.len()).collect(),
            self.cards.clone(),
            self.cells.clone(),
        )
        .expect("valid table")
    }

    /// H of the marginal over `keep` (positions), by direct summation.
    pub fn entropy(&self, keep: &[usize]) -> f64 {
        let mut marg: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (t, p) in &self.cells {
            let key: Vec<u32> = keep.iter().map(|&i| t[i]).collect();
            *marg.entry(key).or_default() += p;
        }
        marg.values()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum()
    }

    /// Interaction information by the inclusion-exclusion definition, with
    /// the singleton convention I({X}|Z) = -H(X|Z).
    pub fn interaction(&self, s: &[usize], z: &[usize]) -> f64 {
        let k = s.len();
        let mut total = 0.0;
        for mask in 0..(1usize << k) {
            let mut t: Vec<usize> = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| s[i])
                .collect();
            let sign = if (k - t.len()).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            t.extend_from_slice(z);
            total -= sign * self.entropy(&t);
        }
        total
    }
}

/// All subsets of `items` with at least `min` elements.
pub fn subsets(items: &[usize], min: usize) -> Vec<Vec<usize>> {
    (0..(1usize << items.len()))
        .map(|m| {
            (0..items.len())
                .filter(|i| m >> i & 1 == 1)
                .map(|i| items[i])
                .collect::<Vec<_>>()
        })
        .filter(|s| s.len() >= min)
        .collect()
}

/// Checks `text` against the DOT grammar (graph, digraph, strict, node,
/// edge and attribute statements, subgraphs, comments, quoted and HTML-free
/// IDs). Returns an error message with the offending token.
pub fn check_dot(text: &str) -> Result<(), String> {
    let tokens = lex(text)?;
    let mut p = Parser { t: tokens, i: 0 };
    p.graph()?;
    if p.i != p.t.len() {
        return Err(format!("trailing tokens at {:?}", p.t[p.i]));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Punct(&'static str),
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let c: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    let mut line_start = true;
    while i < c.len() {
        let ch = c[i];
        if ch == '\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        if line_start && ch == '#' {
            while i < c.len() && c[i] != '\n' {
                i += 1;
            }
            continue;
        }
        line_start = false;
        if ch == '/' && c.get(i + 1) == Some(&'/') {
            while i < c.len() && c[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if ch == '/' && c.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < c.len() && !(c[i] == '*' && c[i + 1] == '/') {
                i += 1;
            }
            if i + 1 >= c.len() {
                return Err("unterminated comment".into());
            }
            i += 2;
            continue;
        }
        if ch == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match c.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        if let Some(&n) = c.get(i + 1) {
                            s.push('\\');
                            s.push(n);
                        }
                        i += 2;
                    }
                    Some(&x) => {
                        s.push(x);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
            continue;
        }
        if ch == '-' && matches!(c.get(i + 1), Some('-') | Some('>')) {
            out.push(Tok::Punct(if c[i + 1] == '-' { "--" } else { "->" }));
            i += 2;
            continue;
        }
        if let Some(p) = ["{", "}", "[", "]", ";", ",", "=", ":"]
            .iter()
            .find(|p| p.starts_with(ch))
        {
            out.push(Tok::Punct(p));
            i += 1;
            continue;
        }
        if ch.is_alphanumeric() || ch == '_' || ch == '.' || ch == '-' {
            let numeric = ch.is_ascii_digit() || ch == '.' || ch == '-';
            let start = i;
            i += 1;
            while i < c.len() {
                let x = c[i];
                let ok = if numeric {
                    x.is_ascii_digit() || x == '.'
                } else {
                    x.is_alphanumeric() || x == '_'
                };
                if !ok {
                    break;
                }
                i += 1;
            }
            let s: String = c[start..i].iter().collect();
            if numeric && (s == "-" || s == "." || s.matches('.').count() > 1) {
                return Err(format!("malformed numeral {s:?}"));
            }
            out.push(Tok::Id(s));
            continue;
        }
        return Err(format!("unexpected character {ch:?}"));
    }
    Ok(out)
}

struct Parser {
    t: Vec<Tok>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.t.get(self.i)
    }

    fn punct(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(q)) if *q == p) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), String> {
        if self.punct(p) {
            Ok(())
        } else {
            Err(format!("expected {p:?} at {:?}", self.peek()))
        }
    }

    fn keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Id(s)) if s.eq_ignore_ascii_case(k))
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            other => Err(format!("expected ID at {other:?}")),
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        if self.keyword("strict") {
            self.i += 1;
        }
        let directed = if self.keyword("digraph") {
            true
        } else if self.keyword("graph") {
            false
        } else {
            return Err("missing graph keyword".into());
        };
        self.i += 1;
        if !matches!(self.peek(), Some(Tok::Punct("{"))) {
            self.id()?;
        }
        self.expect("{")?;
        self.stmt_list(directed)?;
        self.expect("}")
    }

    fn stmt_list(&mut self, directed: bool) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::Punct("}")) | None) {
            self.stmt(directed)?;
            self.punct(";");
        }
        Ok(())
    }

    fn attr_list(&mut self) -> Result<(), String> {
        let mut any = false;
        while self.punct("[") {
            any = true;
            while !self.punct("]") {
                self.id()?;
                self.expect("=")?;
                self.id()?;
                if !self.punct(",") {
                    self.punct(";");
                }
            }
        }
        if any {
            Ok(())
        } else {
            Err(format!("expected attribute list at {:?}", self.peek()))
        }
    }

    fn node_id(&mut self) -> Result<(), String> {
        self.id()?;
        if self.punct(":") {
            self.id()?;
            if self.punct(":") {
                self.id()?;
            }
        }
        Ok(())
    }

    fn operand(&mut self, directed: bool) -> Result<(), String> {
        if self.keyword("subgraph") || matches!(self.peek(), Some(Tok::Punct("{"))) {
            if self.keyword("subgraph") {
                self.i += 1;
                if !matches!(self.peek(), Some(Tok::Punct("{"))) {
                    self.id()?;
                }
            }
            self.expect("{")?;
            self.stmt_list(directed)?;
            self.expect("}")
        } else {
            self.node_id()
        }
    }

    fn stmt(&mut self, directed: bool) -> Result<(), String> {
        if ["graph", "node", "edge"].iter().any(|k| self.keyword(k)) {
            self.i += 1;
            return self.attr_list();
        }
        if matches!(self.t.get(self.i + 1), Some(Tok::Punct("="))) {
            self.id()?;
            self.i += 1;
            self.id()?;
            return Ok(());
        }
        self.operand(directed)?;
        let op = if directed { "->" } else { "--" };
        let wrong = if directed { "--" } else { "->" };
        loop {
            if self.punct(wrong) {
                return Err(format!("edge operator {wrong} in the wrong graph type"));
            }
            if !self.punct(op) {
                break;
            }
            self.operand(directed)?;
        }
        if matches!(self.peek(), Some(Tok::Punct("["))) {
            self.attr_list()?;
        }
        Ok(())
    }
}

pub const ADULT_NUMERIC: [&str; 6] = [
    "age",
    "fnlwgt",
    "education-num",
    "capital-gain",
    "capital-loss",
    "hours-per-week",
];

pub fn adult_binned() -> interinfo::data::Dataset {
    use interinfo::data::{load_csv, BinSpec, MissingPolicy, DEFAULT_BINS};
    let bins = ADULT_NUMERIC
        .iter()
        .fold(BinSpec::new(), |b, c| b.with(*c, DEFAULT_BINS));
    load_csv(
        uci("adult.csv"),
        Some("salary"),
        &MissingPolicy::default(),
        &bins,
    )
    .unwrap()
}

pub fn load_uci(name: &str, label: &str) -> interinfo::data::Dataset {
    use interinfo::data::{load_csv, BinSpec, MissingPolicy};
    load_csv(
        uci(name),
        Some(label),
        &MissingPolicy::default(),
        &BinSpec::new(),
    )
    .unwrap()
}
