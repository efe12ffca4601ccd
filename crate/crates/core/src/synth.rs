//! Deterministic generators for canonical interaction structures.
//!
//! Each generator has a closed-form joint distribution. Datasets are produced
//! either exhaustively (every cell repeated `p * n` times, so the empirical
//! distribution equals the generating one) or by seeded sampling.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::prob::JointDistribution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GenKind {
    /// `k` uniform bits plus their sum mod 2.
    Parity { k: usize },
    /// One uniform bit copied into three attributes.
    Triplicate,
    /// With probability `p1` an XOR configuration over {0,1}, else (2,2,2).
    Mixture { p1: f64 },
    /// Label `Y` and attributes conditionally independent given `Y`; each
    /// attribute equals `Y mod cardinality` with extra probability `strength`.
    NaiveBayes {
        n_attrs: usize,
        cardinality: usize,
        n_classes: usize,
        strength: f64,
    },
    /// `word` and `synonym` are copies of one hidden bit, each flipped with
    /// probability `noise`; `n_distractors` independent bits follow.
    Synonym { noise: f64, n_distractors: usize },
    /// `anchor` is active whenever one of two mutually exclusive contexts is
    /// (flipped with probability `noise`); contexts occur with `p_context1`
    /// and `p_context2`.
    Polysemy {
        p_context1: f64,
        p_context2: f64,
        noise: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    Exhaustive,
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub sampling: Sampling,
}

fn letter_names(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| {
            if i < 26 {
                ((b'A' + i as u8) as char).to_string()
            } else {
                format!("X{i}")
            }
        })
        .collect()
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must lie in [0, 1], got {p}"
        )))
    }
}

/// Enumerates the product space of `cards` in lexicographic order.
fn product_space(cards: &[usize]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &c in cards {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..c as u32).map(move |v| {
                    let mut t = prefix.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

fn flip(bit: u32, keep: bool) -> u32 {
    if keep {
        bit
    } else {
        1 - bit
    }
}

impl GenKind {
    pub fn names(&self) -> Vec<String> {
        match self {
            Self::Parity { k } => letter_names(k + 1),
            Self::Triplicate | Self::Mixture { .. } => letter_names(3),
            Self::NaiveBayes { n_attrs, .. } => std::iter::once("Y".to_string())
                .chain((1..=*n_attrs).map(|i| format!("X{i}")))
                .collect(),
            Self::Synonym { n_distractors, .. } => ["word".to_string(), "synonym".to_string()]
                .into_iter()
                .chain((1..=*n_distractors).map(|i| format!("other{i}")))
                .collect(),
            Self::Polysemy { .. } => ["anchor", "context1", "context2", "other"]
                .map(String::from)
                .to_vec(),
        }
    }

    pub fn label(&self) -> Option<&'static str> {
        match self {
            Self::NaiveBayes { .. } => Some("Y"),
            _ => None,
        }
    }

    fn cardinalities(&self) -> Vec<usize> {
        match self {
            Self::Mixture { .. } => vec![3; 3],
            Self::NaiveBayes {
                n_attrs,
                cardinality,
                n_classes,
                ..
            } => std::iter::once(*n_classes)
                .chain(std::iter::repeat_n(*cardinality, *n_attrs))
                .collect(),
            _ => vec![2; self.names().len()],
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Parity { k } if !(2..=20).contains(&k) => Err(Error::InvalidArgument(format!(
                "parity needs 2 <= k <= 20, got {k}"
            ))),
            Self::Mixture { p1 } => check_prob("p1", p1),
            Self::NaiveBayes {
                n_attrs,
                cardinality,
                n_classes,
                strength,
            } => {
                check_prob("strength", strength)?;
                if n_attrs == 0 || n_attrs > 8 || cardinality < 2 || n_classes < 2 {
                    return Err(Error::InvalidArgument(
                        "naive-bayes needs 1..=8 attributes, cardinality >= 2, >= 2 classes".into(),
                    ));
                }
                Ok(())
            }
            Self::Synonym {
                noise,
                n_distractors,
            } => {
                check_prob("noise", noise)?;
                if n_distractors > 16 {
                    return Err(Error::InvalidArgument("at most 16 distractors".into()));
                }
                Ok(())
            }
            Self::Polysemy {
                p_context1,
                p_context2,
                noise,
            } => {
                check_prob("p_context1", p_context1)?;
                check_prob("p_context2", p_context2)?;
                check_prob("noise", noise)?;
                check_prob("p_context1 + p_context2", p_context1 + p_context2)
            }
            _ => Ok(()),
        }
    }

    /// Closed-form generating distribution over attributes `0..names().len()`.
    pub fn distribution(&self) -> Result<JointDistribution> {
        self.validate()?;
        let cards = self.cardinalities();
        let cells: Vec<(Vec<u32>, f64)> = match *self {
            Self::Parity { k } => product_space(&vec![2; k])
                .into_iter()
                .map(|mut t| {
                    let parity = t.iter().sum::<u32>() % 2;
                    t.push(parity);
                    (t, 0.5f64.powi(k as i32))
                })
                .collect(),
            Self::Triplicate => vec![(vec![0, 0, 0], 0.5), (vec![1, 1, 1], 0.5)],
            Self::Mixture { p1 } => {
                let mut cells: Vec<_> = [[0, 0, 0], [1, 1, 0], [1, 0, 1], [0, 1, 1]]
                    .iter()
                    .map(|t| (t.to_vec(), p1 / 4.0))
                    .collect();
                cells.push((vec![2, 2, 2], 1.0 - p1));
                cells
            }
            Self::NaiveBayes {
                n_attrs,
                cardinality,
                n_classes,
                strength,
            } => {
                let c = cardinality as f64;
                product_space(&cards)
                    .into_iter()
                    .map(|t| {
                        let y = t[0] as usize % cardinality;
                        let p = t[1..].iter().fold(1.0 / n_classes as f64, |acc, &x| {
                            let base = (1.0 - strength) / c;
                            acc * if x as usize == y {
                                strength + base
                            } else {
                                base
                            }
                        });
                        debug_assert_eq!(t.len(), n_attrs + 1);
                        (t, p)
                    })
                    .collect()
            }
            Self::Synonym {
                noise,
                n_distractors,
            } => {
                let rest = 0.5f64.powi(n_distractors as i32);
                let mut cells = Vec::new();
                for hidden in 0..2u32 {
                    for keep_a in [true, false] {
                        for keep_b in [true, false] {
                            let p = 0.5
                                * if keep_a { 1.0 - noise } else { noise }
                                * if keep_b { 1.0 - noise } else { noise };
                            for others in product_space(&vec![2; n_distractors]) {
                                let mut t = vec![flip(hidden, keep_a), flip(hidden, keep_b)];
                                t.extend(others);
                                cells.push((t, p * rest));
                            }
                        }
                    }
                }
                cells
            }
            Self::Polysemy {
                p_context1,
                p_context2,
                noise,
            } => {
                let contexts = [
                    (0u32, 0u32, 1.0 - p_context1 - p_context2),
                    (1, 0, p_context1),
                    (0, 1, p_context2),
                ];
                let mut cells = Vec::new();
                for (c1, c2, pc) in contexts {
                    let active = c1 | c2;
                    for keep in [true, false] {
                        let pf = if keep { 1.0 - noise } else { noise };
                        for other in 0..2u32 {
                            cells.push((vec![flip(active, keep), c1, c2, other], pc * pf * 0.5));
                        }
                    }
                }
                cells
            }
        };
        let attrs = (0..cards.len()).collect();
        JointDistribution::from_probabilities(attrs, cards, cells)
    }
}

/// Generates a dataset according to `spec`.
pub fn generate(spec: &GenSpec) -> Result<Dataset> {
    if spec.n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let dist = spec.kind.distribution()?;
    let cells: Vec<(Vec<u32>, f64)> = dist.iter().collect();
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(spec.n);
    let render = |t: &[u32]| t.iter().map(|v| v.to_string()).collect::<Vec<_>>();
    match spec.sampling {
        Sampling::Exhaustive => {
            for (t, p) in &cells {
                let exact = p * spec.n as f64;
                let copies = exact.round();
                if (exact - copies).abs() > 1e-6 {
                    return Err(Error::InvalidArgument(format!(
                        "n = {} cannot represent cell probability {p} exactly",
                        spec.n
                    )));
                }
                rows.extend(std::iter::repeat_n(render(t), copies as usize));
            }
            if rows.len() != spec.n {
                return Err(Error::InvalidArgument(format!(
                    "exhaustive mode produced {} rows for n = {}",
                    rows.len(),
                    spec.n
                )));
            }
        }
        Sampling::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let index = WeightedIndex::new(cells.iter().map(|(_, p)| *p))
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            for _ in 0..spec.n {
                rows.push(render(&cells[index.sample(&mut rng)].0));
            }
        }
    }
    Dataset::from_rows(spec.kind.names(), rows, spec.kind.label())
}

pub fn gen_parity(k: usize, n: usize, sampling: Sampling) -> Result<Dataset> {
    generate(&GenSpec {
        kind: GenKind::Parity { k },
        n,
        sampling,
    })
}

pub fn gen_triplicate(n: usize, sampling: Sampling) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidArgument("triplicate needs n >= 2".into()));
    }
    generate(&GenSpec {
        kind: GenKind::Triplicate,
        n,
        sampling,
    })
}

pub fn gen_mixture(p1: f64, n: usize, sampling: Sampling) -> Result<Dataset> {
    generate(&GenSpec {
        kind: GenKind::Mixture { p1 },
        n,
        sampling,
    })
}

pub fn gen_naive_bayes(
    n_attrs: usize,
    cardinality: usize,
    n_classes: usize,
    strength: f64,
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    generate(&GenSpec {
        kind: GenKind::NaiveBayes {
            n_attrs,
            cardinality,
            n_classes,
            strength,
        },
        n,
        sampling: Sampling::Random { seed },
    })
}

pub fn gen_synonym(
    noise: f64,
    n_distractors: usize,
    n: usize,
    sampling: Sampling,
) -> Result<Dataset> {
    generate(&GenSpec {
        kind: GenKind::Synonym {
            noise,
            n_distractors,
        },
        n,
        sampling,
    })
}

pub fn gen_polysemy(
    p_context1: f64,
    p_context2: f64,
    noise: f64,
    n: usize,
    sampling: Sampling,
) -> Result<Dataset> {
    generate(&GenSpec {
        kind: GenKind::Polysemy {
            p_context1,
            p_context2,
            noise,
        },
        n,
        sampling,
    })
}
