//! Entropy calculus in bits: entropy, conditional entropy, mutual information,
//! interaction information of any order, total correlation and the normed and
//! label-relative variants.
//!
//! Every measure is evaluated against an [`EntropyLattice`]: the entropies of
//! all subsets of one joint distribution, each obtained by marginalizing that
//! joint. Identities between measures therefore hold to rounding error.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::prob::{joint, Estimator, JointDistribution};

/// Values in `(-NONNEG_TOLERANCE, 0)` of provably nonnegative measures are
/// rounding noise and are clamped to zero.
pub const NONNEG_TOLERANCE: f64 = 1e-12;

/// Upper bound on the attributes of one lattice (2^n marginals are built).
pub const MAX_LATTICE_ATTRS: usize = 20;

/// An information quantity measured in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bits(pub f64);

impl Bits {
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> Bits {
        Bits(self.0.abs())
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{:.*} bits", p, self.0),
            None => write!(f, "{} bits", self.0),
        }
    }
}

/// Shannon entropy of a distribution, `0 log 0 = 0`.
pub fn entropy(dist: &JointDistribution) -> Bits {
    Bits(dist.entropy_bits())
}

fn nonneg(what: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value > -NONNEG_TOLERANCE {
        Ok(0.0)
    } else {
        Err(Error::Inconsistent { what, value })
    }
}

/// Entropies of every attribute subset of one joint distribution.
#[derive(Debug, Clone)]
pub struct EntropyLattice {
    attrs: Vec<usize>,
    entropies: Vec<f64>,
}

impl EntropyLattice {
    pub fn new(joint: &JointDistribution) -> Result<Self> {
        let attrs = joint.attrs().to_vec();
        let n = attrs.len();
        if n > MAX_LATTICE_ATTRS {
            return Err(Error::InvalidArgument(format!(
                "{n} attributes exceed the lattice limit of {MAX_LATTICE_ATTRS}"
            )));
        }
        let full = (1usize << n) - 1;
        let mut entropies = vec![0.0; 1 << n];
        for (mask, h) in entropies.iter_mut().enumerate().skip(1) {
            *h = if mask == full {
                joint.entropy_bits()
            } else {
                let keep: Vec<usize> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| attrs[i])
                    .collect();
                joint.marginalize(&keep)?.entropy_bits()
            };
        }
        Ok(Self { attrs, entropies })
    }

    /// Lattice over `attrs` estimated from a dataset.
    pub fn from_dataset(dataset: &Dataset, attrs: &[usize], est: Estimator) -> Result<Self> {
        Self::new(&joint(dataset, attrs, est)?)
    }

    pub fn attrs(&self) -> &[usize] {
        &self.attrs
    }

    fn mask(&self, set: &[usize]) -> Result<usize> {
        let mut m = 0usize;
        for &a in set {
            let pos = self.attrs.iter().position(|&x| x == a).ok_or_else(|| {
                Error::InvalidArgument(format!("attribute {a} is outside the lattice"))
            })?;
            if m >> pos & 1 == 1 {
                return Err(Error::DuplicateAttribute(a));
            }
            m |= 1 << pos;
        }
        Ok(m)
    }

    fn disjoint(&self, sets: &[&[usize]]) -> Result<Vec<usize>> {
        let mut union = 0usize;
        let mut out = Vec::with_capacity(sets.len());
        for s in sets {
            let m = self.mask(s)?;
            if union & m != 0 {
                return Err(Error::Overlap);
            }
            union |= m;
            out.push(m);
        }
        Ok(out)
    }

    fn h(&self, mask: usize) -> f64 {
        self.entropies[mask]
    }

    /// `-sum_{T subset S} (-1)^{|S|-|T|} H(T u Z)`.
    fn alternating_sum(&self, s: usize, z: usize) -> f64 {
        let k = s.count_ones();
        let mut total = 0.0;
        // ascending enumeration of submasks keeps the summation order fixed
        let mut t = 0usize;
        loop {
            let sign = if (k - t.count_ones()).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            total -= sign * self.h(t | z);
            if t == s {
                break;
            }
            t = (t.wrapping_sub(s)) & s;
        }
        total
    }

    /// Joint entropy H(S).
    pub fn entropy(&self, s: &[usize]) -> Result<Bits> {
        Ok(Bits(self.h(self.mask(s)?)))
    }

    /// H(S|Z) = H(S,Z) - H(Z).
    pub fn conditional_entropy(&self, s: &[usize], z: &[usize]) -> Result<Bits> {
        let m = self.disjoint(&[s, z])?;
        let v = self.h(m[0] | m[1]) - self.h(m[1]);
        Ok(Bits(nonneg("conditional entropy", v)?))
    }

    /// I(A;B) = H(A) + H(B) - H(A,B); the arguments may be attribute sets.
    pub fn mutual_information(&self, a: &[usize], b: &[usize]) -> Result<Bits> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet);
        }
        let m = self.disjoint(&[a, b])?;
        let v = self.h(m[0]) + self.h(m[1]) - self.h(m[0] | m[1]);
        Ok(Bits(nonneg("mutual information", v)?))
    }

    /// I(A;B|C) = H(A,C) + H(B,C) - H(C) - H(A,B,C).
    pub fn conditional_mutual_information(
        &self,
        a: &[usize],
        b: &[usize],
        c: &[usize],
    ) -> Result<Bits> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet);
        }
        let m = self.disjoint(&[a, b, c])?;
        let v =
            self.h(m[0] | m[2]) + self.h(m[1] | m[2]) - self.h(m[2]) - self.h(m[0] | m[1] | m[2]);
        Ok(Bits(nonneg("conditional mutual information", v)?))
    }

    /// Interaction information I(S|Z) of the attributes in `s`, with every
    /// entropy conditioned on `z`. Positive values indicate synergy, negative
    /// values redundancy.
    pub fn interaction_information(&self, s: &[usize], z: &[usize]) -> Result<Bits> {
        if s.len() < 2 {
            return Err(Error::InvalidArgument(
                "interaction information needs at least 2 attributes".into(),
            ));
        }
        let m = self.disjoint(&[s, z])?;
        Ok(Bits(self.alternating_sum(m[0], m[1])))
    }

    /// Co-information, `(-1)^{|S|} I(S)`.
    pub fn coinformation(&self, s: &[usize]) -> Result<Bits> {
        let i = self.interaction_information(s, &[])?;
        Ok(Bits(if s.len().is_multiple_of(2) { i.0 } else { -i.0 }))
    }

    /// C(S|Z) = sum_X H(X|Z) - H(S|Z).
    pub fn total_correlation(&self, s: &[usize], z: &[usize]) -> Result<Bits> {
        if s.len() < 2 {
            return Err(Error::InvalidArgument(
                "total correlation needs at least 2 attributes".into(),
            ));
        }
        let m = self.disjoint(&[s, z])?;
        let hz = self.h(m[1]);
        let singles: f64 = (0..self.attrs.len())
            .filter(|i| m[0] >> i & 1 == 1)
            .map(|i| self.h(1 << i | m[1]) - hz)
            .sum();
        let v = singles - (self.h(m[0] | m[1]) - hz);
        Ok(Bits(nonneg("total correlation", v)?))
    }

    fn label_entropy(&self, y: usize) -> Result<f64> {
        let hy = self.h(self.mask(&[y])?);
        if hy <= 0.0 {
            return Err(Error::DegenerateLabel);
        }
        Ok(hy)
    }

    /// 100 * I(A;Y) / H(Y).
    pub fn relative_mutual_information(&self, a: &[usize], y: usize) -> Result<f64> {
        let hy = self.label_entropy(y)?;
        Ok(100.0 * self.mutual_information(a, &[y])?.0 / hy)
    }

    /// 100 * I(S u {Y}) / H(Y) for an interaction term involving the label.
    pub fn relative_interaction(&self, s: &[usize], y: usize) -> Result<f64> {
        let hy = self.label_entropy(y)?;
        let mut all = s.to_vec();
        all.push(y);
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        if s.len() == 1 {
            return self.relative_mutual_information(s, y);
        }
        Ok(100.0 * self.interaction_information(&all, &[])?.0 / hy)
    }

    /// I(A;B) / H(A,B), in [0, 1].
    pub fn normed_mutual_information(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        let i = self.mutual_information(a, b)?;
        let joint = self.h(self.mask(a)? | self.mask(b)?);
        if joint <= 0.0 {
            return Err(Error::ZeroEntropy);
        }
        Ok(i.0 / joint)
    }

    /// Màntaras (Rajski) distance, `1 - I(A;B)/H(A,B)`.
    pub fn rajski_distance(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        Ok(1.0 - self.normed_mutual_information(a, b)?)
    }

    /// |I(A;B;C)| / H(A,B,C).
    pub fn normed_interaction_magnitude(&self, a: usize, b: usize, c: usize) -> Result<f64> {
        let s = [a, b, c];
        let i = self.interaction_information(&s, &[])?;
        let h = self.h(self.mask(&s)?);
        if h <= 0.0 {
            return Err(Error::ZeroEntropy);
        }
        Ok(i.0.abs() / h)
    }

    /// I(A;B|C) / H(A,B|C).
    pub fn normed_conditional_mutual_information(
        &self,
        a: &[usize],
        b: &[usize],
        c: &[usize],
    ) -> Result<f64> {
        let i = self.conditional_mutual_information(a, b, c)?;
        let m = self.disjoint(&[a, b, c])?;
        let h = self.h(m[0] | m[1] | m[2]) - self.h(m[2]);
        if h <= 0.0 {
            return Err(Error::ZeroEntropy);
        }
        Ok(i.0 / h)
    }

    /// Signed I(S|Z) / H(S|Z); zero when the joint entropy vanishes (then the
    /// interaction vanishes too).
    pub fn normed_interaction(&self, s: &[usize], z: &[usize]) -> Result<f64> {
        let i = self.interaction_information(s, z)?;
        let m = self.disjoint(&[s, z])?;
        let h = self.h(m[0] | m[1]) - self.h(m[1]);
        Ok(if h > NONNEG_TOLERANCE { i.0 / h } else { 0.0 })
    }
}

/// Convenience front end that estimates one lattice per call from a dataset.
#[derive(Debug, Clone, Copy)]
pub struct Analyzer<'a> {
    pub dataset: &'a Dataset,
    pub estimator: Estimator,
}

fn union(sets: &[&[usize]]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for s in sets {
        for &a in *s {
            if !out.contains(&a) {
                out.push(a);
            }
        }
    }
    out
}

impl<'a> Analyzer<'a> {
    pub fn new(dataset: &'a Dataset, estimator: Estimator) -> Self {
        Self { dataset, estimator }
    }

    /// Lattice over the union of the given sets (in first-mention order).
    pub fn lattice(&self, sets: &[&[usize]]) -> Result<EntropyLattice> {
        let attrs = union(sets);
        EntropyLattice::from_dataset(self.dataset, &attrs, self.estimator)
    }

    fn check_disjoint(sets: &[&[usize]]) -> Result<()> {
        let total: usize = sets.iter().map(|s| s.len()).sum();
        if union(sets).len() != total {
            // either a repeated attribute inside one set or an overlap
            for s in sets {
                if union(&[s]).len() != s.len() {
                    return Err(Error::DuplicateAttribute(s[0]));
                }
            }
            return Err(Error::Overlap);
        }
        Ok(())
    }

    pub fn entropy(&self, s: &[usize]) -> Result<Bits> {
        self.lattice(&[s])?.entropy(s)
    }

    pub fn conditional_entropy(&self, s: &[usize], z: &[usize]) -> Result<Bits> {
        Self::check_disjoint(&[s, z])?;
        self.lattice(&[s, z])?.conditional_entropy(s, z)
    }

    pub fn mutual_information(&self, a: &[usize], b: &[usize]) -> Result<Bits> {
        Self::check_disjoint(&[a, b])?;
        self.lattice(&[a, b])?.mutual_information(a, b)
    }

    pub fn conditional_mutual_information(
        &self,
        a: &[usize],
        b: &[usize],
        c: &[usize],
    ) -> Result<Bits> {
        Self::check_disjoint(&[a, b, c])?;
        self.lattice(&[a, b, c])?
            .conditional_mutual_information(a, b, c)
    }

    pub fn interaction_information(&self, s: &[usize], z: &[usize]) -> Result<Bits> {
        Self::check_disjoint(&[s, z])?;
        self.lattice(&[s, z])?.interaction_information(s, z)
    }

    pub fn coinformation(&self, s: &[usize]) -> Result<Bits> {
        self.lattice(&[s])?.coinformation(s)
    }

    pub fn total_correlation(&self, s: &[usize], z: &[usize]) -> Result<Bits> {
        Self::check_disjoint(&[s, z])?;
        self.lattice(&[s, z])?.total_correlation(s, z)
    }

    pub fn relative_mutual_information(&self, a: &[usize], y: usize) -> Result<f64> {
        Self::check_disjoint(&[a, &[y]])?;
        self.lattice(&[a, &[y]])?.relative_mutual_information(a, y)
    }

    pub fn relative_interaction(&self, s: &[usize], y: usize) -> Result<f64> {
        Self::check_disjoint(&[s, &[y]])?;
        self.lattice(&[s, &[y]])?.relative_interaction(s, y)
    }

    pub fn normed_mutual_information(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        Self::check_disjoint(&[a, b])?;
        self.lattice(&[a, b])?.normed_mutual_information(a, b)
    }

    pub fn rajski_distance(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        Ok(1.0 - self.normed_mutual_information(a, b)?)
    }

    pub fn normed_interaction_magnitude(&self, a: usize, b: usize, c: usize) -> Result<f64> {
        Self::check_disjoint(&[&[a], &[b], &[c]])?;
        self.lattice(&[&[a, b, c]])?
            .normed_interaction_magnitude(a, b, c)
    }

    pub fn normed_conditional_mutual_information(
        &self,
        a: &[usize],
        b: &[usize],
        c: &[usize],
    ) -> Result<f64> {
        Self::check_disjoint(&[a, b, c])?;
        self.lattice(&[a, b, c])?
            .normed_conditional_mutual_information(a, b, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(cards: Vec<usize>, cells: Vec<(Vec<u32>, f64)>) -> JointDistribution {
        let attrs = (0..cards.len()).collect();
        JointDistribution::from_probabilities(attrs, cards, cells).unwrap()
    }

    fn xor() -> EntropyLattice {
        let cells = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]
            .iter()
            .map(|t| (t.to_vec(), 0.25))
            .collect();
        EntropyLattice::new(&dist(vec![2, 2, 2], cells)).unwrap()
    }

    fn triplicate() -> EntropyLattice {
        let cells = vec![(vec![0, 0, 0], 0.5), (vec![1, 1, 1], 0.5)];
        EntropyLattice::new(&dist(vec![2, 2, 2], cells)).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let uniform = dist(vec![2], vec![(vec![0], 0.5), (vec![1], 0.5)]);
        assert_eq!(entropy(&uniform).0, 1.0);
        let point = dist(vec![2], vec![(vec![0], 1.0)]);
        assert_eq!(entropy(&point).0, 0.0);
        let skew = dist(vec![2], vec![(vec![0], 0.25), (vec![1], 0.75)]);
        // 0.25*2 + 0.75*log2(4/3)
        assert!((entropy(&skew).0 - 0.811_278_124_459_132_9).abs() < 1e-12);
    }

    #[test]
    fn xor_measures() {
        let l = xor();
        assert_eq!(l.mutual_information(&[0], &[2]).unwrap().0, 0.0);
        assert_eq!(l.mutual_information(&[1], &[2]).unwrap().0, 0.0);
        assert_eq!(l.mutual_information(&[0, 1], &[2]).unwrap().0, 1.0);
        assert_eq!(
            l.conditional_mutual_information(&[0], &[1], &[2])
                .unwrap()
                .0,
            1.0
        );
        assert_eq!(l.interaction_information(&[0, 1, 2], &[]).unwrap().0, 1.0);
        assert_eq!(l.coinformation(&[0, 1, 2]).unwrap().0, -1.0);
        assert_eq!(l.total_correlation(&[0, 1, 2], &[]).unwrap().0, 1.0);
        assert_eq!(l.normed_interaction_magnitude(0, 1, 2).unwrap(), 0.5);
    }

    #[test]
    fn triplicate_measures() {
        let l = triplicate();
        assert_eq!(l.interaction_information(&[0, 1, 2], &[]).unwrap().0, -1.0);
        assert_eq!(l.total_correlation(&[0, 1, 2], &[]).unwrap().0, 2.0);
        assert_eq!(l.normed_interaction_magnitude(0, 1, 2).unwrap(), 1.0);
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            assert_eq!(
                l.conditional_mutual_information(&[a], &[b], &[c])
                    .unwrap()
                    .0,
                0.0
            );
        }
        assert_eq!(l.normed_mutual_information(&[0], &[1]).unwrap(), 1.0);
        assert_eq!(l.rajski_distance(&[0], &[1]).unwrap(), 0.0);
        assert_eq!(l.relative_mutual_information(&[0], 1).unwrap(), 100.0);
    }

    #[test]
    fn independent_measures_vanish() {
        let mut cells = Vec::new();
        for a in 0..2u32 {
            for b in 0..2u32 {
                for c in 0..3u32 {
                    cells.push((vec![a, b, c], 1.0 / 12.0));
                }
            }
        }
        let l = EntropyLattice::new(&dist(vec![2, 2, 3], cells)).unwrap();
        assert!(l.mutual_information(&[0], &[1]).unwrap().0.abs() < 1e-12);
        assert!(l.normed_mutual_information(&[0], &[1]).unwrap().abs() < 1e-12);
        assert!(l.total_correlation(&[0, 1, 2], &[]).unwrap().0.abs() < 1e-12);
        assert!(l.normed_interaction_magnitude(0, 1, 2).unwrap() < 1e-12);
        assert!(l.relative_mutual_information(&[0], 2).unwrap().abs() < 1e-9);
        let h = l.entropy(&[0]).unwrap().0;
        assert!((l.conditional_entropy(&[0], &[2]).unwrap().0 - h).abs() < 1e-12);
    }

    #[test]
    fn conditioning_identities() {
        let l = xor();
        assert_eq!(
            l.conditional_entropy(&[0], &[]).unwrap(),
            l.entropy(&[0]).unwrap()
        );
        assert_eq!(
            l.conditional_mutual_information(&[0], &[1], &[]).unwrap(),
            l.mutual_information(&[0], &[1]).unwrap()
        );
        // C is a function of (A, B)
        assert_eq!(l.conditional_entropy(&[2], &[0, 1]).unwrap().0, 0.0);
    }

    #[test]
    fn argument_errors() {
        let l = xor();
        assert!(matches!(
            l.mutual_information(&[0], &[0]),
            Err(Error::Overlap)
        ));
        assert!(matches!(
            l.conditional_entropy(&[0], &[0, 1]),
            Err(Error::Overlap)
        ));
        assert!(l.interaction_information(&[0], &[]).is_err());
        assert!(l.coinformation(&[1]).is_err());
        assert!(l.total_correlation(&[1], &[]).is_err());
        assert!(l.interaction_information(&[0, 1], &[1]).is_err());
        let point = EntropyLattice::new(&dist(vec![2, 2], vec![(vec![0, 1], 1.0)])).unwrap();
        assert!(matches!(
            point.relative_mutual_information(&[0], 1),
            Err(Error::DegenerateLabel)
        ));
        assert!(matches!(
            point.normed_mutual_information(&[0], &[1]),
            Err(Error::ZeroEntropy)
        ));
    }

    #[test]
    fn clamp_policy() {
        assert_eq!(nonneg("x", -1e-14).unwrap(), 0.0);
        assert_eq!(nonneg("x", 0.5).unwrap(), 0.5);
        assert!(matches!(
            nonneg("x", -1e-6),
            Err(Error::Inconsistent { .. })
        ));
    }
}
