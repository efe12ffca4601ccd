//! Asymptotic χ² screening of entropy statistics.
//!
//! Mutual information, conditional mutual information and total correlation
//! measured in bits are likelihood-ratio statistics in disguise:
//! `G = 2 N ln(2) I`, asymptotically χ² under the independence null.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::info::{Analyzer, Bits};
use crate::prob::Estimator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub g: f64,
    pub df: u64,
    pub p_value: f64,
}

impl SignificanceResult {
    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Converts a nonnegative entropy statistic into a G statistic.
pub fn g_statistic(measure: Bits, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "instance count must be positive".into(),
        ));
    }
    if !(measure.0 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "G statistic needs a nonnegative measure, got {}",
            measure.0
        )));
    }
    Ok(2.0 * n as f64 * std::f64::consts::LN_2 * measure.0)
}

/// Upper-tail probability of the χ² distribution with `df` degrees of freedom.
pub fn chi2_pvalue(g: f64, df: u64) -> Result<f64> {
    if df == 0 {
        return Err(Error::InvalidArgument(
            "χ² needs at least one degree of freedom".into(),
        ));
    }
    if !(g >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative χ² statistic {g}")));
    }
    if g == 0.0 {
        return Ok(1.0);
    }
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(dist.sf(g).clamp(0.0, 1.0))
}

/// Degrees of freedom of the log-linear test of A ⟂ B | Z:
/// `(|A|-1)(|B|-1) * prod |Z|`, where set cardinalities are products.
pub fn dependence_df(dataset: &Dataset, a: &[usize], b: &[usize], z: &[usize]) -> u64 {
    let card = |s: &[usize]| -> u64 { s.iter().map(|&x| dataset.cardinality(x) as u64).product() };
    (card(a) - 1) * (card(b) - 1) * card(z)
}

/// G-test of conditional independence of `a` and `b` given `z` (ML estimates).
pub fn test_dependence(
    dataset: &Dataset,
    a: &[usize],
    b: &[usize],
    z: &[usize],
) -> Result<SignificanceResult> {
    let df = dependence_df(dataset, a, b, z);
    if df == 0 {
        return Err(Error::Untestable);
    }
    let cmi = Analyzer::new(dataset, Estimator::Ml).conditional_mutual_information(a, b, z)?;
    let g = g_statistic(cmi, dataset.n_instances())?;
    Ok(SignificanceResult {
        g,
        df,
        p_value: chi2_pvalue(g, df)?,
    })
}
