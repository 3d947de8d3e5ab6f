//! Distances and rank correlation between priority vectors, and the
//! per-matrix comparison of the weighting methods.
//!
//! All measures work on the sum-one scale regardless of how the inputs are
//! normalized.

use crate::consistency::{report_from_lambda, RiTable};
use crate::error::{Error, Result};
use crate::matrix::{PCMatrix, WeightVector};
use crate::weighting::{combine_rl, row_geometric_mean, EigenPair, EigenSolverConfig, RlCombination};

fn paired(u: &WeightVector, v: &WeightVector) -> Result<(Vec<f64>, Vec<f64>)> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok((u.sum_one(), v.sum_one()))
}

pub fn euclidean(u: &WeightVector, v: &WeightVector) -> Result<f64> {
    let (u, v) = paired(u, v)?;
    Ok(u.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

pub fn chebyshev(u: &WeightVector, v: &WeightVector) -> Result<f64> {
    let (u, v) = paired(u, v)?;
    Ok(u.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Largest ratio between corresponding components, taken in whichever
/// direction exceeds 1.
pub fn max_ratio(u: &WeightVector, v: &WeightVector) -> Result<f64> {
    let (u, v) = paired(u, v)?;
    Ok(u.iter().zip(&v).map(|(a, b)| (a / b).max(b / a)).fold(1.0, f64::max))
}

/// Kendall's tau without tie correction: ties in either vector count as
/// neither concordant nor discordant.
pub fn kendall_tau(u: &WeightVector, v: &WeightVector) -> Result<f64> {
    let (u, v) = paired(u, v)?;
    let n = u.len();
    if n < 2 {
        return Ok(1.0);
    }
    let mut score: i64 = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let s = (u[i] - u[j]) * (v[i] - v[j]);
            if s > 0.0 {
                score += 1;
            } else if s < 0.0 {
                score -= 1;
            }
        }
    }
    Ok(score as f64 / (n * (n - 1) / 2) as f64)
}

/// Absolute difference below which two metric values are treated as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// The four comparison measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Euclidean,
    Chebyshev,
    MaxRatio,
    Kendall,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Euclidean, Metric::Chebyshev, Metric::MaxRatio, Metric::Kendall];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Chebyshev => "chebyshev",
            Metric::MaxRatio => "max_ratio",
            Metric::Kendall => "kendall",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn eval(self, u: &WeightVector, v: &WeightVector) -> Result<f64> {
        match self {
            Metric::Euclidean => euclidean(u, v),
            Metric::Chebyshev => chebyshev(u, v),
            Metric::MaxRatio => max_ratio(u, v),
            Metric::Kendall => kendall_tau(u, v),
        }
    }

    /// Higher means more similar only for Kendall's tau.
    pub fn is_similarity(self) -> bool {
        self == Metric::Kendall
    }

    /// Whether `candidate` is at least as close to the reference as `rival`.
    /// Values within [`TIE_TOLERANCE`] of each other are ties, and ties count
    /// as at least as close.
    pub fn at_least_as_close(self, candidate: f64, rival: f64) -> bool {
        if self.is_similarity() {
            candidate >= rival - TIE_TOLERANCE
        } else {
            candidate <= rival + TIE_TOLERANCE
        }
    }
}

/// One metric evaluated between the right eigenvector and each alternative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTriple {
    pub r_vs_inverse_left: f64,
    pub r_vs_rl: f64,
    pub r_vs_rgm: f64,
}

/// Everything measured for one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRecord {
    pub n: usize,
    pub lambda_max: f64,
    pub cr: f64,
    /// Indexed by [`Metric::index`].
    pub values: [MetricTriple; 4],
    /// Row geometric mean at least as close to the right vector as the
    /// inverse left vector, per metric.
    pub closer: [bool; 4],
    pub top_reversal: bool,
    pub any_reversal: bool,
    pub right: WeightVector,
    pub inverse_left: WeightVector,
    pub rl: WeightVector,
    pub rgm: WeightVector,
}

impl ComparisonRecord {
    pub fn metric(&self, m: Metric) -> MetricTriple {
        self.values[m.index()]
    }

    pub fn closer(&self, m: Metric) -> bool {
        self.closer[m.index()]
    }
}

/// Computes all weight vectors of `a` and compares them to the right
/// eigenvector.
pub fn compare_methods(a: &PCMatrix, cfg: &EigenSolverConfig, ri: &RiTable) -> Result<ComparisonRecord> {
    ri.lookup(a.order())?;
    let pair = EigenPair::compute(a, cfg)?;
    let right = pair.right.weights.clone();
    let inverse_left = pair.inverse_left.clone();
    let rl = combine_rl(&right, &inverse_left, RlCombination::Product)?;
    let rgm = row_geometric_mean(a);
    let report = report_from_lambda(pair.lambda_max(), a.order(), ri)?;

    let mut values = [MetricTriple {
        r_vs_inverse_left: 0.0,
        r_vs_rl: 0.0,
        r_vs_rgm: 0.0,
    }; 4];
    let mut closer = [false; 4];
    for m in Metric::ALL {
        let t = MetricTriple {
            r_vs_inverse_left: m.eval(&right, &inverse_left)?,
            r_vs_rl: m.eval(&right, &rl)?,
            r_vs_rgm: m.eval(&right, &rgm)?,
        };
        closer[m.index()] = m.at_least_as_close(t.r_vs_rgm, t.r_vs_inverse_left);
        values[m.index()] = t;
    }

    let any_reversal = values[Metric::Kendall.index()].r_vs_inverse_left < 1.0;
    Ok(ComparisonRecord {
        n: a.order(),
        lambda_max: pair.lambda_max(),
        cr: report.cr,
        values,
        closer,
        top_reversal: right.argmax() != inverse_left.argmax(),
        any_reversal,
        right,
        inverse_left,
        rl,
        rgm,
    })
}
