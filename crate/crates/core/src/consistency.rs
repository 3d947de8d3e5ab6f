//! Saaty's consistency index, random index and consistency ratio.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::PCMatrix;
use crate::reduce::{rng_for, ExactSum};
use crate::weighting::{right_eigenvector, EigenSolverConfig};

/// Matrices with `CR` at or below this are acceptable.
pub const ACCEPTABLE_CR: f64 = 0.1;

/// Negative `CI` values smaller than this in magnitude are solver noise.
const CI_NOISE: f64 = 1e-9;

/// Samples per independently seeded chunk in [`estimate_random_index`].
const RI_CHUNK: u64 = 10_000;

/// The seventeen values of the discrete 1/9..9 judgment scale.
pub const SAATY_SCALE: [f64; 17] = [
    1.0 / 9.0,
    1.0 / 8.0,
    1.0 / 7.0,
    1.0 / 6.0,
    1.0 / 5.0,
    1.0 / 4.0,
    1.0 / 3.0,
    1.0 / 2.0,
    1.0,
    2.0,
    3.0,
    4.0,
    5.0,
    6.0,
    7.0,
    8.0,
    9.0,
];

/// Where a random index value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiSource {
    Table,
    Estimated { samples: u64, seed: u64 },
}

impl fmt::Display for RiSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RiSource::Table => write!(f, "table"),
            RiSource::Estimated { samples, seed } => write!(f, "estimated (samples={samples}, seed={seed})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiEntry {
    pub ri: f64,
    pub source: RiSource,
}

/// Random index per matrix order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RiTable {
    entries: BTreeMap<usize, RiEntry>,
}

const SHIPPED_RI_TABLE: &str = include_str!("../data/ri_table.txt");

impl RiTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table bundled with the crate, estimated on the discrete scale for
    /// n = 3..=15.
    pub fn shipped() -> Self {
        Self::parse(SHIPPED_RI_TABLE).expect("bundled RI table is well formed")
    }

    pub fn insert(&mut self, n: usize, ri: f64, source: RiSource) -> Result<()> {
        if !(ri > 0.0) || !ri.is_finite() {
            return Err(Error::InvalidConfig(format!("random index for n = {n} must be positive, got {ri}")));
        }
        self.entries.insert(n, RiEntry { ri, source });
        Ok(())
    }

    pub fn get(&self, n: usize) -> Option<RiEntry> {
        self.entries.get(&n).copied()
    }

    pub fn lookup(&self, n: usize) -> Result<RiEntry> {
        self.get(n).ok_or(Error::MissingRi(n))
    }

    pub fn orders(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    /// Same table with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|(&n, e)| (n, RiEntry { ri: e.ri * factor, ..*e }))
                .collect(),
        }
    }

    /// Parses lines `n ri samples seed` (estimated) or `n ri` (user supplied).
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Self::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: String| Error::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let n: usize = fields[0].parse().map_err(|_| bad(format!("invalid order {:?}", fields[0])))?;
            let ri: f64 = fields
                .get(1)
                .ok_or_else(|| bad("missing random index".into()))?
                .parse()
                .map_err(|_| bad(format!("invalid random index {:?}", fields[1])))?;
            let source = match fields.len() {
                2 => RiSource::Table,
                4 => RiSource::Estimated {
                    samples: fields[2].parse().map_err(|_| bad(format!("invalid sample count {:?}", fields[2])))?,
                    seed: fields[3].parse().map_err(|_| bad(format!("invalid seed {:?}", fields[3])))?,
                },
                k => return Err(bad(format!("expected 2 or 4 fields, found {k}"))),
            };
            table.insert(n, ri, source).map_err(|e| bad(e.to_string()))?;
        }
        Ok(table)
    }

    /// Serializes as `n ri samples seed` lines (`n ri` for table values).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (n, e) in &self.entries {
            match e.source {
                RiSource::Table => out.push_str(&format!("{n} {}\n", e.ri)),
                RiSource::Estimated { samples, seed } => out.push_str(&format!("{n} {} {samples} {seed}\n", e.ri)),
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub n: usize,
    pub lambda_max: f64,
    pub ci: f64,
    pub ri: f64,
    pub ri_source: RiSource,
    pub cr: f64,
    pub acceptable: bool,
}

/// `(lambda_max - n) / (n - 1)`, with tiny negative noise clamped to 0.
pub fn ci_from_lambda(lambda_max: f64, n: usize) -> f64 {
    let ci = (lambda_max - n as f64) / (n as f64 - 1.0);
    if ci < 0.0 && ci > -CI_NOISE {
        0.0
    } else {
        ci
    }
}

pub fn consistency_index(a: &PCMatrix, cfg: &EigenSolverConfig) -> Result<f64> {
    let right = right_eigenvector(a, cfg)?;
    Ok(ci_from_lambda(right.lambda_max, a.order()))
}

/// Builds a report from an already computed dominant eigenvalue.
pub fn report_from_lambda(lambda_max: f64, n: usize, ri: &RiTable) -> Result<ConsistencyReport> {
    let entry = ri.lookup(n)?;
    let ci = ci_from_lambda(lambda_max, n);
    let cr = ci / entry.ri;
    Ok(ConsistencyReport {
        n,
        lambda_max,
        ci,
        ri: entry.ri,
        ri_source: entry.source,
        cr,
        acceptable: cr <= ACCEPTABLE_CR,
    })
}

pub fn consistency_ratio(a: &PCMatrix, ri: &RiTable, cfg: &EigenSolverConfig) -> Result<ConsistencyReport> {
    ri.lookup(a.order())?;
    let right = right_eigenvector(a, cfg)?;
    report_from_lambda(right.lambda_max, a.order(), ri)
}

/// Distribution of the upper-triangle entries of random matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RandomScale {
    /// Uniform over the seventeen values of [`SAATY_SCALE`].
    #[default]
    Saaty,
    /// Log-uniform on [1/9, 9].
    Continuous,
}

/// Random reciprocal matrix with entries drawn from `scale`.
pub fn random_reciprocal<R: Rng + ?Sized>(n: usize, scale: RandomScale, rng: &mut R) -> PCMatrix {
    let upper: Vec<f64> = (0..n * (n - 1) / 2)
        .map(|_| match scale {
            RandomScale::Saaty => SAATY_SCALE[rng.random_range(0..SAATY_SCALE.len())],
            RandomScale::Continuous => (rng.random_range(-1.0..=1.0) * 9f64.ln()).exp(),
        })
        .collect();
    PCMatrix::from_upper_triangle(n, &upper).expect("scale values are positive")
}

/// Mean consistency index of `samples` random matrices on the discrete scale.
pub fn estimate_random_index(n: usize, samples: u64, seed: u64) -> Result<f64> {
    estimate_random_index_with(n, samples, seed, RandomScale::Saaty, &EigenSolverConfig::default())
}

/// Runs on the current rayon pool. Samples are split into fixed chunks with
/// their own derived streams, so the result does not depend on the number of
/// worker threads.
pub fn estimate_random_index_with(
    n: usize,
    samples: u64,
    seed: u64,
    scale: RandomScale,
    cfg: &EigenSolverConfig,
) -> Result<f64> {
    if samples < 1000 {
        return Err(Error::InvalidConfig(format!("at least 1000 samples required, got {samples}")));
    }
    if n < 3 {
        return Err(Error::UnsupportedOrder(n));
    }
    let chunks = samples.div_ceil(RI_CHUNK);
    let total = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = rng_for(seed, &[n as u64, chunk]);
            let count = RI_CHUNK.min(samples - chunk * RI_CHUNK);
            let mut sum = ExactSum::new();
            for _ in 0..count {
                let m = random_reciprocal(n, scale, &mut rng);
                sum.push(consistency_index(&m, cfg)?);
            }
            Ok(sum)
        })
        .try_reduce(ExactSum::new, |a, b| Ok(a + b))?;
    Ok(total.mean(samples))
}
