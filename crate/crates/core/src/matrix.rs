//! Pairwise comparison matrices and priority vectors.
//!
//! A [`PCMatrix`] is a positive reciprocal square matrix: `a_ij > 0`,
//! `a_ii = 1` and `a_ji = 1 / a_ij`. Every constructor in this module either
//! checks these invariants or establishes them by construction, so the rest
//! of the crate can rely on them without re-validating.

use std::fmt;

use crate::error::{Error, Result};

/// Smallest order accepted by [`validate`].
pub const MIN_ORDER: usize = 3;
/// Largest order accepted by [`validate`].
pub const MAX_ORDER: usize = 15;

/// Reciprocity tolerance for matrices built in code.
pub const PROGRAMMATIC_TOLERANCE: f64 = 1e-9;
/// Reciprocity tolerance for matrices read from text files, whose entries are
/// usually printed with three or four decimals.
pub const FILE_TOLERANCE: f64 = 1e-3;

/// How [`validate`] treats the lower triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReciprocityMode {
    /// Reject any pair whose product deviates from 1 by more than the tolerance.
    Strict,
    /// Keep the upper triangle and overwrite the lower triangle with exact
    /// reciprocals; the diagonal is forced to 1.
    RepairFromUpper,
    /// Treat each decimal entry as the rounding of an unknown exact value and
    /// pick, for every pair, the geometric midpoint of the values compatible
    /// with both printed entries. Pairs whose rounding intervals do not
    /// overlap fall back to the strict tolerance check.
    ReconcileRounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReciprocityPolicy {
    pub mode: ReciprocityMode,
    pub tolerance: f64,
}

impl ReciprocityPolicy {
    pub fn new(mode: ReciprocityMode, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance <= 0.1) {
            return Err(Error::InvalidConfig(format!(
                "reciprocity tolerance {tolerance} not in (0, 0.1]"
            )));
        }
        Ok(Self { mode, tolerance })
    }

    pub fn strict(tolerance: f64) -> Result<Self> {
        Self::new(ReciprocityMode::Strict, tolerance)
    }

    /// Library default: strict at 1e-9.
    pub fn programmatic() -> Self {
        Self {
            mode: ReciprocityMode::Strict,
            tolerance: PROGRAMMATIC_TOLERANCE,
        }
    }

    /// Default for matrix files: strict at 1e-3.
    pub fn file() -> Self {
        Self {
            mode: ReciprocityMode::Strict,
            tolerance: FILE_TOLERANCE,
        }
    }

    /// Default for simulation inputs.
    pub fn simulation() -> Self {
        Self {
            mode: ReciprocityMode::RepairFromUpper,
            tolerance: PROGRAMMATIC_TOLERANCE,
        }
    }
}

impl Default for ReciprocityPolicy {
    fn default() -> Self {
        Self::programmatic()
    }
}

/// Unvalidated square array, optionally annotated with the rounding
/// half-width of every entry (0 for exact entries).
#[derive(Debug, Clone, PartialEq)]
pub struct RawMatrix {
    n: usize,
    entries: Vec<f64>,
    half_widths: Vec<f64>,
}

impl RawMatrix {
    /// Builds a raw matrix from rows. All entries are treated as exact.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::NonSquare {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
            entries.extend_from_slice(r);
        }
        Ok(Self {
            n,
            half_widths: vec![0.0; entries.len()],
            entries,
        })
    }

    /// Builds a raw matrix from row-major values and matching half-widths.
    pub fn with_half_widths(n: usize, entries: Vec<f64>, half_widths: Vec<f64>) -> Result<Self> {
        for (len, row) in [(entries.len(), 0), (half_widths.len(), 0)] {
            if len != n * n {
                return Err(Error::NonSquare {
                    row,
                    len,
                    expected: n * n,
                });
            }
        }
        Ok(Self {
            n,
            entries,
            half_widths,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn half_width(&self, i: usize, j: usize) -> f64 {
        self.half_widths[i * self.n + j]
    }

    /// Checks the matrix against `policy`, see [`validate`].
    pub fn validate(&self, policy: ReciprocityPolicy) -> Result<PCMatrix> {
        let n = self.n;
        if !(MIN_ORDER..=MAX_ORDER).contains(&n) {
            return Err(Error::UnsupportedOrder(n));
        }
        for i in 0..n {
            for j in 0..n {
                let value = self.get(i, j);
                if !(value > 0.0) || !value.is_finite() {
                    return Err(Error::NonPositiveEntry { i, j, value });
                }
            }
        }

        let mut out = vec![1.0; n * n];
        for i in 0..n {
            if policy.mode == ReciprocityMode::Strict && self.get(i, i) != 1.0 {
                return Err(Error::DiagonalNotOne {
                    i,
                    value: self.get(i, i),
                });
            }
            for j in (i + 1)..n {
                let upper = self.get(i, j);
                let lower = self.get(j, i);
                let residual = (upper * lower - 1.0).abs();
                let value = match policy.mode {
                    ReciprocityMode::Strict => {
                        if residual > policy.tolerance {
                            return Err(Error::ReciprocityViolation { i, j, residual });
                        }
                        out[j * n + i] = lower;
                        out[i * n + j] = upper;
                        continue;
                    }
                    ReciprocityMode::RepairFromUpper => upper,
                    ReciprocityMode::ReconcileRounded => {
                        match reconcile(upper, self.half_width(i, j), lower, self.half_width(j, i)) {
                            Some(v) => v,
                            None if residual <= policy.tolerance => upper,
                            None => return Err(Error::ReciprocityViolation { i, j, residual }),
                        }
                    }
                };
                out[i * n + j] = value;
                out[j * n + i] = 1.0 / value;
            }
        }
        Ok(PCMatrix { n, entries: out })
    }
}

/// Geometric midpoint of the values `x` with `|x - upper| <= hu` and
/// `|1/x - lower| <= hl`, or `None` when there is no such value or both
/// entries are exact.
fn reconcile(upper: f64, hu: f64, lower: f64, hl: f64) -> Option<f64> {
    if hu == 0.0 && hl == 0.0 {
        return None;
    }
    let lo_u = (upper - hu).max(f64::MIN_POSITIVE);
    let hi_u = upper + hu;
    let lo_l = 1.0 / (lower + hl);
    let hi_l = if lower - hl > 0.0 {
        1.0 / (lower - hl)
    } else {
        f64::INFINITY
    };
    let lo = lo_u.max(lo_l);
    let hi = hi_u.min(hi_l);
    if lo > hi {
        return None;
    }
    Some((lo * hi).sqrt())
}

/// Validates a raw square array of reals under `policy`.
pub fn validate<R: AsRef<[f64]>>(rows: &[R], policy: ReciprocityPolicy) -> Result<PCMatrix> {
    RawMatrix::from_rows(rows)?.validate(policy)
}

/// Positive reciprocal matrix with unit diagonal. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct PCMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl PCMatrix {
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// `n x n` matrix of ones.
    pub fn ones(n: usize) -> Self {
        Self {
            n,
            entries: vec![1.0; n * n],
        }
    }

    /// Builds a matrix from its strict upper triangle, given row by row
    /// (`a_12, a_13, ..., a_1n, a_23, ...`). The lower triangle is filled with
    /// exact reciprocals.
    pub fn from_upper_triangle(n: usize, upper: &[f64]) -> Result<Self> {
        let expected = n * n.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: upper.len(),
            });
        }
        let mut entries = vec![1.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let value = upper[k];
                if !(value > 0.0) || !value.is_finite() {
                    return Err(Error::NonPositiveEntry { i, j, value });
                }
                entries[i * n + j] = value;
                entries[j * n + i] = 1.0 / value;
                k += 1;
            }
        }
        Ok(Self { n, entries })
    }

    /// `(A^T)_ij = a_ji`.
    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        Self { n, entries }
    }

    /// Relabels alternatives: entry `(i, j)` of the result is `a_{perm[i], perm[j]}`.
    ///
    /// Panics if `perm` is not a permutation of `0..n`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let n = self.n;
        assert_eq!(perm.len(), n, "permutation length");
        let mut seen = vec![false; n];
        for &p in perm {
            assert!(!std::mem::replace(&mut seen[p], true), "not a permutation");
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Self { n, entries }
    }

    /// Largest `|a_ij * a_ji - 1|` over all pairs.
    pub fn reciprocity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) * self.get(j, i) - 1.0).abs());
            }
        }
        worst
    }

    /// Largest `|a_ij * a_jk / a_ik - 1|` over all triads.
    pub fn triad_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a_ij = self.get(i, j);
                for k in 0..n {
                    worst = worst.max((a_ij * self.get(j, k) / self.get(i, k) - 1.0).abs());
                }
            }
        }
        worst
    }

    pub(crate) fn from_entries_unchecked(n: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        Self { n, entries }
    }
}

impl fmt::Display for PCMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Matrix generated by `w`: `a_ij = w_i / w_j`.
pub fn consistent_from_weights(w: &[f64]) -> Result<PCMatrix> {
    check_positive(w)?;
    let n = w.len();
    if n < 2 {
        return Err(Error::UnsupportedOrder(n));
    }
    let mut entries = Vec::with_capacity(n * n);
    for wi in w {
        entries.extend(w.iter().map(|wj| wi / wj));
    }
    Ok(PCMatrix { n, entries })
}

/// True iff every triad satisfies `|a_ij a_jk / a_ik - 1| <= tol`.
pub fn is_consistent(matrix: &PCMatrix, tol: f64) -> bool {
    matrix.triad_residual() <= tol
}

pub fn transpose(matrix: &PCMatrix) -> PCMatrix {
    matrix.transpose()
}

/// Target sum of a [`WeightVector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    SumOne,
    SumHundred,
}

impl Normalization {
    pub fn total(self) -> f64 {
        match self {
            Normalization::SumOne => 1.0,
            Normalization::SumHundred => 100.0,
        }
    }
}

/// Which procedure produced a weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Given,
    Right,
    Left,
    InverseLeft,
    RlCombined,
    RowGeometricMean,
    Aggregated,
}

/// Positive priority vector summing to 1 or 100.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    priorities: Vec<f64>,
    normalization: Normalization,
    provenance: Provenance,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.priorities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priorities.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.priorities
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Same priorities rescaled to `target`.
    pub fn rescaled(&self, target: Normalization) -> Self {
        if target == self.normalization {
            return self.clone();
        }
        let factor = target.total() / self.normalization.total();
        Self {
            priorities: self.priorities.iter().map(|p| p * factor).collect(),
            normalization: target,
            provenance: self.provenance,
        }
    }

    /// Priorities on the sum-one scale.
    pub fn sum_one(&self) -> Vec<f64> {
        self.rescaled(Normalization::SumOne).priorities
    }

    /// Index of the largest priority (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.priorities.iter().enumerate() {
            if p > self.priorities[best] {
                best = i;
            }
        }
        best
    }

    /// Alternatives sorted by decreasing priority, ties broken by index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.priorities[b].total_cmp(&self.priorities[a]).then(a.cmp(&b)));
        order
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        Self {
            priorities: perm.iter().map(|&p| self.priorities[p]).collect(),
            normalization: self.normalization,
            provenance: self.provenance,
        }
    }
}

fn check_positive(raw: &[f64]) -> Result<()> {
    for (index, &value) in raw.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositiveWeight { index, value });
        }
    }
    Ok(())
}

/// Scales positive `raw` so that it sums to `target`.
pub fn normalize(raw: &[f64], target: Normalization) -> Result<WeightVector> {
    if raw.is_empty() {
        return Err(Error::EmptyList);
    }
    check_positive(raw)?;
    let sum: f64 = raw.iter().sum();
    let factor = target.total() / sum;
    Ok(WeightVector {
        priorities: raw.iter().map(|v| v * factor).collect(),
        normalization: target,
        provenance: Provenance::Given,
    })
}

pub(crate) fn normalize_as(raw: &[f64], provenance: Provenance) -> Result<WeightVector> {
    normalize(raw, Normalization::SumOne).map(|w| w.with_provenance(provenance))
}
