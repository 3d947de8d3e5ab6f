//! Random perturbed matrices and the binned comparison experiment.
//!
//! Every matrix gets its own random stream derived from
//! `(seed, n, delta, index)`, and all bin statistics are accumulated with
//! [`ExactSum`], so a run gives the same bits for any number of worker
//! threads and two half-runs merge into exactly the full run.

use std::collections::BTreeMap;
use std::ops::Range;

use rand::Rng;
use rayon::prelude::*;

use crate::consistency::RiTable;
use crate::error::{Error, Result};
use crate::matrix::{consistent_from_weights, PCMatrix};
use crate::metrics::{compare_methods, ComparisonRecord, Metric, MetricTriple};
use crate::reduce::{rng_for, ExactSum};
use crate::weighting::EigenSolverConfig;

/// Parameters of the perturbed-matrix generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    /// Half-width of the uniform additive perturbation.
    pub delta: f64,
    pub weight_low: f64,
    pub weight_high: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(n: usize, delta: f64, seed: u64) -> Self {
        Self {
            n,
            delta,
            weight_low: 1.0,
            weight_high: 9.0,
            seed,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::UnsupportedOrder(self.n));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidConfig(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.weight_low > 0.0 && self.weight_low < self.weight_high && self.weight_high.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "weight range [{}, {}] must satisfy 0 < low < high",
                self.weight_low, self.weight_high
            )));
        }
        Ok(())
    }

    /// Random stream of the `index`-th matrix of this configuration.
    pub fn stream(&self, index: u64) -> impl Rng {
        rng_for(self.seed, &[self.n as u64, self.delta.to_bits(), index])
    }
}

/// Perturbs an entry `a >= 1` by `eps`, folding results below 1 back onto
/// the reciprocal side so that the perturbation is symmetric on the scale
/// where `1/b` and `b` are equally far from 1.
pub fn perturb_entry(a: f64, eps: f64) -> f64 {
    if a + eps >= 1.0 {
        a + eps
    } else {
        1.0 / (1.0 - eps - (a - 1.0))
    }
}

/// Draws weights uniformly from `[weight_low, weight_high]`, forms the
/// consistent matrix they generate, perturbs the above-one entry of every
/// pair and restores reciprocity.
///
/// Pairs are visited in row-major order of the upper triangle with one draw
/// each; when `w_i = w_j` the `(i, j)` entry is perturbed.
pub fn generate_perturbed<R: Rng + ?Sized>(cfg: &GeneratorConfig, rng: &mut R) -> Result<PCMatrix> {
    cfg.check()?;
    let n = cfg.n;
    let weights: Vec<f64> = (0..n)
        .map(|_| rng.random_range(cfg.weight_low..=cfg.weight_high))
        .collect();
    let consistent = consistent_from_weights(&weights)?;
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let eps = rng.random_range(-cfg.delta..=cfg.delta);
            let a_ij = consistent.get(i, j);
            let value = if a_ij >= 1.0 {
                perturb_entry(a_ij, eps)
            } else {
                1.0 / perturb_entry(consistent.get(j, i), eps)
            };
            upper.push(value);
        }
    }
    PCMatrix::from_upper_triangle(n, &upper)
}

/// The `index`-th matrix of a configuration, reproducible in isolation.
pub fn generate_indexed(cfg: &GeneratorConfig, index: u64) -> Result<PCMatrix> {
    generate_perturbed(cfg, &mut cfg.stream(index))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dims: Vec<usize>,
    pub deltas: Vec<f64>,
    pub matrices_per_cell: u64,
    pub bin_width: f64,
    pub min_bin_count: u64,
    /// CR values at or above this share a single overflow bin.
    pub cr_cap: f64,
    pub seed: u64,
    pub weight_low: f64,
    pub weight_high: f64,
    pub eigen: EigenSolverConfig,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            dims: (4..=9).collect(),
            deltas: vec![1.0, 2.0, 3.0],
            matrices_per_cell: 1_000_000,
            bin_width: 0.005,
            min_bin_count: 1000,
            cr_cap: 0.5,
            seed: 0,
            weight_low: 1.0,
            weight_high: 9.0,
            eigen: EigenSolverConfig::default(),
        }
    }
}

impl SimulationConfig {
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.dims.is_empty() || self.deltas.is_empty() {
            return bad("dims and deltas must be non-empty".into());
        }
        if !(self.bin_width > 0.0) || !self.bin_width.is_finite() {
            return bad(format!("bin_width must be positive, got {}", self.bin_width));
        }
        if self.matrices_per_cell < 1 {
            return bad("matrices_per_cell must be at least 1".into());
        }
        if !(self.cr_cap > 0.0) {
            return bad(format!("cr_cap must be positive, got {}", self.cr_cap));
        }
        for &n in &self.dims {
            if !(crate::matrix::MIN_ORDER..=crate::matrix::MAX_ORDER).contains(&n) {
                return Err(Error::UnsupportedOrder(n));
            }
        }
        for &delta in &self.deltas {
            self.generator(self.dims[0], delta).check()?;
        }
        Ok(())
    }

    pub fn generator(&self, n: usize, delta: f64) -> GeneratorConfig {
        GeneratorConfig {
            n,
            delta,
            weight_low: self.weight_low,
            weight_high: self.weight_high,
            seed: self.seed,
        }
    }

    /// Bin index of a CR value; `None` for the overflow bin.
    pub fn bin_of(&self, cr: f64) -> Option<u64> {
        if cr >= self.cr_cap {
            None
        } else {
            Some((cr.max(0.0) / self.bin_width).floor() as u64)
        }
    }

    pub fn bin_lower(&self, bin: Option<u64>) -> f64 {
        match bin {
            Some(b) => b as f64 * self.bin_width,
            None => self.cr_cap,
        }
    }
}

/// Running sums for one CR bin.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BinAccumulator {
    pub count: u64,
    sums: [[ExactSum; 3]; 4],
    closer: [u64; 4],
    top_reversals: u64,
    any_reversals: u64,
}

impl BinAccumulator {
    pub fn push(&mut self, record: &ComparisonRecord) {
        self.count += 1;
        for m in Metric::ALL {
            let t = record.metric(m);
            let s = &mut self.sums[m.index()];
            s[0].push(t.r_vs_inverse_left);
            s[1].push(t.r_vs_rl);
            s[2].push(t.r_vs_rgm);
            self.closer[m.index()] += record.closer(m) as u64;
        }
        self.top_reversals += record.top_reversal as u64;
        self.any_reversals += record.any_reversal as u64;
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        for m in 0..4 {
            for k in 0..3 {
                self.sums[m][k] += other.sums[m][k];
            }
            self.closer[m] += other.closer[m];
        }
        self.top_reversals += other.top_reversals;
        self.any_reversals += other.any_reversals;
    }

    fn statistics(&self, n: usize, delta: Option<f64>, bin: Option<u64>, cfg: &SimulationConfig) -> BinStatistics {
        let c = self.count;
        let rate = |k: u64| if c == 0 { f64::NAN } else { k as f64 / c as f64 };
        let mut means = [MetricTriple {
            r_vs_inverse_left: f64::NAN,
            r_vs_rl: f64::NAN,
            r_vs_rgm: f64::NAN,
        }; 4];
        let mut closer_probability = [f64::NAN; 4];
        for m in 0..4 {
            means[m] = MetricTriple {
                r_vs_inverse_left: self.sums[m][0].mean(c),
                r_vs_rl: self.sums[m][1].mean(c),
                r_vs_rgm: self.sums[m][2].mean(c),
            };
            closer_probability[m] = rate(self.closer[m]);
        }
        BinStatistics {
            n,
            delta,
            bin_lower: cfg.bin_lower(bin),
            overflow: bin.is_none(),
            count: c,
            means,
            closer_probability,
            top_reversal_rate: rate(self.top_reversals),
            any_reversal_rate: rate(self.any_reversals),
            suppressed: c < cfg.min_bin_count,
        }
    }
}

/// Per-bin averages of one dimension, pooled over deltas (`delta == None`)
/// or for a single delta.
#[derive(Debug, Clone, PartialEq)]
pub struct BinStatistics {
    pub n: usize,
    pub delta: Option<f64>,
    pub bin_lower: f64,
    /// `[cr_cap, inf)` bucket.
    pub overflow: bool,
    pub count: u64,
    /// Indexed by [`Metric::index`].
    pub means: [MetricTriple; 4],
    pub closer_probability: [f64; 4],
    pub top_reversal_rate: f64,
    pub any_reversal_rate: f64,
    /// Fewer than `min_bin_count` matrices.
    pub suppressed: bool,
}

impl BinStatistics {
    pub fn mean(&self, m: Metric) -> MetricTriple {
        self.means[m.index()]
    }

    pub fn mean_kendall(&self) -> MetricTriple {
        self.mean(Metric::Kendall)
    }

    pub fn closer_probability(&self, m: Metric) -> f64 {
        self.closer_probability[m.index()]
    }
}

type BinKey = Option<u64>;

/// Bins of one `(n, delta)` cell.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CellAccumulator {
    /// `None` sorts first; finished output lists it last.
    bins: BTreeMap<BinKey, BinAccumulator>,
    failures: u64,
}

impl CellAccumulator {
    fn merge(&mut self, other: &Self) {
        for (k, acc) in &other.bins {
            self.bins.entry(*k).or_default().merge(acc);
        }
        self.failures += other.failures;
    }

    fn records(&self) -> u64 {
        self.bins.values().map(|b| b.count).sum()
    }
}

fn ordered_bins(bins: &BTreeMap<BinKey, BinAccumulator>) -> impl Iterator<Item = (&BinKey, &BinAccumulator)> {
    bins.iter().filter(|(k, _)| k.is_some()).chain(bins.iter().filter(|(k, _)| k.is_none()))
}

/// Partial result of a simulation over a range of matrix indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimulationAccumulator {
    /// Keyed by `(n, delta position in the config)`.
    cells: BTreeMap<(usize, usize), CellAccumulator>,
}

impl SimulationAccumulator {
    /// Combines two partial runs. The result does not depend on the order.
    pub fn merge(&mut self, other: &Self) {
        for (k, cell) in &other.cells {
            self.cells.entry(*k).or_default().merge(cell);
        }
    }

    pub fn finish(&self, cfg: &SimulationConfig) -> SimulationResult {
        let mut histogram = CrHistogram::default();
        let mut per_delta = Vec::new();
        let mut pooled_acc: BTreeMap<usize, BTreeMap<BinKey, BinAccumulator>> = BTreeMap::new();
        let mut convergence_failures = 0;
        for (&(n, d), cell) in &self.cells {
            let delta = cfg.deltas[d];
            convergence_failures += cell.failures;
            let mut counts = Vec::new();
            for (bin, acc) in ordered_bins(&cell.bins) {
                counts.push(HistogramBin {
                    bin_lower: cfg.bin_lower(*bin),
                    overflow: bin.is_none(),
                    count: acc.count,
                });
                per_delta.push(acc.statistics(n, Some(delta), *bin, cfg));
                pooled_acc.entry(n).or_default().entry(*bin).or_default().merge(acc);
            }
            histogram.cells.push(HistogramCell {
                n,
                delta,
                generated: cell.records() + cell.failures,
                failures: cell.failures,
                bins: counts,
            });
        }
        let pooled = pooled_acc
            .iter()
            .flat_map(|(&n, bins)| ordered_bins(bins).map(move |(bin, acc)| acc.statistics(n, None, *bin, cfg)))
            .collect();
        SimulationResult {
            histogram,
            pooled,
            per_delta,
            convergence_failures,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBin {
    pub bin_lower: f64,
    pub overflow: bool,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramCell {
    pub n: usize,
    pub delta: f64,
    /// Matrices generated for this cell, including convergence failures.
    pub generated: u64,
    pub failures: u64,
    /// Bins that received at least one matrix, in increasing CR order with
    /// the overflow bin last.
    pub bins: Vec<HistogramBin>,
}

/// Distribution of CR per `(n, delta)` cell.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CrHistogram {
    pub cells: Vec<HistogramCell>,
}

impl CrHistogram {
    pub fn cell(&self, n: usize, delta: f64) -> Option<&HistogramCell> {
        self.cells.iter().find(|c| c.n == n && c.delta == delta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub histogram: CrHistogram,
    /// One series per dimension, all deltas pooled.
    pub pooled: Vec<BinStatistics>,
    /// One series per `(n, delta)` cell.
    pub per_delta: Vec<BinStatistics>,
    /// Matrices whose eigenvector computation failed; they are not binned.
    pub convergence_failures: u64,
}

impl SimulationResult {
    pub fn pooled_for(&self, n: usize) -> impl Iterator<Item = &BinStatistics> {
        self.pooled.iter().filter(move |b| b.n == n)
    }
}

/// Matrices handed to one rayon task.
const CHUNK: u64 = 512;

/// Simulates matrices with indices in `range` for every `(n, delta)` cell,
/// on the current rayon pool.
pub fn simulate_range(cfg: &SimulationConfig, ri: &RiTable, range: Range<u64>) -> Result<SimulationAccumulator> {
    cfg.check()?;
    for &n in &cfg.dims {
        ri.lookup(n)?;
    }
    let mut total = SimulationAccumulator::default();
    for &n in &cfg.dims {
        for (d, &delta) in cfg.deltas.iter().enumerate() {
            let generator = cfg.generator(n, delta);
            let start = range.start;
            let chunks = (range.end.saturating_sub(start)).div_ceil(CHUNK);
            let cell = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let lo = start + c * CHUNK;
                    let hi = (lo + CHUNK).min(range.end);
                    let mut acc = CellAccumulator::default();
                    for index in lo..hi {
                        let m = generate_indexed(&generator, index)?;
                        match compare_methods(&m, &cfg.eigen, ri) {
                            Ok(record) => acc.bins.entry(cfg.bin_of(record.cr)).or_default().push(&record),
                            Err(Error::NoConvergence { .. } | Error::EigenvalueMismatch { .. }) => acc.failures += 1,
                            Err(e) => return Err(e),
                        }
                    }
                    Ok(acc)
                })
                .try_reduce(CellAccumulator::default, |mut a, b| {
                    a.merge(&b);
                    Ok(a)
                })?;
            total.cells.insert((n, d), cell);
        }
    }
    Ok(total)
}

/// Runs the whole experiment with `workers` threads (0 = rayon default).
pub fn run_simulation(cfg: &SimulationConfig, ri: &RiTable, workers: usize) -> Result<SimulationResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let acc = pool.install(|| simulate_range(cfg, ri, 0..cfg.matrices_per_cell))?;
    Ok(acc.finish(cfg))
}

/// Fraction of records whose row geometric mean is at least as close to
/// the right eigenvector as the inverse left eigenvector.
pub fn closest_probability(records: &[ComparisonRecord], metric: Metric) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyBin);
    }
    let hits = records.iter().filter(|r| r.closer(metric)).count();
    Ok(hits as f64 / records.len() as f64)
}
