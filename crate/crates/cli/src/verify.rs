//! Reference matrices with published priorities and consistency ratios.
//!
//! Matrices are stored as text in the file format: exact fractions where the
//! source gives fractions, decimals where it gives decimals. The three
//! simulated examples are printed to three or four decimals and are not
//! exactly reciprocal as printed; they are loaded with
//! [`ReciprocityMode::ReconcileRounded`], which picks for each pair the value
//! compatible with both printed entries.

use std::fmt::Write as _;

use pcm_core::metrics::kendall_tau;
use pcm_core::text::parse_matrix;
use pcm_core::weighting::{aggregate_matrices_geometric, aggregate_priorities_geometric, EigenPair};
use pcm_core::{
    consistency_ratio, EigenSolverConfig, Normalization, PCMatrix, ReciprocityMode, ReciprocityPolicy, RiTable,
};

/// What is being checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    /// Right eigenvector component, sum-100 scale.
    Right(usize),
    /// Left eigenvector component, sum-100 scale.
    Left(usize),
    /// Inverse left eigenvector component, sum-100 scale.
    InverseLeft(usize),
    Cr,
    KendallRightInverseLeft,
    /// `w_i - w_j` of the right eigenvector, sum-100 scale.
    RightGap(usize, usize),
    /// `w_i - w_j` of the inverse left eigenvector, sum-100 scale.
    InverseLeftGap(usize, usize),
    /// `1` if the right and inverse left vectors pick different best
    /// alternatives, else `0`.
    TopReversal,
    /// Largest deviation from 25 of the right eigenvector (sum-100) of the
    /// geometric mean of the matrix and its transpose.
    AggregatedJudgmentsSpread,
    /// `w_2 - w_1` after geometrically aggregating the right eigenvectors of
    /// the matrix and its transpose.
    AggregatedPrioritiesGap(usize, usize),
}

impl Quantity {
    pub fn label(&self) -> String {
        match *self {
            Quantity::Right(i) => format!("w^R[{}]", i + 1),
            Quantity::Left(i) => format!("w^L[{}]", i + 1),
            Quantity::InverseLeft(i) => format!("w^-L[{}]", i + 1),
            Quantity::Cr => "CR".into(),
            Quantity::KendallRightInverseLeft => "tau(w^R, w^-L)".into(),
            Quantity::RightGap(i, j) => format!("w^R[{}] - w^R[{}]", i + 1, j + 1),
            Quantity::InverseLeftGap(i, j) => format!("w^-L[{}] - w^-L[{}]", i + 1, j + 1),
            Quantity::TopReversal => "top alternative differs".into(),
            Quantity::AggregatedJudgmentsSpread => "AIJ max |w - 25|".into(),
            Quantity::AggregatedPrioritiesGap(i, j) => format!("AIP w[{}] - w[{}]", i + 1, j + 1),
        }
    }

    /// True for checks that depend on the random index table.
    pub fn uses_ri(&self) -> bool {
        matches!(self, Quantity::Cr)
    }
}

/// Acceptance rule for one quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expectation {
    Near { value: f64, tol: f64 },
    Relative { value: f64, tol: f64 },
    Above(f64),
    Below(f64),
}

impl Expectation {
    pub fn accepts(&self, actual: f64) -> bool {
        match *self {
            Expectation::Near { value, tol } => (actual - value).abs() <= tol,
            Expectation::Relative { value, tol } => ((actual - value) / value).abs() <= tol,
            Expectation::Above(t) => actual > t,
            Expectation::Below(t) => actual < t,
        }
    }

    /// Signed distance from the expected value (0 for threshold checks that pass).
    pub fn residual(&self, actual: f64) -> f64 {
        match *self {
            Expectation::Near { value, .. } => actual - value,
            Expectation::Relative { value, .. } => (actual - value) / value,
            Expectation::Above(t) => (t - actual).max(0.0),
            Expectation::Below(t) => (actual - t).max(0.0),
        }
    }

    fn describe(&self) -> String {
        match *self {
            Expectation::Near { value, tol } => format!("{value} ± {tol}"),
            Expectation::Relative { value, tol } => format!("{value} (rel ± {tol:e})"),
            Expectation::Above(t) => format!("> {t}"),
            Expectation::Below(t) => format!("< {t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyCase {
    pub name: &'static str,
    pub source: &'static str,
    pub matrix_text: &'static str,
    pub mode: ReciprocityMode,
    pub expected: Vec<(Quantity, Expectation)>,
}

impl VerifyCase {
    pub fn matrix(&self) -> PCMatrix {
        let tol = match self.mode {
            ReciprocityMode::Strict => 1e-9,
            _ => pcm_core::matrix::FILE_TOLERANCE,
        };
        let policy = ReciprocityPolicy::new(self.mode, tol).expect("valid policy");
        parse_matrix(self.matrix_text, policy).expect("embedded matrix is valid")
    }
}

fn near_all(q: fn(usize) -> Quantity, values: &[f64], tol: f64) -> Vec<(Quantity, Expectation)> {
    values
        .iter()
        .enumerate()
        .map(|(i, &value)| (q(i), Expectation::Near { value, tol }))
        .collect()
}

fn relative_all(q: fn(usize) -> Quantity, values: &[f64], tol: f64) -> Vec<(Quantity, Expectation)> {
    let total: f64 = values.iter().sum();
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| (q(i), Expectation::Relative { value: 100.0 * v / total, tol }))
        .collect()
}

/// Two-decimal values on the sum-100 scale.
const TWO_DECIMALS: f64 = 0.005;
/// Four-decimal values on the sum-100 scale.
const FOUR_DECIMALS: f64 = 0.0005;
const EXACT: f64 = 1e-6;

pub const EXAMPLE1_DM1: &str = "\
# group decision example, first decision-maker
4
1    1    1    9
1    1    2    5
1    1/2  1    9
1/9  1/5  1/9  1
";

pub const EXAMPLE1_DM2: &str = "\
# group decision example, second decision-maker (transpose of the first)
4
1  1  1    1/9
1  1  1/2  1/5
1  2  1    1/9
9  5  9    1
";

pub const JOHNSON: &str = "\
# Johnson, Beine and Wang (1979)
4
1    3    1/3  1/2
1/3  1    1/6  2
3    6    1    1
2    1/2  1    1
";

pub const DETURCK: &str = "\
# DeTurck (1987)
4
1    8/5   1/4  4
5/8  1     5/8  10
4    8/5   1    4
1/4  1/10  1/4  1
";

pub const DODD: &str = "\
# Dodd, Donegan and McMaster (1995)
5
1    1    3    9  9
1    1    5    8  5
1/3  1/5  1    9  5
1/9  1/8  1/9  1  1
1/9  1/5  1/5  1  1
";

pub const SIM_M1: &str = "\
# simulated example: rank reversal at CR ~ 0.0007
4
1       0.4759  0.9832  0.4025
2.1011  1       1.9975  0.7374
1.0171  0.5006  1       0.3704
2.4842  1.3560  2.6998  1
";

pub const SIM_M2: &str = "\
# simulated example: opposite orders
5
1      1.624  0.574  1.072  1.054
0.616  1      1.132  1.089  1.269
1.743  0.884  1      1.515  0.467
0.933  0.919  0.660  1      1.694
0.949  0.788  2.140  0.590  1
";

pub const SIM_M3: &str = "\
# simulated example: top alternative flips between distant weights
5
1      0.371  2.013  5.389  0.243
2.698  1      4.596  7.527  0.736
0.497  0.218  1      2.321  0.167
0.186  0.133  0.431  1      0.385
4.120  1.359  5.973  2.598  1
";

/// The embedded reference cases.
pub fn cases() -> Vec<VerifyCase> {
    let mut out = Vec::new();

    let mut expected = near_all(Quantity::Right, &[32.42, 35.02, 28.21, 4.35], TWO_DECIMALS);
    expected.push((Quantity::AggregatedJudgmentsSpread, Expectation::Near { value: 0.0, tol: 1e-9 }));
    expected.push((Quantity::AggregatedPrioritiesGap(1, 0), Expectation::Above(0.0)));
    out.push(VerifyCase {
        name: "group-example-dm1",
        source: "group decision example, matrix A",
        matrix_text: EXAMPLE1_DM1,
        mode: ReciprocityMode::Strict,
        expected,
    });

    out.push(VerifyCase {
        name: "group-example-dm2",
        source: "group decision example, matrix B",
        matrix_text: EXAMPLE1_DM2,
        mode: ReciprocityMode::Strict,
        expected: near_all(Quantity::Right, &[8.86, 9.05, 11.04, 71.05], TWO_DECIMALS),
    });

    let mut expected = near_all(Quantity::Right, &[18.44, 15.19, 43.64, 22.73], TWO_DECIMALS);
    expected.extend(near_all(Quantity::Left, &[24.82, 38.78, 10.49, 25.91], TWO_DECIMALS));
    expected.extend(near_all(Quantity::InverseLeft, &[20.14, 12.89, 47.67, 19.29], TWO_DECIMALS));
    expected.push((Quantity::Cr, Expectation::Near { value: 0.331, tol: 0.01 }));
    expected.push((Quantity::RightGap(3, 0), Expectation::Above(0.0)));
    expected.push((Quantity::InverseLeftGap(0, 3), Expectation::Above(0.0)));
    out.push(VerifyCase {
        name: "johnson",
        source: "Johnson, Beine and Wang (1979)",
        matrix_text: JOHNSON,
        mode: ReciprocityMode::Strict,
        expected,
    });

    let right = [2.0 / 9.0, 5.0 / 18.0, 4.0 / 9.0, 1.0 / 18.0];
    let mut expected = relative_all(Quantity::Right, &right, EXACT);
    expected.extend(relative_all(Quantity::Left, &[0.25, 0.2, 0.125, 1.0], EXACT));
    expected.extend(relative_all(Quantity::InverseLeft, &right, EXACT));
    expected.push((Quantity::Cr, Expectation::Above(0.1)));
    out.push(VerifyCase {
        name: "deturck",
        source: "DeTurck (1987)",
        matrix_text: DETURCK,
        mode: ReciprocityMode::Strict,
        expected,
    });

    let mut expected = near_all(
        Quantity::Right,
        &[36.5652, 38.9564, 16.7155, 3.4693, 4.2936],
        FOUR_DECIMALS,
    );
    expected.extend(near_all(
        Quantity::InverseLeft,
        &[40.6431, 36.4208, 15.0669, 3.4391, 4.4302],
        FOUR_DECIMALS,
    ));
    expected.push((Quantity::Cr, Expectation::Near { value: 0.082, tol: 0.005 }));
    expected.push((Quantity::TopReversal, Expectation::Near { value: 1.0, tol: 0.0 }));
    out.push(VerifyCase {
        name: "dodd",
        source: "Dodd, Donegan and McMaster (1995)",
        matrix_text: DODD,
        mode: ReciprocityMode::Strict,
        expected,
    });

    let mut expected = near_all(Quantity::Right, &[15.042, 30.274, 15.037, 39.647], TWO_DECIMALS);
    expected.extend(near_all(Quantity::InverseLeft, &[15.036, 30.281, 15.049, 39.635], TWO_DECIMALS));
    expected.push((Quantity::Cr, Expectation::Near { value: 0.0007, tol: 0.0005 }));
    expected.push((Quantity::RightGap(0, 2), Expectation::Above(0.0)));
    expected.push((Quantity::InverseLeftGap(2, 0), Expectation::Above(0.0)));
    out.push(VerifyCase {
        name: "simulated-m1",
        source: "simulated example M1",
        matrix_text: SIM_M1,
        mode: ReciprocityMode::ReconcileRounded,
        expected,
    });

    let mut expected = near_all(Quantity::Right, &[19.75, 19.16, 20.85, 19.53, 20.71], TWO_DECIMALS);
    expected.extend(near_all(Quantity::InverseLeft, &[20.25, 20.55, 19.31, 20.27, 19.62], TWO_DECIMALS));
    expected.push((Quantity::Cr, Expectation::Near { value: 0.078, tol: 0.005 }));
    expected.push((Quantity::KendallRightInverseLeft, Expectation::Near { value: -1.0, tol: 0.0 }));
    out.push(VerifyCase {
        name: "simulated-m2",
        source: "simulated example M2",
        matrix_text: SIM_M2,
        mode: ReciprocityMode::ReconcileRounded,
        expected,
    });

    let mut expected = near_all(Quantity::Right, &[15.26, 33.23, 7.74, 5.68, 38.08], TWO_DECIMALS);
    expected.extend(near_all(Quantity::InverseLeft, &[15.29, 37.84, 8.55, 4.93, 33.39], TWO_DECIMALS));
    expected.push((Quantity::Cr, Expectation::Near { value: 0.0993, tol: 0.003 }));
    expected.push((Quantity::TopReversal, Expectation::Near { value: 1.0, tol: 0.0 }));
    expected.push((Quantity::RightGap(4, 1), Expectation::Near { value: 4.85, tol: 0.05 }));
    expected.push((Quantity::InverseLeftGap(1, 4), Expectation::Near { value: 4.44, tol: 0.05 }));
    out.push(VerifyCase {
        name: "simulated-m3",
        source: "simulated example M3",
        matrix_text: SIM_M3,
        mode: ReciprocityMode::ReconcileRounded,
        expected,
    });

    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub case: &'static str,
    pub quantity: Quantity,
    pub expectation: Expectation,
    pub actual: f64,
    pub passed: bool,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "{} {:<18} {:<26} actual {:<22} expected {:<24} residual {:+.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.case,
            self.quantity.label(),
            self.actual,
            self.expectation.describe(),
            self.expectation.residual(self.actual)
        )
    }
}

fn evaluate_quantity(
    q: Quantity,
    matrix: &PCMatrix,
    pair: &EigenPair,
    ri: &RiTable,
    cfg: &EigenSolverConfig,
) -> pcm_core::Result<f64> {
    let hundred = |w: &pcm_core::WeightVector| w.rescaled(Normalization::SumHundred).as_slice().to_vec();
    let right = hundred(&pair.right.weights);
    let left = hundred(&pair.left.weights);
    let inv = hundred(&pair.inverse_left);
    Ok(match q {
        Quantity::Right(i) => right[i],
        Quantity::Left(i) => left[i],
        Quantity::InverseLeft(i) => inv[i],
        Quantity::Cr => consistency_ratio(matrix, ri, cfg)?.cr,
        Quantity::KendallRightInverseLeft => kendall_tau(&pair.right.weights, &pair.inverse_left)?,
        Quantity::RightGap(i, j) => right[i] - right[j],
        Quantity::InverseLeftGap(i, j) => inv[i] - inv[j],
        Quantity::TopReversal => (pair.right.weights.argmax() != pair.inverse_left.argmax()) as u8 as f64,
        Quantity::AggregatedJudgmentsSpread => {
            let agg = aggregate_matrices_geometric(&[matrix.clone(), matrix.transpose()])?;
            let w = pcm_core::right_eigenvector(&agg, cfg)?.weights;
            hundred(&w).iter().map(|v| (v - 25.0).abs()).fold(0.0, f64::max)
        }
        Quantity::AggregatedPrioritiesGap(i, j) => {
            let other = pcm_core::right_eigenvector(&matrix.transpose(), cfg)?.weights;
            let agg = aggregate_priorities_geometric(&[pair.right.weights.clone(), other])?;
            let w = hundred(&agg);
            w[i] - w[j]
        }
    })
}

/// Evaluates every expectation of every case.
pub fn run_cases(cases: &[VerifyCase], ri: &RiTable, cfg: &EigenSolverConfig) -> pcm_core::Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for case in cases {
        let matrix = case.matrix();
        let pair = EigenPair::compute(&matrix, cfg)?;
        for &(quantity, expectation) in &case.expected {
            let actual = evaluate_quantity(quantity, &matrix, &pair, ri, cfg)?;
            out.push(CheckResult {
                case: case.name,
                quantity,
                expectation,
                actual,
                passed: expectation.accepts(actual),
            });
        }
    }
    Ok(out)
}

/// Text report: one line per check and a summary line.
pub fn report(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        let _ = writeln!(out, "{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let _ = writeln!(
        out,
        "{} checks, {} passed, {} failed",
        results.len(),
        results.len() - failed,
        failed
    );
    out
}
