//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fail.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use oracle::{max_abs_diff, perron_by_squaring, unit_sum};
use pcm_cli::verify::{self, Quantity};
use pcm_core::consistency::{random_reciprocal, RandomScale};
use pcm_core::metrics::kendall_tau;
use pcm_core::weighting::{combine_rl, EigenPair, RlCombination};
use pcm_core::{
    consistency_ratio, consistent_from_weights, row_geometric_mean, run_simulation, EigenSolverConfig, Metric,
    Normalization, PCMatrix, RiTable, SimulationConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn cfg() -> EigenSolverConfig {
    EigenSolverConfig::default()
}

fn case_matrix(name: &str) -> PCMatrix {
    verify::cases()
        .into_iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no case {name}"))
        .matrix()
}

fn hundred(w: &pcm_core::WeightVector) -> Vec<f64> {
    w.rescaled(Normalization::SumHundred).as_slice().to_vec()
}

fn one_based(order: Vec<usize>) -> Vec<usize> {
    order.into_iter().map(|i| i + 1).collect()
}

/// 1: published weight vectors of all reference matrices.
fn reference_weights() -> Outcome {
    let start = Instant::now();
    let results = verify::run_cases(&verify::cases(), &RiTable::shipped(), &cfg()).expect("cases evaluate");
    let elapsed = start.elapsed();
    let weights: Vec<_> = results
        .iter()
        .filter(|r| matches!(r.quantity, Quantity::Right(_) | Quantity::Left(_) | Quantity::InverseLeft(_)))
        .collect();
    let failed: Vec<String> = weights.iter().filter(|r| !r.passed).map(|r| r.line()).collect();
    let cases: std::collections::BTreeSet<_> = weights.iter().map(|r| r.case).collect();
    outcome(
        failed.is_empty() && cases.len() == 8 && elapsed < Duration::from_secs(1),
        format!(
            "{} weight components over {} matrices, {} failed, {:.1} ms {}",
            weights.len(),
            cases.len(),
            failed.len(),
            elapsed.as_secs_f64() * 1e3,
            failed.join("; ")
        ),
    )
}

/// 2: consistency ratios with the shipped RI table.
fn reference_crs() -> Outcome {
    let table = RiTable::shipped();
    let expected = [
        ("johnson", 0.331, 0.01),
        ("dodd", 0.082, 0.005),
        ("simulated-m1", 0.0007, 0.0005),
        ("simulated-m2", 0.078, 0.005),
        ("simulated-m3", 0.0993, 0.003),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, value, tol) in expected {
        let cr = consistency_ratio(&case_matrix(name), &table, &cfg()).unwrap().cr;
        ok &= (cr - value).abs() <= tol;
        parts.push(format!("{name} {cr:.5} (want {value} ± {tol})"));
    }
    outcome(ok, parts.join(", "))
}

/// 3: rank reversal between the right and inverse left eigenvectors.
fn rank_reversals() -> Outcome {
    let table = RiTable::shipped();
    let pair = |name| EigenPair::compute(&case_matrix(name), &cfg()).unwrap();
    let mut parts = Vec::new();

    let a = pair("johnson");
    let (r, l) = (hundred(&a.right.weights), hundred(&a.inverse_left));
    let a_ok = r[3] > r[0] && l[0] > l[3];
    parts.push(format!("A 4>1 then 1>4: {a_ok}"));

    let m1 = pair("simulated-m1");
    let (r, l) = (hundred(&m1.right.weights), hundred(&m1.inverse_left));
    let cr1 = consistency_ratio(&case_matrix("simulated-m1"), &table, &cfg()).unwrap().cr;
    let m1_ok = r[0] > r[2] && l[2] > l[0] && (cr1 - 0.0007).abs() <= 0.0005;
    parts.push(format!("M1 1>3 then 3>1 at CR {cr1:.5}: {m1_ok}"));

    let m2 = pair("simulated-m2");
    let tau = kendall_tau(&m2.right.weights, &m2.inverse_left).unwrap();
    let orders = (one_based(m2.right.weights.ranking()), one_based(m2.inverse_left.ranking()));
    let m2_ok = tau == -1.0 && orders == (vec![3, 5, 1, 4, 2], vec![2, 4, 1, 5, 3]);
    parts.push(format!("M2 tau {tau} orders {:?} / {:?}: {m2_ok}", orders.0, orders.1));

    let m3 = pair("simulated-m3");
    let (r, l) = (hundred(&m3.right.weights), hundred(&m3.inverse_left));
    let (gr, gl) = ((r[1] - r[4]).abs(), (l[1] - l[4]).abs());
    let m3_ok = m3.right.weights.argmax() == 4
        && m3.inverse_left.argmax() == 1
        && (gr - 4.85).abs() <= 0.05
        && (gl - 4.44).abs() <= 0.05;
    parts.push(format!("M3 top 5 then 2, gaps {gr:.3} / {gl:.3}: {m3_ok}"));

    outcome(a_ok && m1_ok && m2_ok && m3_ok, parts.join("; "))
}

/// 4: for n = 3 the inverse left vector equals the right vector.
fn order_three() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for i in 0..10_000 {
        let scale = if i % 2 == 0 { RandomScale::Continuous } else { RandomScale::Saaty };
        let a = random_reciprocal(3, scale, &mut rng);
        let p = EigenPair::compute(&a, &cfg()).unwrap();
        worst = worst.max(max_abs_diff(p.right.weights.as_slice(), p.inverse_left.as_slice()));
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-9 && elapsed < Duration::from_secs(10),
        format!("10000 matrices, max |w^-L - w^R| = {worst:.2e}, {:.2} s", elapsed.as_secs_f64()),
    )
}

/// 5: consistent matrices reproduce their generating weights.
fn consistent_inputs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let table = RiTable::shipped();
    let (mut worst_w, mut worst_lambda, mut worst_cr): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..1000 {
        let n = 4 + i % 6;
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..9.0)).collect();
        let a = consistent_from_weights(&w).unwrap();
        let target = unit_sum(&w);
        let squares = unit_sum(&w.iter().map(|x| x * x).collect::<Vec<_>>());
        let p = EigenPair::compute(&a, &cfg()).unwrap();
        let product = combine_rl(&p.right.weights, &p.inverse_left, RlCombination::Product).unwrap();
        let geometric = combine_rl(&p.right.weights, &p.inverse_left, RlCombination::GeometricMean).unwrap();
        for (v, t) in [
            (p.right.weights.as_slice(), &target),
            (p.inverse_left.as_slice(), &target),
            (row_geometric_mean(&a).as_slice(), &target),
            (geometric.as_slice(), &target),
            (product.as_slice(), &squares),
        ] {
            worst_w = worst_w.max(max_abs_diff(v, t));
        }
        let report = consistency_ratio(&a, &table, &cfg()).unwrap();
        worst_lambda = worst_lambda.max((report.lambda_max - n as f64).abs());
        worst_cr = worst_cr.max(report.cr.abs());
    }
    outcome(
        worst_w < 1e-9 && worst_lambda < 1e-9 && worst_cr < 1e-9,
        format!(
            "1000 matrices n=4..9: vector error {worst_w:.2e}, |lambda - n| {worst_lambda:.2e}, |CR| {worst_cr:.2e} (RL product compared with w^2)"
        ),
    )
}

fn share_below(result: &pcm_core::SimulationResult, n: usize, limit: f64) -> f64 {
    let cell = &result.histogram.cells.iter().find(|c| c.n == n).expect("cell present");
    let below: u64 = cell
        .bins
        .iter()
        .filter(|b| !b.overflow && b.bin_lower + 1e-12 < limit)
        .map(|b| b.count)
        .sum();
    below as f64 / cell.generated as f64
}

/// 6: with delta = 1 almost every generated matrix is acceptable for n >= 5.
fn acceptable_share() -> Outcome {
    let cfg = SimulationConfig {
        dims: (4..=9).collect(),
        deltas: vec![1.0],
        matrices_per_cell: 100_000,
        seed: 6,
        ..Default::default()
    };
    let result = run_simulation(&cfg, &RiTable::shipped(), 0).unwrap();
    let shares: Vec<(usize, f64)> = cfg.dims.iter().map(|&n| (n, share_below(&result, n, 0.1))).collect();
    let large_ok = shares.iter().filter(|(n, _)| *n >= 5).all(|(_, s)| *s >= 0.99);
    let min_large = shares.iter().filter(|(n, _)| *n >= 5).map(|(_, s)| *s).fold(1.0, f64::min);
    let four_lower = shares[0].1 < min_large;
    let text: Vec<String> = shares.iter().map(|(n, s)| format!("n={n} {:.4}", s)).collect();
    outcome(large_ok && four_lower, format!("share with CR < 0.1: {}", text.join(", ")))
}

fn n6_run() -> pcm_core::SimulationResult {
    let cfg = SimulationConfig {
        dims: vec![6],
        deltas: vec![1.0, 2.0, 3.0],
        matrices_per_cell: 100_000,
        seed: 7,
        ..Default::default()
    };
    run_simulation(&cfg, &RiTable::shipped(), 0).unwrap()
}

fn acceptable_bins(result: &pcm_core::SimulationResult) -> Vec<&pcm_core::BinStatistics> {
    result
        .pooled_for(6)
        .filter(|b| !b.overflow && b.bin_lower + 1e-12 < 0.1 && b.count >= 1000)
        .collect()
}

/// 7: the row geometric mean sits about halfway between the eigenvectors.
fn midpoint(result: &pcm_core::SimulationResult) -> Outcome {
    let bins = acceptable_bins(result);
    let ratios: Vec<f64> = bins
        .iter()
        .map(|b| {
            let t = b.mean(Metric::Euclidean);
            t.r_vs_rgm / t.r_vs_inverse_left
        })
        .collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    outcome(
        !ratios.is_empty() && lo >= 0.40 && hi <= 0.60,
        format!("{} bins, ratio range [{lo:.4}, {hi:.4}]", ratios.len()),
    )
}

/// 8: the row geometric mean is rarely farther from the right vector than
/// the inverse left vector.
fn closer_probabilities(result: &pcm_core::SimulationResult) -> Outcome {
    let bins = acceptable_bins(result);
    let min_of = |m: Metric| bins.iter().map(|b| b.closer_probability(m)).fold(1.0, f64::min);
    let (euc, cheb, kendall) = (min_of(Metric::Euclidean), min_of(Metric::Chebyshev), min_of(Metric::Kendall));
    outcome(
        !bins.is_empty() && euc >= 0.95 && cheb >= 0.99 && kendall >= 0.95,
        format!(
            "{} bins, minimum closer probability: euclidean {euc:.4}, chebyshev {cheb:.4}, kendall {kendall:.4}",
            bins.len()
        ),
    )
}

/// 9: outputs do not depend on the worker count.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    std::fs::write(&config, "dims=4,6\ndeltas=1,3\nmatrices_per_cell=4000\nseed=9\nmin_bin_count=100\n").unwrap();
    let mut outputs = Vec::new();
    for workers in [1, 2, 8] {
        let out = dir.path().join(format!("w{workers}"));
        let status = Command::new(env!("CARGO_BIN_EXE_pcm"))
            .args(["simulate", config.to_str().unwrap(), "--out-dir", out.to_str().unwrap()])
            .args(["--workers", &workers.to_string()])
            .env_remove("PCM_WORKERS")
            .output()
            .unwrap();
        if !status.status.success() {
            return outcome(false, format!("workers={workers}: {}", String::from_utf8_lossy(&status.stderr)));
        }
        outputs.push(csv_files(&out));
    }
    let files = outputs[0].len();
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    outcome(same && files >= 10, format!("{files} CSV files compared across 1, 2 and 8 workers, identical: {same}"))
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

/// 10: power iteration agrees with repeated squaring.
fn eigen_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for i in 0..2000 {
        let n = if i < 1000 { 4 } else { 5 };
        let scale = if i % 2 == 0 { RandomScale::Continuous } else { RandomScale::Saaty };
        let a = random_reciprocal(n, scale, &mut rng);
        let (right, left) = perron_by_squaring(&a, 60);
        let p = EigenPair::compute(&a, &cfg()).unwrap();
        worst = worst
            .max(max_abs_diff(p.right.weights.as_slice(), &right))
            .max(max_abs_diff(p.left.weights.as_slice(), &left));
    }
    outcome(worst < 1e-8, format!("1000 of order 4 and 1000 of order 5, max deviation {worst:.2e}"))
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "reference weights", reference_weights()),
        (2, "reference consistency ratios", reference_crs()),
        (3, "rank reversal witnesses", rank_reversals()),
        (4, "order three reciprocity", order_three()),
        (5, "consistent matrices", consistent_inputs()),
        (6, "acceptable share at delta 1", acceptable_share()),
    ];
    let run = n6_run();
    results.push((7, "midpoint property n=6", midpoint(&run)));
    results.push((8, "closer probabilities n=6", closer_probabilities(&run)));
    results.push((9, "worker-count determinism", determinism()));
    results.push((10, "eigen oracle", eigen_oracle()));

    let mut failed = 0;
    for (id, name, o) in &results {
        println!(
            "{} criterion {id:>2} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
