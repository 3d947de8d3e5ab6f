//! CSV and manifest writers for simulation runs.
//!
//! Files are UTF-8 with a header row, `,` separators and `\n` line endings.
//! Reals use the shortest decimal form that parses back to the same `f64`,
//! so reading a file back gives the in-memory statistics exactly.

use pcm_core::metrics::Metric;
use pcm_core::montecarlo::{BinStatistics, CrHistogram};

pub const HISTOGRAM_HEADER: &str = "n,delta,bin_lower,count";
pub const BINS_HEADER: &str = "n,bin_lower,count,mean_R_vs_invL,mean_R_vs_RL,mean_R_vs_RGM,closer_prob,suppressed";
pub const BINS_BY_DELTA_HEADER: &str =
    "n,delta,bin_lower,count,mean_R_vs_invL,mean_R_vs_RL,mean_R_vs_RGM,closer_prob,suppressed";
pub const REVERSALS_HEADER: &str = "n,bin_lower,count,top_reversal_rate,any_reversal_rate,suppressed";

pub fn histogram_csv(h: &CrHistogram) -> String {
    let mut out = format!("{HISTOGRAM_HEADER}\n");
    for cell in &h.cells {
        for b in &cell.bins {
            out.push_str(&format!("{},{},{},{}\n", cell.n, cell.delta, b.bin_lower, b.count));
        }
    }
    out
}

fn bin_fields(b: &BinStatistics, m: Metric) -> String {
    let t = b.mean(m);
    format!(
        "{},{},{},{},{},{}",
        b.count,
        t.r_vs_inverse_left,
        t.r_vs_rl,
        t.r_vs_rgm,
        b.closer_probability(m),
        b.suppressed
    )
}

/// Pooled per-bin series of one metric.
pub fn bins_csv(bins: &[BinStatistics], m: Metric) -> String {
    let mut out = format!("{BINS_HEADER}\n");
    for b in bins {
        out.push_str(&format!("{},{},{}\n", b.n, b.bin_lower, bin_fields(b, m)));
    }
    out
}

/// Per-delta series of one metric.
pub fn bins_by_delta_csv(bins: &[BinStatistics], m: Metric) -> String {
    let mut out = format!("{BINS_BY_DELTA_HEADER}\n");
    for b in bins {
        let delta = b.delta.map(|d| d.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", b.n, delta, b.bin_lower, bin_fields(b, m)));
    }
    out
}

pub fn reversals_csv(bins: &[BinStatistics]) -> String {
    let mut out = format!("{REVERSALS_HEADER}\n");
    for b in bins {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            b.n, b.bin_lower, b.count, b.top_reversal_rate, b.any_reversal_rate, b.suppressed
        ));
    }
    out
}

/// One parsed row of a `bins_<metric>.csv` file.
#[derive(Debug, Clone, PartialEq)]
pub struct BinRow {
    pub n: usize,
    pub bin_lower: f64,
    pub count: u64,
    pub mean_r_vs_inverse_left: f64,
    pub mean_r_vs_rl: f64,
    pub mean_r_vs_rgm: f64,
    pub closer_prob: f64,
    pub suppressed: bool,
}

impl BinRow {
    pub fn from_stats(b: &BinStatistics, m: Metric) -> Self {
        let t = b.mean(m);
        Self {
            n: b.n,
            bin_lower: b.bin_lower,
            count: b.count,
            mean_r_vs_inverse_left: t.r_vs_inverse_left,
            mean_r_vs_rl: t.r_vs_rl,
            mean_r_vs_rgm: t.r_vs_rgm,
            closer_prob: b.closer_probability(m),
            suppressed: b.suppressed,
        }
    }
}

/// Parses a `bins_<metric>.csv` file.
pub fn parse_bins_csv(text: &str) -> Result<Vec<BinRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == BINS_HEADER => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(format!("row {}: expected 8 fields, found {}", i + 1, f.len()));
            }
            let num = |k: usize| f[k].parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1));
            Ok(BinRow {
                n: f[0].parse().map_err(|e| format!("row {}: {e}", i + 1))?,
                bin_lower: num(1)?,
                count: f[2].parse().map_err(|e| format!("row {}: {e}", i + 1))?,
                mean_r_vs_inverse_left: num(3)?,
                mean_r_vs_rl: num(4)?,
                mean_r_vs_rgm: num(5)?,
                closer_prob: num(6)?,
                suppressed: f[7].parse().map_err(|e| format!("row {}: {e}", i + 1))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use pcm_core::{run_simulation, RiTable, SimulationConfig};

    #[test]
    fn csv_round_trips_exactly() {
        let cfg = SimulationConfig {
            dims: vec![4],
            deltas: vec![2.0],
            matrices_per_cell: 600,
            min_bin_count: 10,
            seed: 9,
            ..Default::default()
        };
        let result = run_simulation(&cfg, &RiTable::shipped(), 2).unwrap();
        for m in Metric::ALL {
            let text = bins_csv(&result.pooled, m);
            assert!(text.ends_with('\n') && !text.contains('\r'));
            let rows = parse_bins_csv(&text).unwrap();
            let expected: Vec<BinRow> = result.pooled.iter().map(|b| BinRow::from_stats(b, m)).collect();
            assert_eq!(rows, expected);
        }
        let hist = histogram_csv(&result.histogram);
        assert_eq!(hist.lines().count(), 1 + result.histogram.cells[0].bins.len());
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(parse_bins_csv("a,b\n").is_err());
        assert!(parse_bins_csv(&format!("{BINS_HEADER}\n4,0.1\n")).is_err());
    }
}
