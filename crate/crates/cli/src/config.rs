//! Flat `key=value` simulation config.
//!
//! ```text
//! # comment
//! dims=4-6,9
//! deltas=1,2,3
//! matrices_per_cell=100000
//! seed=42
//! bin_width=0.005
//! min_bin_count=1000
//! cr_cap=0.5
//! ri_table=ri.txt          # relative to the config file
//! ri=10 1.4865 1000000 7   # inline entries, repeatable
//! ```
//!
//! A run manifest uses the same syntax, so it can be fed back as a config.

use std::path::{Path, PathBuf};

use pcm_core::{RiSource, RiTable, SimulationConfig};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub simulation: SimulationConfig,
    /// Explicit RI entries; `None` means the bundled table.
    pub ri: Option<RiTable>,
}

impl RunConfig {
    pub fn ri_table(&self) -> RiTable {
        self.ri.clone().unwrap_or_else(RiTable::shipped)
    }
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::usage(format!("{key}: invalid value {s:?}"))))
        .collect()
}

fn dims(value: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || CliError::usage(format!("dims: invalid value {part:?}"));
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

fn scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::usage(format!("{key}: invalid value {value:?}")))
}

/// Parses a config; `base_dir` resolves a relative `ri_table` path.
pub fn parse_config(text: &str, base_dir: Option<&Path>) -> Result<RunConfig, CliError> {
    let mut sim = SimulationConfig {
        matrices_per_cell: 100_000,
        ..Default::default()
    };
    let mut ri: Option<RiTable> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value", idx + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "dims" => sim.dims = dims(value)?,
            "deltas" => sim.deltas = list(key, value)?,
            "matrices_per_cell" | "counts" => sim.matrices_per_cell = scalar(key, value)?,
            "seed" => sim.seed = scalar(key, value)?,
            "bin_width" => sim.bin_width = scalar(key, value)?,
            "min_bin_count" => sim.min_bin_count = scalar(key, value)?,
            "cr_cap" => sim.cr_cap = scalar(key, value)?,
            "weight_low" => sim.weight_low = scalar(key, value)?,
            "weight_high" => sim.weight_high = scalar(key, value)?,
            "max_iterations" => sim.eigen.max_iterations = scalar(key, value)?,
            "convergence_tol" => sim.eigen.convergence_tol = scalar(key, value)?,
            "ri_table" => {
                let path: PathBuf = match base_dir {
                    Some(dir) => dir.join(value),
                    None => PathBuf::from(value),
                };
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::failure(format!("cannot read RI table {}: {e}", path.display())))?;
                let table = RiTable::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
                let merged = ri.get_or_insert_with(RiTable::new);
                for n in table.orders() {
                    let e = table.get(n).expect("listed order");
                    merged.insert(n, e.ri, e.source).map_err(CliError::from)?;
                }
            }
            "ri" => {
                let table = RiTable::parse(value).map_err(|e| CliError::usage(format!("ri: {e}")))?;
                let merged = ri.get_or_insert_with(RiTable::new);
                for n in table.orders() {
                    let e = table.get(n).expect("listed order");
                    merged.insert(n, e.ri, e.source).map_err(CliError::from)?;
                }
            }
            // informational manifest keys
            "tool_version" | "timestamp" | "workers" | "matrices_total" | "convergence_failures" => {}
            other => return Err(CliError::usage(format!("config line {}: unknown key {other:?}", idx + 1))),
        }
    }
    sim.eigen = pcm_core::EigenSolverConfig::new(sim.eigen.max_iterations, sim.eigen.convergence_tol)?;
    sim.check()?;
    Ok(RunConfig { simulation: sim, ri })
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Config lines that reproduce `cfg` with the RI values in `ri`.
pub fn config_text(cfg: &SimulationConfig, ri: &RiTable) -> String {
    let mut out = String::new();
    out.push_str(&format!("dims={}\n", join(&cfg.dims)));
    out.push_str(&format!("deltas={}\n", join(&cfg.deltas)));
    out.push_str(&format!("matrices_per_cell={}\n", cfg.matrices_per_cell));
    out.push_str(&format!("seed={}\n", cfg.seed));
    out.push_str(&format!("bin_width={}\n", cfg.bin_width));
    out.push_str(&format!("min_bin_count={}\n", cfg.min_bin_count));
    out.push_str(&format!("cr_cap={}\n", cfg.cr_cap));
    out.push_str(&format!("weight_low={}\n", cfg.weight_low));
    out.push_str(&format!("weight_high={}\n", cfg.weight_high));
    out.push_str(&format!("max_iterations={}\n", cfg.eigen.max_iterations));
    out.push_str(&format!("convergence_tol={}\n", cfg.eigen.convergence_tol));
    for n in &cfg.dims {
        if let Some(e) = ri.get(*n) {
            match e.source {
                RiSource::Table => out.push_str(&format!("ri={n} {}\n", e.ri)),
                RiSource::Estimated { samples, seed } => {
                    out.push_str(&format!("ri={n} {} {samples} {seed}\n", e.ri))
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let text = "# demo\ndims=4-6,9\ndeltas=1, 2.5\nmatrices_per_cell=2000\nseed=7\nbin_width=0.01\nmin_bin_count=5\ncr_cap=0.4\nri=4 0.9\n";
        let cfg = parse_config(text, None).unwrap();
        assert_eq!(cfg.simulation.dims, vec![4, 5, 6, 9]);
        assert_eq!(cfg.simulation.deltas, vec![1.0, 2.5]);
        assert_eq!(cfg.simulation.matrices_per_cell, 2000);
        assert_eq!(cfg.simulation.seed, 7);
        assert_eq!(cfg.simulation.bin_width, 0.01);
        assert_eq!(cfg.simulation.min_bin_count, 5);
        assert_eq!(cfg.simulation.cr_cap, 0.4);
        assert_eq!(cfg.ri.unwrap().get(4).unwrap().ri, 0.9);
    }

    #[test]
    fn rejects_bad_lines() {
        assert_eq!(parse_config("dims", None).unwrap_err().code, 2);
        assert_eq!(parse_config("colour=blue", None).unwrap_err().code, 2);
        assert_eq!(parse_config("dims=4-x", None).unwrap_err().code, 2);
        assert_eq!(parse_config("bin_width=0", None).unwrap_err().code, 2);
        assert_eq!(parse_config("dims=2", None).unwrap_err().code, 2);
    }

    #[test]
    fn config_text_round_trips() {
        let cfg = parse_config("dims=5\ndeltas=1,3\nmatrices_per_cell=10\nseed=3\n", None).unwrap();
        let ri = cfg.ri_table();
        let again = parse_config(&config_text(&cfg.simulation, &ri), None).unwrap();
        assert_eq!(again.simulation, cfg.simulation);
        assert_eq!(again.ri.unwrap().get(5), ri.get(5));
    }
}
