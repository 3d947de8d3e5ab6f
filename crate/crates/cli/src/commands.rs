//! Subcommand definitions and their implementations.
//!
//! Every command writes its normal output to the given writer and reports
//! problems through [`CliError`]; `main` only maps the error to an exit code.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use pcm_core::consistency::{estimate_random_index_with, RandomScale};
use pcm_core::montecarlo::generate_indexed;
use pcm_core::text::{format_matrix, parse_matrix};
use pcm_core::weighting::{combine_rl, EigenPair, RlCombination};
use pcm_core::{
    aggregate_matrices_geometric, aggregate_priorities_geometric, compare_methods, consistency_ratio,
    row_geometric_mean, run_simulation, EigenSolverConfig, GeneratorConfig, Metric, Normalization, PCMatrix,
    ReciprocityMode, ReciprocityPolicy, RiSource, RiTable, WeightVector,
};

use crate::config::{config_text, parse_config};
use crate::output::{bins_by_delta_csv, bins_csv, histogram_csv, reversals_csv};
use crate::verify;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "pcm", version, about = "Priority vectors of pairwise comparison matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Right,
    LeftInverse,
    Rl,
    Rgm,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    #[value(name = "sum-1")]
    SumOne,
    #[value(name = "sum-100")]
    SumHundred,
}

impl From<Scale> for Normalization {
    fn from(s: Scale) -> Self {
        match s {
            Scale::SumOne => Normalization::SumOne,
            Scale::SumHundred => Normalization::SumHundred,
        }
    }
}

/// How a matrix file that is not exactly reciprocal is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Reciprocity {
    /// Reject `a_ij * a_ji` further than 1e-9 from 1.
    Strict,
    /// Reject `a_ij * a_ji` further than 1e-3 from 1, keep entries as given.
    Tolerant,
    /// Keep the upper triangle and overwrite the lower one.
    Repair,
    /// Pick the value compatible with the printed precision of both entries.
    Reconcile,
}

impl Reciprocity {
    fn policy(self) -> ReciprocityPolicy {
        let (mode, tol) = match self {
            Reciprocity::Strict => (ReciprocityMode::Strict, pcm_core::matrix::PROGRAMMATIC_TOLERANCE),
            Reciprocity::Tolerant => (ReciprocityMode::Strict, pcm_core::matrix::FILE_TOLERANCE),
            Reciprocity::Repair => (ReciprocityMode::RepairFromUpper, pcm_core::matrix::FILE_TOLERANCE),
            Reciprocity::Reconcile => (ReciprocityMode::ReconcileRounded, pcm_core::matrix::FILE_TOLERANCE),
        };
        ReciprocityPolicy::new(mode, tol).expect("fixed tolerances are valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregateMode {
    #[value(name = "aij", alias = "AIJ")]
    Aij,
    #[value(name = "aip", alias = "AIP")]
    Aip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RiScale {
    Saaty,
    Continuous,
}

#[derive(Debug, clap::Args)]
pub struct MatrixInput {
    /// Matrix file: optional `#` comments, the order, then one row per line.
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = Reciprocity::Tolerant)]
    pub reciprocity: Reciprocity,
}

#[derive(Debug, clap::Args)]
pub struct RiInput {
    /// RI table file with lines `n ri [samples seed]`; default is the bundled table.
    #[arg(long)]
    pub ri_table: Option<PathBuf>,
    /// Random index for the matrix order, overriding the table.
    #[arg(long)]
    pub ri: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print priority vectors of a matrix.
    Weights {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Scale::SumHundred)]
        scale: Scale,
        /// Emit CSV instead of an aligned table.
        #[arg(long)]
        csv: bool,
    },
    /// Print the consistency index and ratio of a matrix.
    Consistency {
        #[command(flatten)]
        input: MatrixInput,
        #[command(flatten)]
        ri: RiInput,
    },
    /// Compare the weighting methods on one matrix.
    Compare {
        #[command(flatten)]
        input: MatrixInput,
        #[command(flatten)]
        ri: RiInput,
    },
    /// Write perturbed random matrices to files.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Index of the first matrix in the stream.
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the binned experiment described by a config file.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Worker threads; 0 uses all cores.
        #[arg(long, env = "PCM_WORKERS", default_value_t = 0)]
        workers: usize,
    },
    /// Aggregate several decision-makers' matrices or priorities.
    Aggregate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum)]
        mode: AggregateMode,
        /// Weighting method whose vectors are aggregated in `aip` mode.
        #[arg(long, value_enum, default_value_t = Method::Right)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Scale::SumHundred)]
        scale: Scale,
        #[arg(long, value_enum, default_value_t = Reciprocity::Tolerant)]
        reciprocity: Reciprocity,
    },
    /// Check the built-in reference matrices against published values.
    Verify {
        #[arg(long)]
        ri_table: Option<PathBuf>,
        /// Multiply every RI value by this factor before checking.
        #[arg(long)]
        ri_factor: Option<f64>,
    },
    /// Estimate random index values by sampling.
    RiEstimate {
        /// Orders, e.g. `3-15` or `4,6,9`.
        #[arg(long, default_value = "3-15")]
        dims: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = RiScale::Saaty)]
        scale: RiScale,
        #[arg(long, env = "PCM_WORKERS", default_value_t = 0)]
        workers: usize,
        /// Write the table here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Rounds half away from zero to 4 decimals.
pub fn fixed4(x: f64) -> String {
    let r = (x * 1e4).round() / 1e4;
    let s = format!("{r:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_matrix(path: &Path, reciprocity: Reciprocity) -> Result<PCMatrix, CliError> {
    parse_matrix(&read(path)?, reciprocity.policy()).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })
}

fn load_ri(input: &RiInput, n: usize) -> Result<RiTable, CliError> {
    let mut table = match &input.ri_table {
        Some(path) => RiTable::parse(&read(path)?).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?,
        None => RiTable::shipped(),
    };
    if let Some(ri) = input.ri {
        table.insert(n, ri, RiSource::Table)?;
    }
    Ok(table)
}

fn methods(method: Method) -> &'static [Method] {
    match method {
        Method::All => &[Method::Right, Method::LeftInverse, Method::Rl, Method::Rgm],
        Method::Right => &[Method::Right],
        Method::LeftInverse => &[Method::LeftInverse],
        Method::Rl => &[Method::Rl],
        Method::Rgm => &[Method::Rgm],
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Right => "right",
        Method::LeftInverse => "left-inverse",
        Method::Rl => "rl",
        Method::Rgm => "rgm",
        Method::All => "all",
    }
}

fn weights_of(a: &PCMatrix, m: Method, cfg: &EigenSolverConfig) -> Result<WeightVector, CliError> {
    Ok(match m {
        Method::Right | Method::LeftInverse | Method::Rl => {
            let pair = EigenPair::compute(a, cfg)?;
            match m {
                Method::Right => pair.right.weights,
                Method::LeftInverse => pair.inverse_left,
                _ => combine_rl(&pair.right.weights, &pair.inverse_left, RlCombination::Product)?,
            }
        }
        Method::Rgm => row_geometric_mean(a),
        Method::All => unreachable!("expanded by methods()"),
    })
}

fn weight_table(rows: &[(&str, WeightVector)], scale: Scale, csv: bool) -> String {
    let mut out = String::new();
    let n = rows.first().map_or(0, |r| r.1.len());
    if csv {
        let header: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
        let _ = writeln!(out, "method,{}", header.join(","));
    }
    for (name, w) in rows {
        let values: Vec<String> = w.rescaled(scale.into()).as_slice().iter().map(|&v| fixed4(v)).collect();
        if csv {
            let _ = writeln!(out, "{name},{}", values.join(","));
        } else {
            let cells: Vec<String> = values.iter().map(|v| format!("{v:>10}")).collect();
            let _ = writeln!(out, "{name:<13}{}", cells.join(""));
        }
    }
    out
}

fn weights(out: &mut dyn Write, input: &MatrixInput, method: Method, scale: Scale, csv: bool) -> Result<(), CliError> {
    let a = load_matrix(&input.file, input.reciprocity)?;
    let cfg = EigenSolverConfig::default();
    let rows = methods(method)
        .iter()
        .map(|&m| Ok((method_name(m), weights_of(&a, m, &cfg)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    out.write_all(weight_table(&rows, scale, csv).as_bytes())?;
    Ok(())
}

fn consistency(out: &mut dyn Write, input: &MatrixInput, ri: &RiInput) -> Result<(), CliError> {
    let a = load_matrix(&input.file, input.reciprocity)?;
    let table = load_ri(ri, a.order())?;
    let r = consistency_ratio(&a, &table, &EigenSolverConfig::default())?;
    writeln!(out, "n           {}", r.n)?;
    writeln!(out, "lambda_max  {}", r.lambda_max)?;
    writeln!(out, "CI          {}", r.ci)?;
    writeln!(out, "RI          {} ({})", r.ri, r.ri_source)?;
    writeln!(out, "CR          {}", r.cr)?;
    writeln!(out, "acceptable  {}", r.acceptable)?;
    Ok(())
}

fn ranking_text(w: &WeightVector) -> String {
    w.ranking()
        .iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(" > ")
}

fn compare(out: &mut dyn Write, input: &MatrixInput, ri: &RiInput) -> Result<(), CliError> {
    let a = load_matrix(&input.file, input.reciprocity)?;
    let table = load_ri(ri, a.order())?;
    let r = compare_methods(&a, &EigenSolverConfig::default(), &table)?;
    writeln!(out, "n            {}", r.n)?;
    writeln!(out, "lambda_max   {}", r.lambda_max)?;
    writeln!(out, "CR           {}", r.cr)?;
    writeln!(out)?;
    let rows = [
        ("right", r.right.clone()),
        ("left-inverse", r.inverse_left.clone()),
        ("rl", r.rl.clone()),
        ("rgm", r.rgm.clone()),
    ];
    out.write_all(weight_table(&rows, Scale::SumHundred, false).as_bytes())?;
    writeln!(out)?;
    writeln!(out, "metric       R_vs_invL            R_vs_RL              R_vs_RGM             rgm_closer")?;
    for m in Metric::ALL {
        let t = r.metric(m);
        writeln!(
            out,
            "{:<13}{:<21}{:<21}{:<21}{}",
            m.name(),
            t.r_vs_inverse_left,
            t.r_vs_rl,
            t.r_vs_rgm,
            r.closer(m)
        )?;
    }
    writeln!(out)?;
    writeln!(out, "ranking right         {}", ranking_text(&r.right))?;
    writeln!(out, "ranking left-inverse  {}", ranking_text(&r.inverse_left))?;
    writeln!(out, "top_reversal  {}", r.top_reversal)?;
    writeln!(out, "any_reversal  {}", r.any_reversal)?;
    Ok(())
}

fn generate(
    out: &mut dyn Write,
    n: usize,
    delta: f64,
    count: u64,
    seed: u64,
    start: u64,
    out_dir: &Path,
) -> Result<(), CliError> {
    let cfg = GeneratorConfig::new(n, delta, seed);
    cfg.check()?;
    if !(pcm_core::matrix::MIN_ORDER..=pcm_core::matrix::MAX_ORDER).contains(&n) {
        return Err(pcm_core::Error::UnsupportedOrder(n).into());
    }
    std::fs::create_dir_all(out_dir)?;
    let width = (start + count).max(1).to_string().len();
    for index in start..start + count {
        let m = generate_indexed(&cfg, index)?;
        let path = out_dir.join(format!("matrix_{index:0width$}.txt"));
        let text = format!("# n={n} delta={delta} seed={seed} index={index}\n{}", format_matrix(&m));
        std::fs::write(&path, text)?;
    }
    writeln!(out, "wrote {count} matrices to {}", out_dir.display())?;
    Ok(())
}

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn simulate(out: &mut dyn Write, config: &Path, out_dir: &Path, workers: usize) -> Result<(), CliError> {
    let run = parse_config(&read(config)?, config.parent())?;
    let sim = &run.simulation;
    let ri = run.ri_table();
    for &n in &sim.dims {
        ri.lookup(n)?;
    }
    let result = run_simulation(sim, &ri, workers)?;

    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("histogram.csv"), histogram_csv(&result.histogram))?;
    for m in Metric::ALL {
        std::fs::write(out_dir.join(format!("bins_{}.csv", m.name())), bins_csv(&result.pooled, m))?;
        std::fs::write(
            out_dir.join(format!("bins_{}_by_delta.csv", m.name())),
            bins_by_delta_csv(&result.per_delta, m),
        )?;
    }
    std::fs::write(out_dir.join("reversals.csv"), reversals_csv(&result.pooled))?;

    let total = sim.matrices_per_cell * (sim.dims.len() * sim.deltas.len()) as u64;
    let mut manifest = config_text(sim, &ri);
    let _ = writeln!(manifest, "tool_version={}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(manifest, "timestamp={}", now_unix());
    let _ = writeln!(manifest, "workers={workers}");
    let _ = writeln!(manifest, "matrices_total={total}");
    let _ = writeln!(manifest, "convergence_failures={}", result.convergence_failures);
    std::fs::write(out_dir.join("manifest.txt"), manifest)?;

    writeln!(
        out,
        "simulated {total} matrices, {} bins, outputs in {}",
        result.pooled.len(),
        out_dir.display()
    )?;
    if result.convergence_failures > 0 {
        return Err(CliError::failure(format!(
            "{} matrices failed to converge and were left out",
            result.convergence_failures
        )));
    }
    Ok(())
}

fn aggregate(
    out: &mut dyn Write,
    files: &[PathBuf],
    mode: AggregateMode,
    method: Method,
    scale: Scale,
    reciprocity: Reciprocity,
) -> Result<(), CliError> {
    let matrices = files
        .iter()
        .map(|f| load_matrix(f, reciprocity))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = EigenSolverConfig::default();
    match mode {
        AggregateMode::Aij => {
            let agg = aggregate_matrices_geometric(&matrices)?;
            out.write_all(format_matrix(&agg).as_bytes())?;
            writeln!(out)?;
            let rows = methods(Method::All)
                .iter()
                .map(|&m| Ok((method_name(m), weights_of(&agg, m, &cfg)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            out.write_all(weight_table(&rows, scale, false).as_bytes())?;
        }
        AggregateMode::Aip => {
            if method == Method::All {
                return Err(CliError::usage("aip needs a single --method"));
            }
            let vectors = matrices
                .iter()
                .map(|a| weights_of(a, method, &cfg))
                .collect::<Result<Vec<_>, _>>()?;
            let agg = aggregate_priorities_geometric(&vectors)?;
            out.write_all(weight_table(&[(method_name(method), agg)], scale, false).as_bytes())?;
        }
    }
    Ok(())
}

fn run_verify(out: &mut dyn Write, ri_table: Option<&Path>, ri_factor: Option<f64>) -> Result<(), CliError> {
    let mut table = match ri_table {
        Some(path) => RiTable::parse(&read(path)?).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?,
        None => RiTable::shipped(),
    };
    if let Some(f) = ri_factor {
        if !(f > 0.0 && f.is_finite()) {
            return Err(CliError::usage(format!("--ri-factor must be positive, got {f}")));
        }
        table = table.scaled(f);
    }
    let results = verify::run_cases(&verify::cases(), &table, &EigenSolverConfig::default())?;
    out.write_all(verify::report(&results).as_bytes())?;
    match results.iter().find(|r| !r.passed) {
        Some(first) => Err(CliError::failure(format!("first failure: {}", first.line()))),
        None => Ok(()),
    }
}

fn ri_estimate(
    out: &mut dyn Write,
    dims: &str,
    samples: u64,
    seed: u64,
    scale: RiScale,
    workers: usize,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let orders = parse_config(&format!("dims={dims}\n"), None)?.simulation.dims;
    let scale = match scale {
        RiScale::Saaty => RandomScale::Saaty,
        RiScale::Continuous => RandomScale::Continuous,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::failure(format!("thread pool: {e}")))?;
    let cfg = EigenSolverConfig::default();
    let mut table = RiTable::new();
    for n in orders {
        let ri = pool.install(|| estimate_random_index_with(n, samples, seed, scale, &cfg))?;
        table.insert(n, ri, RiSource::Estimated { samples, seed })?;
    }
    match output {
        Some(path) => {
            std::fs::write(path, table.to_text())?;
            writeln!(out, "wrote {}", path.display())?;
        }
        None => out.write_all(table.to_text().as_bytes())?,
    }
    Ok(())
}

/// Executes one parsed command line.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Weights {
            input,
            method,
            scale,
            csv,
        } => weights(out, input, *method, *scale, *csv),
        Command::Consistency { input, ri } => consistency(out, input, ri),
        Command::Compare { input, ri } => compare(out, input, ri),
        Command::Generate {
            n,
            delta,
            count,
            seed,
            start,
            out_dir,
        } => generate(out, *n, *delta, *count, *seed, *start, out_dir),
        Command::Simulate {
            config,
            out_dir,
            workers,
        } => simulate(out, config, out_dir, *workers),
        Command::Aggregate {
            files,
            mode,
            method,
            scale,
            reciprocity,
        } => aggregate(out, files, *mode, *method, *scale, *reciprocity),
        Command::Verify { ri_table, ri_factor } => run_verify(out, ri_table.as_deref(), *ri_factor),
        Command::RiEstimate {
            dims,
            samples,
            seed,
            scale,
            workers,
            output,
        } => ri_estimate(out, dims, *samples, *seed, *scale, *workers, output.as_deref()),
    }
}
