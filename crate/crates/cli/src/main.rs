//! `largealpha`: experiment driver and lossless codec.
//!
//! Tables go to stdout (or `--out`) as CSV with a header row; summaries go
//! to stderr. Exit status is 0 on success, 2 for configuration errors and 3
//! for data errors.

mod csv;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use largealpha::coding::container::{compress, decompress, CompressOptions};
use largealpha::corpus::{gaussian_points, read_dump, write_dump, Samples, SourceKind, SourceSpec};
use largealpha::experiments::{
    classic_zipf_row, ecvq_sweep, lattice_sweep, parse_grid, theory_bounds_row, universal_run,
};
use largealpha::numeric::logspace;
use largealpha::universal::DescendConfig;
use largealpha::vq::{bica_ecvq_fit, gaussian_rd, LatticeKind, Points};
use largealpha::SearchMethod;

use crate::csv::CsvOut;

#[derive(Parser)]
#[command(
    name = "largealpha",
    version,
    about = "Large-alphabet source coding experiments"
)]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Huffman against per-bit coding after ordering on Zipf sources.
    ClassicZipf(ClassicZipfArgs),
    /// Monte Carlo total correlation against its closed-form bounds.
    TheoryBounds(TheoryArgs),
    /// Iterative shuffle and block search on sampled data.
    Universal(UniversalArgs),
    /// Lossy coding experiments.
    #[command(subcommand)]
    Vq(VqCommand),
    /// Same as `vq ecvq`.
    VqEcvq(EcvqArgs),
    /// Same as `vq lattice`.
    VqLattice(LatticeArgs),
    /// Draw samples from a source.
    Sample(SampleArgs),
    /// Compress a file into the block container format.
    Compress(CompressArgs),
    /// Restore a file written by `compress`.
    Decompress(IoArgs),
}

#[derive(Args)]
struct OutArg {
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassicZipfArgs {
    /// Alphabet size.
    #[arg(long, default_value_t = 1 << 16)]
    m: usize,
    /// Zipf exponents as `lo:hi:step` or a single value.
    #[arg(long, default_value = "0.4:2.0:0.2")]
    s_grid: String,
    /// Samples to code for measured rates; 0 reports ideal rates only.
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct TheoryArgs {
    /// Bits per symbol; repeat or separate with commas.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    d: Vec<u32>,
    #[arg(long, default_value_t = 2000)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct UniversalArgs {
    /// `zipf:S:M`, `dirichlet:M`, `freq:PATH[:D]` or a frequency list path.
    #[arg(long, conflicts_with = "dump", required_unless_present = "dump")]
    source: Option<String>,
    /// Sample dump to read instead of sampling a source.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Samples to draw from `--source`.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    /// Block width in bits.
    #[arg(long, default_value_t = 8)]
    b: u32,
    #[arg(long, default_value_t = 50)]
    iters: usize,
    /// Block search: `order`, `brute`, `piecewise[:K]`; chosen per block
    /// width when absent.
    #[arg(long)]
    method: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Subcommand)]
enum VqCommand {
    /// ECVQ with a joint entropy coder next to the marginal-coded variant.
    Ecvq(EcvqArgs),
    /// The marginal-coded variant alone, with its descent details.
    BicaEcvq(EcvqArgs),
    /// Fixed lattice quantizers with joint and marginal index coding.
    Lattice(LatticeArgs),
}

#[derive(Args)]
struct EcvqArgs {
    #[arg(long, default_value_t = 6)]
    dim: usize,
    /// Mixture components with means at ±(1, …, 1).
    #[arg(long, default_value_t = 2)]
    components: usize,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Initial codebook size.
    #[arg(long, default_value_t = 16)]
    m_init: usize,
    #[arg(long, default_value_t = 0.01)]
    lambda_min: f64,
    #[arg(long, default_value_t = 10.0)]
    lambda_max: f64,
    /// Log-spaced λ values.
    #[arg(long, default_value_t = 16)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct LatticeArgs {
    /// `zN`, `d4` or `e8`.
    #[arg(long, default_value = "z3")]
    lattice: String,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    scale_min: f64,
    #[arg(long, default_value_t = 5.0)]
    scale_max: f64,
    /// Log-spaced scales.
    #[arg(long, default_value_t = 10)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SampleArgs {
    /// `zipf:S:M`, `dirichlet:M`, `mixture:DIM:K` or a frequency list.
    #[arg(long)]
    source: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Symbol sources write a binary dump, mixtures write CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IoArgs {
    /// Input file; stdin when absent.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompressArgs {
    #[command(flatten)]
    io: IoArgs,
    #[arg(long, default_value_t = 8)]
    b: u32,
    /// Search iterations; 0 codes bits in their original blocks.
    #[arg(long, default_value_t = 8)]
    iters: usize,
    #[arg(long)]
    method: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Raised for bad flag combinations that clap cannot express.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

fn parse_method(s: &Option<String>) -> anyhow::Result<Option<SearchMethod>> {
    s.as_deref().map(str::parse).transpose().map_err(Into::into)
}

fn read_input(path: &Option<PathBuf>) -> anyhow::Result<Vec<u8>> {
    match path {
        Some(p) => fs::read(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn write_output(path: &Option<PathBuf>, bytes: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => Ok(io::stdout().lock().write_all(bytes)?),
    }
}

fn classic_zipf(a: &ClassicZipfArgs) -> anyhow::Result<()> {
    let grid = parse_grid(&a.s_grid)?;
    let mut out = CsvOut::open(&a.out.out)?;
    let mut header = vec!["s", "H", "huffman_avg", "perbit_avg", "twoblock_avg"];
    if a.n > 0 {
        header.extend(["n", "huffman_coded", "perbit_coded", "twoblock_coded"]);
    }
    out.header(&header)?;
    for s in grid {
        let r = classic_zipf_row(a.m, s, a.n, a.seed)?;
        let mut row = vec![r.s, r.entropy, r.huffman_avg, r.perbit_avg, r.twoblock_avg];
        if let Some(c) = r.coded {
            row.extend([c.n as f64, c.huffman, c.perbit, c.twoblock]);
        }
        out.floats(&row)?;
    }
    out.finish()
}

fn theory_bounds(a: &TheoryArgs) -> anyhow::Result<()> {
    let mut out = CsvOut::open(&a.out.out)?;
    out.header(&[
        "d",
        "m",
        "bound",
        "ordered_mean",
        "ordered_se",
        "identity_mean",
        "identity_se",
        "entropy_gap",
    ])?;
    for &d in &a.d {
        let r = theory_bounds_row(d, a.draws, a.seed)?;
        out.row(&[
            d.to_string(),
            (1u64 << d).to_string(),
            r.bound.map_or(String::new(), |b| b.to_string()),
            r.ordered.mean.to_string(),
            r.ordered.stderr.to_string(),
            r.identity.mean.to_string(),
            r.identity.stderr.to_string(),
            r.entropy_gap.to_string(),
        ])?;
    }
    out.finish()
}

fn universal(a: &UniversalArgs) -> anyhow::Result<()> {
    let (d, samples) = match (&a.source, &a.dump) {
        (_, Some(path)) => {
            let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
            read_dump(io::BufReader::new(f))?
        }
        (Some(spec), None) => {
            let spec = SourceSpec {
                kind: spec.parse()?,
                seed: a.seed,
            };
            match spec.sample(a.n)? {
                Samples::Symbols { d, data } => (d, data),
                Samples::Points(_) => return Err(config("universal needs a discrete source")),
            }
        }
        (None, None) => unreachable!("clap requires one of --source and --dump"),
    };
    let cfg = DescendConfig {
        b: a.b,
        method: parse_method(&a.method)?,
        max_iters: a.iters,
        seed: a.seed,
        ..Default::default()
    };
    let run = universal_run(&samples, d, &cfg)?;
    let mut out = CsvOut::open(&a.out.out)?;
    out.header(&[
        "iteration",
        "bound",
        "block_sum",
        "descent_bits",
        "total_bits",
    ])?;
    for r in &run.report.rows {
        out.floats(&[
            r.iteration as f64,
            r.bound,
            r.block_sum,
            r.descent_bits,
            r.total_bits,
        ])?;
    }
    out.finish()?;
    let b = &run.baselines;
    eprintln!(
        "n={} d={} distinct={} H={:.4}: best total {:.0} bits at iteration {}; \
         standard {:.0}, pattern {:.0}, canonical Huffman {:.0}",
        samples.len(),
        d,
        b.distinct,
        b.empirical_entropy,
        run.report.best_total,
        run.report.best_iteration,
        b.standard,
        b.pattern,
        b.canonical
    );
    Ok(())
}

fn ecvq_points(a: &EcvqArgs) -> anyhow::Result<(Points, Vec<f64>)> {
    if !(a.lambda_min > 0.0 && a.lambda_max >= a.lambda_min) || a.steps == 0 {
        return Err(config("need 0 < lambda-min ≤ lambda-max and steps ≥ 1"));
    }
    let spec = SourceSpec {
        kind: SourceKind::GaussianMixture {
            dim: a.dim,
            components: a.components,
        },
        seed: a.seed,
    };
    let Samples::Points(points) = spec.sample(a.n)? else {
        unreachable!("a mixture yields points")
    };
    Ok((points, logspace(a.lambda_min, a.lambda_max, a.steps)))
}

fn vq_ecvq(a: &EcvqArgs) -> anyhow::Result<()> {
    let (points, lambdas) = ecvq_points(a)?;
    let rows = ecvq_sweep(&points, a.m_init, &lambdas, a.seed)?;
    let mut out = CsvOut::open(&a.out.out)?;
    out.header(&[
        "lambda",
        "distortion",
        "rate_joint",
        "clusters_joint",
        "distortion_marginal",
        "rate_marginal",
        "clusters_marginal",
        "rd_bound",
    ])?;
    for r in rows {
        out.floats(&[
            r.lambda,
            r.distortion,
            r.rate_joint,
            r.clusters_joint as f64,
            r.distortion_marginal,
            r.rate_marginal,
            r.clusters_marginal as f64,
            r.rd_bound,
        ])?;
    }
    out.finish()
}

fn vq_bica_ecvq(a: &EcvqArgs) -> anyhow::Result<()> {
    let (points, lambdas) = ecvq_points(a)?;
    let fits = lambdas
        .iter()
        .map(|&lambda| bica_ecvq_fit(&points, a.m_init, lambda, a.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = CsvOut::open(&a.out.out)?;
    out.header(&[
        "lambda",
        "distortion",
        "rate",
        "clusters",
        "sweeps",
        "lagrangian",
        "rd_bound",
    ])?;
    for (lambda, fit) in lambdas.into_iter().zip(fits) {
        let q = &fit.state;
        let rd = gaussian_rd(points.dim(), q.distortion.max(f64::MIN_POSITIVE))?;
        out.floats(&[
            lambda,
            q.distortion_per_dim(),
            q.rate,
            q.clusters() as f64,
            q.history.len() as f64,
            q.lagrangian,
            rd,
        ])?;
    }
    out.finish()
}

fn vq_lattice(a: &LatticeArgs) -> anyhow::Result<()> {
    let kind: LatticeKind = a.lattice.parse()?;
    if !(a.scale_min > 0.0 && a.scale_max >= a.scale_min) || a.steps == 0 {
        return Err(config("need 0 < scale-min ≤ scale-max and steps ≥ 1"));
    }
    let points = gaussian_points(kind.dim(), a.n, a.seed)?;
    let rows = lattice_sweep(&points, kind, &logspace(a.scale_min, a.scale_max, a.steps))?;
    let mut out = CsvOut::open(&a.out.out)?;
    out.header(&[
        "scale",
        "distortion",
        "cells",
        "rate_joint",
        "se_joint",
        "rate_marginal",
        "se_marginal",
        "rd_bound",
        "total_joint",
        "total_marginal",
    ])?;
    for r in rows {
        out.floats(&[
            r.scale,
            r.distortion,
            r.cells as f64,
            r.rate_joint,
            r.stderr_joint,
            r.rate_marginal,
            r.stderr_marginal,
            r.rd_bound,
            r.total_joint,
            r.total_marginal,
        ])?;
    }
    out.finish()
}

fn sample(a: &SampleArgs) -> anyhow::Result<()> {
    let spec = SourceSpec {
        kind: a.source.parse()?,
        seed: a.seed,
    };
    match spec.sample(a.n)? {
        Samples::Symbols { d, data } => {
            let mut buf = Vec::new();
            write_dump(&mut buf, d, &data)?;
            write_output(&a.out, &buf)
        }
        Samples::Points(points) => {
            let mut out = CsvOut::open(&a.out)?;
            let header: Vec<String> = (0..points.dim()).map(|i| format!("x{i}")).collect();
            out.header(&header)?;
            for p in points.iter() {
                out.floats(p)?;
            }
            out.finish()
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(w) = cli.workers {
        if w == 0 {
            bail!(ConfigError("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()?;
    }
    match &cli.command {
        Command::ClassicZipf(a) => classic_zipf(a),
        Command::TheoryBounds(a) => theory_bounds(a),
        Command::Universal(a) => universal(a),
        Command::Vq(VqCommand::Ecvq(a)) | Command::VqEcvq(a) => vq_ecvq(a),
        Command::Vq(VqCommand::BicaEcvq(a)) => vq_bica_ecvq(a),
        Command::Vq(VqCommand::Lattice(a)) | Command::VqLattice(a) => vq_lattice(a),
        Command::Sample(a) => sample(a),
        Command::Compress(a) => {
            let input = read_input(&a.io.input)?;
            let opts = CompressOptions {
                b: a.b,
                iters: a.iters,
                method: parse_method(&a.method)?,
                seed: a.seed,
            };
            let packed = compress(&input, &opts)?;
            log::info!("{} bytes -> {} bytes", input.len(), packed.len());
            write_output(&a.io.output, &packed)
        }
        Command::Decompress(a) => {
            let bytes = decompress(&read_input(&a.input)?)?;
            write_output(&a.output, &bytes)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let is_config = e.chain().any(|c| {
        c.is::<ConfigError>()
            || c.downcast_ref::<largealpha::Error>()
                .is_some_and(largealpha::Error::is_config)
    });
    if is_config {
        2
    } else {
        3
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
