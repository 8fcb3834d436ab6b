use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use planar_mrf::dualdec::{InnerConfig, StepSchedule};
use planar_mrf::model::{gen_type1, gen_type2, read_problem, scale_and_round, write_problem, MrfProblem};
use planar_mrf::oracle::{exact_map, DEFAULT_BUDGET};
use planar_mrf::repair::{run, GapMode, RepairConfig, RepairResult};

/// MAP inference for planar pairwise MRFs.
#[derive(Parser)]
#[command(name = "planar-mrf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random N x N grid instance.
    Generate {
        #[arg(long = "type", value_enum)]
        kind: Kind,
        /// Grid side, at least 2.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=4096))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the cycle-repair solver on an instance file.
    Solve(SolveArgs),
    /// Exact MAP by exhaustive search.
    Oracle {
        instance: PathBuf,
        /// Search even above the 3^16 labeling budget.
        #[arg(long)]
        force: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(clap::Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Install the D uniform one-versus-all subproblems before the loop.
    #[arg(long)]
    hot_start: bool,
    #[arg(long, default_value_t = 10)]
    max_subproblems: usize,
    /// Scale potentials by 100 and round, enabling the gap-below-one certificate.
    #[arg(long)]
    integer: bool,
    /// Write the bound trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Worker threads for subproblem solves; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Seed new subproblems with the last decoding rather than the best.
    #[arg(long)]
    literal_recent: bool,
    /// Relative bound improvement that ends an inner phase.
    #[arg(long, default_value_t = InnerConfig::default().tolerance)]
    tolerance: f64,
    /// Iterations over which the improvement is measured.
    #[arg(long, default_value_t = InnerConfig::default().window)]
    window: usize,
    /// Iteration cap per inner phase.
    #[arg(long, default_value_t = InnerConfig::default().max_iterations)]
    max_iterations: usize,
    /// Initial step size; derived from the potentials when omitted.
    #[arg(long)]
    step: Option<f64>,
    /// Also run the exact oracle when the instance is small enough.
    #[arg(long)]
    oracle: bool,
}

/// Failure classes with distinct exit codes.
enum Failure {
    Io(anyhow::Error),
    Parse(anyhow::Error),
    Solver(anyhow::Error),
    Budget(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Parse(_) => 3,
            Failure::Solver(_) => 4,
            Failure::Budget(_) => 5,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Io(e) | Failure::Parse(e) | Failure::Solver(e) | Failure::Budget(e) => e,
        }
    }
}

fn io_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Io(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate { kind, n, seed, out } => generate(kind, n as usize, seed, out.as_deref()),
        Command::Solve(args) => solve(&args),
        Command::Oracle { instance, force } => oracle(&instance, force),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}

fn generate(kind: Kind, n: usize, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    let (problem, type_id) = match kind {
        Kind::One => (gen_type1(n, seed), 1),
        Kind::Two => (gen_type2(n, seed), 2),
    };
    let problem = problem.map_err(|e| Failure::Solver(e.into()))?;
    let text = format!("# type={type_id} n={n} seed={seed}\n{}", write_problem(&problem));
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(io_err),
        None => io::stdout().write_all(text.as_bytes()).map_err(io_err),
    }
}

/// Reads an instance and the `key=value` pairs of a leading `#` comment.
fn load(path: &Path) -> Result<(MrfProblem, Vec<(String, String)>), Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(io_err)?;
    let problem =
        read_problem(&text).with_context(|| format!("parsing {}", path.display())).map_err(Failure::Parse)?;
    let meta = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .map(|l| {
            l.split_whitespace()
                .filter_map(|kv| kv.split_once('='))
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect()
        })
        .unwrap_or_default();
    Ok((problem, meta))
}

fn solve(args: &SolveArgs) -> Result<(), Failure> {
    let (original, meta) = load(&args.instance)?;
    if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
            .map_err(|e| Failure::Solver(e.into()))?;
    }
    let schedule = match args.step {
        Some(step) => Some(
            StepSchedule::new(step, StepSchedule::DEFAULT_HORIZON)
                .ok_or_else(|| Failure::Solver(anyhow!("step size must be positive and finite")))?,
        ),
        None => None,
    };
    let config = RepairConfig {
        max_subproblems: args.max_subproblems,
        hot_start: args.hot_start,
        inner: InnerConfig { tolerance: args.tolerance, window: args.window, max_iterations: args.max_iterations },
        schedule,
        mode: if args.integer { GapMode::Integer } else { GapMode::Real },
        literal_recent: args.literal_recent,
    };
    let scaled;
    let problem = if args.integer {
        scaled = scale_and_round(&original);
        scaled.problem()
    } else {
        &original
    };
    let result = run(problem, &config).map_err(|e| Failure::Solver(e.into()))?;

    if let Some(path) = &args.trace {
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display())).map_err(io_err)?;
        let mut w = BufWriter::new(file);
        result.trace.write_csv(&mut w, Some(&result.summary())).map_err(io_err)?;
        w.flush().map_err(io_err)?;
    }

    let oracle_energy = if args.oracle {
        match exact_map(problem, Some(DEFAULT_BUDGET)) {
            Ok((energy, _)) => Some(energy),
            Err(e) => {
                eprintln!("oracle skipped: {e}");
                None
            }
        }
    } else {
        None
    };
    report(&mut io::stdout().lock(), &original, &meta, &result, args, oracle_energy).map_err(io_err)
}

fn report(
    out: &mut impl Write,
    original: &MrfProblem,
    meta: &[(String, String)],
    r: &RepairResult,
    args: &SolveArgs,
    oracle_energy: Option<f64>,
) -> io::Result<()> {
    let info: String = meta.iter().map(|(k, v)| format!("{k}={v} ")).collect();
    writeln!(
        out,
        "instance: {info}nodes={} states={} edges={}",
        original.num_nodes(),
        original.num_states(),
        original.num_edges()
    )?;
    writeln!(out, "status: {}", r.status)?;
    if args.integer {
        writeln!(out, "upper: {} (integer, scale 100)", r.energy.round() as i64)?;
    } else {
        writeln!(out, "upper: {}", r.energy)?;
    }
    writeln!(out, "lower: {}", r.lower_bound)?;
    writeln!(out, "gap: {}", r.gap())?;
    writeln!(out, "subproblems: {}", r.subproblems_added)?;
    if args.hot_start {
        writeln!(out, "hot-start subproblems: {}", r.hot_start_subproblems)?;
    }
    writeln!(out, "iterations: {}", r.trace.len())?;
    if args.integer {
        let e = original.energy(&r.labeling).expect("labeling fits its problem");
        writeln!(out, "unscaled energy: {e}")?;
    }
    if let Some(e) = oracle_energy {
        writeln!(out, "oracle: {e}")?;
    }
    if let Some(path) = &args.trace {
        writeln!(out, "trace: {}", path.display())?;
    }
    writeln!(out, "labeling: {}", r.labeling)
}

fn oracle(path: &Path, force: bool) -> Result<(), Failure> {
    let (problem, _) = load(path)?;
    let budget = if force { None } else { Some(DEFAULT_BUDGET) };
    let (energy, x) = exact_map(&problem, budget)
        .map_err(|e| Failure::Budget(anyhow!("{e}; pass --force to search anyway")))?;
    println!("energy: {energy}");
    println!("labeling: {x}");
    Ok(())
}
