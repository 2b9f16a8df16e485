use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use exsearch::bench::format::{read_graph, write_graph};
use exsearch::bench::gen::{gen_instance, Family, GenParams};
use exsearch::bench::report::{bench_rows, oracle_rows, rho_rows, sigma_rows, write_csv, ReportConfig, ReportRow};
use exsearch::bench::sat::{parse_dimacs, sat_reduce, sat_witness_search};
use exsearch::det::SteinerMode;
use exsearch::oracle::DEFAULT_CAP;
use exsearch::rational;
use exsearch::{Error, ErrorClass, RootedGraph};

/// Search ratios of rooted edge-weighted graphs.
///
/// Environment: ES_THREADS caps the number of worker threads.
#[derive(Parser)]
#[command(name = "exsearch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a generated instance in the graph text format.
    Gen {
        family: Family,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Deterministic search ratio: distance order (trees, unweighted) and doubling.
    Sigma {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Lower bound, constructive strategies and the (n+1)/2 cap for the randomized ratio.
    RhoBounds {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Exact randomized and deterministic ratios by enumeration.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Build the search-ratio instance of a DIMACS 3-CNF formula.
    ReduceSat {
        /// DIMACS file, or `-` for standard input.
        file: PathBuf,
        /// Assignment as a bit string `b_1 b_2 …`; reports its witness search.
        #[arg(long)]
        assignment: Option<String>,
    },
    /// Generate a batch of instances and report every method on each.
    Bench {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct Input {
    /// Graph file, or `-` for standard input.
    file: PathBuf,
}

#[derive(Args)]
struct ParamArgs {
    /// Non-root vertices.
    #[arg(long, default_value_t = 5)]
    n: usize,
    /// Largest edge length.
    #[arg(long, default_value_t = 10)]
    max_len: i64,
    /// Lengths are multiples of 1/denominator.
    #[arg(long, default_value_t = 1)]
    denominator: i64,
    /// Extra-edge probability for graph families.
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
}

impl From<&ParamArgs> for GenParams {
    fn from(a: &ParamArgs) -> GenParams {
        GenParams { n: a.n, max_len: a.max_len, denominator: a.denominator, edge_prob: a.edge_prob }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte-Carlo trials for the deepening estimate.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Largest number of expanding searches to enumerate.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u128,
    /// Also compute exact optima when within the cap.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value = "exact")]
    steiner: SteinerMode,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

impl RunArgs {
    fn config(&self) -> ReportConfig {
        ReportConfig { cap: self.cap, oracle: self.oracle, steiner: self.steiner, trials: self.trials, seed: self.seed }
    }
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Io(e.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}

fn load(input: &Input) -> Result<(String, RootedGraph), Failure> {
    let g = read_graph(&read_input(&input.file)?)?;
    let id = match input.file.file_stem() {
        Some(stem) if input.file.as_os_str() != "-" => stem.to_string_lossy().into_owned(),
        _ => "stdin".into(),
    };
    Ok((id, g))
}

fn emit(rows: &[ReportRow], _format: OutputFormat) -> Result<(), Failure> {
    write_csv(io::stdout().lock(), rows)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen { family, params, seed } => {
            let g = gen_instance(family, &GenParams::from(&params), seed)?;
            print!("# {family}, seed {seed}\n{}", write_graph(&g));
        }
        Command::Sigma { input, run } => {
            let (id, g) = load(&input)?;
            emit(&sigma_rows(&id, "file", &g, &run.config())?, run.format)?;
        }
        Command::RhoBounds { input, run } => {
            let (id, g) = load(&input)?;
            emit(&rho_rows(&id, "file", &g, &run.config())?, run.format)?;
        }
        Command::Oracle { input, run } => {
            let (id, g) = load(&input)?;
            emit(&oracle_rows(&id, "file", &g, &run.config())?, run.format)?;
        }
        Command::ReduceSat { file, assignment } => {
            let red = sat_reduce(&parse_dimacs(&read_input(&file)?)?)?;
            let mut out = io::stdout().lock();
            writeln!(out, "# R = {}", rational::format(&red.r))?;
            if !red.degenerate_clauses.is_empty() {
                let list: Vec<String> = red.degenerate_clauses.iter().map(|j| (j + 1).to_string()).collect();
                writeln!(out, "# clauses with repeated literals: {}", list.join(" "))?;
            }
            if let Some(bits) = assignment {
                let b = bits
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(Error::InvalidParams(format!("assignment must be 0/1 digits, got {bits:?}"))),
                    })
                    .collect::<Result<Vec<bool>, Error>>()?;
                let w = sat_witness_search(&red, &b)?;
                let verdict = if w.ratio <= red.r { "<=" } else { ">" };
                writeln!(out, "# witness search ratio {} {verdict} R", rational::format(&w.ratio))?;
                if !w.unsatisfied.is_empty() {
                    let list: Vec<String> = w.unsatisfied.iter().map(|j| (j + 1).to_string()).collect();
                    writeln!(out, "# unsatisfied clauses: {}", list.join(" "))?;
                }
            }
            write!(out, "{}", write_graph(&red.graph))?;
        }
        Command::Bench { family, instances, params, run } => {
            emit(&bench_rows(family, &GenParams::from(&params), instances, &run.config())?, run.format)?;
        }
    }
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("ES_THREADS") else { return Ok(()) };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidParams(format!("ES_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Io(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Input => 2,
                ErrorClass::Resource => 3,
                ErrorClass::Numerical => 4,
            })
        }
    }
}
