mod cache;
mod commands;

use std::ops::RangeInclusive;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Outcome};

/// Exact graph complexes of modular operads.
#[derive(Parser, Debug)]
#[command(name = "modgraph", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Ignore the cache directory even if MODGRAPH_CACHE_DIR is set.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// `a` or an inclusive range `a..b`.
#[derive(Clone, Debug)]
pub struct Span(RangeInclusive<usize>);

impl FromStr for Span {
    type Err = String;
    fn from_str(s: &str) -> Result<Span, String> {
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("expected a number or a range a..b, got {s:?}"));
        match s.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                if a > b {
                    return Err(format!("empty range {s:?}"));
                }
                Ok(Span(a..=b))
            }
            None => num(s).map(|a| Span(a..=a)),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct TypeArgs {
    /// Genus, or a range such as 0..2.
    #[arg(long)]
    g: Span,
    /// Number of legs, or a range such as 3..6.
    #[arg(long)]
    n: Span,
}

#[derive(Args, Debug, Clone)]
pub struct CoeffArgs {
    /// com-envelope, com-extension, lie-odd or file:<path>.
    #[arg(long, default_value = "com-envelope")]
    coeff: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FiltrationArg {
    Internal,
    Genus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum View {
    Raw,
    Figure,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List isomorphism classes of stable graphs.
    Graphs {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        max_edges: Option<usize>,
    },
    /// Betti numbers of Feynman transforms.
    Homology {
        #[command(flatten)]
        coeff: CoeffArgs,
        #[command(flatten)]
        ty: TypeArgs,
    },
    /// Check the retract identities on every small graph.
    FiberVerify {
        #[arg(long, default_value_t = 4)]
        max_edges: usize,
        #[arg(long, default_value_t = 2)]
        max_genus: usize,
        #[arg(long, default_value_t = 3)]
        max_legs: usize,
    },
    /// Compare nesting posets with tubing posets of line graphs.
    PolytopeVerify {
        /// path:k, cycle:k, bouquet:k, K4, theta or a graph JSON file; repeatable.
        #[arg(long, required = true)]
        graph: Vec<String>,
    },
    /// Pages 0 and 1 of the internal-degree or genus-label filtration.
    Spectral {
        #[command(flatten)]
        coeff: CoeffArgs,
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, value_enum, default_value_t = FiltrationArg::Internal)]
        filtration: FiltrationArg,
        /// Use the structure induced on the homology of the transform of the coefficients.
        #[arg(long)]
        of_homology: bool,
        #[arg(long, value_enum, default_value_t = View::Figure)]
        view: View,
        /// Print text grids instead of tables.
        #[arg(long)]
        grid: bool,
    },
    /// Leg-permutation characters on homology.
    Action {
        #[command(flatten)]
        coeff: CoeffArgs,
        #[command(flatten)]
        ty: TypeArgs,
    },
    /// The complex with its basis and exact differential, as JSON.
    DumpComplex {
        #[command(flatten)]
        coeff: CoeffArgs,
        #[command(flatten)]
        ty: TypeArgs,
    },
    /// Coefficient system utilities.
    Coeffs {
        #[command(subcommand)]
        action: CoeffsCommand,
    },
}

#[derive(Subcommand, Debug)]
enum CoeffsCommand {
    /// Check the structure relations of a system and of random graph gluings.
    Verify {
        #[command(flatten)]
        coeff: CoeffArgs,
        /// Genus bound of the checked support.
        #[arg(long, default_value_t = 1)]
        g: usize,
        /// Leg bound (at the genus bound) of the checked support.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Random gluing instances for the graph-level relations.
        #[arg(long, default_value_t = 1000)]
        instances: usize,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let ctx = commands::Context { format: cli.format, seed: cli.seed, cache: cache::Cache::from_env(cli.no_cache) };
    match cli.command {
        Command::Graphs { ty, max_edges } => commands::graphs(&ctx, &ty, max_edges),
        Command::Homology { coeff, ty } => commands::homology(&ctx, &coeff, &ty),
        Command::FiberVerify { max_edges, max_genus, max_legs } => commands::fiber_verify(&ctx, max_edges, max_genus, max_legs),
        Command::PolytopeVerify { graph } => commands::polytope_verify(&ctx, &graph),
        Command::Spectral { coeff, ty, filtration, of_homology, view, grid } => {
            commands::spectral(&ctx, &coeff, &ty, filtration, of_homology, view, grid)
        }
        Command::Action { coeff, ty } => commands::action(&ctx, &coeff, &ty),
        Command::DumpComplex { coeff, ty } => commands::dump_complex(&ctx, &coeff, &ty),
        Command::Coeffs { action: CoeffsCommand::Verify { coeff, g, n, instances } } => {
            commands::coeffs_verify(&ctx, &coeff, g, n, instances)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            if !out.stderr.is_empty() {
                eprint!("{}", out.stderr);
            }
            if out.ok { ExitCode::SUCCESS } else { ExitCode::from(1) }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
