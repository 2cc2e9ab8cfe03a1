use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use witness_cli::commands::{self, Globals, Outcome};
use witness_cli::CliError;

#[derive(Parser)]
#[command(name = "witness", version, about = "Entanglement witness hierarchy tools")]
struct Cli {
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Restarts for product-vector searches.
    #[arg(long, global = true, default_value_t = 64)]
    restarts: usize,
    /// Numerical tolerance for searches and the decomposition.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Place an operator in the hierarchy.
    Classify { path: PathBuf },
    /// Best separable approximation of a state.
    Bsa {
        path: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
    },
    /// Is the first state finer than the second?
    Finer {
        finer: PathBuf,
        coarser: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Do two states share an optimal entangled remainder?
    Family { first: PathBuf, second: PathBuf },
    /// Maximal dimension of a completely entangled subspace.
    Ces {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
    },
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Werner states: classification, flip-witness value and decomposition.
    Werner {
        #[arg(long, conflicts_with = "grid")]
        p: Option<f64>,
        /// Number of equally spaced points on [0, 1].
        #[arg(long)]
        grid: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let g = Globals { seed: cli.seed, restarts: cli.restarts, tol: cli.tol };
    if g.restarts == 0 || g.tol.is_nan() || g.tol <= 0.0 {
        return Err(CliError::Parse("--restarts must be positive and --tol > 0".into()));
    }
    match cli.command {
        Command::Classify { path } => commands::cmd_classify(&path, &g),
        Command::Bsa { path, max_iters } => commands::cmd_bsa(&path, &g, max_iters),
        Command::Finer { finer, coarser, samples } => commands::cmd_finer(&finer, &coarser, &g, samples),
        Command::Family { first, second } => commands::cmd_family(&first, &second, &g),
        Command::Ces { dims } => commands::cmd_ces(&dims, &g),
        Command::Demo { demo: Demo::Werner { p, grid } } => {
            let points = match (p, grid) {
                (Some(p), _) => vec![p],
                (None, Some(n)) if n < 2 => return Err(CliError::Parse("--grid needs at least 2 points".into())),
                (None, n) => {
                    let n = n.unwrap_or(11);
                    (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
                }
            };
            commands::cmd_demo_werner(&points, &g)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            let text = outcome.report.to_json();
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::from(outcome.exit)
        }
        Err(e) => {
            eprintln!("witness: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
