//! `murn` — analyze multi-drawing urn replacement tensors and verify their
//! convergence behaviour by simulation.
//!
//! Subcommands: `check`, `solve`, `simulate`, `dag`, `chain`, `catalog`.
//! Tensor input is a JSON file `{"d":..,"m":..,"entries":[..]}` (entries
//! flattened with the added-colour index slowest); `-` reads stdin. Exit
//! codes: 0 ok, 1 input error, 2 assumption failure, 3 non-convergence.

use clap::{Parser, Subcommand};
use murn::error::Error;
use murn::ReplacementTensor;
use std::path::PathBuf;
use std::process::ExitCode;

mod commands;

#[derive(Parser)]
#[command(name = "murn", version, about = "Multi-drawing urn tensor toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check tenability, balance and the ergodicity bound; print the report
    /// as JSON. Exits 2 when any assumption fails.
    Check {
        /// Tensor JSON file, or `-` for stdin.
        tensor: PathBuf,
    },
    /// Solve `sigma x = R(x, ..., x)` on the simplex from the barycenter.
    Solve {
        tensor: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 10_000)]
        max_iter: usize,
        /// Also list every two-colour fixed point (requires d = 2).
        #[arg(long = "all-2colour")]
        all_2colour: bool,
    },
    /// Monte Carlo convergence of the composition toward the fixed point;
    /// CSV `n,mean_l1_error,stderr,replicates`.
    Simulate {
        tensor: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, default_value_t = 200)]
        replicates: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Initial counts, comma-separated; default all ones.
        #[arg(long)]
        initial: Option<String>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ancestry-geometry event frequencies of the uniform recursive DAG
    /// (CSV `n,ell,estimate,stderr,replicates`), or, with a tensor file,
    /// the exact label-coupling check / a labelled DAG dump.
    Dag {
        /// Tensor JSON enables coupling mode (`--dump` for a labelled dump).
        tensor: Option<PathBuf>,
        /// Graph size(s); comma-separated list in event mode.
        #[arg(long, value_delimiter = ',', default_value = "1000")]
        n: Vec<u64>,
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Genealogy depth checked for completeness. Must stay small: the
        /// theory lets it grow only like o(log log log n).
        #[arg(long, default_value_t = 2)]
        ell: usize,
        #[arg(long, default_value_t = 2000)]
        replicates: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Initial colour distribution for labelled modes, comma-separated;
        /// default uniform.
        #[arg(long)]
        pi: Option<String>,
        /// Grow one labelled DAG of size n and print its JSON dump.
        #[arg(long)]
        dump: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distribution recursion of the induced chain on the complete m-ary
    /// tree; CSV `level,max_error,bound`.
    Chain {
        tensor: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// `uniform` or `point:<tuple>` with 1-based colours, e.g. `point:1,1`.
        #[arg(long, default_value = "uniform")]
        leaves: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List built-in example tensors or emit one as JSON.
    Catalog {
        #[arg(long, conflicts_with = "emit")]
        list: bool,
        /// Entry name; `affine(a0,h,sigma)` constructs the affine family.
        #[arg(long)]
        emit: Option<String>,
    },
}

fn read_tensor(path: &PathBuf) -> Result<ReplacementTensor, Error> {
    let text = if path.as_os_str() == "-" {
        use std::io::Read;
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
    };
    ReplacementTensor::from_json(&text)
}

/// Map library errors onto the documented exit codes.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::MaxIterExceeded { .. } | Error::NotContractive { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check { tensor } => read_tensor(&tensor).and_then(|t| commands::check(&t)),
        Command::Solve {
            tensor,
            tol,
            max_iter,
            all_2colour,
        } => read_tensor(&tensor).and_then(|t| commands::solve(&t, tol, max_iter, all_2colour)),
        Command::Simulate {
            tensor,
            n,
            replicates,
            seed,
            initial,
            out,
        } => read_tensor(&tensor).and_then(|t| {
            commands::simulate(&t, n, replicates, seed, initial.as_deref(), out.as_deref())
        }),
        Command::Dag {
            tensor,
            n,
            m,
            ell,
            replicates,
            seed,
            pi,
            dump,
            out,
        } => match tensor {
            None => commands::dag_events(&n, m, ell, replicates, seed, out.as_deref()),
            Some(path) => read_tensor(&path).and_then(|t| {
                let n0 = n.first().copied().unwrap_or(3);
                if dump {
                    commands::dag_dump(&t, n0, seed, pi.as_deref())
                } else {
                    commands::dag_couple(&t, n0, pi.as_deref())
                }
            }),
        },
        Command::Chain {
            tensor,
            depth,
            leaves,
            out,
        } => read_tensor(&tensor).and_then(|t| commands::chain(&t, depth, &leaves, out.as_deref())),
        Command::Catalog { list, emit } => commands::catalog(list, emit.as_deref()),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
