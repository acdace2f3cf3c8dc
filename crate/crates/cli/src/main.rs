//! `finiteverse` command-line front end.
//!
//! Exit codes: 0 success, 2 an invariance check failed, 3 bad input or a
//! domain error.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "finiteverse",
    version,
    about = "Exact finite-multiverse experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Exact,
    Approx,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum OrderArg {
    Both,
    AliceFirst,
    BobFirst,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Singlet-pair joint distribution in both measurement orders.
    Entangle {
        #[arg(long, allow_hyphen_values = true)]
        alice: i64,
        #[arg(long, allow_hyphen_values = true)]
        bob: i64,
        #[arg(long, value_enum, default_value_t = OrderArg::Both)]
        order: OrderArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        /// Denominator bound for approximate mode.
        #[arg(long, default_value_t = finiteverse::rational::DEFAULT_MAX_DENOMINATOR)]
        max_denominator: u64,
        /// Also write the joint kernel to this file.
        #[arg(long)]
        kernel_out: Option<String>,
    },
    /// Combine kernel files and query them.
    Kernel {
        /// Kernel files (`-` for stdin); several are tensored in order.
        #[arg(required = true)]
        files: Vec<String>,
        /// Raise the (tensored) kernel to this tensor power.
        #[arg(long)]
        power: Option<u64>,
        /// Divide counts by their gcd.
        #[arg(long)]
        reduce: bool,
        /// Print the exact probability of a query such as `all-match`.
        #[arg(long)]
        prob: Option<String>,
        /// List powers explicitly only up to this many universes.
        #[arg(long, default_value_t = 1 << 20)]
        materialize_limit: u64,
        /// List every universe, one label per line.
        #[arg(long)]
        enumerate: bool,
    },
    /// Seeded sampling of a kernel, as CSV.
    Sample {
        file: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Event order in boosted frames.
    Frames {
        /// Events file: `#events v1`, then `label t x` per line.
        file: String,
        /// Frame velocities, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            default_value = "0"
        )]
        v: Vec<f64>,
        /// Interpret t in seconds, x in metres and v in m/s.
        #[arg(long)]
        si: bool,
    },
    /// Branching trees per viewer order, their filaments and the verdict.
    Tree {
        /// Independent events file: `#branch-events v1`, then `name o:c,...`.
        #[arg(long, conflicts_with_all = ["alice", "joint"])]
        events: Option<String>,
        /// Joint kernel file whose label components are the events.
        #[arg(long, requires = "names")]
        joint: Option<String>,
        /// Event names for `--joint`, comma separated.
        #[arg(long, value_delimiter = ',')]
        names: Vec<String>,
        /// Singlet experiment: Alice's filter angle.
        #[arg(long, requires = "bob", allow_hyphen_values = true)]
        alice: Option<i64>,
        #[arg(long, requires = "alice", allow_hyphen_values = true)]
        bob: Option<i64>,
        /// Viewer order as comma separated event names; repeatable.
        #[arg(long = "order")]
        orders: Vec<String>,
        /// Compare every permutation of the events.
        #[arg(long)]
        all_orders: bool,
    },
    /// Entropy of a deterministic ensemble per step, as CSV.
    Arrow {
        file: String,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        steps: usize,
    },
    /// Game of Life block history.
    Life {
        /// Plaintext pattern file (`-` for stdin).
        file: String,
        #[arg(long, default_value_t = 0)]
        horizon: usize,
        #[arg(long)]
        detect_period: bool,
        /// Print every state as a plaintext frame.
        #[arg(long)]
        emit_states: bool,
        #[arg(long, default_value_t = finiteverse::life::DEFAULT_CELL_BUDGET)]
        budget: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(commands::Failure::Violation(out)) => {
            print!("{out}");
            ExitCode::from(2)
        }
        Err(commands::Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
