mod commands;
mod config;
mod json;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exact analysis of arithmetic differences of Cantor sets.
#[derive(Parser, Debug)]
#[command(name = "cantordiff", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Maps of the system whose attractor is K − λK′.
    Ifs {
        #[arg(long)]
        pair: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
    },
    /// Depth-n union of images and its gaps.
    Cover {
        #[arg(long)]
        pair: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long)]
        depth: usize,
        /// Component budget for the union.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Is t in K − sK′? Decided by orbit search and by the line system.
    Member {
        #[arg(long)]
        pair: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Whether the difference set is a whole interval.
    Full {
        #[arg(long)]
        pair: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// `n0:m0:gamma` with p = gamma^n0, q = gamma^m0, or `irrational`.
        #[arg(long)]
        ratio: Option<String>,
        /// `a:b:count`; prints CSV of verdicts instead of JSON.
        #[arg(long, allow_hyphen_values = true)]
        sweep: Option<String>,
    },
    /// Hausdorff dimension through the neighbor automaton.
    Dim {
        #[arg(long)]
        pair: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Maximum number of automaton states.
        #[arg(long)]
        budget: Option<usize>,
        /// Also write the automaton to this JSON file.
        #[arg(long)]
        emit: Option<String>,
    },
    /// Recurrent region for a thick pair, checked on a grid.
    Recur {
        #[arg(long)]
        pair: String,
        #[arg(long, default_value_t = 50)]
        grid: usize,
    },
    /// Interval certificate for one of the nonlinear examples.
    Nonlinear {
        #[arg(long)]
        example: String,
        #[arg(long)]
        pair: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Regular linking of the depth-one images over a slope range.
    Linked {
        #[arg(long)]
        pair: String,
        /// `m1:m2`.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
    },
    /// CSV of verdicts, class counts and dimension bounds over a λ range.
    Sweep {
        #[arg(long)]
        pair: String,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long)]
        count: usize,
        /// Automaton state budget per row.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// SVG of the interval stack, or of the (s, t)-plane regions with `--plane`.
    Render {
        #[arg(long)]
        pair: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        plane: bool,
        #[arg(long)]
        out: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(partial) = &failure.partial {
                print!("{partial}");
            }
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
