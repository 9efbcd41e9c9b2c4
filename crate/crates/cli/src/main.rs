//! `rclt`: run identity checks, bounds, surrogates and rate fits.

mod config;
mod output;
mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rademacher_clt::Error;

use config::{Flags, Settings};

#[derive(Parser)]
#[command(name = "rclt", version = env!("RCLT_VERSION"), about = "Normal-approximation bounds for Rademacher functionals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the exact calculus identities on random functionals.
    Verify(Flags),
    /// Compute the second-order bound for a model over a range of n.
    Bound(Flags),
    /// Estimate the cosine-family distance and compare it with the bound.
    Surrogate(Flags),
    /// Fit log-log slopes to the totals in an existing CSV.
    Rates(Flags),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, flags) = match &cli.command {
        Command::Verify(f) => ("verify", f),
        Command::Bound(f) => ("bound", f),
        Command::Surrogate(f) => ("surrogate", f),
        Command::Rates(f) => ("rates", f),
    };
    let result = Settings::resolve(flags).and_then(|s| {
        let outcome = match cli.command {
            Command::Verify(_) => run::verify(&s),
            Command::Bound(_) => run::bound(&s),
            Command::Surrogate(_) => run::surrogate(&s),
            Command::Rates(_) => run::rates(&s),
        }?;
        output::write_all(&s.out, name, &s, &outcome.rows)?;
        for r in &outcome.rows {
            if r.term == "total" || r.i.is_none() {
                println!("{} n={} {} = {:.6e} ± {:.2e}", r.experiment, r.n.map_or("-".into(), |n| n.to_string()), r.term, r.value, r.std_error);
            }
        }
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("rclt: a checked property failed; see the output rows");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("rclt: {e}");
            if matches!(e, Error::Capacity(_)) {
                eprintln!("rclt: try --backend mc or a smaller n");
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
