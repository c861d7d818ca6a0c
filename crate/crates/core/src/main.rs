use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cqms::cli::{kind_name, run, Suite};

#[derive(Parser)]
#[command(
    name = "cqms",
    version,
    about = "Experiments on Lip-normed operator systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lip-norm axiom checks on the listed systems.
    Validate(RunArgs),
    /// Diameters and bridge-based distance bounds.
    Distance(RunArgs),
    /// Fuzzy sphere sweep over the spin j.
    Berezin(RunArgs),
    /// Noncommutative torus sweeps and approximation certificates.
    Nctorus(RunArgs),
    /// Merge result records into tables and a summary.
    Report(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (suite, args) = match cli.command {
        Command::Validate(a) => (Suite::Validate, a),
        Command::Distance(a) => (Suite::Distance, a),
        Command::Berezin(a) => (Suite::Berezin, a),
        Command::Nctorus(a) => (Suite::Nctorus, a),
        Command::Report(a) => (Suite::Report, a),
    };
    match run(&args.config, suite, args.seed, &args.out) {
        Ok((rec, code)) => {
            for c in &rec.checks {
                let status = if c.passed { "pass" } else { "FAIL" };
                match &c.detail {
                    Some(d) => println!("{status} {} ({d})", c.name),
                    None => println!("{status} {}", c.name),
                }
            }
            for q in &rec.quantities {
                println!(
                    "{} = {} [{}]",
                    q.name,
                    q.estimate.value,
                    kind_name(q.estimate.kind)
                );
            }
            for n in &rec.notes {
                println!("note: {n}");
            }
            println!("{}", if rec.passed { "pass" } else { "fail" });
            println!("wrote {}", args.out.join("result.json").display());
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
