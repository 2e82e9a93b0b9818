//! Command-line front end: figure data, configured sweeps and the invariant
//! suite. Exit codes: 0 success, 1 failed check or computation, 2 usage.

mod config;
mod figures;
mod run;
mod verify;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{plan, RunConfig};
use figures::{figure, write_figure, FigureError, FigureId, DEFAULT_CHAIN_LENGTHS};

#[derive(Parser)]
#[command(
    name = "multipulse",
    version,
    about = "Composite pulse sequences under systematic control errors"
)]
struct Cli {
    /// Seed for random-sign error models that do not fix their own.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Flip one sign inside the named verify check.
    #[arg(long, global = true, hide = true, value_name = "CHECK")]
    inject_fault: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the CSV curves and JSON metadata behind one figure.
    Figure {
        id: FigureId,
        #[arg(long)]
        out: PathBuf,
        /// Chain lengths for the `chain` figure.
        #[arg(long = "n", value_delimiter = ',', default_values_t = DEFAULT_CHAIN_LENGTHS)]
        chain_lengths: Vec<usize>,
    },
    /// Run a sweep described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's "output".
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check algebraic and compilation invariants.
    Verify {
        /// Run only checks whose name contains this text.
        #[arg(long)]
        filter: Option<String>,
    },
}

const FAILURE: u8 = 1;
const USAGE: u8 = 2;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            return fail(USAGE, "--threads must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            return fail(FAILURE, e);
        }
    }
    match cli.command {
        Command::Figure {
            id,
            out,
            chain_lengths,
        } => cmd_figure(id, out, &chain_lengths, cli.seed),
        Command::Sweep { config, out } => cmd_sweep(config, out, cli.seed),
        Command::Verify { filter } => cmd_verify(filter.as_deref(), cli.inject_fault.as_deref()),
    }
}

fn cmd_figure(id: FigureId, out: PathBuf, chain_lengths: &[usize], seed: u64) -> ExitCode {
    if id == FigureId::Chain && chain_lengths.iter().any(|&n| n < 2) {
        return fail(USAGE, "chain lengths must be at least 2");
    }
    let mut command = format!("multipulse --seed {seed} figure {}", id.name());
    if id == FigureId::Chain {
        let ns: Vec<String> = chain_lengths.iter().map(ToString::to_string).collect();
        command.push_str(&format!(" --n {}", ns.join(",")));
    }
    command.push_str(" --out DIR");
    let fig = figure(id, seed, chain_lengths);
    match write_figure(&fig, seed, command, &out) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e @ FigureError::Config(_)) => fail(USAGE, e),
        Err(e) => fail(FAILURE, e),
    }
}

fn cmd_sweep(path: PathBuf, out: Option<PathBuf>, seed: u64) -> ExitCode {
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => return fail(USAGE, format!("{}: {e}", path.display())),
    };
    let cfg = match RunConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail(USAGE, format!("{}: {e}", path.display())),
    };
    let Some(output) = out.or_else(|| cfg.output.clone()) else {
        return fail(
            USAGE,
            "no output path: set \"output\" in the config or pass --out",
        );
    };
    let p = match plan(&cfg, seed) {
        Ok(p) => p,
        Err(e) => return fail(USAGE, format!("{}: {e}", path.display())),
    };
    let outcome = match run::execute(&p) {
        Ok(o) => o,
        Err(e) => return fail(FAILURE, e),
    };
    if let Err(e) = fs::write(&output, outcome.result.to_csv()) {
        return fail(FAILURE, format!("{}: {e}", output.display()));
    }
    println!(
        "wrote {} rows to {}",
        outcome.result.rows.len(),
        output.display()
    );
    for f in &outcome.fits {
        println!("{f}");
    }
    ExitCode::SUCCESS
}

fn cmd_verify(filter: Option<&str>, fault: Option<&str>) -> ExitCode {
    let names = verify::check_names();
    if let Some(f) = fault {
        if !names.contains(&f) {
            return fail(
                USAGE,
                format!("unknown check '{f}'; known: {}", names.join(", ")),
            );
        }
    }
    if let Some(f) = filter {
        if !names.iter().any(|n| n.contains(f)) {
            return fail(
                USAGE,
                format!("no check matches '{f}'; known: {}", names.join(", ")),
            );
        }
    }
    let report = verify::run(filter, fault);
    for l in &report.lines {
        println!("{l}");
    }
    if report.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed: {}", report.failed.join(", "));
        ExitCode::from(FAILURE)
    }
}
