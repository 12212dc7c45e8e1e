use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use roesser_cli::commands::{
    run_certify, run_oracle, run_simulate, CertifyArgs, OracleArgs, SimulateArgs, EXIT_USAGE,
};

/// Structural stability tools for 2D and nD Roesser models.
///
/// Exit codes: 0 stable/decaying, 1 unstable/growing, 2 indeterminate,
/// 64 usage or input errors. Set ROESSER_MAX_THREADS to cap the worker pool.
#[derive(Parser)]
#[command(name = "roesser", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dense boundary-sweep stability check (the grid-resolution oracle).
    Oracle(OracleOpts),
    /// Certified stability via the polynomial certificate hierarchy.
    Certify(CertifyOpts),
    /// Iterate the discrete recursion and fit the front decay rate.
    Simulate(SimulateOpts),
}

#[derive(Args)]
struct OracleOpts {
    /// Model file (JSON).
    file: PathBuf,
    /// Boundary samples per dimension.
    #[arg(long, default_value_t = 2048)]
    samples: usize,
    /// Emit a structured JSON report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum BasisOpt {
    /// Pick per model: monomial for shift, moebius for derivative.
    Auto,
    Monomial,
    Moebius,
}

#[derive(Args)]
struct CertifyOpts {
    /// Model file (JSON).
    file: PathBuf,
    /// Largest certificate degree to attempt.
    #[arg(long, default_value_t = 6)]
    max_degree: usize,
    /// Certificate basis.
    #[arg(long, value_enum, default_value_t = BasisOpt::Auto)]
    basis: BasisOpt,
    /// Fine-sweep samples per dimension.
    #[arg(long, default_value_t = 2048)]
    samples: usize,
    /// Emit a structured JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Dump the assembled feasibility problem in sparse text form.
    #[arg(long, value_name = "PATH")]
    dump_lmi: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateOpts {
    /// Model file (JSON); both dimensions must be shift.
    file: PathBuf,
    /// Grid extents, e.g. 200x200.
    #[arg(long, default_value = "200x200", value_parser = parse_grid)]
    grid: (usize, usize),
    /// Boundary data seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Independent boundary draws.
    #[arg(long, default_value_t = 8)]
    trials: usize,
    /// Trailing fronts used for the rate fit.
    #[arg(long, default_value_t = 50)]
    window: usize,
    /// Write the first trial's front curve as CSV ("d,s").
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Emit a structured JSON report instead of text.
    #[arg(long)]
    json: bool,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once('x')
        .ok_or_else(|| format!("expected J1xJ2, got {s}"))?;
    let j1 = a.parse::<usize>().map_err(|e| e.to_string())?;
    let j2 = b.parse::<usize>().map_err(|e| e.to_string())?;
    Ok((j1, j2))
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("ROESSER_MAX_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version are not usage errors.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::from(0);
            }
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    init_thread_pool();
    let out = match cli.command {
        Command::Oracle(o) => run_oracle(&OracleArgs {
            file: o.file,
            samples: o.samples,
            json: o.json,
        }),
        Command::Certify(o) => run_certify(&CertifyArgs {
            file: o.file,
            max_degree: o.max_degree,
            basis: match o.basis {
                BasisOpt::Auto => None,
                BasisOpt::Monomial => Some(roesser::lyapunov::Basis::Monomial),
                BasisOpt::Moebius => Some(roesser::lyapunov::Basis::Moebius),
            },
            samples: o.samples,
            json: o.json,
            dump_lmi: o.dump_lmi,
        }),
        Command::Simulate(o) => run_simulate(&SimulateArgs {
            file: o.file,
            grid: o.grid,
            seed: o.seed,
            trials: o.trials,
            window: o.window,
            csv: o.csv,
            json: o.json,
        }),
    };
    if !out.stdout.is_empty() {
        print!("{}", out.stdout);
        if !out.stdout.ends_with('\n') {
            println!();
        }
    }
    if !out.stderr.is_empty() {
        eprintln!("error: {}", out.stderr);
    }
    ExitCode::from(out.code as u8)
}
