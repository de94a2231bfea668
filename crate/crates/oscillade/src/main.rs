//! Thin command-line front end over the library: frequency sweeps,
//! coefficient tables and the self-check suite.
//!
//! Exit codes: 0 on success, 1 when a self check fails or a computation
//! breaks down, 2 on configuration errors (bad flags, malformed config
//! files, unwritable output paths).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oscillade::study::{
    dump_coefficients, fit_order, parse_frequency_list, run_study, verify_suite, ExampleKind,
    StudyConfig, StudyOverrides,
};
use oscillade::Error;

#[derive(Parser)]
#[command(
    name = "oscillade",
    version,
    about = "Truncation-error sweeps and self checks for modulated Fourier expansions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep frequencies, report truncation errors, write CSV and a plot script.
    Study(StudyArgs),
    /// Tabulate the mode coefficients of a built-in example.
    Coeffs(CoeffArgs),
    /// Run the structural self-check suite.
    Verify,
}

#[derive(Args)]
struct StudyArgs {
    /// Flat `key = value` config file; the flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Which example to sweep: heat, transport or custom.
    #[arg(long)]
    example: Option<ExampleKind>,
    /// Frequencies to sweep, comma-separated (e.g. 10,31.6,100).
    #[arg(long)]
    omega: Option<String>,
    /// Largest truncation order to evaluate.
    #[arg(long)]
    nmax: Option<usize>,
    /// Directory receiving the CSV and plot script.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Permit truncation orders above 3 (up to 6).
    #[arg(long)]
    allow_high_order: bool,
}

#[derive(Args)]
struct CoeffArgs {
    /// Which example to tabulate: heat, transport or custom.
    #[arg(long)]
    example: ExampleKind,
    /// Largest coefficient order r to include (at most 3).
    #[arg(long, default_value_t = 3)]
    rmax: usize,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Io(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> oscillade::Result<ExitCode> {
    match cli.command {
        Command::Study(args) => {
            let mut config = match &args.config {
                Some(path) => StudyConfig::from_file(path)?,
                None => StudyConfig::default(),
            };
            let overrides = StudyOverrides {
                example: args.example,
                omegas: args.omega.as_deref().map(parse_frequency_list).transpose()?,
                n_max: args.nmax,
                output_dir: args.out,
                allow_high_order: args.allow_high_order,
            };
            config.apply_overrides(&overrides);
            let report = run_study(&config)?;
            print!("{}", report.to_csv());
            for n in report.orders() {
                match fit_order(&report, n) {
                    Ok(slope) => println!("# fitted decay order for n={n}: {slope:.4}"),
                    Err(_) => println!("# fitted decay order for n={n}: insufficient data"),
                }
            }
            println!("# artifacts written to {}", config.output_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Coeffs(args) => {
            let table = dump_coefficients(args.example, args.rmax)?;
            print!("{table}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify => {
            let summary = verify_suite();
            print!("{summary}");
            if summary.all_passed() {
                println!("all checks passed");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("some checks FAILED");
                Ok(ExitCode::from(1))
            }
        }
    }
}
