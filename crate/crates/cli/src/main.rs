use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use formdyn_cli::report::table;
use formdyn_cli::{collect_reports, combined_exit_code, exit, load_scenarios, run_all, suite, Fault, Options, Outcome};

#[derive(Parser)]
#[command(name = "formdyn", version, about = "Run formdyn scenarios and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for reports and CSV series.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Multiplies every upper-bound tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,

    /// Seed for randomised checks, overriding the scenario seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Deliberately break a convention to confirm the checks catch it.
    #[arg(long, global = true, hide = true)]
    inject_fault: Option<FaultArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario in a JSON file.
    Run { scenario: PathBuf },
    /// Run the built-in golden scenarios.
    Suite,
    /// Summarise the reports in a directory.
    Report { dir: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    BoundarySign,
}

fn print_outcomes(outcomes: &[Outcome]) {
    let reports: Vec<_> = outcomes.iter().filter_map(|o| o.result.as_ref().ok().cloned()).collect();
    print!("{}", table(&reports));
    for o in outcomes {
        if let Err(e) = &o.result {
            eprintln!("{}: {e}", o.scenario);
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.tol_scale > 0.0 && cli.tol_scale.is_finite()) {
        eprintln!("--tol-scale must be positive");
        return ExitCode::from(exit::SCHEMA as u8);
    }
    let opts = Options {
        out: cli.out.clone(),
        tol_scale: cli.tol_scale,
        seed: cli.seed,
        fault: cli.inject_fault.map(|f| match f {
            FaultArg::BoundarySign => Fault::BoundarySign,
        }),
    };
    let start = Instant::now();
    let code = match &cli.command {
        Command::Run { scenario } => {
            let opts = Options {
                out: Some(opts.out.clone().unwrap_or_else(|| PathBuf::from("formdyn-out"))),
                ..opts
            };
            match load_scenarios(scenario).and_then(|s| run_all(&s, &opts)) {
                Ok(outcomes) => {
                    print_outcomes(&outcomes);
                    combined_exit_code(&outcomes)
                }
                Err(e) => {
                    eprintln!("{e}");
                    e.exit_code()
                }
            }
        }
        Command::Suite => match suite::run_suite(&opts) {
            Ok(outcomes) => {
                print_outcomes(&outcomes);
                eprintln!("suite finished in {:.2} s", start.elapsed().as_secs_f64());
                combined_exit_code(&outcomes)
            }
            Err(e) => {
                eprintln!("{e}");
                e.exit_code()
            }
        },
        Command::Report { dir } => match collect_reports(dir) {
            Ok(reports) if reports.is_empty() => {
                eprintln!("no reports in {}", dir.display());
                exit::SCHEMA
            }
            Ok(reports) => {
                print!("{}", table(&reports));
                if reports.iter().all(|r| r.passed) {
                    exit::OK
                } else {
                    exit::CHECK_FAILED
                }
            }
            Err(e) => {
                eprintln!("{e}");
                e.exit_code()
            }
        },
    };
    ExitCode::from(code as u8)
}
