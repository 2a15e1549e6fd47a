use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use workfunc_core::report::{
    cmd_catalog, cmd_estimate, cmd_game, cmd_table, cmd_validate, exit, load_scenario, CommandError, Report,
    DEFAULT_VALIDATION_SEED,
};

#[derive(Parser)]
#[command(name = "workfunc", version, about = "Byte-step cost estimates for cryptanalytic attacks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute a published table and compare against the printed values
    Table {
        /// 1, 2 or 3
        id: String,
        #[arg(long)]
        csv: bool,
    },
    /// Run the estimator described by a scenario file
    Estimate {
        scenario: PathBuf,
        #[arg(long)]
        csv: bool,
    },
    /// Play a game_otp scenario and write its transcript
    Game {
        scenario: PathBuf,
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        csv: bool,
    },
    /// Desk-scale checks of the cost model against the toy cryptosystems
    Validate {
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = DEFAULT_VALIDATION_SEED)]
        seed: u64,
        #[arg(long)]
        csv: bool,
    },
    /// List a device catalog with derived byte-step rates
    Catalog {
        /// Catalog CSV; the built-in catalog when omitted
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        csv: bool,
    },
}

fn emit(report: &Report, csv: bool) {
    if csv {
        print!("{}", report.to_csv());
    } else {
        print!("{}", report.render_text());
    }
}

fn fail(err: &CommandError, csv: bool) -> i32 {
    if let CommandError::ChecksFailed(report) = err {
        emit(report, csv);
    }
    eprintln!("error: {err}");
    err.exit_code()
}

fn read(path: &PathBuf) -> Result<String, i32> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        exit::FAILURE
    })
}

fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Table { id, csv } => {
            let Ok(n) = id.parse::<u32>() else {
                eprintln!("error: unknown table {id:?}; expected 1, 2 or 3");
                return exit::USAGE;
            };
            match cmd_table(n) {
                Ok(t) => {
                    emit(&t.report, csv);
                    for f in &t.failures {
                        eprintln!("outside tolerance: {f}");
                    }
                    if t.passed() {
                        exit::SUCCESS
                    } else {
                        exit::FAILURE
                    }
                }
                Err(e) => fail(&e, csv),
            }
        }
        Command::Estimate { scenario, csv } => match load_scenario(&scenario)
            .map_err(CommandError::from)
            .and_then(|spec| cmd_estimate(&spec))
        {
            Ok(report) => {
                emit(&report, csv);
                exit::SUCCESS
            }
            Err(e) => fail(&e, csv),
        },
        Command::Game {
            scenario,
            transcript,
            csv,
        } => match load_scenario(&scenario)
            .map_err(CommandError::from)
            .and_then(|spec| cmd_game(&spec))
        {
            Ok(run) => {
                if let Err(e) = fs::write(&transcript, &run.transcript) {
                    eprintln!("error: cannot write {}: {e}", transcript.display());
                    return exit::FAILURE;
                }
                emit(&run.report, csv);
                run.exit_code()
            }
            Err(e) => fail(&e, csv),
        },
        Command::Validate { quick, seed, csv } => match cmd_validate(quick, seed) {
            Ok(run) => {
                emit(&run.report, csv);
                if run.passed {
                    exit::SUCCESS
                } else {
                    eprintln!("error: validation checks failed");
                    exit::FAILURE
                }
            }
            Err(e) => fail(&e, csv),
        },
        Command::Catalog { file, csv } => {
            let text = match file.as_ref().map(read).transpose() {
                Ok(t) => t,
                Err(code) => return code,
            };
            match cmd_catalog(text.as_deref()) {
                Ok(report) => {
                    emit(&report, csv);
                    exit::SUCCESS
                }
                Err(e) => fail(&e, csv),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { exit::SUCCESS as u8 });
        }
    };
    ExitCode::from(run(cli) as u8)
}
