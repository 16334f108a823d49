use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dlength_cli::commands::{
    builtin_requests, read_corpus_dir, report_exit_code, run_analyze, run_corpus, run_membership,
    AnalysisRequest, CliError, Format, EXIT_OK,
};

#[derive(Parser)]
#[command(name = "dlength", version, about = "Pole-order filtration and D-module lengths of quasi-homogeneous isolated singularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Milnor data, spectrum, pole-order filtration and lengths of f.
    Analyze {
        #[arg(long)]
        poly: String,
        /// Comma-separated variable names, e.g. x,y,z.
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        /// Largest filtration index reported (default n − 1).
        #[arg(long)]
        lmax: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        /// Cross-check against brute-force linear algebra.
        #[arg(long)]
        oracle: bool,
        /// Starting pole cap for the oracle (default n).
        #[arg(long)]
        pole_cap: Option<u32>,
    },
    /// Decide where h/f^k sits in the tower L ⊂ D·f^−1 ⊂ D·f^−2 ⊂ ….
    Membership {
        #[arg(long)]
        poly: String,
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        /// Element such as `x*y*z/f^2`; `f` denotes the polynomial.
        #[arg(long)]
        element: String,
    },
    /// Analyze every request in a directory, with all consistency checks.
    Corpus {
        /// Directory of *.json / *.jsonl request files.
        #[arg(required_unless_present = "builtin")]
        dir: Option<PathBuf>,
        /// Run the built-in Brieskorn–Pham corpus instead.
        #[arg(long, conflicts_with = "dir")]
        builtin: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&e.body()).expect("serializes"));
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            poly,
            vars,
            lmax,
            format,
            oracle,
            pole_cap,
        } => {
            let req = AnalysisRequest {
                polynomial: poly,
                variables: vars,
                l_max: lmax,
                format: format.into(),
                oracle,
                pole_cap,
            };
            match run_analyze(&req) {
                Ok(report) => {
                    match req.format {
                        Format::Json => println!("{}", report.to_json()),
                        Format::Text => print!("{}", report.to_text()),
                    }
                    let code = report_exit_code(&report);
                    if code != EXIT_OK {
                        let o = report.oracle.as_ref().expect("oracle ran");
                        eprintln!(
                            "{}",
                            serde_json::json!({
                                "error": "OracleDisagreement",
                                "message": o.disagreements.join("; "),
                                "exit_code": code,
                            })
                        );
                    }
                    ExitCode::from(code as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Membership { poly, vars, element } => match run_membership(&poly, &vars, &element) {
            Ok(report) => {
                println!("{}", report.to_json());
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Corpus { dir, builtin, format } => {
            let input = if builtin {
                builtin_requests()
            } else {
                match read_corpus_dir(&dir.expect("required unless builtin")) {
                    Ok(i) => i,
                    Err(e) => return fail(e),
                }
            };
            let run = run_corpus(input);
            match Format::from(format) {
                Format::Json => print!("{}", run.to_json_lines()),
                Format::Text => print!("{}", run.to_table()),
            }
            ExitCode::from(run.exit_code() as u8)
        }
    }
}
