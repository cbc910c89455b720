use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use homotopy_cli::run::ENV_TRUNCATION;
use homotopy_cli::{execute, parse_env_bounds, Bounds, Flags, Format, Options};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

/// Construct, verify and transform homotopy algebras stored in a workspace file.
///
/// Exit status: 0 when every residual vanishes or the solve succeeds, 2 on nonzero
/// residuals or an obstruction, 1 on errors.
#[derive(Debug, Parser)]
#[command(name = "homotopy", version)]
struct Cli {
    /// check, transfer, mc, cohomology, ocha, qocha, or suite (each scenario's own command).
    command: String,
    workspace: PathBuf,
    /// Scenario to run; repeatable. Defaults to every scenario declared for the command.
    #[arg(long = "scenario", short = 's')]
    scenarios: Vec<String>,
    #[arg(long)]
    max_arity: Option<usize>,
    #[arg(long, visible_alias = "max-genus")]
    max_hbar: Option<usize>,
    #[arg(long)]
    max_order: Option<usize>,
    /// Accept degenerate pairings; `mc` zeroes ω between harmonic directions.
    #[arg(long)]
    topological: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Evaluate scenarios on worker threads. Output order is unchanged.
    #[arg(long)]
    parallel: bool,
    /// Include wall-clock times in the report.
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let env = match std::env::var(ENV_TRUNCATION) {
        Ok(text) => match parse_env_bounds(&text) {
            Ok(b) => b,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        Err(_) => Bounds::default(),
    };
    let opts = Options {
        flags: Flags { bounds: Bounds { max_arity: cli.max_arity, max_hbar: cli.max_hbar, max_order: cli.max_order }, topological: cli.topological },
        env,
        scenarios: cli.scenarios,
        format: match cli.format {
            FormatArg::Text => Format::Text,
            FormatArg::Machine => Format::Machine,
        },
        parallel: cli.parallel,
        timing: cli.timing,
    };
    let (out, code) = execute(&cli.command, &cli.workspace, &opts);
    print!("{out}");
    ExitCode::from(code as u8)
}
