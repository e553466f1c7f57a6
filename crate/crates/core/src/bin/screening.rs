use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use screening::commands::{self, MenuFormat, Outcome, SweepSpec};

#[derive(Parser)]
#[command(version, about = "Optimal contract menus for screening with a verifiable group trait")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the likelihood-ratio ordering and check the distributional assumptions
    CheckAssumptions { config: PathBuf },
    /// Solve for the optimal menu
    Solve {
        config: PathBuf,
        /// Uniform solve-grid size (breakpoints are added on top)
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Defaults to the extension of --out, then CSV
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Check a menu file against every incentive and participation constraint
    Verify {
        config: PathBuf,
        #[arg(long)]
        menu: PathBuf,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Re-solve across a range of tax credits
    Sweep {
        config: PathBuf,
        #[arg(long, default_value = "tax_credit")]
        parameter: String,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 0.6)]
        to: f64,
        #[arg(long, default_value_t = 61)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write quantity curves and the stylized candidate designs
    Curves {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::CheckAssumptions { config } => commands::cmd_check_assumptions(&config),
        Command::Solve { config, grid, out, format } => {
            let format = format.map(|f| match f {
                Format::Csv => MenuFormat::Csv,
                Format::Json => MenuFormat::Json,
            });
            commands::cmd_solve(&config, grid, out.as_deref(), format)
        }
        Command::Verify { config, menu, report } => commands::cmd_verify(&config, &menu, report.as_deref()),
        Command::Sweep { config, parameter, from, to, steps, out } => {
            let spec = SweepSpec { parameter, from, to, steps };
            commands::cmd_sweep(&config, &spec, out.as_deref())
        }
        Command::Curves { config, out } => commands::cmd_curves(&config, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = run(cli);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
