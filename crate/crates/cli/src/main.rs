use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wavinv_cli::{compare_command, load_config, run_command, CliError};

#[derive(Parser)]
#[command(
    name = "wavinv",
    version,
    about = "Wavelet collocation for parabolic source identification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and write error tables, series, diagnostics and timing.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Solve with both families and tabulate the error ratio.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { config, output_dir } => {
            let cfg = load_config(&config)?;
            let summary = run_command(&cfg, output_dir.as_deref())?;
            for (family, err) in &summary.max_errors {
                println!("{family}: max error over report grid {err:.4e}");
            }
            for file in &summary.files {
                println!("wrote {}", file.display());
            }
        }
        Command::Compare { config, output_dir } => {
            let cfg = load_config(&config)?;
            let summary = compare_command(&cfg, output_dir.as_deref())?;
            println!(
                "cwm/twm error ratio: max {:.4e}, median {:.4e}",
                summary.ratios.max, summary.ratios.median
            );
            println!("wrote {}", summary.file.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
