use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use ac_susy::cli::{execute, write_outputs, Command, Options, RunConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "ac-susy",
    version,
    about = "Zero modes, SUSY breaking and radial spectra for Aharonov-Casher field configurations"
)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for JSON and CSV outputs; without it JSON goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add grid-oracle cross-checks.
    #[arg(long, global = true)]
    verify: bool,
    /// Use the Gauss-law exterior fields.
    #[arg(long, global = true)]
    strict_gauss: bool,
    /// Omit the generation timestamp from JSON.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Couplings, bounds and thresholds.
    Constants,
    /// Zero-mode profile and SUSY verdict.
    ZeroMode,
    /// SUSY verdict only.
    SusyStatus,
    /// Bound-state spectrum per channel.
    Spectrum,
    /// Slab ground-state family.
    Slab,
    /// Residual, SUSY-algebra and dual-method checks.
    Verify,
    /// Printed numbers against their formulas.
    ReproducePaper,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Constants => Command::Constants,
            Cmd::ZeroMode => Command::ZeroMode,
            Cmd::SusyStatus => Command::SusyStatus,
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Slab => Command::Slab,
            Cmd::Verify => Command::Verify,
            Cmd::ReproducePaper => Command::ReproducePaper,
        }
    }
}

fn run(args: Args) -> Result<(), ac_susy::cli::CliError> {
    let cmd = Command::from(args.command);
    let cfg = args.config.as_deref().map(RunConfig::load).transpose()?;
    let opts = Options {
        verify: args.verify,
        strict_gauss: args.strict_gauss,
        no_timestamp: args.no_timestamp,
    };
    let out = execute(cmd, cfg.as_ref(), &opts)?;
    let mut text = out.summary.clone();
    match &args.out {
        Some(dir) => {
            for path in write_outputs(cmd, &out, dir)? {
                text.push_str(&format!("wrote {}\n", path.display()));
            }
        }
        None => text.push_str(&out.json_text()),
    }
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            return Err(ac_susy::cli::CliError::Io {
                path: "<stdout>".into(),
                source: e,
            })
        }
        _ => {}
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
