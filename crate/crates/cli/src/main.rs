mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use spirality::flow::SideConvention;
use spirality::generate::TwistedPairParams;

use commands::{Failure, GenKind, Settings};
use report::Style;

/// Spirality of immersed surfaces from combinatorial JSJ data.
#[derive(Debug, Parser)]
#[command(name = "spirality", version)]
struct Cli {
    /// Report unknown manifest fields as warnings instead of rejecting them.
    #[arg(long, global = true)]
    lenient: bool,
    /// Accept non-integral end decorations with a warning.
    #[arg(long, global = true)]
    allow_rational_h: bool,
    /// Whether a crossing's `from_side` names the side it leaves or enters.
    #[arg(long, global = true, value_enum, default_value_t = Convention::Leave)]
    side_convention: Convention,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for generated instances.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Stamp reports with the current time (breaks byte-identical output).
    #[arg(long, global = true)]
    timestamps: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Convention {
    #[value(alias = "leaving")]
    Leave,
    #[value(alias = "entering")]
    Enter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a manifest; exits 1 if it has errors.
    Validate { path: PathBuf },
    /// Spirality character, aspirality and the embedding verdict.
    Aspiral { path: PathBuf },
    /// Flow-transverse spirality of the loop with its sigma and rho factors.
    Rw { path: PathBuf },
    /// Fractional Dehn twist coefficients.
    Fdtc { path: PathBuf },
    /// Write a generated manifest.
    Gen {
        #[command(subcommand)]
        kind: GenCommand,
        /// Output file; stdout if omitted.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Compare the flow formula with the holonomy of the induced graph.
    Crosscheck {
        /// Manifest with a loop; random instances if omitted.
        path: Option<PathBuf>,
        /// Number of random instances.
        #[arg(long, conflicts_with = "path")]
        random: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Two pieces glued with a twist; the loop's spirality is not a unit.
    TwistedPair {
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, default_value_t = 1)]
        p: i64,
        #[arg(long, default_value_t = 1)]
        q: i64,
        /// Defaults to `r_plus + k`.
        #[arg(long, allow_negative_numbers = true)]
        r_minus: Option<i64>,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        r_plus: i64,
        #[arg(long, default_value_t = 1)]
        d: u32,
    },
    /// Random manifest with matching slopes across every torus.
    Matched {
        #[arg(long, default_value_t = 3)]
        pieces: usize,
    },
}

fn run(cli: &Cli) -> Result<commands::Outcome, Failure> {
    let settings = Settings {
        lenient: cli.lenient,
        allow_rational_h: cli.allow_rational_h,
        conv: match cli.side_convention {
            Convention::Leave => SideConvention::Leaving,
            Convention::Enter => SideConvention::Entering,
        },
        seed: cli.seed,
    };
    match &cli.command {
        Command::Validate { path } => commands::validate_cmd(path, &settings),
        Command::Aspiral { path } => commands::aspiral_cmd(path, &settings),
        Command::Rw { path } => commands::rw_cmd(path, &settings),
        Command::Fdtc { path } => commands::fdtc_cmd(path, &settings),
        Command::Gen { kind, .. } => {
            let kind = match *kind {
                GenCommand::TwistedPair {
                    k,
                    p,
                    q,
                    r_minus,
                    r_plus,
                    d,
                } => GenKind::TwistedPair(TwistedPairParams {
                    k,
                    p,
                    q,
                    r_minus: r_minus.unwrap_or(r_plus + k),
                    r_plus,
                    d,
                }),
                GenCommand::Matched { pieces } => GenKind::Matched { pieces },
            };
            commands::gen_cmd(kind, &settings)
        }
        Command::Crosscheck { path, random } => {
            commands::crosscheck_cmd(path.as_deref(), *random, &settings)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let style = Style::detect();
    let mut outcome = match run(&cli) {
        Ok(o) => o,
        Err(f) => {
            let msg = match &f {
                Failure::Input(m) | Failure::Domain(m) => m,
            };
            eprintln!("{}: {msg}", style.paint("error", "31"));
            return ExitCode::from(f.exit_code());
        }
    };
    if cli.timestamps {
        outcome.report.generated_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }

    if let (Some(text), Command::Gen { out, .. }) = (&outcome.manifest, &cli.command) {
        match out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("{}: {}: {e}", style.paint("error", "31"), path.display());
                    return ExitCode::from(2);
                }
                outcome.report.fact("written", path.display());
            }
            None => {
                print!("{text}");
                return ExitCode::SUCCESS;
            }
        }
    }

    match cli.format {
        Format::Text => print!("{}", outcome.report.render_text(style)),
        Format::Structured => print!("{}", outcome.report.render_json()),
    }
    if outcome.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
