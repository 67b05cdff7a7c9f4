//! `bmx`: validate, convert and compare business process models across
//! notations.

mod commands;

use clap::{Parser, Subcommand, ValueEnum};
use commands::{
    cmd_check_equiv, cmd_convert, cmd_roundtrip, cmd_trace, cmd_validate, CommandOutcome,
};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "bmx",
    about = "Business process model transpiler between GRADE-BM, UML activity diagrams and the notation-independent form",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NotationArg {
    #[value(name = "grade-bm")]
    GradeBm,
    #[value(name = "uml-ad")]
    UmlAd,
    #[value(name = "nibm")]
    Nibm,
}

impl From<NotationArg> for bmx_core::Notation {
    fn from(value: NotationArg) -> Self {
        match value {
            NotationArg::GradeBm => bmx_core::Notation::GradeBm,
            NotationArg::UmlAd => bmx_core::Notation::UmlAd,
            NotationArg::Nibm => bmx_core::Notation::Nibm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NotationOrAuto {
    #[value(name = "auto")]
    Auto,
    #[value(name = "grade-bm")]
    GradeBm,
    #[value(name = "uml-ad")]
    UmlAd,
    #[value(name = "nibm")]
    Nibm,
}

impl NotationOrAuto {
    fn resolve(self) -> Option<bmx_core::Notation> {
        match self {
            NotationOrAuto::Auto => None,
            NotationOrAuto::GradeBm => Some(bmx_core::Notation::GradeBm),
            NotationOrAuto::UmlAd => Some(bmx_core::Notation::UmlAd),
            NotationOrAuto::Nibm => Some(bmx_core::Notation::Nibm),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model file and print its violation report.
    Validate {
        /// Model file to check.
        input: PathBuf,
        /// Notation of the file; auto reads the document's tag.
        #[arg(long, value_enum, default_value = "auto")]
        notation: NotationOrAuto,
        /// Write the machine-readable report here as well.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Convert a model between notations through the independent form.
    Convert {
        #[arg(long, value_enum)]
        from: NotationArg,
        #[arg(long, value_enum)]
        to: NotationArg,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Write the mapping trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Expand control chains that no task can absorb into no-op
        /// tasks instead of failing (GRADE output only).
        #[arg(long)]
        allow_synthetic: bool,
    },
    /// Print the instance-level mapping trace of a projection.
    Trace {
        #[arg(short, long)]
        input: PathBuf,
        /// Notation of the input; auto reads the document's tag.
        #[arg(long, value_enum, default_value = "auto")]
        from: NotationOrAuto,
        /// Target side of the mapping.
        #[arg(long, value_enum, default_value = "nibm")]
        to: NotationArg,
        /// Write the machine-readable trace here as well.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare the behavior of two models under token-game semantics.
    CheckEquiv {
        #[arg(short = 'a', long = "first")]
        file_a: PathBuf,
        #[arg(short = 'b', long = "second")]
        file_b: PathBuf,
        /// State budget for the enumeration (overrides BMX_MAX_STATES).
        #[arg(long)]
        max_states: Option<usize>,
        /// Longest task sequence to follow.
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Convert to another notation and back, then check isomorphism.
    Roundtrip {
        #[arg(short, long)]
        input: PathBuf,
        /// Notation to go through.
        #[arg(long, value_enum)]
        to: NotationArg,
    },
}

fn run(cli: Cli) -> CommandOutcome {
    match cli.command {
        Command::Validate {
            input,
            notation,
            report,
        } => cmd_validate(&input, notation.resolve(), report.as_deref()),
        Command::Convert {
            from,
            to,
            input,
            output,
            trace,
            allow_synthetic,
        } => cmd_convert(
            from.into(),
            to.into(),
            &input,
            &output,
            trace.as_deref(),
            allow_synthetic,
        ),
        Command::Trace {
            input,
            from,
            to,
            report,
        } => cmd_trace(&input, from.resolve(), to.into(), report.as_deref()),
        Command::CheckEquiv {
            file_a,
            file_b,
            max_states,
            max_len,
        } => cmd_check_equiv(&file_a, &file_b, max_states, max_len),
        Command::Roundtrip { input, to } => cmd_roundtrip(&input, to.into()),
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = run(cli);
    for message in &outcome.messages {
        println!("{message}");
    }
    std::process::exit(outcome.exit_code);
}
