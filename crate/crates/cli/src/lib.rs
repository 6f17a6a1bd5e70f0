//! The `jetcert` command line: argument parsing, input loading and the
//! report-producing commands. `main.rs` only prints and exits.

mod commands;
mod report;

use std::ffi::OsString;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use jetcert::corpus::{builtin, builtin_names};
use jetcert::format::{parse_variety, FormatError};
use jetcert::groebner::GroebnerConfig;
use jetcert::jets::{parse_level, JetError};
use jetcert::Presentation;

pub use commands::danielewski;
pub use report::{Record, Report, Status};

/// Exit code for a report with a failing check.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for unusable input.
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
    #[error("unknown built-in variety '{0}' (known: {1})")]
    UnknownBuiltin(String, String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "jetcert", version, about = "Jet schemes of affine varieties with verified isomorphism certificates")]
pub struct Cli {
    /// Emit key=value records instead of the plain report.
    #[arg(long, global = true)]
    pub porcelain: bool,
    /// Gröbner guard: maximum number of S-pairs processed.
    #[arg(long, global = true, value_name = "N")]
    pub max_pairs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct VarietyArg {
    /// Variety file, or @name for a built-in.
    #[arg(long, value_name = "FILE|@name")]
    pub variety: String,
}

#[derive(Debug, Args)]
pub struct OrderArg {
    /// Jet level m.
    #[arg(long, value_name = "M")]
    pub order: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the m-jet presentation.
    Compute {
        #[command(flatten)]
        variety: VarietyArg,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, value_name = "FILE")]
        out: Option<String>,
    },
    /// Check weight-homogeneity, stratification and scaling of the strata.
    Grading {
        #[command(flatten)]
        variety: VarietyArg,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Check the fiber over the zero section against the Jacobian pairing.
    Fiber {
        #[command(flatten)]
        variety: VarietyArg,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Jacobian criterion.
    Smooth {
        #[command(flatten)]
        variety: VarietyArg,
        /// Codimension; required when there is more than one generator.
        #[arg(long)]
        codim: Option<usize>,
    },
    /// Verify a cotangent frame, or search for one when --frame is absent.
    FrameCheck {
        #[command(flatten)]
        variety: VarietyArg,
        #[arg(long, value_name = "FILE")]
        frame: Option<String>,
        #[arg(long, value_name = "D", default_value_t = 4)]
        degree_bound: u32,
        #[arg(long, value_name = "FILE")]
        out: Option<String>,
    },
    /// Build and verify `V × A^(nm) ≅ V_m`.
    Trivialize {
        #[command(flatten)]
        variety: VarietyArg,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, value_name = "FILE")]
        frame: Option<String>,
        #[arg(long, value_name = "D", default_value_t = jetcert::morphism::DEFAULT_CORRECTION_BOUND)]
        degree_bound: u32,
        #[arg(long, value_name = "FILE")]
        out: Option<String>,
    },
    /// Verify an isomorphism certificate between two varieties.
    IsoVerify {
        #[arg(long, value_name = "FILE|@name")]
        source: String,
        #[arg(long, value_name = "FILE|@name")]
        target: String,
        #[arg(long, value_name = "FILE")]
        cert: String,
    },
    /// Verify a certificate between m-jet rings and descend it to the bases.
    Descend {
        #[arg(long, value_name = "FILE|@name")]
        source: String,
        #[arg(long, value_name = "FILE|@name")]
        target: String,
        #[arg(long, value_name = "FILE")]
        cert: String,
        #[command(flatten)]
        order: OrderArg,
    },
    /// The Danielewski surfaces end to end.
    Danielewski {
        #[command(flatten)]
        order: OrderArg,
        /// Certificate for X × A^1 ≅ Y × A^1 (variables x, y, z, t on both sides).
        #[arg(long, value_name = "FILE")]
        cert: Option<String>,
        #[arg(long, value_name = "D", default_value_t = 4)]
        degree_bound: u32,
        /// Where to write the X_m ≅ Y_m certificate.
        #[arg(long, value_name = "FILE")]
        out: Option<String>,
    },
}

pub(crate) fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })
}

pub(crate) fn write(path: &str, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_string(), source })
}

pub(crate) fn format_err(path: &str) -> impl Fn(FormatError) -> CliError + '_ {
    move |source| CliError::Format { path: path.to_string(), source }
}

/// Presentation name for a file: its stem with non-identifier characters
/// replaced by `_`.
fn name_for(path: &str) -> String {
    let stem = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or("variety");
    let mut name: String = stem
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if !name.starts_with(|c: char| c.is_ascii_alphabetic()) {
        name.insert(0, 'v');
    }
    name
}

/// Loads `FILE` or `@name`.
pub fn load_variety(arg: &str) -> Result<Presentation, CliError> {
    if let Some(name) = arg.strip_prefix('@') {
        return builtin(name).ok_or_else(|| CliError::UnknownBuiltin(name.to_string(), builtin_names().join(", ")));
    }
    let text = read(arg)?;
    parse_variety(&text, &name_for(arg)).map_err(format_err(arg))
}

pub fn level(text: &str) -> Result<u32, CliError> {
    Ok(parse_level(text)?)
}

/// Output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Runs the command line `args` (without the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let echo = args.iter().map(|a| a.to_string_lossy()).collect::<Vec<_>>().join(" ");
    let cli = match Cli::try_parse_from(std::iter::once(OsString::from("jetcert")).chain(args)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { stdout: String::new(), stderr: text, code }
            } else {
                Outcome { stdout: text, stderr: String::new(), code }
            };
        }
    };
    let mut config = GroebnerConfig::default();
    if let Some(n) = cli.max_pairs {
        config.max_pairs = n;
    }
    match commands::dispatch(&cli.command, echo, &config) {
        Ok(report) => Outcome {
            stdout: if cli.porcelain { report.render_porcelain() } else { report.render() },
            stderr: String::new(),
            code: if report.passed() { 0 } else { EXIT_FAIL },
        },
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: EXIT_INPUT,
        },
    }
}
