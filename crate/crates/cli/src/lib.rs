//! Batch reports over JSON model files.
//!
//! [`run`] parses command-line arguments, loads the model file, runs one
//! command and returns the rendered report with its exit code: 0 when every
//! check passes, 1 when a check fails, 2 on input or resource errors.

pub mod commands;
pub mod model_file;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{ComposeArgs, DaceyArgs, LogicArgs};
use crate::model_file::{message, ModelFile};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "gptk", version, about = "Exact checks over order-unit spaces, test spaces and their composites")]
pub struct Cli {
    /// Emit a JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a model file.
    Validate { file: PathBuf },
    /// Extreme rays and state-polytope vertices of a space.
    States { file: PathBuf, space: String },
    /// Tests and weight-polytope vertices of a test space.
    Weights { file: PathBuf, testspace: String },
    /// Graph fragment of a catalog of observables.
    Modj {
        file: PathBuf,
        space: String,
        catalog: String,
        /// Audit binary completions, weight gaps and state extension.
        #[arg(long, alias = "lemma1")]
        completion_audit: bool,
    },
    /// Algebraicity, logic and star products.
    Logic {
        file: PathBuf,
        testspace: String,
        /// Star product of two named effect algebras.
        #[arg(long, num_args = 2, value_names = ["L", "M"])]
        star: Option<Vec<String>>,
        /// Compare the indexed unit-chain fragment with the star product.
        #[arg(long)]
        iso_check: bool,
        /// Space carrying the unit chain for --iso-check.
        #[arg(long)]
        space: Option<String>,
        /// Length of the unit chain for --iso-check.
        #[arg(long, default_value_t = 2)]
        chain: usize,
    },
    /// Positivity of a linear map and the morphism it induces on a catalog.
    Channel {
        file: PathBuf,
        name: String,
        #[arg(long)]
        induce: Option<String>,
    },
    /// Compose two Markov kernels (k first, then j) and compare duals.
    KernelCompose { file: PathBuf, k: String, j: String },
    /// Product observables through a bilinear rule.
    Compose {
        file: PathBuf,
        rule: String,
        catalog_a: String,
        catalog_b: String,
        #[arg(long)]
        check_monoidality: bool,
        #[arg(long)]
        flags: bool,
    },
    /// Min or max tensor cone membership.
    Tensor {
        file: PathBuf,
        a: String,
        b: String,
        #[arg(long, value_parser = ["min", "max"])]
        cone: String,
        /// Comma-separated rationals in A (x) B coordinates.
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
    },
    /// Dacey cover of a test space and derandomization of a valued weight.
    Dacey {
        file: PathBuf,
        testspace: Option<String>,
        #[arg(long)]
        weight: Option<String>,
        #[arg(long)]
        derandomize: bool,
        #[arg(long)]
        state: Option<String>,
    },
    /// Non-signalling, joint-state and separability verdicts for a joint weight.
    Joint { file: PathBuf, weight: String },
}

impl Command {
    fn file(&self) -> &PathBuf {
        match self {
            Command::Validate { file }
            | Command::States { file, .. }
            | Command::Weights { file, .. }
            | Command::Modj { file, .. }
            | Command::Logic { file, .. }
            | Command::Channel { file, .. }
            | Command::KernelCompose { file, .. }
            | Command::Compose { file, .. }
            | Command::Tensor { file, .. }
            | Command::Dacey { file, .. }
            | Command::Joint { file, .. } => file,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::States { .. } => "states",
            Command::Weights { .. } => "weights",
            Command::Modj { .. } => "modj",
            Command::Logic { .. } => "logic",
            Command::Channel { .. } => "channel",
            Command::KernelCompose { .. } => "kernel-compose",
            Command::Compose { .. } => "compose",
            Command::Tensor { .. } => "tensor",
            Command::Dacey { .. } => "dacey",
            Command::Joint { .. } => "joint",
        }
    }
}

/// Rendered output and process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn dispatch(cli: &Cli, file: &ModelFile, r: &mut Report) -> gptk::Result<()> {
    match &cli.command {
        Command::Validate { .. } => commands::validate(file, r),
        Command::States { space, .. } => commands::states(file, space, r),
        Command::Weights { testspace, .. } => commands::weights(file, testspace, r),
        Command::Modj {
            space,
            catalog,
            completion_audit,
            ..
        } => commands::modj(file, space, catalog, *completion_audit, r),
        Command::Logic {
            testspace,
            star,
            iso_check,
            space,
            chain,
            ..
        } => {
            let args = LogicArgs {
                star: star.as_ref().map(|s| (s[0].as_str(), s[1].as_str())),
                iso_check: *iso_check,
                space: space.as_deref(),
                chain: *chain,
            };
            commands::logic(file, testspace, args, r)
        }
        Command::Channel { name, induce, .. } => commands::channel(file, name, induce.as_deref(), r),
        Command::KernelCompose { k, j, .. } => commands::kernel_compose(file, k, j, r),
        Command::Compose {
            rule,
            catalog_a,
            catalog_b,
            check_monoidality,
            flags,
            ..
        } => {
            let args = ComposeArgs {
                check_monoidality: *check_monoidality,
                flags: *flags,
            };
            commands::compose(file, rule, catalog_a, catalog_b, args, r)
        }
        Command::Tensor { a, b, cone, vector, .. } => commands::tensor(file, a, b, cone, vector, r),
        Command::Dacey {
            testspace,
            weight,
            derandomize,
            state,
            ..
        } => {
            let args = DaceyArgs {
                testspace: testspace.as_deref(),
                weight: weight.as_deref(),
                derandomize: *derandomize,
                state: state.as_deref(),
            };
            commands::dacey(file, args, r)
        }
        Command::Joint { weight, .. } => commands::joint(file, weight, r),
    }
}

fn failure(e: &gptk::Error) -> Execution {
    Execution {
        stdout: String::new(),
        stderr: format!("error: {}\n", message(e)),
        code: 2,
    }
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Execution {
    let file = match ModelFile::load(cli.command.file()) {
        Ok(f) => f,
        Err(e) => return failure(&e),
    };
    let mut report = Report::new(cli.command.name());
    if let Err(e) = dispatch(cli, &file, &mut report) {
        return failure(&e);
    }
    Execution {
        stdout: if cli.json {
            report.render_json()
        } else {
            report.render_text()
        },
        stderr: String::new(),
        code: if report.passed() { 0 } else { 1 },
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Execution {
                    stdout: String::new(),
                    stderr: text,
                    code: 2,
                }
            } else {
                Execution {
                    stdout: text,
                    stderr: String::new(),
                    code: 0,
                }
            }
        }
    }
}
