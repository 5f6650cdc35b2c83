//! Command-line front end: argument parsing, dispatch and exit codes.
//!
//! Exit codes: 0 success, 1 parse or configuration error, 2 mathematical
//! precondition violated, 3 verification failed, 4 numerical blowup.

mod commands;
pub mod input;
mod render;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use jetalg::error::{Error, Result};

use commands::{ConservedRequest, Reply};

#[derive(Debug, Parser)]
#[command(name = "jetalg", version, about = "Adjoint equations, self-adjointness and conservation laws")]
struct Cli {
    /// Emit a JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Parameter value for the equation, e.g. `kappa=0` (repeatable).
    #[arg(long = "param", value_name = "NAME=VALUE", global = true)]
    params: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the adjoint F* of F = 0.
    Adjoint {
        #[arg(long, value_name = "EXPR|@FILE")]
        equation: String,
    },
    /// Classify F = 0 as self-adjoint, quasi self-adjoint or neither.
    CheckSelfadjoint {
        #[arg(long, value_name = "EXPR|@FILE")]
        equation: String,
        /// A rational value for beta, or `symbolic`.
        #[arg(long)]
        beta: Option<String>,
    },
    /// Build the conserved vector of a symmetry.
    Conserved {
        #[arg(long, value_name = "EXPR|@FILE")]
        equation: String,
        #[arg(long, value_name = "xi_t=..;xi_x=..;eta=..|@FILE")]
        symmetry: String,
        #[arg(long, value_name = "v=EXPR|@FILE")]
        substitution: Option<String>,
        /// Formula output including the xi*L terms, not normalized.
        #[arg(long)]
        raw: bool,
        /// Skip normalization.
        #[arg(long)]
        no_normalize: bool,
        /// Print only the part multiplying this constant (`a`, `b`, or `1`).
        #[arg(long)]
        component: Option<String>,
    },
    /// Check D_t(C1) + D_x(C2) = 0 on solutions.
    Verify {
        #[arg(long, value_name = "EXPR|@FILE")]
        equation: String,
        #[arg(long, value_name = "EXPR|@FILE", allow_hyphen_values = true)]
        c1: String,
        #[arg(long, value_name = "EXPR|@FILE", allow_hyphen_values = true)]
        c2: String,
        /// Also reduce modulo the adjoint equation.
        #[arg(long)]
        nonlocal: bool,
    },
    /// Check whether F = 0 admits a point symmetry.
    Admits {
        #[arg(long, value_name = "EXPR|@FILE")]
        equation: String,
        #[arg(long, value_name = "xi_t=..;xi_x=..;eta=..|@FILE")]
        symmetry: String,
    },
    /// Integrate numerically and print monitored integrals as CSV.
    Simulate {
        #[arg(long, value_name = "FILE")]
        config: String,
        /// Write the output here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::UnknownIdentifier(_)
        | Error::JetOrderExceeded { .. }
        | Error::Config(_)
        | Error::InvalidGrid(_) => 1,
        Error::VerificationFailed(_) => 3,
        Error::BlowupDetected { .. } | Error::StabilityViolated { .. } => 4,
        _ => 2,
    }
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Output { code, stdout, stderr };
        }
    };
    match dispatch(&cli) {
        Ok(reply) => Output {
            code: reply.code,
            stdout: reply.stdout,
            stderr: String::new(),
        },
        Err(e) => Output {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn dispatch(cli: &Cli) -> Result<Reply> {
    let params = input::param_values(&cli.params)?;
    let json = cli.json;
    match &cli.command {
        Command::Adjoint { equation } => commands::adjoint_cmd(&input::equation(equation, &params)?, json),
        Command::CheckSelfadjoint { equation, beta } => {
            let mut values = params.clone();
            values.extend(commands::beta_override(beta.as_deref())?);
            commands::check_selfadjoint_cmd(&input::equation(equation, &values)?, json)
        }
        Command::Conserved {
            equation,
            symmetry,
            substitution,
            raw,
            no_normalize,
            component,
        } => {
            let req = ConservedRequest {
                symmetry,
                substitution: substitution.as_deref(),
                raw: *raw,
                no_normalize: *no_normalize,
                component: component.as_deref(),
            };
            commands::conserved_cmd(&input::equation(equation, &params)?, &req, json)
        }
        Command::Verify {
            equation,
            c1,
            c2,
            nonlocal,
        } => commands::verify_cmd(&input::equation(equation, &params)?, c1, c2, *nonlocal, json),
        Command::Admits { equation, symmetry } => {
            commands::admits_cmd(&input::equation(equation, &params)?, symmetry, json)
        }
        Command::Simulate { config, output } => {
            let reply = commands::simulate_cmd(config, &params, json)?;
            match output {
                Some(path) => {
                    std::fs::write(path, &reply.stdout)
                        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                    Ok(Reply {
                        stdout: String::new(),
                        code: reply.code,
                    })
                }
                None => Ok(reply),
            }
        }
    }
}
