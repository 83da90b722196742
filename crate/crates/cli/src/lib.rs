//! Command implementations behind the `qelie` binary. Every command returns
//! an [`Outcome`] instead of printing, so tests can drive them in-process.

mod commands;
pub mod format;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{catalog, check, lattice, qe, ricci};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qelie", version, about = "Ricci curvature and quasi-Einstein checks for metric Lie algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Numerical tolerance.
    #[arg(long, global = true, env = "QELIE_TOL", default_value_t = qelie_core::DEFAULT_TOL)]
    pub tol: f64,
    /// Print the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Algebra file, or a directory together with --all.
    pub path: PathBuf,
    /// Process every *.json file in the directory, in name order.
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormulaArg {
    Oracle,
    Nilpotent,
    Solvable,
    Standard,
}

impl From<FormulaArg> for qelie_core::curvature::Formula {
    fn from(f: FormulaArg) -> Self {
        use qelie_core::curvature::Formula;
        match f {
            FormulaArg::Oracle => Formula::Oracle,
            FormulaArg::Nilpotent => Formula::Nilpotent,
            FormulaArg::Solvable => Formula::Solvable,
            FormulaArg::Standard => Formula::Standard,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Jacobi identity, unimodularity, series, center and nilradical.
    Check(Input),
    /// Ricci curvature, compared against the Levi-Civita computation.
    Ricci {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "oracle")]
        formula: FormulaArg,
    },
    /// Left-invariant quasi-Einstein solutions and structure checks.
    Qe {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        m: f64,
    },
    /// Build catalog algebras, or reproduce the classification tables with --family=tables.
    Catalog {
        #[arg(long)]
        family: String,
        /// key=value pairs, comma separated or repeated.
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        /// Output file (one family) or directory (tables).
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Rationality of the structure constants.
    Lattice {
        #[command(flatten)]
        input: Input,
        /// Denominator bound and Diophantine search bound.
        #[arg(long, default_value_t = qelie_core::lattice::DEFAULT_SEARCH_BOUND)]
        bound: u64,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    pub fn with_code(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }

    pub fn error(code: i32, message: impl std::fmt::Display) -> Self {
        Outcome { code, stdout: String::new(), stderr: format!("error: {message}\n") }
    }

    fn warn(&mut self, message: impl std::fmt::Display) {
        self.stderr.push_str(&format!("warning: {message}\n"));
    }
}

pub fn run(cli: &Cli) -> Outcome {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Outcome::error(EXIT_USAGE, format!("--tol must be a positive number, got {}", cli.tol));
    }
    let (tol, json) = (cli.tol, cli.json);
    match &cli.command {
        Command::Check(input) => commands::batch(input, json, |p| check(p, tol, json)),
        Command::Ricci { input, formula } => commands::batch(input, json, |p| ricci(p, (*formula).into(), tol, json)),
        Command::Qe { input, m } => {
            if *m == 0.0 || !m.is_finite() {
                return Outcome::error(EXIT_USAGE, "--m must be a nonzero number");
            }
            commands::batch(input, json, |p| qe(p, *m, tol, json))
        }
        Command::Catalog { family, params, emit } => catalog(family, params, emit.as_deref(), tol, json),
        Command::Lattice { input, bound } => commands::batch(input, json, |p| lattice(p, *bound, json)),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Outcome::ok(text)
            }
        }
    }
}
