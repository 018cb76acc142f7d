//! Command-line experiment harness writing CSV for external plotting.

pub mod commands;
pub mod config;
pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser};

pub use commands::{run, CommandOutput};
pub use config::{
    parse_config, ConfigError, ExperimentConfig, PotentialKind, RawConfig, Stepping, Subcommand,
    SweepSpec,
};

use format::fmt_f64;

#[derive(Debug, Parser)]
#[command(
    name = "generic-integrate",
    version,
    about = "Structure-preserving integrators for damped oscillators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, clap::Subcommand)]
pub enum CliCommand {
    /// One trajectory with energies and errors against the reference.
    Integrate(ExperimentArgs),
    /// RMSE in energy and entropy over a geometric stepsize grid.
    Sweep(ExperimentArgs),
    /// Logarithm of successive local maxima and the fitted decay slope.
    Dissipation(ExperimentArgs),
    /// Conformal symplecticity, Poisson, degeneracy and entropy checks.
    Structure(ExperimentArgs),
}

impl CliCommand {
    pub fn split(self) -> (Subcommand, ExperimentArgs) {
        match self {
            CliCommand::Integrate(a) => (Subcommand::Integrate, a),
            CliCommand::Sweep(a) => (Subcommand::Sweep, a),
            CliCommand::Dissipation(a) => (Subcommand::Dissipation, a),
            CliCommand::Structure(a) => (Subcommand::Structure, a),
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct ExperimentArgs {
    /// Flat key=value file; keys are the long flag names.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// ybaby, mybaby, verlet, rk3 or adg. Repeatable.
    #[arg(long = "method", value_name = "M")]
    pub methods: Vec<String>,
    /// harmonic or cosine
    #[arg(long, value_name = "P")]
    pub potential: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub temperature: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub q0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub h_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub h_growth: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub h_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tsim: Option<f64>,
    /// q or p
    #[arg(long)]
    pub observable: Option<String>,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<String>,
}

impl ExperimentArgs {
    pub fn to_raw(&self) -> RawConfig {
        let mut raw = RawConfig::default();
        let mut set = |k: &str, v: String| raw.set(k, v).expect("flag names are valid keys");
        for m in &self.methods {
            set("method", m.clone());
        }
        let numbers = [
            ("k", self.k),
            ("mass", self.mass),
            ("gamma", self.gamma),
            ("temperature", self.temperature),
            ("q0", self.q0),
            ("p0", self.p0),
            ("s0", self.s0),
            ("h", self.h),
            ("h-start", self.h_start),
            ("h-growth", self.h_growth),
            ("h-max", self.h_max),
            ("tsim", self.tsim),
        ];
        for (k, v) in numbers {
            if let Some(v) = v {
                set(k, fmt_f64(v));
            }
        }
        for (k, v) in [
            ("potential", &self.potential),
            ("observable", &self.observable),
            ("output", &self.output),
        ] {
            if let Some(v) = v {
                set(k, v.clone());
            }
        }
        raw
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Run(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } | CliError::Run(_) => 1,
        }
    }
}

/// Resolve flags and the optional config file into an experiment.
pub fn resolve(command: Subcommand, args: &ExperimentArgs) -> Result<ExperimentConfig, CliError> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            Some(RawConfig::from_file_text(&text)?)
        }
        None => None,
    };
    Ok(parse_config(command, args.to_raw(), file)?)
}

/// Run one experiment and write its CSV. Returns whether it was error-free.
pub fn execute(config: &ExperimentConfig, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let out = run(config)?;
    match &config.output {
        Some(path) => std::fs::write(path, &out.csv).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => stdout
            .write_all(out.csv.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })?,
    }
    Ok(out.success())
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (command, args) = cli.command.split();
    let result = resolve(command, &args).and_then(|config| {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        execute(&config, &mut lock)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("generic-integrate: completed with error rows");
            1
        }
        Err(e) => {
            eprintln!("generic-integrate: {e}");
            e.exit_code()
        }
    }
}
