//! `cp2w`: invariants, verification suites, scans and the flat-torus optimizer.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad configuration,
//! 3 numerical failure, 4 the optimizer did not converge.

mod commands;
mod config;
mod render;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cp2_willmore::GeomError;

use config::{RunConfig, Settings};

/// Environment variable fixing the size of the worker pool.
pub const THREADS_ENV: &str = "CP2W_THREADS";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::Config(_) => Failure::config(e.to_string()),
            _ => Failure::numerical(e.to_string()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Parser, Debug)]
#[command(name = "cp2w", version, about = "Willmore functionals of surfaces in CP²")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariant report of one surface, e.g. `cp2w eval whitney t=1`.
    Eval(Common),
    /// Run a verification suite: bounds, twistor, variational, identities or all.
    Verify {
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// One invariant row per parameter value of a family.
    Scan(Common),
    /// Minimize W⁻ over the flat tori with Nelder–Mead.
    Optimize(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output format: json, csv or text.
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid resolution NxM for both sphere and torus domains.
    #[arg(long)]
    grid: Option<String>,
    /// key=value overrides; a bare word names the surface.
    settings: Vec<String>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut s = match &self.config {
            Some(p) => Settings::parse_file(p)?,
            None => Settings::default(),
        };
        for item in &self.settings {
            if item.contains('=') {
                s.set_pair(item)?;
            } else {
                s.set("surface", item)?;
            }
        }
        if let Some(f) = &self.format {
            s.set("format", f)?;
        }
        if let Some(o) = &self.out {
            s.set("out", &o.to_string_lossy())?;
        }
        if let Some(seed) = self.seed {
            s.set("seed", &seed.to_string())?;
        }
        if let Some(g) = &self.grid {
            s.set("grid", g)?;
        }
        RunConfig::from_settings(s)
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::config(format!("cannot configure {n} threads: {e}")))
}

fn write_output(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::config(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    let (cfg, outcome) = match &cli.command {
        Command::Eval(c) => {
            let cfg = c.resolve()?;
            let out = commands::eval(&cfg)?;
            (cfg, out)
        }
        Command::Verify { suite, common } => {
            let cfg = common.resolve()?;
            let suite = suite.parse().map_err(Failure::from)?;
            let out = commands::verify(suite, &cfg)?;
            (cfg, out)
        }
        Command::Scan(c) => {
            let cfg = c.resolve()?;
            let out = commands::scan(&cfg)?;
            (cfg, out)
        }
        Command::Optimize(c) => {
            let cfg = c.resolve()?;
            let out = commands::optimize(&cfg)?;
            (cfg, out)
        }
    };
    write_output(&cfg, &outcome.text)?;
    if let Some(msg) = &outcome.message {
        eprintln!("{msg}");
    }
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
