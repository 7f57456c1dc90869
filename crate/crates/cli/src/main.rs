//! `kamdnlw`: experiments on the derivative nonlinear wave equation.
//!
//! Exit status: 0 on success, 2 on invalid input, 3 on numerical failure.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

mod algebra;
mod commands;
mod config;
mod output;

use commands::Verdict;
use output::{Artifacts, Provenance};

/// Bad input detected by the driver itself.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

#[derive(Debug)]
struct Failed(String);

impl fmt::Display for Failed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

#[derive(Parser, Debug)]
#[command(version, about = "Reversible KAM experiments for y_tt − y_xx + m y = g(x, y, y_x, y_t)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration; all defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for the parallel scans.
    #[arg(long, global = true, env = "KAMDNLW_THREADS")]
    threads: Option<usize>,
    /// Overrides the `seed` of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Randomized checks of the vector-field algebra.
    AlgebraCheck,
    /// Cubic Birkhoff step and the normal form at the model amplitudes.
    Birkhoff,
    /// Homological equation for given or random reversible perturbations.
    Homological,
    /// Density of Melnikov-good amplitudes over shrinking boxes.
    MelnikovScan,
    /// Asymptotic expansion of the normal frequencies.
    Asymptotics,
    /// Newton solve for a quasi-periodic solution.
    QpSolve,
    /// Continuation of quasi-periodic solutions along a ray.
    Continuation,
    /// Time integration of the PDE.
    Simulate,
    /// Finite-time Lyapunov exponent along a quasi-periodic solution.
    LyapunovExponent,
    /// Non-existence certificates.
    Nonexistence {
        #[arg(value_enum)]
        kind: NonexistenceKind,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NonexistenceKind {
    /// `dM/dt = ∫ y_x^{p+1}` for `y_tt − y_xx = y_x^p`.
    #[value(name = "M")]
    M,
    /// `dH/dt = ∫ v^{p+1}` for `y_tt − y_xx = y_t^p`.
    #[value(name = "H")]
    H,
    /// Comparison bound for `y_tt − y_xx = y_t²`.
    Blowup,
    /// Space-time averages of `y_x^p` and `y_t^q`.
    Average,
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::AlgebraCheck => "algebra-check".into(),
            Command::Birkhoff => "birkhoff".into(),
            Command::Homological => "homological".into(),
            Command::MelnikovScan => "melnikov-scan".into(),
            Command::Asymptotics => "asymptotics".into(),
            Command::QpSolve => "qp-solve".into(),
            Command::Continuation => "continuation".into(),
            Command::Simulate => "simulate".into(),
            Command::LyapunovExponent => "lyapunov-exponent".into(),
            Command::Nonexistence { kind } => format!("nonexistence-{}", kind.to_possible_value().unwrap().get_name()),
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Invalid("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let loaded = config::load(cli.config.as_deref())?;
    let mut cfg = loaded.config;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let seed = cfg.seed;
    let name = cli.command.name();
    let mut out = Artifacts::new(&name, &loaded.sha256, seed);
    let verdict = match cli.command {
        Command::AlgebraCheck => commands::algebra_check(&cfg, seed, &mut out)?,
        Command::Birkhoff => commands::birkhoff(&cfg, &mut out)?,
        Command::Homological => commands::homological(&cfg, seed, &mut out)?,
        Command::MelnikovScan => commands::melnikov_scan(&cfg, seed, &mut out)?,
        Command::Asymptotics => commands::asymptotics(&cfg, &mut out)?,
        Command::QpSolve => commands::qp_solve(&cfg, &mut out)?,
        Command::Continuation => commands::continuation_run(&cfg, &mut out)?,
        Command::Simulate => commands::simulate(&cfg, &mut out)?,
        Command::LyapunovExponent => commands::lyapunov(&cfg, seed, &mut out)?,
        Command::Nonexistence { kind } => commands::nonexistence(&cfg, kind, &mut out)?,
    };
    let prov = Provenance {
        tool: "kamdnlw",
        version: env!("CARGO_PKG_VERSION"),
        core_version: dnlw_kam::VERSION,
        command: &name,
        config_sha256: &loaded.sha256,
        seed,
        resolved_config: serde_json::to_value(&cfg)?,
        artifacts: out.names(),
    };
    out.commit(&cli.out, &prov)?;
    match verdict {
        Verdict::Pass => Ok(()),
        Verdict::Fail(msg) => Err(Failed(msg).into()),
    }
}

fn exit_status(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(k) = cause.downcast_ref::<dnlw_kam::Error>() {
            return if k.is_validation() { 2 } else { 3 };
        }
        if cause.is::<Invalid>() || cause.is::<serde_json::Error>() {
            return 2;
        }
        if cause.is::<Failed>() {
            return 3;
        }
    }
    1
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kamdnlw: {e:#}");
            ExitCode::from(exit_status(&e))
        }
    }
}
