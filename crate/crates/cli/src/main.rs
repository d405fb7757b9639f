//! Command-line front end: analysis, simulation, parameter sweeps and
//! self-verification for the generalized M-basis QKD family.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input or
//! degenerate parameters.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{
    parse_angle, parse_channel, parse_grid, ProtocolSection, RunConfigFile, SimulationSection,
    ThetaField,
};
use qkd_rotsym::{LambdaMode, SiftingMode};

#[derive(Parser)]
#[command(
    name = "qkd-rotsym",
    about = "Generalized M-basis QKD: exact error statistics, key rates and Monte Carlo simulation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProtocolArgs {
    /// Number of basis pairs (M >= 2)
    #[arg(long = "M", short = 'M')]
    m: Option<u32>,
    /// Angle between paired states: radians or pi/2, pi/4, pi/8, pi/3
    #[arg(long)]
    theta: Option<String>,
    /// Channel: identity | depolarizing:p | pauli:pi,px,py,pz |
    /// unitary_rotation:beta | amplitude_damping:gamma
    #[arg(long)]
    channel: Option<String>,
    /// Sifting accounting: generic charges the 1/M factor, basis_free drops it
    #[arg(long, value_enum, default_value = "generic")]
    sifting_mode: SiftingModeArg,
    /// Lambda accounting: paper_range (admissible interval, M > 2) or pessimistic
    #[arg(long, value_enum, default_value = "paper-range")]
    lambda_mode: LambdaModeArg,
    /// JSON config file; inline flags are ignored when present
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SiftingModeArg {
    Generic,
    BasisFree,
}

impl From<SiftingModeArg> for SiftingMode {
    fn from(value: SiftingModeArg) -> Self {
        match value {
            SiftingModeArg::Generic => SiftingMode::Generic,
            SiftingModeArg::BasisFree => SiftingMode::BasisFree,
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum LambdaModeArg {
    PaperRange,
    Pessimistic,
}

impl From<LambdaModeArg> for LambdaMode {
    fn from(value: LambdaModeArg) -> Self {
        match value {
            LambdaModeArg::PaperRange => LambdaMode::Admissible,
            LambdaModeArg::Pessimistic => LambdaMode::Pessimistic,
        }
    }
}

impl ProtocolArgs {
    /// Resolve into a full config: the config file wins when given. A
    /// missing theta is tolerated when `theta_from_grid` is set (the sweep
    /// supplies it per grid point).
    fn resolve(
        &self,
        simulation: Option<SimulationSection>,
        theta_from_grid: bool,
    ) -> Result<RunConfigFile, String> {
        if let Some(path) = &self.config {
            let mut cfg = RunConfigFile::load(path)?;
            if cfg.simulation.is_none() {
                cfg.simulation = simulation;
            }
            return Ok(cfg);
        }
        let m = self.m.ok_or("--M is required (or use --config)")?;
        let theta = match (self.theta.as_deref(), theta_from_grid) {
            (Some(t), _) => parse_angle(t)?,
            (None, true) => 1.0, // placeholder; every sweep point overrides it
            (None, false) => return Err("--theta is required (or use --config)".into()),
        };
        let channel = self
            .channel
            .as_deref()
            .ok_or("--channel is required (or use --config)")?;
        Ok(RunConfigFile {
            protocol: ProtocolSection {
                basis_pairs: m,
                theta: ThetaField(theta),
                sifting_mode: self.sifting_mode.into(),
            },
            channel: parse_channel(channel)?,
            simulation,
            lambda_mode: self.lambda_mode.into(),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form error statistics and key rates for one protocol point
    Analyze {
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Emit a machine-readable JSON document
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo run of the prepare-and-measure protocol
    Simulate {
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Number of signals
        #[arg(long)]
        n: Option<u64>,
        /// Random seed (bit-for-bit reproducible, any thread count)
        #[arg(long)]
        seed: Option<u64>,
        /// Fraction of sifted bits revealed for error estimation
        #[arg(long, default_value_t = 0.0)]
        test_fraction: f64,
        #[arg(long)]
        json: bool,
    },
    /// CSV sweep over theta and/or a channel parameter
    Sweep {
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Theta grid: single value or lo:hi:step (pi-tokens allowed)
        #[arg(long)]
        theta_grid: String,
        /// Channel-parameter grid: single value or lo:hi:step
        #[arg(long)]
        param_grid: Option<String>,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Key rates for an explicitly given bit error rate
    Keyrate {
        /// Number of basis pairs (M >= 2)
        #[arg(long = "M", short = 'M')]
        m: u32,
        /// Angle between paired states: radians or pi-token
        #[arg(long)]
        theta: String,
        /// Observed bit error rate
        #[arg(long)]
        e_b: f64,
        /// Conclusive probability; defaults to the noiseless sin^2(theta)/2
        #[arg(long)]
        p_con: Option<f64>,
        #[arg(long, value_enum, default_value = "generic")]
        sifting_mode: SiftingModeArg,
        #[arg(long, value_enum, default_value = "paper-range")]
        lambda_mode: LambdaModeArg,
        #[arg(long)]
        json: bool,
    },
    /// Worst-case M = 2 phase error rate at fixed bit error rate
    Bound {
        /// Angle between paired states: radians or pi-token (0 < theta < pi/2)
        #[arg(long)]
        theta: String,
        /// Bit error rate
        #[arg(long)]
        e_b: f64,
        /// Also run the grid-search oracle at this step and report the gap
        #[arg(long)]
        grid_step: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Run every self-verification suite
    Verify {
        /// Random channels per suite
        #[arg(long, default_value_t = 200)]
        trials: u64,
        /// Base seed for the sweeps
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("QKD_ROTSYM_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                // Ignore failure: the pool may already be initialized.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    init_thread_pool();
    match cli.command {
        Command::Analyze { protocol, json } => {
            let cfg = protocol.resolve(None, false)?;
            commands::cmd_analyze(&cfg, json)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            protocol,
            n,
            seed,
            test_fraction,
            json,
        } => {
            let inline = match (n, seed) {
                (Some(n), Some(seed)) => Some(SimulationSection {
                    n,
                    seed,
                    test_fraction,
                }),
                (None, None) => None,
                _ => return Err("--n and --seed must be given together".into()),
            };
            let cfg = protocol.resolve(inline, false)?;
            commands::cmd_simulate(&cfg, json)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            protocol,
            theta_grid,
            param_grid,
            out,
        } => {
            let cfg = protocol.resolve(None, true)?;
            let thetas = parse_grid(&theta_grid, true)?;
            let params = param_grid
                .as_deref()
                .map(|g| parse_grid(g, false))
                .transpose()?;
            commands::cmd_sweep(
                &cfg.protocol,
                &cfg.channel,
                cfg.lambda_mode,
                &thetas,
                params.as_deref(),
                &out,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Keyrate {
            m,
            theta,
            e_b,
            p_con,
            sifting_mode,
            lambda_mode,
            json,
        } => {
            let section = ProtocolSection {
                basis_pairs: m,
                theta: ThetaField(parse_angle(&theta)?),
                sifting_mode: sifting_mode.into(),
            };
            commands::cmd_keyrate(&section, e_b, p_con, lambda_mode.into(), json)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound {
            theta,
            e_b,
            grid_step,
            json,
        } => {
            commands::cmd_bound(parse_angle(&theta)?, e_b, grid_step, json)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { trials, seed } => {
            if commands::cmd_verify(trials, seed)? {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
