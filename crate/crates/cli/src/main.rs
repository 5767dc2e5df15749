use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use toda_lab::flows::Method;
use toda_lab_cli::{
    cmd_coords, cmd_flow, cmd_grunsky, cmd_sigma, cmd_special, cmd_verify, Artifact, CliError,
    ExperimentConfig, Report,
};

#[derive(Parser)]
#[command(
    name = "toda-lab",
    version,
    about = "Grunsky data, Toda coordinates and identity checks for conformal pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Euler,
    Rk4,
}

#[derive(Subcommand)]
enum Command {
    /// Toda coordinates t_n, v_n, v0 and log𝔗.
    Coords { config: PathBuf },
    /// Grunsky table b(m, n).
    Grunsky { config: PathBuf },
    /// Trajectory along the flow ∂_n.
    Flow {
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        n: i32,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, value_enum, default_value = "rk4")]
        method: MethodArg,
    },
    /// Runs identity checks; exit code 1 if any residual exceeds its tolerance.
    Verify {
        config: PathBuf,
        /// Comma-separated check names (default: all).
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long)]
        timings: bool,
    },
    /// Σ reality relations and the Green kernel identity.
    Sigma {
        config: PathBuf,
        #[arg(long)]
        timings: bool,
    },
    /// Checks for the monomial Hamiltonian z1^μ z2^(−ν).
    Special {
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        mu: i32,
        #[arg(long, allow_hyphen_values = true)]
        nu: i32,
        #[arg(long)]
        timings: bool,
    },
}

fn emit(cfg: &ExperimentConfig, a: Artifact) -> Result<bool, CliError> {
    if cfg.outputs.is_empty() {
        print!("{}", a.json);
    }
    a.write(&cfg.outputs)?;
    Ok(true)
}

fn emit_report(cfg: &ExperimentConfig, r: Report) -> Result<bool, CliError> {
    print!("{}", r.to_json());
    for c in r.failures() {
        match (&c.residual, &c.error) {
            (_, Some(e)) => eprintln!("FAIL {}: {e}", c.name),
            (Some(x), None) => eprintln!(
                "FAIL {}: residual {x:e} not below tolerance {:e}",
                c.name, c.tolerance
            ),
            _ => {}
        }
    }
    Artifact::from_report(&r).write(&cfg.outputs)?;
    Ok(r.pass)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let load = |p: &PathBuf| ExperimentConfig::from_path(p);
    match cli.command {
        Command::Coords { config } => {
            let cfg = load(&config)?;
            emit(&cfg, cmd_coords(&cfg)?)
        }
        Command::Grunsky { config } => {
            let cfg = load(&config)?;
            emit(&cfg, cmd_grunsky(&cfg)?)
        }
        Command::Flow {
            config,
            n,
            eps,
            steps,
            method,
        } => {
            let cfg = load(&config)?;
            let method = match method {
                MethodArg::Euler => Method::Euler,
                MethodArg::Rk4 => Method::Rk4,
            };
            emit(&cfg, cmd_flow(&cfg, n, eps, steps, method)?)
        }
        Command::Verify {
            config,
            checks,
            timings,
        } => {
            let cfg = load(&config)?;
            emit_report(&cfg, cmd_verify(&cfg, &checks, timings)?)
        }
        Command::Sigma { config, timings } => {
            let cfg = load(&config)?;
            emit_report(&cfg, cmd_sigma(&cfg, timings)?)
        }
        Command::Special {
            config,
            mu,
            nu,
            timings,
        } => {
            let cfg = load(&config)?;
            emit_report(&cfg, cmd_special(&cfg, mu, nu, timings)?)
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("TODA_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().map_err(|_| {
        CliError::Usage(format!(
            "TODA_LAB_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("TODA_LAB_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = init_threads().and_then(|_| run(cli));
    match out {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
