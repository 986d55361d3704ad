use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use entroflow::gas::{AngleLaw, CollisionSpec};
use entroflow_cli::config::{self, ClausiusConfig, ExchangeConfig};
use entroflow_cli::envelope::ResultEnvelope;
use entroflow_cli::exchange::{run_single, run_sweep, sweep_csv, CaseArg};
use entroflow_cli::gas::{ModeArg, Switch};
use entroflow_cli::ineq::Check;
use entroflow_cli::{clausius, exit, gas, ineq, parse_sweep, CliError};

/// Worker cap for parallel loops; 0 or unset means one per core.
const THREADS_ENV: &str = "ENTROFLOW_THREADS";

#[derive(Parser)]
#[command(name = "entroflow", version, about = "Entropy, correlation and heat-flow experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an entropy inequality on an ensemble of random states.
    Ineq {
        #[arg(long, value_enum)]
        check: Check,
        /// Comma-separated factor dimensions.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Heat exchange between two systems under an energy-conserving unitary.
    #[command(allow_negative_numbers = true)]
    Exchange {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long)]
        config: PathBuf,
        /// Override every rotation angle.
        #[arg(long, conflicts_with = "sweep")]
        phi: Option<f64>,
        /// Sweep every rotation angle, `phi=a:b:n`; emits CSV.
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Run a cyclic process to its periodic state.
    Clausius {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = clausius::DEFAULT_MAX_CYCLES)]
        max_cycles: usize,
        #[arg(long, default_value_t = clausius::DEFAULT_FP_TOL)]
        fp_tol: f64,
    },
    /// Monte Carlo collision ensemble for a two-species gas.
    Gas {
        #[arg(long)]
        ma: f64,
        #[arg(long)]
        mb: f64,
        #[arg(long)]
        ta: f64,
        #[arg(long)]
        tb: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        m_scale: f64,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Weight events by relative speed; defaults to on for product mode.
        #[arg(long, value_enum)]
        flux: Option<Switch>,
    },
}

enum Output {
    Json(String),
    Csv(String),
}

fn envelope<T: Serialize>(
    command: &str,
    config: serde_json::Value,
    seed: Option<u64>,
    start: Instant,
    payload: T,
) -> Output {
    let env = ResultEnvelope::new(command, config, seed, start.elapsed().as_secs_f64(), payload);
    Output::Json(serde_json::to_string_pretty(&env).expect("payloads serialize"))
}

fn verdict(ok: bool) -> i32 {
    if ok {
        exit::PASS
    } else {
        exit::VIOLATION
    }
}

fn configure_threads() -> Result<(), CliError> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| CliError::Args(format!("{THREADS_ENV}={v:?} is not a count")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Args(format!("thread pool: {e}")))
}

fn run(command: Command) -> Result<(Output, i32), CliError> {
    let start = Instant::now();
    match command {
        Command::Ineq { check, dims, trials, seed } => {
            let summary = ineq::run(check, &dims, trials, seed)?;
            let code = verdict(summary.all_pass());
            let cfg = json!({ "check": check, "dims": dims, "trials": trials });
            Ok((envelope("ineq", cfg, Some(seed), start, summary), code))
        }
        Command::Exchange { case, config, phi, sweep } => {
            let cfg: ExchangeConfig = config::load(&config, "exchange")?;
            if let Some(arg) = sweep {
                let phis = parse_sweep(&arg, "phi")?;
                let reports = run_sweep(&cfg, case, &phis)?;
                let ok = reports.iter().all(|r| r.violations().is_empty());
                return Ok((Output::Csv(sweep_csv(&phis, &reports)?), verdict(ok)));
            }
            let report = run_single(&cfg, case, phi)?;
            let code = verdict(report.violations().is_empty());
            let mut echo = serde_json::to_value(&cfg).expect("config serializes");
            echo["case"] = json!(case);
            echo["rotations_applied"] = json!(cfg.rotations(phi));
            Ok((envelope("exchange", echo, None, start, report), code))
        }
        Command::Clausius { config, max_cycles, fp_tol } => {
            let cfg: ClausiusConfig = config::load(&config, "clausius")?;
            let report = clausius::run(&cfg, max_cycles, fp_tol)?;
            let code = verdict(report.clausius_holds());
            let mut echo = serde_json::to_value(&cfg).expect("config serializes");
            echo["max_cycles"] = json!(max_cycles);
            echo["fp_tol"] = json!(fp_tol);
            Ok((envelope("clausius", echo, None, start, report), code))
        }
        Command::Gas { ma, mb, ta, tb, gamma, m_scale, mode, samples, seed, flux } => {
            let spec = CollisionSpec {
                m_a: ma,
                m_b: mb,
                t_a: ta,
                t_b: tb,
                gamma,
                m_scale,
                flux_weighting: flux.map(|s| s == Switch::On),
                angle_law: AngleLaw::Isotropic,
            };
            let payload = gas::run(&spec, mode, samples, seed)?;
            let code = verdict(payload.sign_consistent);
            let mut echo = serde_json::to_value(&spec).expect("spec serializes");
            echo["mode"] = json!(mode);
            echo["samples"] = json!(samples);
            Ok((envelope("gas", echo, Some(seed), start, payload), code))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(cli.command));
    match result {
        Ok((out, code)) => {
            let text = match out {
                Output::Json(s) => s + "\n",
                Output::Csv(s) => s,
            };
            // a closed pipe downstream is not an error of ours
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("entroflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
