use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use auv_formation::control::ControlLaw;
use auv_formation::metrics::{compute_metrics, DEFAULT_SETTLE_THRESHOLD};
use auv_formation::scenario::{builtin_scenario, builtin_scenarios, parse_config, ScenarioConfig};
use auv_formation::sim::run_scenario;
use auv_formation::trace::{read_trace, sidecar_path, write_trace, Verdict};
use auv_formation::Error;

/// Formation-tracking simulator for fleets of underwater vessels.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write `<out>/<name>.csv` plus its `.meta.toml` sidecar.
    Run {
        /// Built-in scenario name (see list-scenarios) or path to a TOML file.
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        controller: ControlLaw,
        #[arg(long)]
        out: PathBuf,
        /// Control period [s]; RK4 substeps within it when the dynamics are fast.
        #[arg(long)]
        dt: Option<f64>,
        /// Simulated time [s].
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Standard deviation applied to every eta and v channel; 0 disables noise.
        #[arg(long)]
        noise_sigma: Option<f64>,
        /// Multiplier on the disturbance amplitudes.
        #[arg(long)]
        disturbance_scale: Option<f64>,
    },
    /// List the built-in scenarios.
    ListScenarios,
    /// Summarize a trace written by `run`.
    Metrics {
        #[arg(long)]
        trace: PathBuf,
        /// Threshold on |e_i| for the settle time.
        #[arg(long, default_value_t = DEFAULT_SETTLE_THRESHOLD)]
        settle_threshold: f64,
    },
    /// Parse and validate a scenario file.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_scenario(spec: &str) -> Result<ScenarioConfig, Error> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        return parse_config(&text);
    }
    builtin_scenario(spec).ok_or_else(|| {
        Error::ConfigInvalid {
            rule: format!("`{spec}` is neither a file nor a built-in scenario (try list-scenarios)"),
        }
    })
}

fn verdict_code(v: Verdict) -> ExitCode {
    match v {
        Verdict::Completed => ExitCode::SUCCESS,
        Verdict::Diverged => ExitCode::from(2),
    }
}

fn execute(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run {
            scenario,
            controller,
            out,
            dt,
            horizon,
            seed,
            noise_sigma,
            disturbance_scale,
        } => {
            let mut cfg = load_scenario(&scenario)?;
            if cfg.controller != controller {
                cfg = cfg.with_controller(controller);
            }
            if let Some(dt) = dt {
                cfg.dt = dt;
            }
            if let Some(h) = horizon {
                cfg.horizon = h;
            }
            if let Some(s) = seed {
                cfg = cfg.with_seed(s);
            }
            if let Some(s) = noise_sigma {
                cfg = cfg.with_noise_sigma(s);
            }
            if let Some(s) = disturbance_scale {
                cfg = cfg.with_disturbance_scale(s);
            }
            let trace = run_scenario(&cfg)?;
            std::fs::create_dir_all(&out).map_err(|e| Error::Io {
                path: out.clone(),
                source: e,
            })?;
            let csv = out.join(format!("{}.csv", cfg.name));
            write_trace(&trace, &csv)?;
            println!("{}: {}", cfg.name, trace.verdict());
            if let (Some(t), Some(reason)) = (trace.meta.diverged_at, &trace.meta.reason) {
                println!("diverged at t = {t}: {reason}");
            }
            for w in &trace.meta.warnings {
                eprintln!("warning: {w}");
            }
            println!("trace: {}", csv.display());
            println!("meta:  {}", sidecar_path(&csv).display());
            print!("{}", compute_metrics(&trace, DEFAULT_SETTLE_THRESHOLD)?.to_table());
            Ok(verdict_code(trace.verdict()))
        }
        Command::ListScenarios => {
            for cfg in builtin_scenarios() {
                let effect = match cfg.name.split('-').next() {
                    Some("scenario1") => "nominal tracking",
                    Some("scenario2") => "sinusoidal disturbance",
                    _ => "gaussian measurement noise",
                };
                println!("{:<16} {:<5} {}", cfg.name, cfg.controller, effect);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Metrics {
            trace,
            settle_threshold,
        } => {
            let trace = read_trace(&trace)?;
            print!("{}", compute_metrics(&trace, settle_threshold)?.to_table());
            Ok(verdict_code(trace.verdict()))
        }
        Command::Validate { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Error::Io {
                path: config.clone(),
                source: e,
            })?;
            let cfg = parse_config(&text)?;
            println!(
                "ok: {} ({} vessels, {}, dt = {} s, horizon = {} s)",
                cfg.name,
                cfg.n_vessels(),
                cfg.controller,
                cfg.dt,
                cfg.horizon
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
