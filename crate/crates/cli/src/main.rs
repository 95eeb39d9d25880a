use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use anyhow::{Context, Result};
use choreo_cli::export::{export_plot, write_trajectory_csv};
use choreo_cli::run::{config_failure, EXIT_CONFIG};
use choreo_cli::{preset_with_seed, run_scenario, Outcome, ScenarioConfig, PRESET_NAMES, SCENARIO_SCHEMA};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "choreo", version, about = "Track divisors cut on real plane curves by loops of curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trajectory CSV path.
        #[arg(long)]
        traj: Option<PathBuf>,
        /// SVG plot path.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a shipped scenario, or print its config.
    Preset {
        name: String,
        #[arg(long)]
        emit_config: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run every preset; fails if any outcome is unacceptable.
    VerifyAll {
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the config JSON schema.
    Schema,
}

fn write_outputs(outcome: &Outcome, traj: Option<&Path>, plot: Option<&Path>) -> Result<()> {
    if let (Some(p), Some(path)) = (traj, &outcome.path) {
        let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
        write_trajectory_csv(path, BufWriter::new(file))?;
    }
    if let (Some(p), Some(topo)) = (plot, &outcome.topology) {
        let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
        export_plot(outcome.path.as_ref(), topo, BufWriter::new(file))?;
    }
    Ok(())
}

fn emit_report(json: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{json}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn cmd_run(
    config: &Path,
    out: Option<PathBuf>,
    traj: Option<PathBuf>,
    plot: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<i32> {
    let mut cfg = match ScenarioConfig::load(config) {
        Ok(c) => c,
        Err(e) => {
            emit_report(&config_failure(&e.to_string()).to_json(), out.as_deref())?;
            return Ok(EXIT_CONFIG);
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let out = out.or_else(|| cfg.outputs.report.clone());
    let traj = traj.or_else(|| cfg.outputs.trajectory.clone());
    let plot = plot.or_else(|| cfg.outputs.plot.clone());
    let outcome = run_scenario(&cfg);
    write_outputs(&outcome, traj.as_deref(), plot.as_deref())?;
    emit_report(&outcome.report.to_json(), out.as_deref())?;
    Ok(outcome.exit_code())
}

fn cmd_preset(name: &str, emit_config: bool, seed: u64) -> Result<i32> {
    let cfg = match preset_with_seed(name, seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}; known presets: {}", PRESET_NAMES.join(", "));
            return Ok(EXIT_CONFIG);
        }
    };
    if emit_config {
        println!("{}", cfg.to_json());
        return Ok(0);
    }
    let outcome = run_scenario(&cfg);
    println!("{}", outcome.report.to_json());
    Ok(outcome.exit_code())
}

fn cmd_verify_all(jobs: usize, seed: u64) -> Result<i32> {
    let results: Mutex<Vec<(usize, String, bool)>> = Mutex::new(Vec::new());
    let next = Mutex::new(0usize);
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1) {
            s.spawn(|| loop {
                let i = {
                    let mut n = next.lock().expect("lock");
                    let i = *n;
                    *n += 1;
                    i
                };
                let Some(name) = PRESET_NAMES.get(i) else { break };
                let line = match preset_with_seed(name, seed) {
                    Ok(cfg) => {
                        let outcome = run_scenario(&cfg);
                        let r = &outcome.report;
                        let summary = match (&r.error, r.tracing()) {
                            (Some(e), _) => format!("{} ({})", e.kind, r.exit_code),
                            (None, Some(c)) => format!("c = {c:?}"),
                            (None, None) => "no tracing".into(),
                        };
                        (summary, outcome.acceptable(&cfg))
                    }
                    Err(e) => (e.to_string(), false),
                };
                results.lock().expect("lock").push((i, line.0, line.1));
            });
        }
    });
    let mut results = results.into_inner().expect("lock");
    results.sort_by_key(|r| r.0);
    let mut ok = true;
    for (i, summary, pass) in &results {
        println!("{:<14} {}  {summary}", PRESET_NAMES[*i], if *pass { "ok  " } else { "FAIL" });
        ok &= pass;
    }
    Ok(if ok { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out, traj, plot, seed } => cmd_run(&config, out, traj, plot, seed),
        Command::Preset { name, emit_config, seed } => cmd_preset(&name, emit_config, seed),
        Command::VerifyAll { jobs, seed } => cmd_verify_all(jobs, seed),
        Command::Schema => {
            print!("{SCENARIO_SCHEMA}");
            Ok(0)
        }
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
