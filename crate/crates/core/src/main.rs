use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use prm_core::crcomp::optimal_cr_with;
use prm_core::harness::{
    generate_synthetic, load_traces, run_experiment_with, write_report, write_traces, ExperimentConfig,
    ReportFormat,
};
use prm_core::oracle::{derived_fixtures, GridSpec};
use prm_core::{Error, Execution};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Online peak reduction with energy storage.
#[derive(Parser)]
#[command(name = "prm", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal competitive ratio of the configured instance.
    Cr { config: PathBuf },
    /// Evaluate the configured policies on traces or synthetic episodes.
    Simulate(SimulateArgs),
    /// Recompute the brute-force reference fixtures.
    Oracle {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write synthetic episodes as a trace CSV.
    TraceGen {
        config: PathBuf,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SimulateArgs {
    config: PathBuf,
    #[arg(long, conflicts_with_all = ["synthetic", "seed"])]
    traces: Option<PathBuf>,
    /// Number of synthetic episodes (default: `episodes` from the config).
    #[arg(long)]
    synthetic: Option<usize>,
    /// Synthetic seed (default: `seed` from the config).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let exec = if cli.global.sequential { Execution::Sequential } else { Execution::Parallel };
    match run(cli.command, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_DATA })
        }
    }
}

fn run(command: Command, exec: Execution) -> prm_core::Result<()> {
    match command {
        Command::Cr { config } => cr(&config, exec),
        Command::Simulate(args) => simulate(args, exec),
        Command::Oracle { config, out } => oracle(&config, out.as_deref(), exec),
        Command::TraceGen { config, n, seed, out } => trace_gen(&config, n, seed, &out),
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|x| format!("{x:.9}")).collect::<Vec<_>>().join(" ")
}

fn cr(path: &Path, exec: Execution) -> prm_core::Result<()> {
    let cfg = ExperimentConfig::load(path)?;
    let inst = cfg.instance()?;
    let res = optimal_cr_with(&inst, exec)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "pi_star {:.9}", res.pi_star)?;
    writeln!(out, "argmax_prefix {}", res.argmax_prefix)?;
    writeln!(out, "witness {}", join(res.witness_profile.values()))?;
    writeln!(out, "prefix_values {}", join(&res.prefix_values))?;
    Ok(())
}

fn simulate(args: SimulateArgs, exec: Execution) -> prm_core::Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let format: ReportFormat = args.format.parse()?;
    let episodes = match &args.traces {
        Some(path) => {
            let set = load_traces(path, &cfg.instance_with(1.0)?, cfg.slot_minutes, cfg.window_start_time()?)?;
            if set.clipped > 0 {
                eprintln!("note: {} values clipped to demand bounds", set.clipped);
            }
            if !set.short_days.is_empty() {
                eprintln!("note: skipped incomplete days {}", set.short_days.join(", "));
            }
            set.episodes
        }
        None => generate_synthetic(
            &cfg,
            args.synthetic.unwrap_or(cfg.episodes),
            args.seed.unwrap_or(cfg.seed),
        ),
    };
    let report = run_experiment_with(&cfg, &episodes, exec)?;
    match &args.out {
        Some(path) => {
            prm_core::harness::emit_report(&report, format, path)?;
            let mut out = std::io::stdout().lock();
            for a in &report.aggregates {
                writeln!(
                    out,
                    "{:<5} {:<13} n={:<4} mean_rate={:.6} std_rate={:.6}",
                    a.capacity_rate, a.policy, a.episodes, a.mean_reduction_rate, a.std_reduction_rate
                )?;
            }
        }
        None => write_report(&report, format, std::io::stdout().lock())?,
    }
    Ok(())
}

fn oracle(path: &Path, out: Option<&Path>, exec: Execution) -> prm_core::Result<()> {
    let cfg = ExperimentConfig::load(path)?;
    let inst = cfg.instance()?;
    let mut grid = GridSpec::for_instance(&inst);
    if let Some(step) = cfg.oracle_demand_step {
        grid = grid.with_demand_step(step);
    }
    grid.max_horizon = grid.max_horizon.max(inst.horizon);
    let fixtures = derived_fixtures(&inst, &grid, exec)?;
    let mut text = serde_json::to_string_pretty(&fixtures)?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::from(e).context(p.display().to_string()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn trace_gen(path: &Path, n: usize, seed: u64, out: &Path) -> prm_core::Result<()> {
    let cfg = ExperimentConfig::load(path)?;
    let episodes = generate_synthetic(&cfg, n, seed);
    let first_day = NaiveDate::from_ymd_opt(2024, 1, 1).expect("valid date");
    let file = std::fs::File::create(out).map_err(|e| Error::from(e).context(out.display().to_string()))?;
    let mut buf = std::io::BufWriter::new(file);
    write_traces(&mut buf, &episodes, first_day, cfg.window_start_time()?)?;
    buf.flush()?;
    Ok(())
}
