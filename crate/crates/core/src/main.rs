use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crnoma_aoi::analytic;
use crnoma_aoi::experiment::{parse_config, run_experiment, ExperimentSpec, Outputs, Preset};
use crnoma_aoi::model::{db_to_linear, epsilon_of, rng_from_seed, split_seed};
use crnoma_aoi::oracle::{estimate_gar_partitions, estimate_gaw_partition, EstimateWithCI};
use crnoma_aoi::validation::{run_validation, Level};

#[derive(Parser)]
#[command(name = "crnoma-aoi", version, about = "AoI of TDMA and CR-NOMA uplink scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a figure preset or custom sweep and write CSV.
    Run(RunArgs),
    /// Run the acceptance checks.
    Validate {
        #[arg(long, default_value = "fast")]
        level: Level,
    },
    /// Monte Carlo partition estimates next to their closed forms.
    Probs(ProbsArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "custom")]
    preset: Preset,
    /// key = value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    frames: Option<u64>,
    #[arg(long)]
    warmup: Option<u64>,
    #[arg(long, conflicts_with = "sim_only")]
    analytic_only: bool,
    #[arg(long)]
    sim_only: bool,
}

#[derive(Args)]
struct ProbsArgs {
    /// Rates in bit/s/Hz.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2")]
    rate: Vec<f64>,
    /// P = P_S in dB.
    #[arg(long, value_delimiter = ',', default_value = "-5,0,5,10,15")]
    snr_db: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn build_spec(args: &RunArgs) -> crnoma_aoi::Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::preset(args.preset);
    if let Some(path) = &args.config {
        spec = parse_config(&fs::read_to_string(path)?, spec)?;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(frames) = args.frames {
        spec.frames = frames;
    }
    if let Some(warmup) = args.warmup {
        spec.warmup = warmup;
    }
    if args.analytic_only {
        spec.outputs = Outputs::Analytic;
    } else if args.sim_only {
        spec.outputs = Outputs::Simulated;
    }
    Ok(spec)
}

/// Write to stdout; a reader closing the pipe early is not an error.
fn emit(text: &str) -> crnoma_aoi::Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(args: &RunArgs) -> crnoma_aoi::Result<()> {
    let csv = run_experiment(&build_spec(args)?)?;
    match &args.out {
        Some(path) => fs::write(path, csv)?,
        None => emit(&csv)?,
    }
    Ok(())
}

fn probs(args: &ProbsArgs) -> crnoma_aoi::Result<()> {
    let mut out = String::from("rate,snr_db,partition,outcome,closed_form,estimate,half_width_3sigma,covered\n");
    let mut index = 0;
    for &rate in &args.rate {
        let eps = epsilon_of(rate)?.value();
        for &snr_db in &args.snr_db {
            let p = db_to_linear(snr_db);
            let mut rng = rng_from_seed(split_seed(args.seed, index));
            index += 1;
            let gaw = estimate_gaw_partition(eps, p, p, args.trials, &mut rng);
            let gar = estimate_gar_partitions(eps, p, p, args.trials, &mut rng);
            let rows: [(&str, [EstimateWithCI; 3], [f64; 3]); 3] = [
                ("gaw", gaw, analytic::gaw_partition(eps, p, p).as_array()),
                ("gar_m", gar.user_m, analytic::gar_partition_user_m(eps, p, p).as_array()),
                ("gar_mprime", gar.user_mprime, analytic::gar_partition_user_mprime(eps, p, p).as_array()),
            ];
            for (name, est, closed) in rows {
                for ((outcome, e), c) in ["none", "first", "second"].iter().zip(est).zip(closed) {
                    out += &format!(
                        "{rate},{snr_db},{name},{outcome},{c:.6},{:.6},{:.6},{}\n",
                        e.estimate, e.half_width, e.covers(c)
                    );
                }
            }
            let joint = (-eps / p).exp() * analytic::tau(eps, p, p);
            let e = gar.owner_fail_overlay_success;
            out += &format!(
                "{rate},{snr_db},gar_tau,owner_fail_overlay_success,{joint:.6},{:.6},{:.6},{}\n",
                e.estimate, e.half_width, e.covers(joint)
            );
        }
    }
    emit(&out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => run(args).map(|_| true),
        Command::Validate { level } => run_validation(*level)
            .and_then(|report| emit(&report.to_string()).map(|_| report.passed())),
        Command::Probs(args) => probs(args).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
