use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tornet::pipeline::{
    cmd_analyze, cmd_ci_width_study, cmd_generate, cmd_plot, cmd_simulate, cmd_stage, read_plan, AnalysisOptions,
    ExperimentPlan, Metric,
};
use tornet::stats::RunStatus;
use tornet::{Error, Result};

#[derive(Parser)]
#[command(name = "tornet", version, about = "Sample scaled overlay networks, simulate them, and estimate metrics with confidence intervals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize snapshots, descriptors and user counts into a staged model.
    Stage {
        #[arg(long)]
        snapshots: PathBuf,
        #[arg(long)]
        descriptors: PathBuf,
        #[arg(long)]
        users: PathBuf,
        /// Staged model file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write an experiment plan and generate its network configurations.
    Generate(GenerateArgs),
    /// Run every simulation of the plan in an experiment directory.
    Simulate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
    },
    /// Estimate metric distributions with confidence intervals.
    Analyze {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        /// Reporting resolution of time metrics, seconds.
        #[arg(long, default_value_t = 0.01)]
        resolution: f64,
        /// Metrics to analyze (ttfb, ttlb_50k, ttlb_1m, ttlb_5m, error_rate, goodput); all by default.
        #[arg(long = "metric")]
        metrics: Vec<String>,
    },
    /// Plot estimates as CDFs with confidence bands.
    Plot {
        /// Experiment directory; without --input, every analyzed metric is plotted into <out>/plots.
        #[arg(long)]
        out: PathBuf,
        /// LABEL=PATH of an estimate CSV; repeat to overlay experiments.
        #[arg(long = "input")]
        inputs: Vec<String>,
        /// Output name inside <out>/plots when overlaying inputs.
        #[arg(long, default_value = "overlay")]
        name: String,
        #[arg(long)]
        tail_log: bool,
    },
    /// Median confidence-interval width against the number of sampled networks.
    CiWidthStudy {
        /// CSV file to write.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        networks: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.9, 0.99])]
        quantiles: Vec<f64>,
    },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    staged: PathBuf,
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    scale: f64,
    #[arg(long, default_value_t = 1.0)]
    load: f64,
    #[arg(long, default_value_t = 0.01)]
    pscale: f64,
    #[arg(long, default_value_t = 1)]
    networks: usize,
    #[arg(long, default_value_t = 1)]
    sims_per_net: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = ExperimentPlan::DEFAULT_DURATION_S)]
    duration: f64,
    #[arg(long, default_value_t = ExperimentPlan::DEFAULT_WARMUP_S)]
    warmup: f64,
    /// Markov stream model document replacing the built-in one.
    #[arg(long)]
    stream_model: Option<PathBuf>,
    /// Markov packet model document replacing the built-in one.
    #[arg(long)]
    packet_model: Option<PathBuf>,
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Stage {
            snapshots,
            descriptors,
            users,
            out,
        } => {
            cmd_stage(&snapshots, &descriptors, &users, &out)?;
        }
        Command::Generate(a) => {
            let plan = ExperimentPlan {
                staged: a.staged,
                map: a.map,
                scale: a.scale,
                load: a.load,
                pscale: a.pscale,
                networks: a.networks,
                sims_per_net: a.sims_per_net,
                duration_s: a.duration,
                warmup_s: a.warmup,
                seed: a.seed,
                out: a.out,
                stream_model: a.stream_model,
                packet_model: a.packet_model,
            };
            for path in cmd_generate(&plan)? {
                println!("{}", path.display());
            }
        }
        Command::Simulate { out, parallelism } => {
            let plan = read_plan(&out)?;
            let runs = cmd_simulate(&plan, parallelism)?;
            let failed = runs.iter().filter(|m| m.status == RunStatus::Failed).count();
            println!("{} runs, {failed} failed", runs.len());
            if failed > 0 {
                return Err(Error::Simulation(format!("{failed} of {} runs failed", runs.len())));
            }
        }
        Command::Analyze {
            out,
            alpha,
            resolution,
            metrics,
        } => {
            let plan = read_plan(&out)?;
            let mut opts = AnalysisOptions {
                confidence: alpha,
                resolution,
                ..AnalysisOptions::default()
            };
            if !metrics.is_empty() {
                opts.metrics = metrics
                    .iter()
                    .map(|m| Metric::parse(m).ok_or_else(|| Error::Usage(format!("unknown metric {m:?}"))))
                    .collect::<Result<_>>()?;
            }
            for (_, _, path) in cmd_analyze(&plan, &opts)? {
                println!("{}", path.display());
            }
        }
        Command::Plot {
            out,
            inputs,
            name,
            tail_log,
        } => {
            let plots = out.join("plots");
            if inputs.is_empty() {
                let plan = read_plan(&out)?;
                let mut any = false;
                for metric in Metric::ALL {
                    let csv = plan.analysis_dir().join(format!("{metric}.csv"));
                    if csv.exists() {
                        let files = cmd_plot(&[(metric.to_string(), csv)], metric.name(), tail_log, &plots.join(metric.name()))?;
                        println!("{}", files.svg.display());
                        any = true;
                    }
                }
                if !any {
                    return Err(Error::Usage(format!("no estimates under {}; run analyze first", plan.analysis_dir().display())));
                }
            } else {
                let pairs = inputs
                    .iter()
                    .map(|s| match s.split_once('=') {
                        Some((label, path)) => Ok((label.to_string(), PathBuf::from(path))),
                        None => Err(Error::Usage(format!("--input expects LABEL=PATH, got {s:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let files = cmd_plot(&pairs, &name, tail_log, &plots.join(&name))?;
                println!("{}", files.svg.display());
            }
        }
        Command::CiWidthStudy {
            out,
            networks,
            trials,
            seed,
            alpha,
            quantiles,
        } => {
            let ns: Vec<usize> = (2..=networks).collect();
            cmd_ci_width_study(&ns, &quantiles, trials, seed, alpha, &out)?;
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
