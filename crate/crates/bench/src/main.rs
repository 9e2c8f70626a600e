use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use drsub_bench::config::{Algorithm, ExperimentConfig, OracleChoice};
use drsub_bench::error::{BenchError, BenchResult};
use drsub_bench::hindsight::compute_hindsight;
use drsub_bench::output::{emit, resolve_output_dir, Format};
use drsub_bench::stream::build_stream;
use drsub_bench::verify::{run_suite, Suite};
use drsub_bench::run_experiment;
use drsub_core::instances::gen_random_graph;
use drsub_core::RngStream;

#[derive(Parser)]
#[command(name = "drsub", version, about = "Online DR-submodular maximization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write per-round records.
    Run(RunArgs),
    /// Run the property suites.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Write a random weighted graph as an edge list.
    GenGraph {
        #[arg(long, default_value_t = 20)]
        vertices: usize,
        #[arg(long, default_value_t = 0.3)]
        edge_prob: f64,
        #[arg(long, default_value_t = 0.5)]
        weight_min: f64,
        #[arg(long, default_value_t = 1.5)]
        weight_max: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Print the hindsight comparator for the first replica's stream.
    Hindsight(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    granularity: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, value_enum)]
    oracle: Option<OracleChoice>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    base: ConfigArgs,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write 0 in the elapsed_ms column.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

impl ConfigArgs {
    fn resolve(&self) -> BenchResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.algorithm {
            cfg.algorithm = v;
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if self.levels.is_some() {
            cfg.levels = self.levels;
        }
        if self.granularity.is_some() {
            cfg.granularity = self.granularity;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = self.oracle {
            cfg.oracle = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.replicas {
            cfg.replicas = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> BenchResult<bool> {
    match cli.command {
        Command::Run(args) => {
            let mut cfg = args.base.resolve()?;
            if args.no_timing {
                cfg.timing = false;
            }
            let dir = resolve_output_dir(args.output.as_deref(), &cfg);
            let outcome = run_experiment(&cfg)?;
            let paths = emit(&dir, &cfg, &outcome, args.format)?;
            println!(
                "mean final ratio {:.4} (std {:.4}) over {} replicas; wrote {} files to {}",
                outcome.mean_final_ratio,
                outcome.std_final_ratio,
                outcome.replicas.len(),
                paths.len() + 2,
                dir.display()
            );
            Ok(true)
        }
        Command::Verify { suite } => {
            let report = run_suite(suite)?;
            for check in &report.checks {
                println!("{check}");
            }
            let passed = report.passed();
            println!("{}: {}", suite.name(), if passed { "pass" } else { "FAIL" });
            Ok(passed)
        }
        Command::GenGraph {
            vertices,
            edge_prob,
            weight_min,
            weight_max,
            seed,
            output,
        } => {
            let g = gen_random_graph(vertices, edge_prob, (weight_min, weight_max), seed)?;
            g.write_edge_list(&output)?;
            println!("{} vertices, {} edges -> {}", g.vertex_count(), g.edge_count(), output.display());
            Ok(true)
        }
        Command::Hindsight(args) => {
            let cfg = args.resolve()?;
            let master = RngStream::new(cfg.seed);
            let stream = build_stream(&cfg, master.fork(1000))?;
            let body = cfg.body.build(stream.dim)?;
            let total = stream.aggregate()?;
            let comparator = compute_hindsight(&total, &body, &[], &cfg.hindsight, &mut master.fork(3000))?;
            println!("{}", serde_json::to_string_pretty(&comparator).map_err(BenchError::from)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
