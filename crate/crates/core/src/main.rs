use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use banditstream::algorithms::{AlgorithmId, EpsilonRule, Mode};
use banditstream::error::Error;
use banditstream::harness::{
    aggregate, io, run_experiment, verify, ExperimentConfig, HorizonRule, SeedRange,
};
use banditstream::instances::InstanceKind;

#[derive(Parser)]
#[command(
    name = "banditstream",
    version,
    about = "Streaming multi-armed bandit regret benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid and write results.csv, config.json and table.csv.
    Run(RunArgs),
    /// Build the relative-regret table from a results CSV.
    Table {
        #[arg(long = "in")]
        input: PathBuf,
        /// Output path; `.md` writes markdown, anything else CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the oracle-agreement and invariant suites.
    Verify,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config; inline flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "uniform")]
    instance: Vec<InstanceKind>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "uniform-exploration,naive-elimination,bucket-log,bucket-loglog,asp-logstar,jin-single-arm"
    )]
    algos: Vec<AlgorithmId>,
    #[arg(long, value_delimiter = ',', default_value = "100")]
    num_arms: Vec<usize>,
    /// Horizon rules such as `1000K`, `1000K^2` or `5e5`.
    #[arg(long, value_delimiter = ',', default_value = "1000K")]
    horizon_rule: Vec<HorizonRule>,
    /// Inclusive seed range `a..b`.
    #[arg(long, default_value = "0..49")]
    seeds: SeedRange,
    #[arg(long, default_value = "experiment")]
    mode: Mode,
    /// Fixed epsilon; defaults to (K/T)^(1/3).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Use (K/T)^(1/3) / 2 as the default epsilon.
    #[arg(long)]
    high_probability: bool,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Gap of the hidden arm for trap streams.
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long)]
    approx_threshold: Option<u64>,
    /// Keep wall times in results.csv instead of zeroing them.
    #[arg(long)]
    timings: bool,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

impl RunArgs {
    fn to_config(&self) -> Result<ExperimentConfig, Error> {
        if let Some(path) = &self.config {
            let mut cfg = ExperimentConfig::from_json_file(path)?;
            if cfg.output.is_none() {
                cfg.output = Some(self.out.clone());
            }
            return Ok(cfg);
        }
        let mut cfg = ExperimentConfig::new(
            self.instance.clone(),
            self.num_arms.clone(),
            self.horizon_rule.clone(),
            self.algos.clone(),
        );
        cfg.seeds = self.seeds;
        cfg.mode = self.mode;
        cfg.epsilon = self.epsilon;
        if self.high_probability {
            cfg.epsilon_rule = EpsilonRule::HighProbability;
        }
        cfg.delta = self.delta;
        cfg.beta = self.beta;
        if let Some(t) = self.approx_threshold {
            cfg.approx_threshold = t;
        }
        cfg.output = Some(self.out.clone());
        Ok(cfg)
    }
}

fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_owned(),
        source,
    }
}

fn run(args: RunArgs) -> Result<ExitCode, Error> {
    let cfg = args.to_config()?;
    let dir = cfg
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("results"));
    let records = run_experiment(&cfg)?;
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    io::write_records(&records, &dir.join("results.csv"), !args.timings)?;
    io::write_config_json(&cfg, &dir.join("config.json"))?;
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    eprintln!(
        "{} runs, {failed} failed -> {}",
        records.len(),
        dir.display()
    );
    match aggregate(&records) {
        Ok(table) => {
            io::write_table(&table, &dir.join("table.csv"))?;
            print!("{}", io::render_table(&table, io::TableFormat::Markdown));
        }
        Err(e) => eprintln!("no table: {e}"),
    }
    if records
        .iter()
        .any(|r| r.is_ok() && r.explore_pulls + r.commit_pulls != r.horizon)
    {
        eprintln!("pull budget invariant violated");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Table { input, out } => io::read_records(&input)
            .and_then(|recs| aggregate(&recs))
            .and_then(|table| io::write_table(&table, &out))
            .map(|()| ExitCode::SUCCESS),
        Command::Verify => verify::run_all().map(|checks| {
            for c in &checks {
                println!("{c}");
            }
            if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Json(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
