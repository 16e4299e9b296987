//! `slicectl`: command-line front end of the admission-control toolkit.
//!
//! Exit status is 0 on success, 2 when the input is invalid and 3 when a
//! computation fails on valid input.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slice_admission::envs::LoadLevel;
use slice_admission::harness::{self, Experiment, ExperimentConfig};
use slice_admission::tas::{ForcedExploration, SamplerKind};
use slice_admission::{Criterion, Error, ObservationFamily};

const EXIT_VALIDATION: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "slicectl",
    version,
    about = "Measurement-based slice admission experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed (required by the bench commands)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the CSV here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print an aligned table to stdout in addition to the CSV
    #[arg(long, global = true)]
    summary: bool,
    /// Confidence parameter
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Threshold constant, overriding the computed value
    #[arg(long, global = true)]
    constant_c: Option<f64>,
    /// Forced exploration floor: sqrt or sqrt-minus-half-k
    #[arg(long, global = true, value_parser = parse_exploration)]
    exploration: Option<ForcedExploration>,
    /// Slot cap per episode
    #[arg(long, global = true)]
    max_slots: Option<u64>,
    /// Criteria, comma separated (any, packing, ll)
    #[arg(long, global = true, value_delimiter = ',')]
    criterion: Vec<String>,
}

#[derive(Args)]
struct InstanceArgs {
    /// Slice loads, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// bernoulli or poisson
    #[arg(long)]
    family: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic time, optimal weights and the delta-scaled bound
    LowerBound {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// One admission episode on a fixed instance
    Episode {
        #[command(flatten)]
        instance: InstanceArgs,
        /// tas or uniform
        #[arg(long)]
        sampler: Option<String>,
    },
    /// Stopping times on random packet-level instances
    PacketBench {
        #[arg(long)]
        slices: Option<usize>,
        #[arg(long)]
        runs: Option<usize>,
        /// Load levels, comma separated (low, medium, high)
        #[arg(long, value_delimiter = ',')]
        load: Vec<String>,
        /// Samplers, comma separated (tas, uniform)
        #[arg(long, value_delimiter = ',')]
        sampler: Vec<String>,
    },
    /// Stopping time against the lower bound across a delta grid
    DeltaSweep {
        #[arg(long)]
        runs: Option<usize>,
        /// Delta grid, comma separated
        #[arg(long, value_delimiter = ',')]
        deltas: Vec<f64>,
        /// Fixed loads instead of a drawn instance
        #[arg(long, value_delimiter = ',')]
        mu: Vec<f64>,
    },
    /// Flow-level blocking and measurement cost
    FlowBench {
        /// Offered loads, comma separated
        #[arg(long, value_delimiter = ',')]
        rho: Vec<f64>,
        #[arg(long)]
        horizon: Option<f64>,
        /// tas, uniform or perfect
        #[arg(long)]
        decider: Option<String>,
    },
}

fn parse_exploration(s: &str) -> Result<ForcedExploration, String> {
    match s {
        "sqrt" => Ok(ForcedExploration::Sqrt),
        "sqrt-minus-half-k" => Ok(ForcedExploration::SqrtMinusHalfK),
        other => Err(format!("unknown exploration rule `{other}`")),
    }
}

fn parse_list<T: std::str::FromStr<Err = Error>>(items: &[String]) -> Result<Vec<T>, Error> {
    items.iter().map(|s| s.parse()).collect()
}

fn apply_instance(cfg: &mut ExperimentConfig, a: &InstanceArgs) -> Result<(), Error> {
    if !a.mu.is_empty() {
        cfg.instance.mu = a.mu.clone();
    }
    if let Some(g) = a.gamma {
        cfg.instance.gamma = g;
    }
    if let Some(f) = &a.family {
        cfg.instance.family = f.parse::<ObservationFamily>()?;
    }
    Ok(())
}

/// Builds the effective configuration: file first, then flags.
fn configure(cli: &Cli) -> Result<(Experiment, ExperimentConfig), Error> {
    let mut cfg = match &cli.common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let c = &cli.common;
    if c.seed.is_some() {
        cfg.seed = c.seed;
    }
    if c.out.is_some() {
        cfg.out = c.out.clone();
    }
    if c.jobs.is_some() {
        cfg.jobs = c.jobs;
    }
    if let Some(d) = c.delta {
        cfg.threshold.delta = d;
    }
    if c.constant_c.is_some() {
        cfg.threshold.constant_c = c.constant_c;
    }
    if let Some(e) = c.exploration {
        cfg.threshold.exploration = e;
    }
    if let Some(m) = c.max_slots {
        cfg.threshold.max_slots = m;
    }
    let criteria: Vec<Criterion> = parse_list(&c.criterion)?;

    let exp = match &cli.command {
        Command::LowerBound { instance } => {
            apply_instance(&mut cfg, instance)?;
            if !criteria.is_empty() {
                cfg.instance.criteria = criteria;
            }
            Experiment::LowerBound
        }
        Command::Episode { instance, sampler } => {
            apply_instance(&mut cfg, instance)?;
            if !criteria.is_empty() {
                cfg.instance.criteria = criteria;
            }
            if let Some(s) = sampler {
                cfg.instance.sampler = s.parse::<SamplerKind>()?;
            }
            Experiment::Episode
        }
        Command::PacketBench {
            slices,
            runs,
            load,
            sampler,
        } => {
            let p = &mut cfg.packet;
            if let Some(k) = slices {
                p.slices = *k;
            }
            if let Some(r) = runs {
                p.runs = *r;
            }
            if !load.is_empty() {
                p.loads = parse_list::<LoadLevel>(load)?;
            }
            if !sampler.is_empty() {
                p.samplers = parse_list::<SamplerKind>(sampler)?;
            }
            if !criteria.is_empty() {
                p.criteria = criteria;
            }
            Experiment::PacketBench
        }
        Command::DeltaSweep { runs, deltas, mu } => {
            let s = &mut cfg.sweep;
            if let Some(r) = runs {
                s.runs = *r;
            }
            if !deltas.is_empty() {
                s.deltas = deltas.clone();
            }
            if !mu.is_empty() {
                s.mu = Some(mu.clone());
            }
            match criteria.as_slice() {
                [] => {}
                [c] => s.criterion = *c,
                _ => return Err(Error::Config("delta-sweep takes a single criterion".into())),
            }
            Experiment::DeltaSweep
        }
        Command::FlowBench {
            rho,
            horizon,
            decider,
        } => {
            let f = &mut cfg.flow;
            if !rho.is_empty() {
                f.rhos = rho.clone();
            }
            if let Some(h) = horizon {
                f.horizon = *h;
            }
            if let Some(d) = decider {
                f.decider = d.clone();
            }
            if !criteria.is_empty() {
                f.criteria = criteria;
            }
            Experiment::FlowBench
        }
    };
    Ok((exp, cfg))
}

enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Self::Validation(e.to_string())
        } else {
            Self::Runtime(e.to_string())
        }
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let (exp, cfg) = configure(cli)?;
    let table = harness::run(exp, &cfg)?;
    let csv = table.to_csv();
    match &cfg.out {
        Some(path) => std::fs::write(path, &csv)
            .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?,
        None if !cli.common.summary => print!("{csv}"),
        None => {}
    }
    if cli.common.summary {
        print!("{}", table.to_summary());
    }
    std::io::stdout()
        .flush()
        .map_err(|e| Failure::Runtime(format!("cannot write output: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("slicectl: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("slicectl: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
