use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use occlometer::cli::{exit_code, run, BaselineKind, Command, RunConfig};

#[derive(Parser)]
#[command(name = "occlometer", version, about = "Pedestrian occlusion level classification and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// Minimum keypoint score counted as visible
    #[arg(long, default_value_t = occlometer::visibility::DEFAULT_SCORE_THRESHOLD)]
    keypoint_threshold: f64,
    /// Worker threads (defaults to the number of CPUs)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify occlusion for frame documents
    Classify {
        /// Frame document or directory of documents
        #[arg(long)]
        input: PathBuf,
        /// Output document, or directory when the input is a directory
        #[arg(long)]
        out: PathBuf,
        /// Attach the severity label of a benchmark scheme
        #[arg(long)]
        scheme: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare estimators against pixel-wise ground truth
    Evaluate {
        /// Paired-mask document or directory
        #[arg(long)]
        pairs: PathBuf,
        /// Frame document or directory with the detections
        #[arg(long)]
        input: PathBuf,
        /// Directory receiving summary.csv and instances.csv
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a box-based baseline estimator
    Baseline {
        #[command(subcommand)]
        kind: BaselineCmd,
    },
    /// Generate synthetic paired scenes
    Synth {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Benchmark severity schemes
    Schemes {
        #[command(subcommand)]
        action: SchemesCmd,
    },
}

#[derive(Subcommand)]
enum BaselineCmd {
    /// CityPersons fixed-aspect full-box occlusion
    Citypersons {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// OVIS bounding-box occlusion rate
    Ovis {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SchemesCmd {
    /// Print every scheme's bands
    List,
}

fn config(cli: Cli) -> RunConfig {
    let with = |command, common: Option<Common>, jobs: Option<usize>| {
        let mut cfg = RunConfig::new(command);
        if let Some(c) = common {
            cfg.keypoint_threshold = c.keypoint_threshold;
            cfg.jobs = c.jobs;
        } else {
            cfg.jobs = jobs;
        }
        cfg
    };
    match cli.command {
        Cmd::Classify { input, out, scheme, common } => {
            with(Command::Classify { input, out, scheme }, Some(common), None)
        }
        Cmd::Evaluate { pairs, input, out, common } => {
            with(Command::Evaluate { pairs, input, out }, Some(common), None)
        }
        Cmd::Baseline { kind } => {
            let (kind, input, out) = match kind {
                BaselineCmd::Citypersons { input, out } => (BaselineKind::CityPersons, input, out),
                BaselineCmd::Ovis { input, out } => (BaselineKind::Ovis, input, out),
            };
            with(Command::Baseline { kind, input, out }, None, None)
        }
        Cmd::Synth { count, seed, out, jobs } => with(Command::Synth { count, seed, out }, None, jobs),
        Cmd::Schemes { action: SchemesCmd::List } => with(Command::SchemesList, None, None),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OCCLOMETER_LOG", "warn")).init();
    let cfg = config(Cli::parse());
    match run(&cfg, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("occlometer: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
