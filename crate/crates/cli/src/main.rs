mod commands;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lfqa_core::eval::{Polarity, SplitUnit};
use lfqa_core::io::ColorPolicy;
use lfqa_core::RunConfig;

/// No-reference light-field quality assessment.
#[derive(Debug, Parser)]
#[command(name = "lfqa", version)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute feature vectors for one or more light fields.
    Extract(ExtractArgs),
    /// Fit the regressor on a features CSV.
    Train(TrainArgs),
    /// Score a features CSV with a trained model.
    Predict(PredictArgs),
    /// Run the repeated random-split evaluation protocol.
    Eval(EvalArgs),
    /// Write the synthetic benchmark.
    Synth(SynthArgs),
    /// Export direction or WLBP histograms for plotting.
    Histdump(HistdumpArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ColorArg {
    Bt601,
    Mean,
}

#[derive(Debug, Args)]
struct LoadArgs {
    /// View filename pattern with `{u}` and `{v}` placeholders.
    #[arg(long, default_value = "r{v}_c{u}.png")]
    layout: String,
    /// RGB to luminance conversion.
    #[arg(long, value_enum, default_value = "bt601")]
    color: ColorArg,
    /// Significant bits of 16-bit images.
    #[arg(long, value_name = "BITS")]
    source_bits: Option<u8>,
}

impl LoadArgs {
    fn options(&self) -> lfqa_core::io::LoadOptions {
        lfqa_core::io::LoadOptions {
            color: match self.color {
                ColorArg::Bt601 => ColorPolicy::Bt601,
                ColorArg::Mean => ColorPolicy::Mean,
            },
            source_bits: self.source_bits,
        }
    }
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// A light-field directory, a directory of light-field directories, or
    /// a manifest CSV with `id` and `path` columns.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    load: LoadArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolarityArg {
    HigherBetter,
    LowerBetter,
}

impl From<PolarityArg> for Polarity {
    fn from(p: PolarityArg) -> Self {
        match p {
            PolarityArg::HigherBetter => Polarity::HigherBetter,
            PolarityArg::LowerBetter => Polarity::LowerBetter,
        }
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    features: PathBuf,
    /// Column holding the target scores.
    #[arg(long, default_value = "score")]
    scores: String,
    /// Seed for the cross-validation folds (default: protocol seed).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SplitArg {
    Item,
    Scene,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value = "score")]
    scores: String,
    #[arg(long, value_enum, default_value = "higher-better")]
    polarity: PolarityArg,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum)]
    split: Option<SplitArg>,
    /// Record wall-clock time in the report (makes it non-reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Gdd,
    Wlbp,
}

#[derive(Debug, Args)]
struct HistdumpArgs {
    /// A single light-field directory.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    load: LoadArgs,
    #[arg(long, value_enum)]
    what: What,
    #[arg(long)]
    out: PathBuf,
}

/// Marks errors that should exit like a command-line usage error.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text)
        .map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())).into())
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = load_config(cli.config.as_ref())?;
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Extract(a) => commands::extract(&cfg, &a.input, &a.load.layout, a.load.options(), &a.out),
        Command::Train(a) => {
            let seed = a.seed.unwrap_or(cfg.protocol.seed);
            commands::train(&cfg, &a.features, &a.scores, seed, &a.out)
        }
        Command::Predict(a) => commands::predict(&a.model, &a.features, &a.out),
        Command::Eval(a) => {
            if let Some(s) = a.seed {
                cfg.protocol.seed = s;
            }
            if let Some(n) = a.trials {
                cfg.protocol.n_trials = n;
            }
            if let Some(split) = a.split {
                cfg.protocol.split_unit = match split {
                    SplitArg::Item => SplitUnit::Item,
                    SplitArg::Scene => SplitUnit::Scene,
                };
            }
            commands::eval(&cfg, &a.features, &a.scores, a.polarity.into(), a.timing, &a.out)
        }
        Command::Synth(a) => {
            if let Some(s) = a.seed {
                cfg.synth.seed = s;
            }
            commands::synth(&cfg, &a.out)
        }
        Command::Histdump(a) => commands::histdump(
            &cfg,
            &a.input,
            &a.load.layout,
            a.load.options(),
            a.what == What::Gdd,
            &a.out,
        ),
    }
}

fn main() -> ExitCode {
    // Usage errors exit with 2 through clap.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
