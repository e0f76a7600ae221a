use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use alignrank::cli::{self, EvaluateOptions, PolicyChoice};

#[derive(Parser)]
#[command(name = "alignrank", version, about = "Benchmark embedding models on learning-outcome alignment ranking")]
struct Cli {
    /// Seed for reference draws and anything else randomized.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Emit machine-readable JSON instead of human output.
    #[arg(long, global = true)]
    json: bool,

    /// Vector cache directory.
    #[arg(long, global = true, default_value = ".alignrank-cache")]
    cache_dir: PathBuf,

    /// Provider configuration file (JSON array).
    #[arg(long, global = true)]
    providers: Option<PathBuf>,

    /// Reference policy: every accepted resource, or one random draw.
    #[arg(long, global = true, value_enum, default_value_t = PolicyArg::All)]
    policy: PolicyArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    All,
    Random,
}

impl From<PolicyArg> for PolicyChoice {
    fn from(value: PolicyArg) -> Self {
        match value {
            PolicyArg::All => PolicyChoice::All,
            PolicyArg::Random => PolicyChoice::Random,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a corpus file against every invariant and report issues.
    Validate { corpus: PathBuf },
    /// Embed every resource for each configured provider into the cache.
    Embed { corpus: PathBuf },
    /// Score cached embeddings: per-topic, summary, per-domain and
    /// generated-resource tables plus rankings and a run manifest.
    Evaluate {
        corpus: PathBuf,
        /// Directory for the emitted reports.
        #[arg(long, default_value = "reports")]
        out_dir: PathBuf,
    },
    /// Friedman / Kendall's W / Nemenyi over a per-topic CSV.
    Stats {
        per_topic_csv: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Disable the rank tie correction (textbook cross-checks).
        #[arg(long)]
        no_tie_correction: bool,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kruskal-Wallis / Dunn / Bonferroni over a learner score file.
    Learner {
        scores: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Disable the rank tie correction (textbook cross-checks).
        #[arg(long)]
        no_tie_correction: bool,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn providers_path(cli: &Cli) -> Result<PathBuf, String> {
    cli.providers
        .clone()
        .ok_or_else(|| "--providers <file> is required for this command".to_string())
}

fn main() {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout();

    let result: Result<(), String> = match &cli.command {
        Command::Validate { corpus } => {
            cli::cmd_validate(corpus, cli.json, &mut stdout).map_err(|e| e.to_string())
        }
        Command::Embed { corpus } => providers_path(&cli).and_then(|providers| {
            cli::cmd_embed(corpus, &providers, &cli.cache_dir, &mut stdout)
                .map_err(|e| e.to_string())
        }),
        Command::Evaluate { corpus, out_dir } => providers_path(&cli).and_then(|providers| {
            let options = EvaluateOptions {
                corpus_path: corpus.clone(),
                providers_path: providers,
                cache_dir: cli.cache_dir.clone(),
                out_dir: out_dir.clone(),
                policy: cli.policy.into(),
                seed: cli.seed,
                json: cli.json,
            };
            cli::cmd_evaluate(&options, &mut stdout).map_err(|e| e.to_string())
        }),
        Command::Stats {
            per_topic_csv,
            alpha,
            no_tie_correction,
            out,
        } => cli::cmd_stats(
            per_topic_csv,
            *alpha,
            !no_tie_correction,
            out.as_deref(),
            cli.json,
            &mut stdout,
        )
        .map_err(|e| e.to_string()),
        Command::Learner {
            scores,
            alpha,
            no_tie_correction,
            out,
        } => cli::cmd_learner(
            scores,
            *alpha,
            !no_tie_correction,
            out.as_deref(),
            cli.json,
            &mut stdout,
        )
        .map_err(|e| e.to_string()),
    };

    if let Err(message) = result {
        eprintln!("error: {message}");
        std::process::exit(1);
    }
}
