use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pseudomine::config::PipelineConfig;
use pseudomine::pipeline::{self, Stage};

/// Batch toolchain for mining pseudocode from scholarly-paper source bundles.
#[derive(Parser)]
#[command(name = "pseudomine", version, about)]
struct Cli {
    /// Pipeline configuration file (TOML); defaults apply when omitted.
    #[arg(long, global = true, env = "PSEUDOMINE_CONFIG")]
    config: Option<PathBuf>,

    /// Overrides both the clustering and the sampling seed.
    #[arg(long, global = true, env = "PSEUDOMINE_SEED")]
    seed: Option<u64>,

    /// Worker threads for per-paper stages.
    #[arg(long, global = true, env = "PSEUDOMINE_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Unpack archives and pair papers into bundles; writes the manifest.
    Ingest,
    /// Tag search per paper plus indicative-keyword hits in PDF text.
    Detect,
    /// Extract algorithm environments into JSON records.
    Extract,
    /// Locate cross-references and attach trimmed snippets to records.
    Refs,
    /// Strip LaTeX from snippets into a plain-prose corpus.
    Clean,
    /// Fit one topic model per eligible year and emit the topic table.
    Cluster,
    /// Corpus statistics reports (totals, yearly series, categories).
    Stats,
    /// Draw a uniform sample of identifiers for manual labeling.
    Sample,
    /// Score detection against human labels (FPR/FNR and keyword crosscheck).
    Validate,
    /// Run the full pipeline in order.
    All,
}

impl Command {
    fn stage(&self) -> Stage {
        match self {
            Command::Ingest => Stage::Ingest,
            Command::Detect => Stage::Detect,
            Command::Extract => Stage::Extract,
            Command::Refs => Stage::Refs,
            Command::Clean => Stage::Clean,
            Command::Cluster => Stage::Cluster,
            Command::Stats => Stage::Stats,
            Command::Sample => Stage::Sample,
            Command::Validate => Stage::Validate,
            Command::All => Stage::All,
        }
    }
}

fn error_summary(stage: &str, error: &dyn std::fmt::Display) -> String {
    serde_json::json!({ "stage": stage, "error": error.to_string() }).to_string()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let stage = cli.command.stage();

    let mut config = match &cli.config {
        Some(path) => match PipelineConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{}", error_summary("config", &e));
                return ExitCode::from(2);
            }
        },
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.lda.seed = seed;
        config.sampling.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        config.run.jobs = jobs;
    }
    if let Err(e) = config.validate() {
        eprintln!("{}", error_summary("config", &e));
        return ExitCode::from(2);
    }

    match pipeline::run(stage, &config) {
        Ok(outcomes) => {
            let mut failed_papers = 0usize;
            for outcome in &outcomes {
                println!("{}: {}", outcome.stage, outcome.summary);
                for issue in &outcome.paper_errors {
                    log::error!("{}: {}", issue.arxiv_id, issue.message);
                    failed_papers += 1;
                }
            }
            if failed_papers > 0 {
                eprintln!(
                    "{}",
                    error_summary(
                        stage.name(),
                        &format!("{failed_papers} papers failed; see errors.json")
                    )
                );
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{}", error_summary(stage.name(), &e));
            ExitCode::from(1)
        }
    }
}
