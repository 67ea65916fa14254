//! Command-line front end: ingest dumps, run analyses, emit plot-ready
//! reports. Outputs are deterministic for fixed inputs and thresholds,
//! whatever the shard count or input line order.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use threadstats::ingest::{corpus_stats, load_corpus, Corpus};
use threadstats::record::AnalysisWindow;
use threadstats::synth::SynthConfig;

use output::OutputSession;

#[derive(Parser)]
#[command(name = "threadstats", version, about = "Behavioral analytics over post/comment dumps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct InputArgs {
    /// Post dump, newline-delimited JSON (.gz accepted)
    #[arg(long)]
    posts: PathBuf,
    /// Comment dump, newline-delimited JSON (.gz accepted)
    #[arg(long)]
    comments: PathBuf,
    /// Analysis window start, UNIX seconds (inclusive)
    #[arg(long)]
    window_start: u64,
    /// Analysis window end, UNIX seconds (exclusive)
    #[arg(long)]
    window_end: u64,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Parallel ingestion shards
    #[arg(long, default_value_t = 4)]
    shards: usize,
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
pub struct CyborgFlags {
    /// First comment must arrive within this many seconds
    #[arg(long, default_value_t = 6)]
    pub cyborg_latency_max: i64,
    /// First comment must exceed this many characters
    #[arg(long, default_value_t = 100)]
    pub cyborg_min_chars: usize,
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
pub struct LifecycleFlags {
    /// A post is a mayfly when its age is at most this many seconds
    #[arg(long, default_value_t = 86_400)]
    pub mayfly_threshold: u64,
    /// Log-binning resolution for the age histogram
    #[arg(long, default_value_t = 20)]
    pub age_bins_per_decade: u32,
    /// Comment fraction defining the crossing time
    #[arg(long, default_value_t = 0.75)]
    pub bloom_fraction: f64,
    /// Early-bloomer boundary in seconds
    #[arg(long, default_value_t = 86_400)]
    pub bloom_early_secs: u64,
    /// Late-bloomer boundary in seconds
    #[arg(long, default_value_t = 2_592_000)]
    pub bloom_late_secs: u64,
    /// Minimum comments for lifecycle classification
    #[arg(long, default_value_t = 500)]
    pub bloom_min_comments: u64,
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
pub struct BurstinessFlags {
    /// Minimum posts for an author's posting series
    #[arg(long, default_value_t = 100)]
    pub posting_min_posts: u64,
    /// Minimum comments for an author's commenting series
    #[arg(long, default_value_t = 500)]
    pub commenting_min_comments: u64,
    /// Minimum comments for a post's arrival series
    #[arg(long, default_value_t = 500)]
    pub post_min_comments: u64,
    /// Bins for the burstiness histograms over [-1, 1]
    #[arg(long, default_value_t = 40)]
    pub b_hist_bins: usize,
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
pub struct ControversyFlags {
    /// A post is controversial when its deleted fraction strictly exceeds this
    #[arg(long, default_value_t = 0.2)]
    pub theta: f64,
    /// Minimum comments for scatter rows
    #[arg(long, default_value_t = 500)]
    pub min_comments: u64,
    /// Minimum scored posts for a subreddit row
    #[arg(long, default_value_t = 100)]
    pub min_subreddit_posts: u64,
    /// Author rows require strictly more posts than this
    #[arg(long, default_value_t = 50)]
    pub min_author_posts: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Basic corpus statistics
    Stats(InputArgs),
    /// Per-post discussion-tree metrics (depth, breadth, limelight)
    Tree(InputArgs),
    /// Age distribution, mayfly fraction, and evolution classes
    Lifecycle {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flags: LifecycleFlags,
    },
    /// Cyborg-like first-comment detection
    Cyborg {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flags: CyborgFlags,
    },
    /// Inter-event burstiness for authors and posts
    Burstiness {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flags: BurstinessFlags,
    },
    /// Author categories, interaction graph, and interaction scores
    Authors(InputArgs),
    /// Deletion-based controversiality scores
    Controversy {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flags: ControversyFlags,
    },
    /// Generate a seeded synthetic corpus with ground truth
    Synth {
        /// Generator config (JSON); omit for the built-in default plant
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every analysis
    All {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        lifecycle: LifecycleFlags,
        #[command(flatten)]
        cyborg: CyborgFlags,
        #[command(flatten)]
        burstiness: BurstinessFlags,
        #[command(flatten)]
        controversy: ControversyFlags,
    },
}

enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_window(input: &InputArgs) -> Result<AnalysisWindow, CliError> {
    AnalysisWindow::new(input.window_start, input.window_end)
        .map_err(|e| usage(e.to_string()))
}

fn validate_input(input: &InputArgs) -> Result<AnalysisWindow, CliError> {
    let window = parse_window(input)?;
    if input.shards == 0 {
        return Err(usage("--shards must be at least 1"));
    }
    for (flag, path) in [("--posts", &input.posts), ("--comments", &input.comments)] {
        if !path.exists() {
            return Err(usage(format!("{flag}: no such file: {}", path.display())));
        }
    }
    Ok(window)
}

fn load(input: &InputArgs, window: AnalysisWindow) -> Result<Corpus, CliError> {
    load_corpus(&input.posts, &input.comments, window, input.shards)
        .context("ingest dumps")
        .map_err(CliError::Runtime)
}

fn write_manifest(
    session: &mut OutputSession,
    command: &str,
    input: Option<&InputArgs>,
    thresholds: serde_json::Value,
    counts: serde_json::Value,
    started: Instant,
) -> anyhow::Result<()> {
    session.write_json(
        "run_manifest.json",
        &json!({
            "command": command,
            "input": input,
            "thresholds": thresholds,
            "counts": counts,
            "wall_time_secs": started.elapsed().as_secs_f64(),
        }),
    )
}

fn counts_of(corpus: &Corpus) -> serde_json::Value {
    serde_json::to_value(corpus_stats(corpus)).expect("stats serialize")
}

fn run(cli: Cli) -> Result<(), CliError> {
    let started = Instant::now();
    match cli.command {
        Command::Stats(input) => {
            let window = validate_input(&input)?;
            with_session(&input.out.clone(), |session| {
                let corpus = load(&input, window)?;
                commands::run_stats(&corpus, session)?;
                write_manifest(session, "stats", Some(&input), json!({}), counts_of(&corpus), started)?;
                Ok(())
            })
        }
        Command::Tree(input) => {
            let window = validate_input(&input)?;
            with_session(&input.out.clone(), |session| {
                let corpus = load(&input, window)?;
                commands::run_tree(&corpus, session)?;
                write_manifest(session, "tree", Some(&input), json!({}), counts_of(&corpus), started)?;
                Ok(())
            })
        }
        Command::Lifecycle { input, flags } => {
            let window = validate_input(&input)?;
            if !(flags.bloom_fraction > 0.0 && flags.bloom_fraction <= 1.0) {
                return Err(usage("--bloom-fraction must be in (0, 1]"));
            }
            if flags.age_bins_per_decade == 0 {
                return Err(usage("--age-bins-per-decade must be positive"));
            }
            with_session(&input.out.clone(), |session| {
                let corpus = load(&input, window)?;
                commands::run_lifecycle(&corpus, session, &flags)?;
                let thresholds = serde_json::to_value(flags).expect("flags");
                write_manifest(session, "lifecycle", Some(&input), thresholds, counts_of(&corpus), started)?;
                Ok(())
            })
        }
        Command::Cyborg { input, flags } => {
            let window = validate_input(&input)?;
            with_session(&input.out.clone(), |session| {
                let corpus = load(&input, window)?;
                commands::run_cyborg(&corpus, session, &flags)?;
                let thresholds = serde_json::to_value(flags).expect("flags");
                write_manifest(session, "cyborg", Some(&input), thresholds, counts_of(&corpus), started)?;
                Ok(())
            })
        }
        Command::Burstiness { input, flags } => {
            let window = validate_input(&input)?;
            if flags.b_hist_bins == 0 {
                return Err(usage("--b-hist-bins must be positive"));
            }
            with_session(&input.out.clone(), |session| {
                let corpus = load(&input, window)?;
                commands::run_burstiness(&corpus, session, &flags)?;
                let thresholds = serde_json::to_value(flags).expect("flags");
                write_manifest(session, "burstiness", Some(&input), thresholds, counts_of(&corpus), started)?;
                Ok(())
            })
        }
        Command::Authors(input) => {
            let window = validate_input(&input)?;
            with_session(&input.out.clone(), |session| {
                let corpus = load(&input, window)?;
                commands::run_authors(&corpus, session)?;
                write_manifest(session, "authors", Some(&input), json!({}), counts_of(&corpus), started)?;
                Ok(())
            })
        }
        Command::Controversy { input, flags } => {
            let window = validate_input(&input)?;
            if !(0.0..=1.0).contains(&flags.theta) {
                return Err(usage("--theta must be in [0, 1]"));
            }
            with_session(&input.out.clone(), |session| {
                let corpus = load(&input, window)?;
                commands::run_controversy(&corpus, session, &flags)?;
                let thresholds = serde_json::to_value(flags).expect("flags");
                write_manifest(session, "controversy", Some(&input), thresholds, counts_of(&corpus), started)?;
                Ok(())
            })
        }
        Command::Synth { config, out } => {
            let parsed: SynthConfig = match &config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("read {}", path.display()))
                        .map_err(CliError::Runtime)?;
                    serde_json::from_str(&text).map_err(|e| usage(format!("bad config: {e}")))?
                }
                None => SynthConfig::default(),
            };
            with_session(&out, |session| {
                let (n_posts, n_comments) = commands::run_synth(&parsed, session)
                    .map_err(|e| match e.downcast_ref::<threadstats::synth::SynthError>() {
                        Some(_) => usage(e.to_string()),
                        None => CliError::Runtime(e),
                    })?;
                session.write_json("synth_config.json", &parsed)?;
                write_manifest(
                    session,
                    "synth",
                    None,
                    json!({
                        "config": config.as_ref().map(|p| p.display().to_string()),
                        "seed": parsed.seed,
                    }),
                    json!({"n_posts": n_posts, "n_comments": n_comments}),
                    started,
                )?;
                Ok(())
            })
        }
        Command::All { input, lifecycle, cyborg, burstiness, controversy } => {
            let window = validate_input(&input)?;
            if !(lifecycle.bloom_fraction > 0.0 && lifecycle.bloom_fraction <= 1.0) {
                return Err(usage("--bloom-fraction must be in (0, 1]"));
            }
            if !(0.0..=1.0).contains(&controversy.theta) {
                return Err(usage("--theta must be in [0, 1]"));
            }
            with_session(&input.out.clone(), |session| {
                let corpus = load(&input, window)?;
                commands::run_stats(&corpus, session)?;
                commands::run_tree(&corpus, session)?;
                commands::run_lifecycle(&corpus, session, &lifecycle)?;
                commands::run_cyborg(&corpus, session, &cyborg)?;
                commands::run_burstiness(&corpus, session, &burstiness)?;
                commands::run_authors(&corpus, session)?;
                commands::run_controversy(&corpus, session, &controversy)?;
                let thresholds = json!({
                    "lifecycle": lifecycle,
                    "cyborg": cyborg,
                    "burstiness": burstiness,
                    "controversy": controversy,
                });
                write_manifest(session, "all", Some(&input), thresholds, counts_of(&corpus), started)?;
                Ok(())
            })
        }
    }
}

/// Run `body` against a fresh output session; on failure remove everything
/// the session wrote.
fn with_session<F>(dir: &std::path::Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut OutputSession) -> Result<(), CliError>,
{
    let mut session = OutputSession::create(dir).map_err(CliError::Runtime)?;
    match body(&mut session) {
        Ok(()) => Ok(()),
        Err(e) => {
            session.cleanup();
            Err(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
