//! Command-line front end: one subcommand per pipeline stage, a `run`
//! convenience that executes every stage in order, and a `mock-archive`
//! server for offline end-to-end runs.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use policyscope::archive::{load_captures_jsonl, MockArchive, MockOptions};
use policyscope::config::Config;
use policyscope::pipeline::{run_stage, Stage, StageContext};

#[derive(Parser)]
#[command(
    name = "policyscope",
    version,
    about = "Build and analyze a longitudinal corpus of archived privacy policies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the target list and select homepage snapshots per interval
    Discover(StageArgs),
    /// Download homepage captures and follow their policy links
    Fetch(StageArgs),
    /// Convert fetched policy pages into markdown documents
    Extract(StageArgs),
    /// Train the policy classifier on labeled documents
    Train(StageArgs),
    /// Score extracted documents and confirm true policies
    Classify(StageArgs),
    /// Remove parked, off-domain, and duplicate policies
    Curate(StageArgs),
    /// Compute longitudinal statistics over the curated corpus
    Analyze(StageArgs),
    /// Write the CSV report bundle
    Report(StageArgs),
    /// Run every stage in pipeline order
    Run(StageArgs),
    /// Serve capture fixtures over HTTP for offline runs
    MockArchive(MockArchiveArgs),
}

#[derive(Args)]
struct StageArgs {
    /// Configuration file; built-in defaults apply when omitted
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Permit a non-local archive endpoint
    #[arg(long)]
    live: bool,
    /// Override the configured random seed
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Override the configured corpus directory
    #[arg(long, value_name = "DIR")]
    corpus: Option<PathBuf>,
}

#[derive(Args)]
struct MockArchiveArgs {
    /// Capture fixtures, one JSON object per line
    #[arg(long, value_name = "PATH")]
    captures: PathBuf,
    /// Listen address; port 0 picks a free port
    #[arg(long, value_name = "ADDR", default_value = "127.0.0.1:0")]
    addr: String,
    /// Answer 429 to the first N capture requests
    #[arg(long, value_name = "N", default_value_t = 0)]
    rate_limit_first: usize,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Discover(args) => run_stages(&[Stage::Discover], &args),
        Command::Fetch(args) => run_stages(&[Stage::Fetch], &args),
        Command::Extract(args) => run_stages(&[Stage::Extract], &args),
        Command::Train(args) => run_stages(&[Stage::Train], &args),
        Command::Classify(args) => run_stages(&[Stage::Classify], &args),
        Command::Curate(args) => run_stages(&[Stage::Curate], &args),
        Command::Analyze(args) => run_stages(&[Stage::Analyze], &args),
        Command::Report(args) => run_stages(&[Stage::Report], &args),
        Command::Run(args) => run_stages(&Stage::ALL, &args),
        Command::MockArchive(args) => serve_mock(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run_stages(stages: &[Stage], args: &StageArgs) -> anyhow::Result<()> {
    let ctx = build_context(args)?;
    for &stage in stages {
        let summary =
            run_stage(stage, &ctx).with_context(|| format!("stage `{stage}` failed"))?;
        println!("{summary}");
    }
    Ok(())
}

fn build_context(args: &StageArgs) -> anyhow::Result<StageContext> {
    let mut config = match &args.config {
        Some(path) => Config::from_file(path)
            .with_context(|| format!("loading config {}", path.display()))?,
        None => Config::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(corpus) = &args.corpus {
        config.corpus_dir = corpus.clone();
    }
    let mut ctx = StageContext::new(config);
    ctx.live = args.live;
    Ok(ctx)
}

/// Prints the endpoint URL as the first stdout line, then serves until
/// killed. Scripts read that line to configure `archive_endpoint`.
fn serve_mock(args: &MockArchiveArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.captures)
        .with_context(|| format!("reading {}", args.captures.display()))?;
    let captures = load_captures_jsonl(&text)?;
    let count = captures.len();
    let options = MockOptions {
        rate_limit_first_hits: args.rate_limit_first,
        ..MockOptions::default()
    };
    let server = MockArchive::bind(&args.addr, captures, options)
        .with_context(|| format!("binding {}", args.addr))?;
    println!("{}", server.endpoint());
    std::io::stdout().flush().ok();
    log::info!("serving {count} captures on {}", server.authority());
    loop {
        std::thread::park();
    }
}
