use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use vocab_expander::{generate_fixture, FixtureSpec, SessionParams};
use vocab_expander_cli::{expand, load_models, read_seeds, ModelSpec};
use vocab_expander_service::{router, serve, AppState, SessionStore};

#[derive(Parser)]
#[command(
    name = "vocab-expander",
    version,
    about = "Interactive vocabulary expansion over word-embedding ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load models and serve the HTTP API.
    Serve(ServeArgs),
    /// Write a deterministic synthetic model in word2vec text format.
    Fixture(FixtureArgs),
    /// Expand a seed list non-interactively and print the ranking.
    Expand(ExpandArgs),
}

#[derive(Args)]
struct ScoringArgs {
    /// Model as id=path (word2vec text format); repeatable.
    #[arg(
        long = "model",
        env = "VOCAB_EXPANDER_MODELS",
        value_delimiter = ',',
        required = true
    )]
    models: Vec<ModelSpec>,
    /// Neighbours fetched per model for each accepted term.
    #[arg(long, env = "VOCAB_EXPANDER_K", default_value_t = vocab_expander::session::DEFAULT_K)]
    k: usize,
    /// Weight of the rejection penalty.
    #[arg(long, env = "VOCAB_EXPANDER_LAMBDA", default_value_t = vocab_expander::session::DEFAULT_LAMBDA)]
    lambda: f64,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    scoring: ScoringArgs,
    #[arg(long, env = "VOCAB_EXPANDER_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Persist every session here and restore them at startup.
    #[arg(long, env = "VOCAB_EXPANDER_SNAPSHOT_DIR")]
    snapshot_dir: Option<PathBuf>,
    /// Directory of the built web UI, served for non-API paths.
    #[arg(long, env = "VOCAB_EXPANDER_STATIC_DIR")]
    static_dir: Option<PathBuf>,
    /// Scores below this are flagged for dimming.
    #[arg(long, env = "VOCAB_EXPANDER_THRESHOLD", default_value_t = vocab_expander::session::DEFAULT_DISPLAY_THRESHOLD)]
    threshold: f64,
    #[arg(long, env = "VOCAB_EXPANDER_EDGE_THRESHOLD", default_value_t = vocab_expander::session::DEFAULT_GRAPH_EDGE_THRESHOLD)]
    edge_threshold: f64,
    #[arg(long, env = "VOCAB_EXPANDER_PER_ANCHOR", default_value_t = vocab_expander::session::DEFAULT_PER_ANCHOR_DISPLAY)]
    per_anchor: usize,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    dim: usize,
    #[arg(long, default_value_t = 5)]
    clusters: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    scoring: ScoringArgs,
    /// File with one seed term per line.
    #[arg(long)]
    seeds: PathBuf,
    /// Times to auto-accept the best suggestion before printing.
    #[arg(long, default_value_t = 0)]
    rounds: usize,
    #[arg(long, default_value_t = 20)]
    top_n: usize,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Serve(args) => cmd_serve(args),
        Command::Fixture(args) => cmd_fixture(args),
        Command::Expand(args) => cmd_expand(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_fixture(args: FixtureArgs) -> Result<()> {
    let spec = FixtureSpec::new(args.seed, args.n, args.dim, args.clusters);
    generate_fixture(&spec, &args.out)?;
    Ok(())
}

fn cmd_expand(args: ExpandArgs) -> Result<()> {
    let seeds = read_seeds(&args.seeds)?;
    let registry = load_models(&args.scoring.models)?;
    let params = SessionParams {
        k: args.scoring.k,
        lambda: args.scoring.lambda,
        ..SessionParams::with_models(registry.ids())
    };
    print!(
        "{}",
        expand(&registry, &seeds, params, args.rounds, args.top_n)?
    );
    Ok(())
}

fn cmd_serve(args: ServeArgs) -> Result<()> {
    let registry = Arc::new(load_models(&args.scoring.models)?);
    let defaults = SessionParams {
        k: args.scoring.k,
        lambda: args.scoring.lambda,
        display_threshold: args.threshold,
        graph_edge_threshold: args.edge_threshold,
        per_anchor_display: args.per_anchor,
        model_ids: registry.ids(),
    };
    defaults
        .validate()
        .context("invalid default session parameters")?;
    let store = match &args.snapshot_dir {
        Some(dir) => SessionStore::persistent(dir, &registry)?,
        None => SessionStore::in_memory(),
    };
    let state = Arc::new(AppState::new(registry, store, defaults));

    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(args.listen)
            .await
            .with_context(|| format!("cannot listen on {}", args.listen))?;
        log::info!("listening on http://{}", listener.local_addr()?);
        serve(listener, router(state, args.static_dir)).await?;
        Ok(())
    })
}
