//! The `phoenix` command line. Exit status: 0 on success, 1 on usage
//! errors, 2 when a command fails at runtime.

pub mod serve;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use chrono::{NaiveDate, TimeZone, Utc};
use clap::{Args, Parser, Subcommand};
use phoenix_core::coder::code_story;
use phoenix_core::dictionaries::{DictionaryPaths, DictionarySet};
use phoenix_core::enrich::{enrich_story, EnrichTables, Gazetteer, GoldsteinTable};
use phoenix_core::pipeline::{
    assign_event_ids, load_records_files, one_a_day, report, run_daily, write_records, DailyOptions, EventRecord,
    ReportKind, ReportOptions, DEFAULT_TOP_N,
};
use phoenix_core::store::{import_parses, DocStatus, DocumentStore, StoryDocument, SystemClock};
use phoenix_core::treebank::{parse_batch, serialize, ParseTree};
use phoenix_core::{load_dictionaries, quad_class};
use phoenix_ingest::{http_client, poll_feeds, run_workers, FeedConfig, FetchTask, IngestReport, WorkerConfig};
use serde::Serialize;
use thiserror::Error;
use tracing::{info, warn};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "phoenix", version, about = "Political event-data pipeline", arg_required_else_help = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Feed list: `name<TAB>url<TAB>lang` per line.
    #[arg(long, global = true, default_value = "feeds.tsv")]
    pub config: PathBuf,
    /// Document store directory.
    #[arg(long, global = true, default_value = "phoenix-store")]
    pub store: PathBuf,
    /// Directory holding actors.txt, verbs.txt, issues.txt, codesets.txt and goldstein.tsv.
    #[arg(long, global = true, default_value = "dictionaries")]
    pub dict_dir: PathBuf,
    #[arg(long, global = true)]
    pub actors: Option<PathBuf>,
    #[arg(long, global = true)]
    pub verbs: Option<PathBuf>,
    #[arg(long, global = true)]
    pub issues: Option<PathBuf>,
    #[arg(long, global = true)]
    pub codesets: Option<PathBuf>,
    #[arg(long, global = true)]
    pub goldstein: Option<PathBuf>,
    /// Place gazetteer; geolocation is off without one.
    #[arg(long, global = true)]
    pub gazetteer: Option<PathBuf>,
    /// Log filter, e.g. `info` or `phoenix_ingest=debug`.
    #[arg(long, global = true, default_value = "info")]
    pub log_level: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Poll the feeds and fetch newly discovered articles.
    Poll {
        #[command(flatten)]
        workers: WorkerArgs,
        /// Keep polling at the feed list's interval until interrupted.
        #[arg(long)]
        watch: bool,
    },
    /// Fetch links discovered earlier but never stored.
    Fetch {
        #[command(flatten)]
        workers: WorkerArgs,
    },
    /// Attach parse trees (`# story: <id>` blocks) to stored stories.
    ImportParses { file: PathBuf },
    /// Code a batch of parse trees and print event records.
    Code {
        /// One tree per line, blank line between stories.
        file: PathBuf,
        #[arg(long)]
        date: NaiveDate,
        #[arg(long)]
        no_dedup: bool,
        /// Write records here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Code, enrich and filter one day's stories into a records file.
    RunDaily {
        #[arg(long)]
        date: NaiveDate,
        #[arg(long)]
        no_dedup: bool,
        /// Output directory; defaults to `<store>/output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve `POST /code` and `GET /health`.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8000")]
        addr: SocketAddr,
    },
    /// Summarize records files.
    Report {
        kind: ReportKind,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOP_N)]
        top: usize,
        /// Actor code prefix for `entity_filter`.
        #[arg(long)]
        entity: Option<String>,
    },
    /// Load the dictionaries and tables and check they agree.
    ValidateDicts,
}

#[derive(Debug, Clone, Args)]
pub struct WorkerArgs {
    #[arg(long, default_value_t = 4)]
    pub pool_size: usize,
    /// Total tries per article.
    #[arg(long, default_value_t = 3)]
    pub max_attempts: u32,
    #[arg(long, default_value_t = 30)]
    pub timeout_secs: u64,
    #[arg(long, default_value_t = 500)]
    pub backoff_ms: u64,
    /// Minimum gap between requests to one host.
    #[arg(long, default_value_t = 2000)]
    pub politeness_ms: u64,
}

impl WorkerArgs {
    fn config(&self) -> WorkerConfig {
        WorkerConfig {
            pool_size: self.pool_size,
            max_attempts: self.max_attempts,
            timeout: Duration::from_secs(self.timeout_secs),
            backoff_base: Duration::from_millis(self.backoff_ms),
            politeness: Duration::from_millis(self.politeness_ms),
            ..Default::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Dictionary(#[from] phoenix_core::DictionaryError),
    #[error("{path}: {message}")]
    Table { path: PathBuf, message: String },
    #[error(transparent)]
    Store(#[from] phoenix_core::store::StoreError),
    #[error(transparent)]
    Import(#[from] phoenix_core::store::ImportError),
    #[error(transparent)]
    FeedConfig(#[from] phoenix_ingest::FeedConfigError),
    #[error(transparent)]
    Worker(#[from] phoenix_ingest::WorkerError),
    #[error("HTTP client: {0}")]
    Http(String),
    #[error(transparent)]
    Daily(#[from] phoenix_core::pipeline::DailyError),
    #[error(transparent)]
    Report(#[from] phoenix_core::pipeline::ReportError),
    #[error("{0}")]
    Invalid(String),
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(message) = init_logging(&cli.global.log_level) {
        eprintln!("error: {message}");
        return EXIT_USAGE;
    }
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn init_logging(level: &str) -> Result<(), String> {
    let filter = tracing_subscriber::EnvFilter::try_new(level).map_err(|e| format!("invalid --log-level: {e}"))?;
    // A second init in one process (tests) keeps the first subscriber.
    let _ = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).try_init();
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Poll { workers, watch } => runtime()?.block_on(poll(g, workers, *watch)),
        Command::Fetch { workers } => runtime()?.block_on(fetch_pending(g, workers)),
        Command::ImportParses { file } => {
            let store = DocumentStore::open(&g.store)?;
            let report = import_parses(&store, &read(file)?)?;
            for id in &report.unknown {
                warn!(story = %id, "no such story");
            }
            println!("updated\t{}\nunknown\t{}\nskipped\t{}", report.updated, report.unknown.len(), report.skipped.len());
            Ok(())
        }
        Command::Code { file, date, no_dedup, out } => {
            let (dicts, tables) = load_tables(g)?;
            let records = code_batch(&read(file)?, *date, !no_dedup, &dicts, &tables)?;
            let mut body = Vec::new();
            write_records(&mut body, &records).expect("writing to memory");
            match out {
                Some(path) => std::fs::write(path, body).map_err(|source| CliError::Io { path: path.clone(), source }),
                None => std::io::stdout().write_all(&body).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
            }
        }
        Command::RunDaily { date, no_dedup, out } => {
            let (dicts, tables) = load_tables(g)?;
            let store = DocumentStore::open(&g.store)?;
            let mut options = DailyOptions::new(out.clone().unwrap_or_else(|| g.store.join("output")));
            options.dedup = !no_dedup;
            let output = run_daily(*date, &store, &dicts, &tables, &options)?;
            println!("{}", output.records_path.display());
            println!("{}", output.manifest_path.display());
            Ok(())
        }
        Command::Serve { addr } => {
            let (dicts, tables) = load_tables(g)?;
            let state = Arc::new(serve::ServeState { dicts, tables });
            runtime()?
                .block_on(serve::serve(state, *addr, async {
                    let _ = tokio::signal::ctrl_c().await;
                }))
                .map_err(|source| CliError::Io { path: addr.to_string().into(), source })
        }
        Command::Report { kind, files, top, entity } => {
            let records = load_records_files(files)?;
            let options = ReportOptions { top_n: *top, entity: entity.clone() };
            print!("{}", report(&records, *kind, &options)?);
            Ok(())
        }
        Command::ValidateDicts => {
            let (dicts, tables) = load_tables(g)?;
            let problems = check_tables(&dicts, &tables);
            println!("dictionary_version\t{}", dicts.version());
            println!("goldstein_version\t{}", tables.goldstein.version());
            println!("actors\t{}", dicts.actors().len());
            println!("verbs\t{}", dicts.verbs().len());
            println!("issues\t{}", dicts.issues().len());
            if let Some(gaz) = &tables.gazetteer {
                println!("places\t{}", gaz.len());
            }
            if problems.is_empty() {
                Ok(())
            } else {
                for p in &problems {
                    eprintln!("{p}");
                }
                Err(CliError::Invalid(format!("{} verb code(s) cannot be enriched", problems.len())))
            }
        }
    }
}

fn runtime() -> Result<tokio::runtime::Runtime, CliError> {
    tokio::runtime::Runtime::new().map_err(|source| CliError::Io { path: "<runtime>".into(), source })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Loads the four dictionaries, the Goldstein table and, if named, the gazetteer.
pub fn load_tables(g: &GlobalArgs) -> Result<(DictionarySet, EnrichTables), CliError> {
    let pick = |over: &Option<PathBuf>, name: &str| over.clone().unwrap_or_else(|| g.dict_dir.join(name));
    let (actors, verbs, issues, code_sets) = (
        pick(&g.actors, "actors.txt"),
        pick(&g.verbs, "verbs.txt"),
        pick(&g.issues, "issues.txt"),
        pick(&g.codesets, "codesets.txt"),
    );
    let dicts = load_dictionaries(&DictionaryPaths {
        actors: &actors,
        verbs: &verbs,
        issues: &issues,
        code_sets: &code_sets,
    })?;
    let goldstein_path = pick(&g.goldstein, "goldstein.tsv");
    let goldstein = GoldsteinTable::parse(&read(&goldstein_path)?)
        .map_err(|e| CliError::Table { path: goldstein_path, message: e.to_string() })?;
    let mut tables = EnrichTables::new(goldstein);
    if let Some(path) = &g.gazetteer {
        let gazetteer =
            Gazetteer::parse(&read(path)?).map_err(|e| CliError::Table { path: path.clone(), message: e.to_string() })?;
        tables = tables.with_gazetteer(gazetteer);
    }
    Ok((dicts, tables))
}

/// Verb and composed codes without a Goldstein value or QuadClass.
pub fn check_tables(dicts: &DictionarySet, tables: &EnrichTables) -> Vec<String> {
    let mut codes: Vec<String> = Vec::new();
    for verb in dicts.verbs() {
        codes.push(verb.code.to_string());
        codes.extend(verb.composition_rules.iter().map(|(_, c)| c.to_string()));
    }
    codes.sort();
    codes.dedup();
    let mut problems = Vec::new();
    for code in codes {
        if let Err(e) = tables.goldstein.goldstein(&code) {
            problems.push(format!("{code}: {e}"));
        }
        if let Err(e) = quad_class(&code[..2]) {
            problems.push(format!("{code}: {e}"));
        }
    }
    problems
}

/// A parse-only story for trees that did not come from the store.
pub fn story_from_trees(trees: &[ParseTree], date: NaiveDate, story_id: &str) -> StoryDocument {
    StoryDocument {
        story_id: story_id.to_owned(),
        url: String::new(),
        source_name: String::new(),
        title: String::new(),
        body_text: trees.iter().map(ParseTree::sentence_text).collect::<Vec<_>>().join(" "),
        fetched_at: Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).expect("midnight")),
        parse_trees: Some(trees.iter().map(serialize).collect()),
        status: DocStatus::Parsed,
        extra: BTreeMap::new(),
    }
}

/// Codes a batch file as one story per blank-line separated block.
pub fn code_batch(
    text: &str,
    date: NaiveDate,
    dedup: bool,
    dicts: &DictionarySet,
    tables: &EnrichTables,
) -> Result<Vec<EventRecord>, CliError> {
    let stories = parse_batch(text).map_err(|(line, e)| CliError::Invalid(format!("line {line}: {e}")))?;
    let mut records = Vec::new();
    for (i, trees) in stories.iter().enumerate() {
        let doc = story_from_trees(trees, date, &format!("batch-{:04}", i + 1));
        let events = code_story(&doc, dicts).map_err(|e| CliError::Invalid(e.to_string()))?;
        records.extend(
            enrich_story(&events, &doc, dicts, tables).map_err(|e| CliError::Invalid(format!("{}: {e}", doc.story_id)))?,
        );
    }
    assign_event_ids(&mut records, date);
    if dedup {
        records = one_a_day(records);
    }
    Ok(records)
}

#[derive(Debug, Serialize)]
struct CycleSummary {
    tasks: usize,
    feed_errors: Vec<String>,
    fetched: usize,
    failed: usize,
    duplicate: usize,
}

async fn poll(g: &GlobalArgs, workers: &WorkerArgs, watch: bool) -> Result<(), CliError> {
    let feeds = FeedConfig::parse(&read(&g.config)?)?;
    let store = DocumentStore::open(&g.store)?;
    let config = workers.config();
    let client = http_client(&config).map_err(|e| CliError::Http(e.to_string()))?;
    loop {
        let polled = poll_feeds(&feeds, store.links(), &client, &SystemClock).await?;
        let feed_errors: Vec<String> = polled.errors.iter().map(ToString::to_string).collect();
        let tasks = polled.tasks.len();
        let report = run_workers(polled.tasks, &config, &store, &client, &SystemClock).await?;
        print_summary(tasks, feed_errors, &report);
        if !watch {
            return Ok(());
        }
        info!(seconds = feeds.poll_interval.as_secs(), "waiting for next poll");
        tokio::select! {
            _ = tokio::time::sleep(feeds.poll_interval) => {}
            _ = tokio::signal::ctrl_c() => return Ok(()),
        }
    }
}

async fn fetch_pending(g: &GlobalArgs, workers: &WorkerArgs) -> Result<(), CliError> {
    let store = DocumentStore::open(&g.store)?;
    let config = workers.config();
    let client = http_client(&config).map_err(|e| CliError::Http(e.to_string()))?;
    let tasks: Vec<FetchTask> = store
        .links()
        .pending(&store)
        .into_iter()
        .map(|r| FetchTask { url: r.link, source_name: r.source, enqueued_at: r.at, attempts: 0 })
        .collect();
    let count = tasks.len();
    let report = run_workers(tasks, &config, &store, &client, &SystemClock).await?;
    print_summary(count, Vec::new(), &report);
    Ok(())
}

fn print_summary(tasks: usize, feed_errors: Vec<String>, report: &IngestReport) {
    let summary = CycleSummary {
        tasks,
        feed_errors,
        fetched: report.fetched,
        failed: report.failed,
        duplicate: report.duplicate,
    };
    println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
}
