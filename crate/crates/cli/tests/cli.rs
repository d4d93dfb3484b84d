mod common;

use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use chrono::{TimeZone, Utc};
use common::*;
use phoenix_cli::serve::{router, ServeState};
use phoenix_core::pipeline::read_records;
use phoenix_core::store::{story_id, DocStatus, DocumentStore, StoryDocument};
use phoenix_ingest::FixtureServer;

fn phoenix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phoenix")).args(args).output().expect("binary runs")
}

fn dict_args() -> Vec<String> {
    vec!["--dict-dir".into(), data_dir().display().to_string(), "--log-level".into(), "warn".into()]
}

fn phoenix_with_dicts(args: &[&str]) -> Output {
    let mut all: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    all.extend(dict_args());
    let refs: Vec<&str> = all.iter().map(String::as_str).collect();
    phoenix(&refs)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixture_store(dir: &Path) -> DocumentStore {
    let store = DocumentStore::open(dir).unwrap();
    fill_store(&store, &daily_stories()).unwrap();
    store
}

#[test]
fn no_args_prints_usage() {
    let out = phoenix(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage:"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = phoenix(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage:"));
}

#[test]
fn help_exits_zero() {
    let out = phoenix(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    for cmd in ["poll", "fetch", "import-parses", "code", "run-daily", "serve", "report", "validate-dicts"] {
        assert!(stdout(&out).contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn bad_log_level_is_usage_error() {
    let out = phoenix(&["validate-dicts", "--log-level", "info,=="]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_dicts_reports_versions() {
    let out = phoenix_with_dicts(&["validate-dicts"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("dictionary_version\ttoy-2014.06"));
    assert!(stdout(&out).contains("goldstein_version\tcameo-goldstein-toy-1"));
}

#[test]
fn validate_dicts_malformed_verb_file() {
    let dir = tempfile::tempdir().unwrap();
    let verbs = dir.path().join("verbs.txt");
    std::fs::write(&verbs, "# version: broken\nSAID;010\nDENOUNCED\n").unwrap();
    let out = phoenix_with_dicts(&["validate-dicts", "--verbs", verbs.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("verbs.txt:3:"), "{}", stderr(&out));
}

#[test]
fn validate_dicts_goldstein_coverage() {
    let dir = tempfile::tempdir().unwrap();
    let goldstein = dir.path().join("goldstein.tsv");
    let roots: String = (1..=20).map(|r| format!("{r:02}\t0.0\n")).collect();
    std::fs::write(&goldstein, format!("# version: roots-only\n{roots}")).unwrap();
    let out = phoenix_with_dicts(&["validate-dicts", "--goldstein", goldstein.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    std::fs::write(&goldstein, "# version: partial\n01\t0.0\n").unwrap();
    let out = phoenix_with_dicts(&["validate-dicts", "--goldstein", goldstein.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("goldstein table: no entry for root 02"), "{}", stderr(&out));
}

#[test]
fn run_daily_writes_records_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let store_dir = dir.path().join("store");
    fixture_store(&store_dir);
    let out_dir = dir.path().join("out");
    let out = phoenix_with_dicts(&[
        "run-daily",
        "--date",
        "2014-06-20",
        "--store",
        store_dir.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let records_path = out_dir.join("phoenix-events.20140620.tsv");
    let records = read_records(&read(&records_path)).unwrap();
    assert_eq!(records.len(), 6);
    let manifest = read(out_dir.join("phoenix-events.20140620.manifest.txt"));
    assert!(manifest.contains("input_story_count: 6"));
    assert!(manifest.contains("dedup: on"));
    assert!(stdout(&out).contains("phoenix-events.20140620.tsv"));

    let store = DocumentStore::open(&store_dir).unwrap();
    let id = story_id("http://wire-a.example/2014/06/20/aleppo").unwrap();
    assert_eq!(store.get(&id).unwrap().unwrap().status, DocStatus::Coded);

    let report = phoenix(&["report", "daily_counts", records_path.to_str().unwrap()]);
    assert_eq!(report.status.code(), Some(0));
    assert_eq!(stdout(&report), "date\tcount\n20140620\t6\n");
    let syr = phoenix(&["report", "entity_filter", "--entity", "SYR", records_path.to_str().unwrap()]);
    assert_eq!(syr.status.code(), Some(0));
    assert_eq!(stdout(&syr).lines().count(), 3, "{}", stdout(&syr));
}

#[test]
fn run_daily_without_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = phoenix_with_dicts(&["run-daily", "--date", "2014-06-20", "--store", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("2014-06-20"));
}

#[test]
fn run_daily_rejects_bad_date() {
    let out = phoenix_with_dicts(&["run-daily", "--date", "20-06-2014"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn report_unknown_kind_and_bad_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("x.tsv");
    std::fs::write(&file, "not a header\n").unwrap();
    assert_eq!(phoenix(&["report", "top_nothing", file.to_str().unwrap()]).status.code(), Some(1));
    let out = phoenix(&["report", "daily_counts", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}

#[test]
fn code_prints_records() {
    let out = phoenix_with_dicts(&[
        "code",
        fixture("acceptance/golden_trees.txt").to_str().unwrap(),
        "--date",
        "2014-06-20",
        "--no-dedup",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), read(fixture("acceptance/golden_expected.tsv")));
}

#[test]
fn import_parses_attaches_trees() {
    let dir = tempfile::tempdir().unwrap();
    let store = DocumentStore::open(dir.path()).unwrap();
    let url = "http://wire-a.example/story";
    let id = story_id(url).unwrap();
    store
        .store_document(&StoryDocument {
            story_id: id.clone(),
            url: url.into(),
            source_name: "wire-a".into(),
            title: "Obama denounces Russia".into(),
            body_text: "Obama denounced Russia.".into(),
            fetched_at: Utc.with_ymd_and_hms(2014, 6, 20, 8, 0, 0).unwrap(),
            parse_trees: None,
            status: DocStatus::Fetched,
            extra: Default::default(),
        })
        .unwrap();
    drop(store);
    let parses = dir.path().join("parses.txt");
    std::fs::write(
        &parses,
        format!("# story: {id}\n(ROOT (S (NP (NNP Obama)) (VP (VBD denounced) (NP (NNP Russia))) (. .)))\n\n# story: nope\n(ROOT (S (NP (NN x)) (VP (VBD y))))\n"),
    )
    .unwrap();
    let out = phoenix(&["import-parses", parses.to_str().unwrap(), "--store", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "updated\t1\nunknown\t1\nskipped\t0\n");
    let doc = DocumentStore::open(dir.path()).unwrap().get(&id).unwrap().unwrap();
    assert_eq!(doc.status, DocStatus::Parsed);
    assert_eq!(doc.parse_trees.unwrap().len(), 1);
}

#[test]
fn import_parses_rejects_malformed_tree() {
    let dir = tempfile::tempdir().unwrap();
    let parses = dir.path().join("parses.txt");
    std::fs::write(&parses, "# story: abc\n(ROOT (S (NP (NN x))\n").unwrap();
    let out = phoenix(&["import-parses", parses.to_str().unwrap(), "--store", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn poll_then_fetch_against_fixture_site() {
    let site = Path::new(env!("CARGO_MANIFEST_DIR")).join("../ingest/tests/fixtures/site");
    let server = FixtureServer::start(&site).await.unwrap();
    let dir = tempfile::tempdir().unwrap();
    let feeds = dir.path().join("feeds.tsv");
    std::fs::write(&feeds, read(site.join("feeds.tsv")).replace("{{base}}", server.base_url())).unwrap();
    let store = dir.path().join("store");
    let args: Vec<String> = ["--config", feeds.to_str().unwrap(), "--store", store.to_str().unwrap()]
        .into_iter()
        .chain(["--politeness-ms", "5", "--backoff-ms", "10", "--log-level", "warn"])
        .map(String::from)
        .collect();
    let run = |cmd: &'static str, args: Vec<String>| {
        tokio::task::spawn_blocking(move || {
            let mut all = vec![cmd.to_owned()];
            all.extend(args);
            Command::new(env!("CARGO_BIN_EXE_phoenix")).args(&all).output().unwrap()
        })
    };
    let out = run("poll", args.clone()).await.unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(summary["tasks"], 22);
    assert_eq!((summary["fetched"].as_u64(), summary["failed"].as_u64(), summary["duplicate"].as_u64()), (Some(16), Some(2), Some(4)));

    // nothing left pending, so fetch has no work
    let out = run("fetch", args).await.unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(summary["tasks"], 0);
}

#[tokio::test]
async fn serve_status_codes() {
    let state = Arc::new(ServeState { dicts: toy_dicts(), tables: toy_tables(false) });
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let server = tokio::spawn(async move { axum::serve(listener, router(state)).await });
    let client = reqwest::Client::new();
    let post = |body: &'static str| client.post(format!("http://{addr}/code")).body(body).send();

    let r = post(r#"{"date":"2014-13-40","trees":["(ROOT (S (NP (NNP Obama)) (VP (VBD said))))"]}"#).await.unwrap();
    assert_eq!(r.status().as_u16(), 422);
    let r = post("not json").await.unwrap();
    assert_eq!(r.status().as_u16(), 400);
    let r = post(r#"{"date":"2014-06-20","trees":["(ROOT (S (NP (PRP He)) (VP (VBD said))))"]}"#).await.unwrap();
    assert_eq!(r.status().as_u16(), 200);
    assert_eq!(r.text().await.unwrap(), r#"{"records":[]}"#);

    let health = client.get(format!("http://{addr}/health")).send().await.unwrap().text().await.unwrap();
    let health: serde_json::Value = serde_json::from_str(&health).unwrap();
    assert_eq!(health["status"], "ok");
    assert_eq!(health["dictionary_version"], "toy-2014.06");
    server.abort();
}
