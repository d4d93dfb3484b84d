//! Local HTTP server for ingestion tests. Serves files from a directory,
//! replacing `{{base}}` in text bodies with the server's base URL.
//!
//! An optional `script.tsv` in the directory scripts failures, one
//! `/path<TAB>rule` per line:
//! `fail:N` answers 503 to the first N requests, `always-fail` always
//! answers 500, `status:CODE` always answers CODE.

use std::collections::HashMap;
use std::io;
use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::State;
use axum::http::{header, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::Router;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    FailFirst(usize),
    AlwaysFail,
    Status(u16),
}

struct Shared {
    dir: PathBuf,
    base: String,
    script: HashMap<String, Rule>,
    hits: Mutex<HashMap<String, usize>>,
}

pub struct FixtureServer {
    addr: SocketAddr,
    shared: Arc<Shared>,
    shutdown: Option<oneshot::Sender<()>>,
    handle: Option<JoinHandle<()>>,
}

impl FixtureServer {
    /// Binds an ephemeral localhost port and serves `dir` on the current runtime.
    pub async fn start(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        let script = match std::fs::read_to_string(dir.join("script.tsv")) {
            Ok(text) => parse_script(&text)?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => HashMap::new(),
            Err(e) => return Err(e),
        };
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
        let addr = listener.local_addr()?;
        let shared = Arc::new(Shared { dir, base: format!("http://{addr}"), script, hits: Mutex::new(HashMap::new()) });
        let app = Router::new().fallback(serve_file).with_state(shared.clone());
        let (tx, rx) = oneshot::channel::<()>();
        let handle = tokio::spawn(async move {
            let _ = axum::serve(listener, app)
                .with_graceful_shutdown(async {
                    let _ = rx.await;
                })
                .await;
        });
        Ok(FixtureServer { addr, shared, shutdown: Some(tx), handle: Some(handle) })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> &str {
        &self.shared.base
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}/{}", self.shared.base, path.trim_start_matches('/'))
    }

    /// Requests seen for `path` since start or the last reset.
    pub fn hits(&self, path: &str) -> usize {
        let key = format!("/{}", path.trim_start_matches('/'));
        self.shared.hits.lock().unwrap().get(&key).copied().unwrap_or(0)
    }

    /// Forgets request counts, so scripted failures replay from the start.
    pub fn reset(&self) {
        self.shared.hits.lock().unwrap().clear();
    }

    pub async fn stop(mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(handle) = self.handle.take() {
            let _ = handle.await;
        }
    }
}

impl Drop for FixtureServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
    }
}

fn parse_script(text: &str) -> io::Result<HashMap<String, Rule>> {
    let bad = |line: usize, what: &str| io::Error::new(io::ErrorKind::InvalidData, format!("script.tsv line {line}: {what}"));
    let mut out = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (path, rule) = line.split_once('\t').ok_or_else(|| bad(idx + 1, "expected PATH<TAB>RULE"))?;
        let rule = match rule.trim() {
            "always-fail" => Rule::AlwaysFail,
            r => {
                if let Some(n) = r.strip_prefix("fail:") {
                    Rule::FailFirst(n.parse().map_err(|_| bad(idx + 1, "bad fail count"))?)
                } else if let Some(code) = r.strip_prefix("status:") {
                    let code: u16 = code.parse().map_err(|_| bad(idx + 1, "bad status"))?;
                    StatusCode::from_u16(code).map_err(|_| bad(idx + 1, "bad status"))?;
                    Rule::Status(code)
                } else {
                    return Err(bad(idx + 1, "unknown rule"));
                }
            }
        };
        out.insert(format!("/{}", path.trim().trim_start_matches('/')), rule);
    }
    Ok(out)
}

async fn serve_file(State(shared): State<Arc<Shared>>, uri: Uri) -> Response {
    let path = uri.path().to_owned();
    let hit = {
        let mut hits = shared.hits.lock().unwrap();
        let n = hits.entry(path.clone()).or_default();
        *n += 1;
        *n
    };
    match shared.script.get(&path) {
        Some(Rule::FailFirst(n)) if hit <= *n => return StatusCode::SERVICE_UNAVAILABLE.into_response(),
        Some(Rule::AlwaysFail) => return StatusCode::INTERNAL_SERVER_ERROR.into_response(),
        Some(Rule::Status(code)) => {
            return StatusCode::from_u16(*code).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR).into_response()
        }
        _ => {}
    }
    let Some(file) = resolve(&shared.dir, &path) else {
        return StatusCode::NOT_FOUND.into_response();
    };
    match tokio::fs::read_to_string(&file).await {
        Ok(body) => {
            let body = body.replace("{{base}}", &shared.base);
            ([(header::CONTENT_TYPE, content_type(&file))], body).into_response()
        }
        Err(_) => StatusCode::NOT_FOUND.into_response(),
    }
}

/// Maps a request path into `dir`, refusing anything that climbs out.
fn resolve(dir: &Path, path: &str) -> Option<PathBuf> {
    let rel = Path::new(path.trim_start_matches('/'));
    if rel.as_os_str().is_empty() || !rel.components().all(|c| matches!(c, Component::Normal(_))) {
        return None;
    }
    Some(dir.join(rel))
}

fn content_type(file: &Path) -> &'static str {
    match file.extension().and_then(|e| e.to_str()) {
        Some("xml" | "rss") => "application/rss+xml; charset=utf-8",
        Some("html" | "htm") => "text/html; charset=utf-8",
        _ => "text/plain; charset=utf-8",
    }
}
