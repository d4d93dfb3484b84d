use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Duration;

use futures::stream::{self, StreamExt};
use phoenix_core::store::{story_id, Clock, DocStatus, DocumentStore, StoryDocument};
use serde::Serialize;
use thiserror::Error;
use tokio::sync::Mutex;
use tokio::time::Instant;
use tracing::{debug, warn};
use url::Url;

use crate::extract::extract_content;
use crate::feeds::FetchTask;

#[derive(Debug, Clone)]
pub struct WorkerConfig {
    pub pool_size: usize,
    /// Per-request timeout, applied by the client from [`http_client`].
    pub timeout: Duration,
    /// Total tries per task, the first included.
    pub max_attempts: u32,
    /// Delay before the second try; doubles for each further try.
    pub backoff_base: Duration,
    /// Minimum gap between requests to one host.
    pub politeness: Duration,
    pub user_agent: String,
}

impl Default for WorkerConfig {
    fn default() -> Self {
        WorkerConfig {
            pool_size: 4,
            timeout: Duration::from_secs(30),
            max_attempts: 3,
            backoff_base: Duration::from_millis(500),
            politeness: Duration::from_secs(2),
            user_agent: concat!("phoenix-ingest/", env!("CARGO_PKG_VERSION")).to_owned(),
        }
    }
}

pub fn http_client(config: &WorkerConfig) -> reqwest::Result<reqwest::Client> {
    reqwest::Client::builder().user_agent(&config.user_agent).timeout(config.timeout).build()
}

#[derive(Debug, Error)]
pub enum WorkerError {
    #[error("pool size must be at least 1")]
    PoolSize,
    #[error("max attempts must be at least 1")]
    MaxAttempts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Fetched,
    Failed,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskOutcome {
    pub url: String,
    pub source_name: String,
    pub story_id: Option<String>,
    pub status: TaskStatus,
    pub attempts: u32,
    pub error: Option<String>,
}

/// Per-task outcomes in task order, plus totals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub fetched: usize,
    pub failed: usize,
    pub duplicate: usize,
    pub outcomes: Vec<TaskOutcome>,
}

impl IngestReport {
    fn from_outcomes(outcomes: Vec<TaskOutcome>) -> Self {
        let count = |s| outcomes.iter().filter(|o| o.status == s).count();
        IngestReport {
            fetched: count(TaskStatus::Fetched),
            failed: count(TaskStatus::Failed),
            duplicate: count(TaskStatus::Duplicate),
            outcomes,
        }
    }
}

/// Fetches every task with `pool_size` requests in flight. Tasks whose
/// story id is already stored, or appeared earlier in `tasks`, are counted
/// as duplicates without a request, so the result does not depend on the
/// pool size. Failures are reported, never raised.
pub async fn run_workers(
    tasks: Vec<FetchTask>,
    config: &WorkerConfig,
    store: &DocumentStore,
    client: &reqwest::Client,
    clock: &dyn Clock,
) -> Result<IngestReport, WorkerError> {
    if config.pool_size == 0 {
        return Err(WorkerError::PoolSize);
    }
    if config.max_attempts == 0 {
        return Err(WorkerError::MaxAttempts);
    }
    let mut outcomes: Vec<Option<TaskOutcome>> = vec![None; tasks.len()];
    let mut to_fetch = Vec::new();
    let mut claimed = HashSet::new();
    for (i, task) in tasks.into_iter().enumerate() {
        let outcome = |story_id: Option<String>, status, error: Option<String>| TaskOutcome {
            url: task.url.clone(),
            source_name: task.source_name.clone(),
            story_id,
            status,
            attempts: 0,
            error,
        };
        match story_id(&task.url) {
            Err(e) => outcomes[i] = Some(outcome(None, TaskStatus::Failed, Some(format!("bad URL: {e}")))),
            Ok(id) if store.contains(&id) || !claimed.insert(id.clone()) => {
                outcomes[i] = Some(outcome(Some(id), TaskStatus::Duplicate, None));
            }
            Ok(id) => to_fetch.push((i, id, task)),
        }
    }

    let polite = Politeness::new(config.politeness);
    let results: Vec<(usize, TaskOutcome)> = stream::iter(to_fetch)
        .map(|(i, id, task)| {
            let polite = &polite;
            async move { (i, fetch_task(task, id, config, store, client, clock, polite).await) }
        })
        .buffer_unordered(config.pool_size)
        .collect()
        .await;
    for (i, outcome) in results {
        outcomes[i] = Some(outcome);
    }
    let outcomes: Vec<TaskOutcome> = outcomes.into_iter().map(|o| o.expect("every task has an outcome")).collect();
    for o in outcomes.iter().filter(|o| o.status == TaskStatus::Failed) {
        if let Err(e) = store.links().mark_failed(&o.url, clock.now()) {
            warn!(url = %o.url, error = %e, "could not record failed link");
        }
    }
    Ok(IngestReport::from_outcomes(outcomes))
}

struct Politeness {
    gap: Duration,
    next_slot: Mutex<HashMap<String, Instant>>,
}

impl Politeness {
    fn new(gap: Duration) -> Self {
        Politeness { gap, next_slot: Mutex::new(HashMap::new()) }
    }

    /// Reserves the host's next request slot and sleeps until it.
    async fn wait(&self, host: &str) {
        if self.gap.is_zero() {
            return;
        }
        let at = {
            let mut slots = self.next_slot.lock().await;
            let now = Instant::now();
            let at = slots.get(host).copied().filter(|t| *t > now).unwrap_or(now);
            slots.insert(host.to_owned(), at + self.gap);
            at
        };
        tokio::time::sleep_until(at).await;
    }
}

struct FetchError {
    message: String,
    retryable: bool,
}

async fn fetch_task(
    task: FetchTask,
    id: String,
    config: &WorkerConfig,
    store: &DocumentStore,
    client: &reqwest::Client,
    clock: &dyn Clock,
    polite: &Politeness,
) -> TaskOutcome {
    let host = Url::parse(&task.url).ok().and_then(|u| u.host_str().map(str::to_owned)).unwrap_or_default();
    let mut attempts = task.attempts;
    let mut delay = config.backoff_base;
    let fetched = loop {
        attempts += 1;
        polite.wait(&host).await;
        match get(client, &task.url).await {
            Ok(body) => break Ok(body),
            Err(e) if e.retryable && attempts < config.max_attempts => {
                debug!(url = %task.url, attempts, error = %e.message, "retrying");
                tokio::time::sleep(delay).await;
                delay = delay.saturating_mul(2);
            }
            Err(e) => break Err(e.message),
        }
    };
    let mut outcome = TaskOutcome {
        url: task.url.clone(),
        source_name: task.source_name.clone(),
        story_id: Some(id.clone()),
        status: TaskStatus::Failed,
        attempts,
        error: None,
    };
    let html = match fetched {
        Ok(html) => html,
        Err(message) => {
            warn!(url = %task.url, attempts, error = %message, "fetch failed");
            outcome.error = Some(message);
            return outcome;
        }
    };
    let extracted = match extract_content(&html) {
        Ok(x) => x,
        Err(e) => {
            outcome.error = Some(e.to_string());
            return outcome;
        }
    };
    let doc = StoryDocument {
        story_id: id,
        url: task.url,
        source_name: task.source_name,
        title: extracted.title,
        body_text: extracted.body_text,
        fetched_at: clock.now(),
        parse_trees: None,
        status: DocStatus::Fetched,
        extra: BTreeMap::new(),
    };
    match store.insert_new(&doc) {
        Ok(true) => outcome.status = TaskStatus::Fetched,
        Ok(false) => outcome.status = TaskStatus::Duplicate,
        Err(e) => outcome.error = Some(e.to_string()),
    }
    outcome
}

async fn get(client: &reqwest::Client, url: &str) -> Result<String, FetchError> {
    let response = client.get(url).send().await.map_err(|e| FetchError { message: e.to_string(), retryable: true })?;
    let status = response.status();
    if !status.is_success() {
        let retryable = status.is_server_error() || status.as_u16() == 429 || status.as_u16() == 408;
        return Err(FetchError { message: format!("HTTP {status}"), retryable });
    }
    response.text().await.map_err(|e| FetchError { message: e.to_string(), retryable: true })
}
