use std::collections::HashSet;
use std::time::Duration;

use chrono::{DateTime, Utc};
use phoenix_core::store::{Clock, LinkStore, StoreError};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::{info, warn};
use url::Url;

pub const DEFAULT_POLL_INTERVAL: Duration = Duration::from_secs(3600);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedEntry {
    pub source_name: String,
    pub feed_url: Url,
    pub language: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedConfig {
    pub entries: Vec<FeedEntry>,
    pub poll_interval: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("feed list line {line}: {reason}")]
pub struct FeedConfigError {
    pub line: usize,
    pub reason: String,
}

impl FeedConfig {
    /// Lines `source_name<TAB>feed_url<TAB>lang`. A `# poll_interval: <secs>`
    /// comment overrides the hourly default; other `#` lines are ignored.
    pub fn parse(text: &str) -> Result<Self, FeedConfigError> {
        let mut entries: Vec<FeedEntry> = Vec::new();
        let mut poll_interval = DEFAULT_POLL_INTERVAL;
        let mut names = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |reason: String| FeedConfigError { line, reason };
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some(secs) = comment.trim().strip_prefix("poll_interval:") {
                    let secs: u64 = secs.trim().parse().map_err(|_| err(format!("bad poll_interval {secs:?}")))?;
                    if secs == 0 {
                        return Err(err("poll_interval must be positive".into()));
                    }
                    poll_interval = Duration::from_secs(secs);
                }
                continue;
            }
            let cols: Vec<&str> = raw.split('\t').map(str::trim).collect();
            let [name, url, lang] = cols[..] else {
                return Err(err(format!("expected 3 tab-separated columns, found {}", cols.len())));
            };
            if name.is_empty() || lang.is_empty() {
                return Err(err("source name and language must be non-empty".into()));
            }
            let feed_url = Url::parse(url).map_err(|e| err(format!("bad feed URL {url:?}: {e}")))?;
            if !matches!(feed_url.scheme(), "http" | "https") {
                return Err(err(format!("feed URL {url:?} is not http(s)")));
            }
            if !names.insert(name.to_owned()) {
                return Err(err(format!("duplicate source name {name:?}")));
            }
            entries.push(FeedEntry { source_name: name.to_owned(), feed_url, language: lang.to_owned() });
        }
        Ok(FeedConfig { entries, poll_interval })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchTask {
    pub url: String,
    pub source_name: String,
    pub enqueued_at: DateTime<Utc>,
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum FeedError {
    #[error("feed {source_name} unreachable: {reason}")]
    FeedUnreachable { source_name: String, reason: String },
    #[error("feed {source_name} could not be parsed: {reason}")]
    FeedParseError { source_name: String, reason: String },
}

#[derive(Debug, Default)]
pub struct PollOutcome {
    pub tasks: Vec<FetchTask>,
    pub errors: Vec<FeedError>,
}

/// Item links of an RSS document, resolved against the feed URL, in feed order.
pub fn feed_links(body: &[u8], feed_url: &Url) -> Result<Vec<String>, String> {
    let channel = rss::Channel::read_from(body).map_err(|e| e.to_string())?;
    Ok(channel
        .items()
        .iter()
        .filter_map(|item| item.link())
        .filter_map(|link| feed_url.join(link.trim()).ok())
        .map(String::from)
        .collect())
}

/// One poll cycle over every feed, in config order. Links are recorded as
/// seen before their tasks are returned.
pub async fn poll_feeds(
    config: &FeedConfig,
    links: &LinkStore,
    client: &reqwest::Client,
    clock: &dyn Clock,
) -> Result<PollOutcome, StoreError> {
    let mut outcome = PollOutcome::default();
    for feed in &config.entries {
        let name = feed.source_name.clone();
        let body = match fetch_feed(client, &feed.feed_url).await {
            Ok(body) => body,
            Err(reason) => {
                warn!(feed = %name, %reason, "feed unreachable");
                outcome.errors.push(FeedError::FeedUnreachable { source_name: name, reason });
                continue;
            }
        };
        let found = match feed_links(&body, &feed.feed_url) {
            Ok(found) => found,
            Err(reason) => {
                warn!(feed = %name, %reason, "feed parse error");
                outcome.errors.push(FeedError::FeedParseError { source_name: name, reason });
                continue;
            }
        };
        let now = clock.now();
        let pairs: Vec<(String, String)> = found.into_iter().map(|l| (l, name.clone())).collect();
        let fresh = links.record_new(&pairs, now)?;
        let before = outcome.tasks.len();
        for ((url, source_name), new) in pairs.into_iter().zip(fresh) {
            if new {
                outcome.tasks.push(FetchTask { url, source_name, enqueued_at: now, attempts: 0 });
            }
        }
        info!(feed = %feed.source_name, new = outcome.tasks.len() - before, "polled feed");
    }
    Ok(outcome)
}

async fn fetch_feed(client: &reqwest::Client, url: &Url) -> Result<Vec<u8>, String> {
    let response = client.get(url.clone()).send().await.map_err(|e| e.to_string())?;
    let status = response.status();
    if !status.is_success() {
        return Err(format!("HTTP {status}"));
    }
    Ok(response.bytes().await.map_err(|e| e.to_string())?.to_vec())
}
