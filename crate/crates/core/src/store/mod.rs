//! Schema-flexible local document store.
//!
//! Each story is one file `docs/<story_id>.json` whose first line is a
//! `sha256:<hex>` digest of the JSON that follows. Updates are written to a
//! temporary file and renamed into place. Links seen by the feed poller are
//! kept in an append-only `links.jsonl` next to the documents.

mod documents;
mod import;
mod links;

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use url::Url;

pub use documents::{DocumentFilter, DocumentStore};
pub use import::{import_parses, ImportError, ImportReport};
pub use links::{LinkRecord, LinkState, LinkStore};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store i/o on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("store corruption in {path}: {reason}")]
    Corruption { path: String, reason: String },
    #[error("story {id}: cannot move from {from} to {to}")]
    InvalidTransition { id: String, from: DocStatus, to: DocStatus },
    #[error("invalid story id {0:?}")]
    InvalidId(String),
    #[error("no story {0}")]
    NotFound(String),
}

impl StoreError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        StoreError::Io { path: path.display().to_string(), source }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocStatus {
    Fetched,
    Parsed,
    Coded,
    Failed,
}

impl DocStatus {
    /// Forward-only: Fetched -> Parsed -> Coded, anything -> Failed, and
    /// Failed is terminal. Staying put is allowed.
    pub fn can_become(self, next: DocStatus) -> bool {
        match (self, next) {
            (DocStatus::Failed, other) => other == DocStatus::Failed,
            (_, DocStatus::Failed) => true,
            (from, to) => to >= from,
        }
    }
}

impl fmt::Display for DocStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DocStatus::Fetched => "fetched",
            DocStatus::Parsed => "parsed",
            DocStatus::Coded => "coded",
            DocStatus::Failed => "failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryDocument {
    pub story_id: String,
    pub url: String,
    pub source_name: String,
    pub title: String,
    pub body_text: String,
    pub fetched_at: DateTime<Utc>,
    #[serde(default)]
    pub parse_trees: Option<Vec<String>>,
    pub status: DocStatus,
    /// Fields this version does not know about survive a load/store cycle.
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl StoryDocument {
    /// Date used for coding and daily partitioning.
    pub fn event_date(&self) -> NaiveDate {
        self.fetched_at.date_naive()
    }

    /// Title and body joined by a newline; the text issue and place lookups see.
    pub fn full_text(&self) -> String {
        let mut text = String::with_capacity(self.title.len() + self.body_text.len() + 1);
        text.push_str(&self.title);
        text.push('\n');
        text.push_str(&self.body_text);
        text
    }
}

/// Scheme, host, port and path; query and fragment dropped.
pub fn canonical_url(raw: &str) -> Result<String, url::ParseError> {
    let mut url = Url::parse(raw)?;
    url.set_query(None);
    url.set_fragment(None);
    Ok(url.to_string())
}

/// Stable identifier: first 16 bytes of SHA-256 over the canonical URL, hex.
pub fn story_id(raw_url: &str) -> Result<String, url::ParseError> {
    let canonical = canonical_url(raw_url)?;
    let digest = Sha256::digest(canonical.as_bytes());
    Ok(hex::encode(&digest[..16]))
}

pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedClock(pub DateTime<Utc>);

impl Clock for FixedClock {
    fn now(&self) -> DateTime<Utc> {
        self.0
    }
}
