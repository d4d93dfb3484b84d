use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use tracing::warn;

use super::{story_id, DocumentStore, StoreError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkState {
    Seen,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub link: String,
    pub source: String,
    pub state: LinkState,
    pub at: DateTime<Utc>,
}

#[derive(Debug)]
struct Inner {
    file: File,
    order: Vec<String>,
    latest: HashMap<String, LinkRecord>,
}

/// Append-only log of every link the poller has enqueued.
#[derive(Debug)]
pub struct LinkStore {
    path: PathBuf,
    inner: Mutex<Inner>,
}

impl LinkStore {
    pub fn open(path: PathBuf) -> Result<Self, StoreError> {
        let mut order = Vec::new();
        let mut latest = HashMap::new();
        // Some(len) when the file must be cut back to `len` bytes
        let mut truncate_to = None;
        let mut needs_newline = false;
        match fs::read_to_string(&path) {
            Ok(text) => {
                let complete = text.is_empty() || text.ends_with('\n');
                needs_newline = !complete;
                let lines: Vec<&str> = text.lines().collect();
                for (idx, line) in lines.iter().enumerate() {
                    if line.trim().is_empty() {
                        continue;
                    }
                    let record: LinkRecord = match serde_json::from_str(line) {
                        Ok(r) => r,
                        // torn final append from an interrupted run
                        Err(_) if !complete && idx + 1 == lines.len() => {
                            warn!(path = %path.display(), "dropping incomplete trailing link record");
                            truncate_to = Some(text.rfind('\n').map_or(0, |p| p + 1));
                            needs_newline = false;
                            break;
                        }
                        Err(e) => {
                            return Err(StoreError::Corruption {
                                path: path.display().to_string(),
                                reason: format!("line {}: {e}", idx + 1),
                            })
                        }
                    };
                    if !latest.contains_key(&record.link) {
                        order.push(record.link.clone());
                    }
                    latest.insert(record.link.clone(), record);
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(StoreError::io(&path, e)),
        }
        if let Some(len) = truncate_to {
            let file = OpenOptions::new().write(true).open(&path).map_err(|e| StoreError::io(&path, e))?;
            file.set_len(len as u64).map_err(|e| StoreError::io(&path, e))?;
        }
        let mut file =
            OpenOptions::new().create(true).append(true).open(&path).map_err(|e| StoreError::io(&path, e))?;
        if needs_newline {
            file.write_all(b"\n").map_err(|e| StoreError::io(&path, e))?;
        }
        Ok(LinkStore { path, inner: Mutex::new(Inner { file, order, latest }) })
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn contains(&self, link: &str) -> bool {
        self.lock().latest.contains_key(link)
    }

    pub fn len(&self) -> usize {
        self.lock().order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Atomically records every link not seen before and reports which ones
    /// were new. A link repeated inside `links` counts as new only once.
    pub fn record_new(&self, links: &[(String, String)], now: DateTime<Utc>) -> Result<Vec<bool>, StoreError> {
        let mut inner = self.lock();
        let mut fresh = Vec::with_capacity(links.len());
        let mut buf = String::new();
        for (link, source) in links {
            if inner.latest.contains_key(link) {
                fresh.push(false);
                continue;
            }
            let record = LinkRecord { link: link.clone(), source: source.clone(), state: LinkState::Seen, at: now };
            buf.push_str(&serde_json::to_string(&record).expect("link records serialize"));
            buf.push('\n');
            inner.order.push(link.clone());
            inner.latest.insert(link.clone(), record);
            fresh.push(true);
        }
        if !buf.is_empty() {
            inner.file.write_all(buf.as_bytes()).and_then(|_| inner.file.sync_data()).map_err(|e| StoreError::io(&self.path, e))?;
        }
        Ok(fresh)
    }

    pub fn mark_failed(&self, link: &str, now: DateTime<Utc>) -> Result<(), StoreError> {
        let mut inner = self.lock();
        let source = inner.latest.get(link).map(|r| r.source.clone()).unwrap_or_default();
        let record = LinkRecord { link: link.to_owned(), source, state: LinkState::Failed, at: now };
        let line = format!("{}\n", serde_json::to_string(&record).expect("link records serialize"));
        inner.file.write_all(line.as_bytes()).and_then(|_| inner.file.sync_data()).map_err(|e| StoreError::io(&self.path, e))?;
        if !inner.latest.contains_key(link) {
            inner.order.push(link.to_owned());
        }
        inner.latest.insert(link.to_owned(), record);
        Ok(())
    }

    pub fn records(&self) -> Vec<LinkRecord> {
        let inner = self.lock();
        inner.order.iter().map(|l| inner.latest[l].clone()).collect()
    }

    /// Seen links that have no stored document yet and have not failed, in
    /// the order they were first recorded. These are what an interrupted run
    /// still owes.
    pub fn pending(&self, docs: &DocumentStore) -> Vec<LinkRecord> {
        self.records()
            .into_iter()
            .filter(|r| r.state == LinkState::Seen)
            .filter(|r| story_id(&r.link).map(|id| !docs.contains(&id)).unwrap_or(false))
            .collect()
    }
}
