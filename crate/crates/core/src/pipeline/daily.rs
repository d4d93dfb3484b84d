use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, NaiveDate, SecondsFormat, Utc};
use rayon::prelude::*;
use thiserror::Error;
use tracing::{info, warn};

use super::record::{write_records, EventRecord};
use crate::coder::{code_story, CoderError};
use crate::dictionaries::DictionarySet;
use crate::enrich::{enrich_story, EnrichError, EnrichTables};
use crate::store::{Clock, DocStatus, DocumentFilter, DocumentStore, StoreError, SystemClock};

#[derive(Debug, Error)]
pub enum DailyError {
    #[error("no parsed documents for {0}")]
    NoInput(NaiveDate),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("story {story}: {source}")]
    Enrich { story: String, source: EnrichError },
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Clone)]
pub struct DailyOptions {
    /// Apply the one-a-day filter.
    pub dedup: bool,
    pub out_dir: PathBuf,
    pub software_version: String,
    pub clock: Arc<dyn Clock>,
}

impl DailyOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        DailyOptions {
            dedup: true,
            out_dir: out_dir.into(),
            software_version: env!("CARGO_PKG_VERSION").to_owned(),
            clock: Arc::new(SystemClock),
        }
    }
}

impl fmt::Debug for DailyOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DailyOptions")
            .field("dedup", &self.dedup)
            .field("out_dir", &self.out_dir)
            .field("software_version", &self.software_version)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DailyRunManifest {
    pub run_date: NaiveDate,
    pub dictionary_version: String,
    pub goldstein_version: String,
    pub software_version: String,
    pub dedup: bool,
    pub input_story_count: usize,
    pub coded_event_count: usize,
    pub emitted_event_count: usize,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
}

impl DailyRunManifest {
    /// `key: value` lines; the timestamp keys are the last two.
    pub fn to_text(&self) -> String {
        let ts = |t: &DateTime<Utc>| t.to_rfc3339_opts(SecondsFormat::Secs, true);
        format!(
            "run_date: {}\ndictionary_version: {}\ngoldstein_version: {}\nsoftware_version: {}\ndedup: {}\n\
             input_story_count: {}\ncoded_event_count: {}\nemitted_event_count: {}\nstarted_at: {}\nfinished_at: {}\n",
            self.run_date,
            self.dictionary_version,
            self.goldstein_version,
            self.software_version,
            if self.dedup { "on" } else { "off" },
            self.input_story_count,
            self.coded_event_count,
            self.emitted_event_count,
            ts(&self.started_at),
            ts(&self.finished_at),
        )
    }
}

#[derive(Debug, Clone)]
pub struct DailyRunOutput {
    pub records_path: PathBuf,
    pub manifest_path: PathBuf,
    pub manifest: DailyRunManifest,
    pub records: Vec<EventRecord>,
}

pub fn records_file_name(date: NaiveDate) -> String {
    format!("phoenix-events.{}.tsv", date.format("%Y%m%d"))
}

pub fn manifest_file_name(date: NaiveDate) -> String {
    format!("phoenix-events.{}.manifest.txt", date.format("%Y%m%d"))
}

/// Codes, enriches and filters every parsed story fetched on `date`, then
/// writes the day's records file and manifest. Coded stories are included
/// so a rerun with new dictionaries recodes them from the stored parses.
pub fn run_daily(
    date: NaiveDate,
    store: &DocumentStore,
    dicts: &DictionarySet,
    tables: &EnrichTables,
    options: &DailyOptions,
) -> Result<DailyRunOutput, DailyError> {
    let started_at = options.clock.now();
    let filter = DocumentFilter { statuses: Some(vec![DocStatus::Parsed, DocStatus::Coded]), ..Default::default() }
        .on_date(date);
    let docs = store.load_documents(&filter)?;
    if docs.is_empty() {
        return Err(DailyError::NoInput(date));
    }

    let per_story: Vec<Vec<EventRecord>> = docs
        .par_iter()
        .map(|doc| {
            let events = match code_story(doc, dicts) {
                Ok(events) => events,
                Err(CoderError::NoParses(id)) => {
                    warn!(story = %id, "parsed story without trees");
                    Vec::new()
                }
            };
            enrich_story(&events, doc, dicts, tables)
                .map_err(|source| DailyError::Enrich { story: doc.story_id.clone(), source })
        })
        .collect::<Result<_, _>>()?;

    let mut records: Vec<EventRecord> = per_story.into_iter().flatten().collect();
    let coded_event_count = records.len();
    assign_event_ids(&mut records, date);
    if options.dedup {
        records = one_a_day(records);
    }
    records.sort_by(|a, b| (a.date, &a.event_id).cmp(&(b.date, &b.event_id)));

    fs::create_dir_all(&options.out_dir).map_err(|source| DailyError::Io { path: options.out_dir.clone(), source })?;
    let records_path = options.out_dir.join(records_file_name(date));
    let mut body = Vec::new();
    write_records(&mut body, &records).expect("writing to memory");
    write_atomic(&records_path, &body)?;

    for doc in docs.iter().filter(|d| d.status == DocStatus::Parsed) {
        store.update(&doc.story_id, |d| d.status = DocStatus::Coded)?;
    }

    let manifest = DailyRunManifest {
        run_date: date,
        dictionary_version: dicts.version().to_owned(),
        goldstein_version: tables.goldstein.version().to_owned(),
        software_version: options.software_version.clone(),
        dedup: options.dedup,
        input_story_count: docs.len(),
        coded_event_count,
        emitted_event_count: records.len(),
        started_at,
        finished_at: options.clock.now(),
    };
    let manifest_path = options.out_dir.join(manifest_file_name(date));
    write_atomic(&manifest_path, manifest.to_text().as_bytes())?;
    info!(%date, stories = docs.len(), events = records.len(), "daily run complete");
    Ok(DailyRunOutput { records_path, manifest_path, manifest, records })
}

/// Numbers records `YYYYMMDD-000001` upward in their current order.
pub fn assign_event_ids(records: &mut [EventRecord], date: NaiveDate) {
    let day = date.format("%Y%m%d");
    for (seq, record) in records.iter_mut().enumerate() {
        record.event_id = format!("{day}-{:06}", seq + 1);
    }
}

/// Merges records equal on (source, target, code, date). The merged record
/// is the one with the smallest EventID, with URLs and sources unioned in
/// EventID order.
pub fn one_a_day(mut records: Vec<EventRecord>) -> Vec<EventRecord> {
    records.sort_by(|a, b| a.event_id.cmp(&b.event_id));
    let mut out: Vec<EventRecord> = Vec::with_capacity(records.len());
    let mut index: HashMap<(String, String, String, NaiveDate), usize> = HashMap::new();
    for record in records {
        let key = (record.source.full.clone(), record.target.full.clone(), record.event_code.clone(), record.date);
        match index.get(&key) {
            Some(&i) => {
                let kept = &mut out[i];
                union_into(&mut kept.urls, record.urls);
                union_into(&mut kept.news_sources, record.news_sources);
            }
            None => {
                index.insert(key, out.len());
                out.push(record);
            }
        }
    }
    out
}

fn union_into(into: &mut Vec<String>, items: Vec<String>) {
    for item in items {
        if !into.contains(&item) {
            into.push(item);
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DailyError> {
    let io = |source| DailyError::Io { path: path.to_path_buf(), source };
    let tmp = path.with_extension("tmp");
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(bytes).map_err(io)?;
    file.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}
