use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use thiserror::Error;

use super::record::{header_line, read_records, EventRecord, RecordError};

pub const DEFAULT_TOP_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    DailyCounts,
    TopSources,
    TopActors,
    TopEntities,
    TopRoles,
    TopIssues,
    QuadHistogram,
    EntityFilter,
}

impl ReportKind {
    pub const ALL: [ReportKind; 8] = [
        ReportKind::DailyCounts,
        ReportKind::TopSources,
        ReportKind::TopActors,
        ReportKind::TopEntities,
        ReportKind::TopRoles,
        ReportKind::TopIssues,
        ReportKind::QuadHistogram,
        ReportKind::EntityFilter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReportKind::DailyCounts => "daily_counts",
            ReportKind::TopSources => "top_sources",
            ReportKind::TopActors => "top_actors",
            ReportKind::TopEntities => "top_entities",
            ReportKind::TopRoles => "top_roles",
            ReportKind::TopIssues => "top_issues",
            ReportKind::QuadHistogram => "quad_histogram",
            ReportKind::EntityFilter => "entity_filter",
        }
    }
}

impl FromStr for ReportKind {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ReportKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ReportError::UnknownKind(s.to_owned()))
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown report kind {0:?}")]
    UnknownKind(String),
    #[error("entity_filter needs an entity code")]
    MissingEntity,
    #[error("no records files given")]
    NoFiles,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Records { path: PathBuf, source: RecordError },
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub top_n: usize,
    pub entity: Option<String>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { top_n: DEFAULT_TOP_N, entity: None }
    }
}

/// Reads and concatenates records files in the given order.
pub fn load_records_files<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<EventRecord>, ReportError> {
    if paths.is_empty() {
        return Err(ReportError::NoFiles);
    }
    let mut out = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ReportError::Io { path: path.into(), source })?;
        let records = read_records(&text).map_err(|source| ReportError::Records { path: path.into(), source })?;
        out.extend(records);
    }
    Ok(out)
}

pub fn daily_counts(records: &[EventRecord]) -> BTreeMap<NaiveDate, usize> {
    let mut out = BTreeMap::new();
    for r in records {
        *out.entry(r.date).or_default() += 1;
    }
    out
}

pub fn quad_histogram(records: &[EventRecord]) -> BTreeMap<u8, usize> {
    let mut out = BTreeMap::new();
    for r in records {
        *out.entry(r.quad_class).or_default() += 1;
    }
    out
}

/// Rows whose source or target entity is `entity`.
pub fn entity_filter<'a>(records: &'a [EventRecord], entity: &str) -> Vec<&'a EventRecord> {
    records.iter().filter(|r| r.source.entity == entity || r.target.entity == entity).collect()
}

/// Most frequent keys, count descending then key ascending. Each record
/// counts a key at most once.
pub fn top_n<F>(records: &[EventRecord], n: usize, keys: F) -> Vec<(String, usize)>
where
    F: Fn(&EventRecord) -> Vec<&str>,
{
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for r in records {
        let mut ks = keys(r);
        ks.retain(|k| !k.is_empty());
        ks.sort_unstable();
        ks.dedup();
        for k in ks {
            *counts.entry(k).or_default() += 1;
        }
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().map(|(k, c)| (k.to_owned(), c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(n);
    ranked
}

/// Renders a report as tab-separated text with a header line.
pub fn report(records: &[EventRecord], kind: ReportKind, options: &ReportOptions) -> Result<String, ReportError> {
    let mut out = String::new();
    let ranked = |header: &str, rows: Vec<(String, usize)>| {
        let mut s = format!("{header}\tcount\n");
        for (k, c) in rows {
            let _ = writeln!(s, "{k}\t{c}");
        }
        s
    };
    let n = options.top_n;
    match kind {
        ReportKind::DailyCounts => {
            out.push_str("date\tcount\n");
            for (date, c) in daily_counts(records) {
                let _ = writeln!(out, "{}\t{c}", date.format("%Y%m%d"));
            }
        }
        ReportKind::TopSources => {
            out = ranked("source", top_n(records, n, |r| r.news_sources.iter().map(String::as_str).collect()));
        }
        ReportKind::TopActors => {
            out = ranked("actor", top_n(records, n, |r| vec![&r.source.full, &r.target.full]));
        }
        ReportKind::TopEntities => {
            out = ranked("entity", top_n(records, n, |r| vec![&r.source.entity, &r.target.entity]));
        }
        ReportKind::TopRoles => {
            out = ranked("role", top_n(records, n, |r| vec![&r.source.role, &r.target.role]));
        }
        ReportKind::TopIssues => {
            out = ranked("issue", top_n(records, n, |r| r.issues.iter().map(|(t, _)| t.as_str()).collect()));
        }
        ReportKind::QuadHistogram => {
            out.push_str("quad_class\tcount\n");
            for (q, c) in quad_histogram(records) {
                let _ = writeln!(out, "{q}\t{c}");
            }
        }
        ReportKind::EntityFilter => {
            let entity = options.entity.as_deref().ok_or(ReportError::MissingEntity)?;
            out.push_str(&header_line());
            out.push('\n');
            for r in entity_filter(records, entity) {
                let _ = writeln!(out, "{r}");
            }
        }
    }
    Ok(out)
}
