//! Turn coded events into full dataset rows.

mod actor;
mod geo;
mod goldstein;
mod quad;

use thiserror::Error;

pub use actor::{decompose_actor, ActorDecomposition};
pub use geo::{Gazetteer, GazetteerError, GeoResult, Place};
pub use goldstein::{GoldsteinFormatError, GoldsteinTable};
pub use quad::quad_class;

use crate::coder::CodedEvent;
use crate::dictionaries::DictionarySet;
use crate::pipeline::{ActorColumns, EventRecord};
use crate::store::StoryDocument;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnrichError {
    #[error("unknown CAMEO root for code {0:?}")]
    UnknownRoot(String),
    #[error("actor code {0:?} is not a run of 3-letter segments")]
    MalformedCode(String),
}

/// Lookup tables used alongside the dictionaries. Geolocation runs only when
/// a gazetteer is present.
#[derive(Debug, Clone)]
pub struct EnrichTables {
    pub goldstein: GoldsteinTable,
    pub gazetteer: Option<Gazetteer>,
}

impl EnrichTables {
    pub fn new(goldstein: GoldsteinTable) -> Self {
        EnrichTables { goldstein, gazetteer: None }
    }

    pub fn with_gazetteer(mut self, gazetteer: Gazetteer) -> Self {
        self.gazetteer = Some(gazetteer);
        self
    }
}

/// Per-story context shared by every event of the story.
struct StoryContext {
    issues: Vec<(String, usize)>,
    geo: Option<GeoResult>,
}

impl StoryContext {
    fn new(doc: &StoryDocument, dicts: &DictionarySet, tables: &EnrichTables) -> Self {
        let text = doc.full_text();
        StoryContext {
            issues: dicts.match_issues(&text),
            geo: tables.gazetteer.as_ref().and_then(|g| g.geolocate(&text)),
        }
    }
}

pub fn enrich_event(
    ev: &CodedEvent,
    doc: &StoryDocument,
    dicts: &DictionarySet,
    tables: &EnrichTables,
) -> Result<EventRecord, EnrichError> {
    build_record(ev, doc, dicts, tables, &StoryContext::new(doc, dicts, tables))
}

/// Enriches all events of one story, computing issues and location once.
pub fn enrich_story(
    events: &[CodedEvent],
    doc: &StoryDocument,
    dicts: &DictionarySet,
    tables: &EnrichTables,
) -> Result<Vec<EventRecord>, EnrichError> {
    if events.is_empty() {
        return Ok(Vec::new());
    }
    let ctx = StoryContext::new(doc, dicts, tables);
    events.iter().map(|ev| build_record(ev, doc, dicts, tables, &ctx)).collect()
}

fn build_record(
    ev: &CodedEvent,
    doc: &StoryDocument,
    dicts: &DictionarySet,
    tables: &EnrichTables,
    ctx: &StoryContext,
) -> Result<EventRecord, EnrichError> {
    let sets = dicts.code_sets();
    let columns = |d: ActorDecomposition| ActorColumns {
        full: d.full,
        entity: d.entity,
        role: d.role.unwrap_or_default(),
        attribute: d.attribute.unwrap_or_default(),
    };
    let source = columns(decompose_actor(ev.source_code.as_str(), sets)?);
    let target = match &ev.target_code {
        Some(code) => columns(decompose_actor(code.as_str(), sets)?),
        None => ActorColumns::default(),
    };
    let root = ev.event_code.root().to_owned();
    Ok(EventRecord {
        event_id: String::new(),
        date: doc.event_date(),
        source,
        target,
        event_code: ev.event_code.as_str().to_owned(),
        quad_class: quad_class(&root)?,
        event_root_code: root,
        goldstein: tables.goldstein.goldstein(ev.event_code.as_str())?,
        issues: ctx.issues.clone(),
        geo: ctx.geo.clone(),
        sentence_id: ev.sentence_id,
        urls: non_empty(&doc.url),
        news_sources: non_empty(&doc.source_name),
        story_id: doc.story_id.clone(),
    })
}

fn non_empty(s: &str) -> Vec<String> {
    if s.is_empty() {
        Vec::new()
    } else {
        vec![s.to_owned()]
    }
}
