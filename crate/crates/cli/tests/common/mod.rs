#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use chrono::{NaiveDate, TimeZone, Utc};
use phoenix_core::dictionaries::DictionarySet;
use phoenix_core::enrich::{EnrichTables, Gazetteer, GoldsteinTable};
use phoenix_core::store::{story_id, DocStatus, DocumentStore, StoryDocument};
use phoenix_core::treebank::{parse_treebank, serialize};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read(path: impl AsRef<std::path::Path>) -> String {
    let path = path.as_ref();
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn toy_dicts() -> DictionarySet {
    toy_dicts_with_verbs(&read(data_dir().join("verbs.txt")))
}

pub fn toy_dicts_with_verbs(verbs: &str) -> DictionarySet {
    let d = data_dir();
    DictionarySet::parse(
        &read(d.join("actors.txt")),
        verbs,
        &read(d.join("issues.txt")),
        &read(d.join("codesets.txt")),
    )
    .expect("toy dictionaries load")
}

pub fn toy_goldstein() -> GoldsteinTable {
    GoldsteinTable::parse(&read(data_dir().join("goldstein.tsv"))).expect("toy goldstein table loads")
}

pub fn toy_gazetteer() -> Gazetteer {
    Gazetteer::parse(&read(data_dir().join("gazetteer.tsv"))).expect("toy gazetteer loads")
}

pub fn toy_tables(with_gazetteer: bool) -> EnrichTables {
    let tables = EnrichTables::new(toy_goldstein());
    if with_gazetteer {
        tables.with_gazetteer(toy_gazetteer())
    } else {
        tables
    }
}

/// Lines that are neither blank nor `#` comments.
pub fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
}

/// Stories from `daily_stories.txt`: `# story: URL<TAB>SOURCE<TAB>DATE`
/// headers, each followed by its trees.
pub struct FixtureStory {
    pub url: String,
    pub source: String,
    pub date: NaiveDate,
    pub trees: Vec<String>,
}

pub fn daily_stories() -> Vec<FixtureStory> {
    let mut out: Vec<FixtureStory> = Vec::new();
    for line in read(fixture("acceptance/daily_stories.txt")).lines() {
        if let Some(header) = line.strip_prefix("# story: ") {
            let cols: Vec<&str> = header.split('\t').collect();
            out.push(FixtureStory {
                url: cols[0].into(),
                source: cols[1].into(),
                date: cols[2].parse().expect("story date"),
                trees: Vec::new(),
            });
        } else if line.starts_with('(') {
            out.last_mut().expect("tree after header").trees.push(line.into());
        }
    }
    out
}

pub fn fill_store(store: &DocumentStore, stories: &[FixtureStory]) -> Result<(), String> {
    for s in stories {
        let trees: Vec<_> = s.trees.iter().map(|t| parse_treebank(t).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
        let doc = StoryDocument {
            story_id: story_id(&s.url).map_err(|e| e.to_string())?,
            url: s.url.clone(),
            source_name: s.source.clone(),
            title: String::new(),
            body_text: trees.iter().map(|t| t.sentence_text()).collect::<Vec<_>>().join(" "),
            fetched_at: Utc.from_utc_datetime(&s.date.and_hms_opt(12, 0, 0).unwrap()),
            parse_trees: Some(trees.iter().map(serialize).collect()),
            status: DocStatus::Parsed,
            extra: BTreeMap::new(),
        };
        store.store_document(&doc).map_err(|e| e.to_string())?;
    }
    Ok(())
}
