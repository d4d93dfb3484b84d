use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::NaiveDate;
use sha2::{Digest, Sha256};

use super::{DocStatus, LinkStore, StoreError, StoryDocument};

#[derive(Debug, Clone, Default)]
pub struct DocumentFilter {
    pub statuses: Option<Vec<DocStatus>>,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
}

impl DocumentFilter {
    pub fn status(status: DocStatus) -> Self {
        DocumentFilter { statuses: Some(vec![status]), ..Default::default() }
    }

    pub fn on_date(mut self, date: NaiveDate) -> Self {
        self.from = Some(date);
        self.to = Some(date);
        self
    }

    fn accepts(&self, doc: &StoryDocument) -> bool {
        let date = doc.event_date();
        self.statuses.as_ref().map_or(true, |s| s.contains(&doc.status))
            && self.from.map_or(true, |from| date >= from)
            && self.to.map_or(true, |to| date <= to)
    }
}

#[derive(Debug)]
pub struct DocumentStore {
    docs_dir: PathBuf,
    root: PathBuf,
    links: LinkStore,
    /// Serializes writers; readers never take it.
    write_lock: Mutex<()>,
}

impl DocumentStore {
    /// Opens (creating if needed) a store rooted at `root`.
    pub fn open(root: impl AsRef<Path>) -> Result<Self, StoreError> {
        let root = root.as_ref().to_path_buf();
        let docs_dir = root.join("docs");
        fs::create_dir_all(&docs_dir).map_err(|e| StoreError::io(&docs_dir, e))?;
        let links = LinkStore::open(root.join("links.jsonl"))?;
        Ok(DocumentStore { docs_dir, root, links, write_lock: Mutex::new(()) })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn links(&self) -> &LinkStore {
        &self.links
    }

    fn path_for(&self, id: &str) -> Result<PathBuf, StoreError> {
        let valid = !id.is_empty() && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_');
        if !valid {
            return Err(StoreError::InvalidId(id.to_owned()));
        }
        Ok(self.docs_dir.join(format!("{id}.json")))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.path_for(id).map(|p| p.exists()).unwrap_or(false)
    }

    pub fn get(&self, id: &str) -> Result<Option<StoryDocument>, StoreError> {
        let path = self.path_for(id)?;
        match fs::read(&path) {
            Ok(bytes) => read_record(&path, &bytes).map(Some),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(StoreError::io(&path, e)),
        }
    }

    /// Stores `doc` only if its id is absent. Returns whether it was written.
    pub fn insert_new(&self, doc: &StoryDocument) -> Result<bool, StoreError> {
        let path = self.path_for(&doc.story_id)?;
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        if path.exists() {
            return Ok(false);
        }
        write_record(&path, doc)?;
        Ok(true)
    }

    /// Inserts or replaces a whole document, enforcing forward-only status.
    pub fn store_document(&self, doc: &StoryDocument) -> Result<(), StoreError> {
        let path = self.path_for(&doc.story_id)?;
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        if let Ok(bytes) = fs::read(&path) {
            let current = read_record(&path, &bytes)?;
            if !current.status.can_become(doc.status) {
                return Err(StoreError::InvalidTransition {
                    id: doc.story_id.clone(),
                    from: current.status,
                    to: doc.status,
                });
            }
        }
        write_record(&path, doc)
    }

    /// Read-modify-write of one document under the store lock.
    pub fn update<F>(&self, id: &str, change: F) -> Result<StoryDocument, StoreError>
    where
        F: FnOnce(&mut StoryDocument),
    {
        let path = self.path_for(id)?;
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(StoreError::NotFound(id.to_owned())),
            Err(e) => return Err(StoreError::io(&path, e)),
        };
        let current = read_record(&path, &bytes)?;
        let mut next = current.clone();
        change(&mut next);
        if next.story_id != current.story_id {
            return Err(StoreError::InvalidId(next.story_id));
        }
        if !current.status.can_become(next.status) {
            return Err(StoreError::InvalidTransition { id: id.to_owned(), from: current.status, to: next.status });
        }
        write_record(&path, &next)?;
        Ok(next)
    }

    /// All ids in the store, sorted.
    pub fn ids(&self) -> Result<Vec<String>, StoreError> {
        let entries = fs::read_dir(&self.docs_dir).map_err(|e| StoreError::io(&self.docs_dir, e))?;
        let mut ids = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| StoreError::io(&self.docs_dir, e))?;
            let name = entry.file_name();
            let Some(id) = name.to_str().and_then(|n| n.strip_suffix(".json")) else {
                continue;
            };
            ids.push(id.to_owned());
        }
        ids.sort();
        Ok(ids)
    }

    /// Documents accepted by `filter`, ordered by story id.
    pub fn load_documents(&self, filter: &DocumentFilter) -> Result<Vec<StoryDocument>, StoreError> {
        let mut out = Vec::new();
        for id in self.ids()? {
            if let Some(doc) = self.get(&id)? {
                if filter.accepts(&doc) {
                    out.push(doc);
                }
            }
        }
        Ok(out)
    }
}

fn write_record(path: &Path, doc: &StoryDocument) -> Result<(), StoreError> {
    let json = serde_json::to_vec(doc).expect("documents serialize");
    let digest = hex::encode(Sha256::digest(&json));
    let tmp = path.with_extension("json.tmp");
    let mut file = fs::File::create(&tmp).map_err(|e| StoreError::io(&tmp, e))?;
    let write = |file: &mut fs::File| -> std::io::Result<()> {
        writeln!(file, "sha256:{digest}")?;
        file.write_all(&json)?;
        file.write_all(b"\n")?;
        file.sync_all()
    };
    write(&mut file).map_err(|e| StoreError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| StoreError::io(path, e))
}

fn read_record(path: &Path, bytes: &[u8]) -> Result<StoryDocument, StoreError> {
    let corrupt = |reason: &str| StoreError::Corruption { path: path.display().to_string(), reason: reason.to_owned() };
    let newline = bytes.iter().position(|&b| b == b'\n').ok_or_else(|| corrupt("missing checksum line"))?;
    let header = std::str::from_utf8(&bytes[..newline]).map_err(|_| corrupt("checksum line is not UTF-8"))?;
    let expected = header.strip_prefix("sha256:").ok_or_else(|| corrupt("missing sha256 prefix"))?;
    let body = bytes[newline + 1..].strip_suffix(b"\n").unwrap_or(&bytes[newline + 1..]);
    if hex::encode(Sha256::digest(body)) != expected {
        return Err(corrupt("checksum mismatch"));
    }
    serde_json::from_slice(body).map_err(|e| corrupt(&e.to_string()))
}
