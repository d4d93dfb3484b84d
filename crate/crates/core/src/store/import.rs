use thiserror::Error;
use tracing::warn;

use super::{DocStatus, DocumentStore, StoreError};
use crate::treebank::{parse_treebank, serialize, TreebankError};

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("line {line}: {source}")]
    Tree { line: usize, source: TreebankError },
    #[error("line {line}: tree before any '# story: <id>' header")]
    MissingHeader { line: usize },
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImportReport {
    pub updated: usize,
    pub unknown: Vec<String>,
    pub skipped: Vec<String>,
}

/// Attach parse trees to stored stories.
///
/// ```text
/// # story: 5f0c...
/// (ROOT (S ...))
/// (ROOT (S ...))
///
/// # story: 9a1e...
/// (ROOT (S ...))
/// ```
///
/// Every tree is validated before anything is written. Stories move to
/// `Parsed`; coded or failed stories are left alone.
pub fn import_parses(store: &DocumentStore, text: &str) -> Result<ImportReport, ImportError> {
    let mut blocks: Vec<(String, Vec<String>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(id) = line.strip_prefix('#').map(str::trim).and_then(|h| h.strip_prefix("story:")) {
            blocks.push((id.trim().to_owned(), Vec::new()));
            continue;
        }
        let tree = parse_treebank(line).map_err(|source| ImportError::Tree { line: idx + 1, source })?;
        let Some((_, trees)) = blocks.last_mut() else {
            return Err(ImportError::MissingHeader { line: idx + 1 });
        };
        trees.push(serialize(&tree));
    }

    let mut report = ImportReport::default();
    for (id, trees) in blocks {
        match store.get(&id) {
            Ok(Some(doc)) if matches!(doc.status, DocStatus::Fetched | DocStatus::Parsed) => {
                store.update(&id, |d| {
                    d.parse_trees = Some(trees);
                    d.status = DocStatus::Parsed;
                })?;
                report.updated += 1;
            }
            Ok(Some(doc)) => {
                warn!(story = %id, status = %doc.status, "not replacing parses");
                report.skipped.push(id);
            }
            Ok(None) | Err(StoreError::InvalidId(_)) => report.unknown.push(id),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(report)
}
