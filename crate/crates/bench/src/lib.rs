//! Fixtures shared by the benchmarks.

use std::path::{Path, PathBuf};

use phoenix_core::dictionaries::{load_dictionaries, DictionaryPaths, DictionarySet};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

/// The toy dictionaries shipped with the core crate.
pub fn toy_dictionaries() -> DictionarySet {
    let d = data_dir();
    load_dictionaries(&DictionaryPaths {
        actors: &d.join("actors.txt"),
        verbs: &d.join("verbs.txt"),
        issues: &d.join("issues.txt"),
        code_sets: &d.join("codesets.txt"),
    })
    .expect("toy dictionaries load")
}
