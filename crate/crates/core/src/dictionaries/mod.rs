//! Actor, verb, issue and code-set dictionaries.
//!
//! All four files are UTF-8, start with a `# version: <string>` line, and use
//! `#` for comments. Multi-word patterns are written with underscores
//! (`ISLAMIC_STATE_`) and matched case-insensitively.
//!
//! ```text
//! actors:    PATTERN;ACTORCODE[;YYYYMMDD-YYYYMMDD]
//! verbs:     PATTERN;CAMEO[;ROOT>COMPOSED,ROOT>COMPOSED]
//! issues:    keyword phrase;TAG
//! code sets: [roles] / [attributes] / [entities] sections of 3-letter codes
//! ```

mod trie;

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use thiserror::Error;
use tracing::warn;

use crate::codes::{ActorCode, CameoCode};
use trie::TokenTrie;

#[derive(Debug, Error)]
pub enum DictionaryError {
    #[error("missing dictionary file {0}")]
    MissingFile(String),
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{file}:{line}: {reason}")]
    Format { file: String, line: usize, reason: String },
    #[error("{file}:{line}: invalid code {code:?}: {reason}")]
    InvalidCode { file: String, line: usize, code: String, reason: String },
}

/// Inclusive date interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateRange {
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActorEntry {
    pub patterns: Vec<Vec<String>>,
    pub code: ActorCode,
    pub valid_range: Option<DateRange>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbEntry {
    pub verb_forms: Vec<Vec<String>>,
    pub code: CameoCode,
    /// Partner root (`"07"`) to composed code.
    pub composition_rules: Vec<(String, CameoCode)>,
}

impl VerbEntry {
    pub fn new(code: CameoCode) -> Self {
        VerbEntry { verb_forms: Vec::new(), code, composition_rules: Vec::new() }
    }

    pub fn with_rule(mut self, partner_root: &str, composed: CameoCode) -> Self {
        self.composition_rules.push((partner_root.to_owned(), composed));
        self
    }

    pub fn rule_for(&self, partner_root: &str) -> Option<&CameoCode> {
        self.composition_rules.iter().find(|(root, _)| root == partner_root).map(|(_, c)| c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssueEntry {
    pub keyword: String,
    pub issue_tag: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CodeSets {
    pub roles: BTreeSet<String>,
    pub attributes: BTreeSet<String>,
    pub entities_special: BTreeSet<String>,
}

/// Immutable, fully indexed dictionary bundle.
#[derive(Debug, Clone)]
pub struct DictionarySet {
    actors: Vec<ActorEntry>,
    actor_index: TokenTrie,
    verbs: Vec<VerbEntry>,
    verb_index: TokenTrie,
    issues: Vec<IssueEntry>,
    code_sets: CodeSets,
    version: String,
}

/// Paths of the four dictionary files.
#[derive(Debug, Clone)]
pub struct DictionaryPaths<'a> {
    pub actors: &'a Path,
    pub verbs: &'a Path,
    pub issues: &'a Path,
    pub code_sets: &'a Path,
}

pub fn load_dictionaries(paths: &DictionaryPaths<'_>) -> Result<DictionarySet, DictionaryError> {
    let read = |p: &Path| -> Result<(String, String), DictionaryError> {
        let name = p.display().to_string();
        match fs::read_to_string(p) {
            Ok(text) => Ok((name, text)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(DictionaryError::MissingFile(name)),
            Err(source) => Err(DictionaryError::Io { path: name, source }),
        }
    };
    let actors = read(paths.actors)?;
    let verbs = read(paths.verbs)?;
    let issues = read(paths.issues)?;
    let codes = read(paths.code_sets)?;
    DictionarySet::parse_named(
        (&actors.0, &actors.1),
        (&verbs.0, &verbs.1),
        (&issues.0, &issues.1),
        (&codes.0, &codes.1),
    )
}

impl DictionarySet {
    /// Build from in-memory file contents.
    pub fn parse(actors: &str, verbs: &str, issues: &str, code_sets: &str) -> Result<Self, DictionaryError> {
        Self::parse_named(("actors", actors), ("verbs", verbs), ("issues", issues), ("code-sets", code_sets))
    }

    fn parse_named(
        actors: (&str, &str),
        verbs: (&str, &str),
        issues: (&str, &str),
        code_sets: (&str, &str),
    ) -> Result<Self, DictionaryError> {
        let mut set = DictionarySet {
            actors: Vec::new(),
            actor_index: TokenTrie::new(),
            verbs: Vec::new(),
            verb_index: TokenTrie::new(),
            issues: Vec::new(),
            code_sets: CodeSets::default(),
            version: String::new(),
        };
        let mut versions = Vec::new();
        versions.push(set.read_actors(actors.0, actors.1)?);
        versions.push(set.read_verbs(verbs.0, verbs.1)?);
        versions.push(set.read_issues(issues.0, issues.1)?);
        versions.push(set.read_code_sets(code_sets.0, code_sets.1)?);
        let mut unique: Vec<String> = Vec::new();
        for v in versions {
            if !unique.contains(&v) {
                unique.push(v);
            }
        }
        set.version = unique.join("+");
        Ok(set)
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn actors(&self) -> &[ActorEntry] {
        &self.actors
    }

    pub fn verbs(&self) -> &[VerbEntry] {
        &self.verbs
    }

    pub fn issues(&self) -> &[IssueEntry] {
        &self.issues
    }

    pub fn code_sets(&self) -> &CodeSets {
        &self.code_sets
    }

    /// Longest actor pattern at the start of `tokens` whose validity range
    /// (if any) contains `at_date`.
    pub fn match_actor<S: AsRef<str>>(&self, tokens: &[S], at_date: NaiveDate) -> Option<(&ActorCode, usize)> {
        self.actor_index
            .longest_match(tokens, |idx| self.actors[idx].valid_range.map_or(true, |r| r.contains(at_date)))
            .map(|(idx, len)| (&self.actors[idx].code, len))
    }

    /// Longest verb pattern at the start of `tokens`.
    pub fn match_verb<S: AsRef<str>>(&self, tokens: &[S]) -> Option<(&VerbEntry, usize)> {
        self.verb_index.longest_match(tokens, |_| true).map(|(idx, len)| (&self.verbs[idx], len))
    }

    /// Whole-word keyword counts over lowercased text, most frequent first.
    pub fn match_issues(&self, text: &str) -> Vec<(String, usize)> {
        let text = text.to_lowercase();
        let mut totals: Vec<(String, usize)> = Vec::new();
        for entry in &self.issues {
            let count = count_word_occurrences(&text, &entry.keyword);
            if count == 0 {
                continue;
            }
            match totals.iter_mut().find(|(tag, _)| *tag == entry.issue_tag) {
                Some(slot) => slot.1 += count,
                None => totals.push((entry.issue_tag.clone(), count)),
            }
        }
        totals.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        totals
    }

    fn read_actors(&mut self, file: &str, text: &str) -> Result<String, DictionaryError> {
        let (version, lines) = split_header(file, text)?;
        let mut groups: HashMap<(ActorCode, Option<DateRange>), usize> = HashMap::new();
        let mut owners: HashMap<(Vec<String>, Option<DateRange>), usize> = HashMap::new();
        for (line_no, line) in lines {
            let fields: Vec<&str> = line.split(';').map(str::trim).collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(format_err(file, line_no, "expected PATTERN;CODE[;YYYYMMDD-YYYYMMDD]"));
            }
            let pattern = split_pattern(file, line_no, fields[0])?;
            let code = ActorCode::new(fields[1]).map_err(|e| invalid_code(file, line_no, fields[1], e))?;
            let range = fields.get(2).map(|r| parse_range(file, line_no, r)).transpose()?;

            let entry_idx = *groups.entry((code.clone(), range)).or_insert_with(|| {
                self.actors.push(ActorEntry { patterns: Vec::new(), code, valid_range: range });
                self.actors.len() - 1
            });
            let key = (pattern.clone(), range);
            let slot = self.actor_index.values_mut(&pattern);
            if let Some(previous) = owners.insert(key, entry_idx) {
                warn!(file, line = line_no, pattern = fields[0], "duplicate actor pattern, keeping the later entry");
                self.actors[previous].patterns.retain(|p| *p != pattern);
                slot.retain(|&v| v != previous);
            }
            slot.push(entry_idx);
            self.actors[entry_idx].patterns.push(pattern);
        }
        self.actors.retain(|a| !a.patterns.is_empty());
        if self.actors.len() != groups.len() {
            self.reindex_actors();
        }
        Ok(version)
    }

    fn reindex_actors(&mut self) {
        let mut index = TokenTrie::new();
        for (idx, entry) in self.actors.iter().enumerate() {
            for p in &entry.patterns {
                index.values_mut(p).push(idx);
            }
        }
        self.actor_index = index;
    }

    fn read_verbs(&mut self, file: &str, text: &str) -> Result<String, DictionaryError> {
        let (version, lines) = split_header(file, text)?;
        let mut owners: HashMap<Vec<String>, usize> = HashMap::new();
        for (line_no, line) in lines {
            let fields: Vec<&str> = line.split(';').map(str::trim).collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(format_err(file, line_no, "expected PATTERN;CODE[;ROOT>COMPOSED,...]"));
            }
            let pattern = split_pattern(file, line_no, fields[0])?;
            let code = CameoCode::new(fields[1]).map_err(|e| invalid_code(file, line_no, fields[1], e))?;
            let mut rules = Vec::new();
            if let Some(spec) = fields.get(2).filter(|s| !s.is_empty()) {
                for rule in spec.split(',').map(str::trim) {
                    let Some((root, composed)) = rule.split_once('>') else {
                        return Err(format_err(file, line_no, format!("rule {rule:?} is not ROOT>COMPOSED")));
                    };
                    let root = root.trim();
                    let root_ok = root.len() == 2 && CameoCode::new(root).is_ok();
                    if !root_ok {
                        return Err(DictionaryError::InvalidCode {
                            file: file.to_owned(),
                            line: line_no,
                            code: root.to_owned(),
                            reason: "partner root must be two digits in 01-20".into(),
                        });
                    }
                    let composed = composed.trim();
                    let composed = CameoCode::new(composed).map_err(|e| invalid_code(file, line_no, composed, e))?;
                    rules.push((root.to_owned(), composed));
                }
            }

            let existing = self.verbs.iter().position(|v| v.code == code && v.composition_rules == rules);
            let entry_idx = existing.unwrap_or_else(|| {
                self.verbs.push(VerbEntry { verb_forms: Vec::new(), code, composition_rules: rules });
                self.verbs.len() - 1
            });
            let slot = self.verb_index.values_mut(&pattern);
            if let Some(previous) = owners.insert(pattern.clone(), entry_idx) {
                warn!(file, line = line_no, pattern = fields[0], "duplicate verb pattern, keeping the later entry");
                self.verbs[previous].verb_forms.retain(|p| *p != pattern);
                slot.retain(|&v| v != previous);
            }
            slot.push(entry_idx);
            self.verbs[entry_idx].verb_forms.push(pattern);
        }
        if self.verbs.iter().any(|v| v.verb_forms.is_empty()) {
            self.verbs.retain(|v| !v.verb_forms.is_empty());
            let mut index = TokenTrie::new();
            for (idx, entry) in self.verbs.iter().enumerate() {
                for p in &entry.verb_forms {
                    index.values_mut(p).push(idx);
                }
            }
            self.verb_index = index;
        }
        Ok(version)
    }

    fn read_issues(&mut self, file: &str, text: &str) -> Result<String, DictionaryError> {
        let (version, lines) = split_header(file, text)?;
        for (line_no, line) in lines {
            let Some((keyword, tag)) = line.split_once(';') else {
                return Err(format_err(file, line_no, "expected keyword phrase;TAG"));
            };
            let keyword = keyword.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
            let tag = tag.trim();
            if keyword.is_empty() {
                return Err(format_err(file, line_no, "empty keyword"));
            }
            let tag_ok = tag.starts_with(|c: char| c.is_ascii_uppercase())
                && tag.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_');
            if !tag_ok {
                return Err(format_err(file, line_no, format!("issue tag {tag:?} must be UPPER_SNAKE_CASE")));
            }
            self.issues.push(IssueEntry { keyword, issue_tag: tag.to_owned() });
        }
        Ok(version)
    }

    fn read_code_sets(&mut self, file: &str, text: &str) -> Result<String, DictionaryError> {
        let (version, lines) = split_header(file, text)?;
        let mut section: Option<&mut BTreeSet<String>> = None;
        let sets = &mut self.code_sets;
        for (line_no, line) in lines {
            if line.starts_with('[') {
                section = Some(match line {
                    "[roles]" => &mut sets.roles,
                    "[attributes]" => &mut sets.attributes,
                    "[entities]" => &mut sets.entities_special,
                    other => return Err(format_err(file, line_no, format!("unknown section {other}"))),
                });
                continue;
            }
            let Some(target) = section.as_deref_mut() else {
                return Err(format_err(file, line_no, "code listed before any section header"));
            };
            for code in line.split_whitespace() {
                if code.len() != 3 || !code.bytes().all(|b| b.is_ascii_uppercase()) {
                    return Err(DictionaryError::InvalidCode {
                        file: file.to_owned(),
                        line: line_no,
                        code: code.to_owned(),
                        reason: "code-set entries are 3 uppercase letters".into(),
                    });
                }
                target.insert(code.to_owned());
            }
        }
        Ok(version)
    }
}

fn format_err(file: &str, line: usize, reason: impl Into<String>) -> DictionaryError {
    DictionaryError::Format { file: file.to_owned(), line, reason: reason.into() }
}

fn invalid_code(file: &str, line: usize, code: &str, err: crate::codes::CodeError) -> DictionaryError {
    DictionaryError::InvalidCode { file: file.to_owned(), line, code: code.to_owned(), reason: err.to_string() }
}

/// Returns the header version and the remaining content lines with their
/// 1-based numbers, comments stripped.
fn split_header<'t>(file: &str, text: &'t str) -> Result<(String, Vec<(usize, &'t str)>), DictionaryError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (header_line, header) = lines.next().ok_or_else(|| format_err(file, 1, "missing '# version:' header"))?;
    let version = header
        .strip_prefix('#')
        .map(str::trim_start)
        .and_then(|h| h.strip_prefix("version:"))
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .ok_or_else(|| format_err(file, header_line, "first line must be '# version: <string>'"))?;
    let body = lines
        .filter_map(|(n, l)| {
            let content = l.split('#').next().unwrap_or("").trim();
            (!content.is_empty()).then_some((n, content))
        })
        .collect();
    Ok((version.to_owned(), body))
}

fn split_pattern(file: &str, line: usize, raw: &str) -> Result<Vec<String>, DictionaryError> {
    let tokens: Vec<String> = raw
        .split(|c: char| c == '_' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.chars().flat_map(char::to_uppercase).collect())
        .collect();
    if tokens.is_empty() {
        return Err(format_err(file, line, "empty pattern"));
    }
    Ok(tokens)
}

fn parse_range(file: &str, line: usize, raw: &str) -> Result<DateRange, DictionaryError> {
    let parse = |s: &str| NaiveDate::parse_from_str(s.trim(), "%Y%m%d");
    let range = raw.split_once('-').and_then(|(a, b)| Some(DateRange { start: parse(a).ok()?, end: parse(b).ok()? }));
    match range {
        Some(r) if r.start <= r.end => Ok(r),
        _ => Err(format_err(file, line, format!("bad date range {raw:?}, expected YYYYMMDD-YYYYMMDD"))),
    }
}

/// Non-overlapping occurrences of `needle` bounded by non-alphanumerics.
pub(crate) fn count_word_occurrences(haystack: &str, needle: &str) -> usize {
    if needle.is_empty() {
        return 0;
    }
    let is_word = |c: char| c.is_alphanumeric();
    let mut count = 0;
    let mut from = 0;
    while let Some(pos) = haystack[from..].find(needle) {
        let start = from + pos;
        let end = start + needle.len();
        let left_ok = !haystack[..start].chars().next_back().is_some_and(is_word);
        let right_ok = !haystack[end..].chars().next().is_some_and(is_word);
        if left_ok && right_ok {
            count += 1;
            from = end;
        } else {
            from = start + haystack[start..].chars().next().map_or(1, char::len_utf8);
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const CODES: &str = "# version: t1\n[roles]\nGOV MIL REB\n[attributes]\nMOS INS\n[entities]\nIMG IGO MNC NGO\n";
    const VERBS: &str = "# version: t1\nDENOUNCED;111\nINTEND;03;07>033\nAID;07\nFIGHT;19\n";
    const ISSUES: &str = "# version: t1\neuropean union;EUROPEAN_UNION\nislamic state;TERROR_GROUP\nstate;STATE\n";

    fn actors() -> &'static str {
        "# version: t1\nISLAMIC_STATE_;IMGMOSISI\nISLAMIC_;IMGMOS\nOBAMA;USAGOV\nCLINTON;USAELI;19900101-19991231\n"
    }

    fn dicts() -> DictionarySet {
        DictionarySet::parse(actors(), VERBS, ISSUES, CODES).unwrap()
    }

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn islamic_state_longest_match() {
        let d = dicts();
        let (code, len) = d.match_actor(&["Islamic", "State", "fighters"], date(2014, 6, 20)).unwrap();
        assert_eq!((code.as_str(), len), ("IMGMOSISI", 2));
        let (code, len) = d.match_actor(&["islamic", "jihad"], date(2014, 6, 20)).unwrap();
        assert_eq!((code.as_str(), len), ("IMGMOS", 1));
        assert!(d.match_actor(&["purple", "turnip"], date(2014, 6, 20)).is_none());
    }

    #[test]
    fn date_scoped_actor() {
        let d = dicts();
        assert!(d.match_actor(&["Clinton"], date(2014, 1, 1)).is_none());
        assert_eq!(d.match_actor(&["Clinton"], date(1995, 1, 1)).unwrap().0.as_str(), "USAELI");
        assert_eq!(d.match_actor(&["Clinton"], date(1999, 12, 31)).unwrap().0.as_str(), "USAELI");
    }

    #[test]
    fn date_ties_break_by_file_order() {
        let src = "# version: t\nBUSH;USAELI;19800101-20091231\nBUSH;USAGOV;20010101-20091231\n";
        let d = DictionarySet::parse(src, VERBS, ISSUES, CODES).unwrap();
        assert_eq!(d.match_actor(&["Bush"], date(2005, 1, 1)).unwrap().0.as_str(), "USAELI");
        assert_eq!(d.match_actor(&["Bush"], date(1985, 1, 1)).unwrap().0.as_str(), "USAELI");
    }

    #[test]
    fn duplicate_pattern_last_wins() {
        let src = "# version: t\nASSAD;SYRGOV\nASSAD;SYRELI\nDAMASCUS;SYRGOV\n";
        let d = DictionarySet::parse(src, VERBS, ISSUES, CODES).unwrap();
        assert_eq!(d.match_actor(&["Assad"], date(2014, 1, 1)).unwrap().0.as_str(), "SYRELI");
        let gov = d.actors().iter().find(|a| a.code.as_str() == "SYRGOV").unwrap();
        assert_eq!(gov.patterns, vec![vec!["DAMASCUS".to_string()]]);
    }

    #[test]
    fn verbs_and_rules() {
        let d = dicts();
        let (entry, len) = d.match_verb(&["denounced"]).unwrap();
        assert_eq!((entry.code.as_str(), len), ("111", 1));
        let (intend, _) = d.match_verb(&["intend", "to"]).unwrap();
        assert_eq!(intend.rule_for("07").unwrap().as_str(), "033");
        assert!(d.match_verb::<&str>(&[]).is_none());
    }

    #[test]
    fn header_only_files_are_valid() {
        let d = DictionarySet::parse(actors(), "# version: t1\n", ISSUES, CODES).unwrap();
        assert!(d.verbs().is_empty());
        assert_eq!(d.version(), "t1");
    }

    #[test]
    fn versions_combined_when_different() {
        let d = DictionarySet::parse(actors(), "# version: v2\n", ISSUES, CODES).unwrap();
        assert_eq!(d.version(), "t1+v2");
    }

    #[test]
    fn rejects_bad_lines() {
        let err = DictionarySet::parse(actors(), "# version: t\nFOO;111\nBAR;25\n", ISSUES, CODES).unwrap_err();
        assert!(matches!(err, DictionaryError::InvalidCode { line: 3, .. }), "{err}");
        let err = DictionarySet::parse(actors(), "# version: t\nFOO;03;7>033\n", ISSUES, CODES).unwrap_err();
        assert!(matches!(err, DictionaryError::InvalidCode { line: 2, .. }), "{err}");
        let err = DictionarySet::parse(actors(), "# version: t\nFOO;03;07>331\n", ISSUES, CODES).unwrap_err();
        assert!(matches!(err, DictionaryError::InvalidCode { .. }), "{err}");
        let err = DictionarySet::parse("# version: t\nFOO;SY\n", VERBS, ISSUES, CODES).unwrap_err();
        assert!(matches!(err, DictionaryError::InvalidCode { line: 2, .. }), "{err}");
        let err = DictionarySet::parse("# version: t\nFOO\n", VERBS, ISSUES, CODES).unwrap_err();
        assert!(matches!(err, DictionaryError::Format { line: 2, .. }), "{err}");
        let err = DictionarySet::parse("FOO;USA\n", VERBS, ISSUES, CODES).unwrap_err();
        assert!(matches!(err, DictionaryError::Format { line: 1, .. }), "{err}");
        let err = DictionarySet::parse("# version: t\nFOO;USA;2014-2015\n", VERBS, ISSUES, CODES).unwrap_err();
        assert!(matches!(err, DictionaryError::Format { .. }), "{err}");
        let err = DictionarySet::parse(actors(), VERBS, "# version: t\nterror;terror\n", CODES).unwrap_err();
        assert!(matches!(err, DictionaryError::Format { .. }), "{err}");
        let err = DictionarySet::parse(actors(), VERBS, ISSUES, "# version: t\nGOV\n").unwrap_err();
        assert!(matches!(err, DictionaryError::Format { line: 2, .. }), "{err}");
    }

    #[test]
    fn missing_file_reported() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.txt");
        let paths = DictionaryPaths { actors: &missing, verbs: &missing, issues: &missing, code_sets: &missing };
        assert!(matches!(load_dictionaries(&paths), Err(DictionaryError::MissingFile(_))));
    }

    #[test]
    fn issue_counts() {
        let d = dicts();
        let text = "the european union said on monday that the european union will act";
        assert_eq!(d.match_issues(text), vec![("EUROPEAN_UNION".to_string(), 2)]);
        assert!(d.match_issues("nothing to see").is_empty());
        let text = "islamic state fighters took the state capital; the state said";
        assert_eq!(
            d.match_issues(text),
            vec![("STATE".to_string(), 3), ("TERROR_GROUP".to_string(), 1)]
        );
        // "statement" is not a whole-word hit for "state"
        assert!(d.match_issues("a statement").is_empty());
    }

    /// Brute-force longest-prefix oracle over a plain entry list.
    fn oracle(entries: &[(Vec<String>, usize)], query: &[String]) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for (pattern, id) in entries {
            if pattern.len() <= query.len() && pattern[..] == query[..pattern.len()] {
                if best.map_or(true, |(_, len)| pattern.len() > len) {
                    best = Some((*id, pattern.len()));
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn longest_match_agrees_with_oracle(
            patterns in prop::collection::vec(prop::collection::vec("[ABC]", 1..4), 1..12),
            query in prop::collection::vec("[abc]", 0..6),
        ) {
            // deduplicate patterns so that "first wins" and "last wins" agree
            let mut unique: Vec<Vec<String>> = Vec::new();
            for p in patterns {
                if !unique.contains(&p) {
                    unique.push(p);
                }
            }
            let mut src = String::from("# version: p\n");
            let mut entries = Vec::new();
            for (i, p) in unique.iter().enumerate() {
                let code: String = (0..3).map(|k| (b'A' + ((i / 26usize.pow(k)) % 26) as u8) as char).collect();
                src.push_str(&format!("{};{}\n", p.join("_"), code));
                entries.push((p.clone(), i));
            }
            let d = DictionarySet::parse(&src, VERBS, ISSUES, CODES).unwrap();
            let upper: Vec<String> = query.iter().map(|q| q.to_uppercase()).collect();
            let expected = oracle(&entries, &upper).map(|(id, len)| (d.actors()[id].code.clone(), len));
            let got = d.match_actor(&query, date(2014, 1, 1)).map(|(c, len)| (c.clone(), len));
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn word_count_matches_token_scan(words in prop::collection::vec("(ab|b|c)", 0..12)) {
            let text = words.join(" ");
            let expected = words.iter().filter(|w| *w == "b").count();
            prop_assert_eq!(count_word_occurrences(&text, "b"), expected);
        }
    }
}
