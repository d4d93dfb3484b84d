use std::collections::HashMap;
use std::fmt;

use super::EnrichError;

/// Conflict-cooperation scores keyed by CAMEO code.
///
/// File format: a `# version: <string>` header, then `CODE<TAB>score` lines.
/// Every root 01-20 needs an entry; scores lie in [-10, 10].
#[derive(Debug, Clone)]
pub struct GoldsteinTable {
    version: String,
    scores: HashMap<String, f64>,
}

/// `line` is 0 when the problem is with the table as a whole.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldsteinFormatError {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for GoldsteinFormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            0 => write!(f, "goldstein table: {}", self.reason),
            n => write!(f, "goldstein table line {n}: {}", self.reason),
        }
    }
}

impl std::error::Error for GoldsteinFormatError {}

impl GoldsteinTable {
    pub fn parse(text: &str) -> Result<Self, GoldsteinFormatError> {
        let err = |line: usize, reason: String| GoldsteinFormatError { line, reason };
        let mut version = None;
        let mut scores = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if version.is_none() {
                    if let Some(v) = comment.trim().strip_prefix("version:") {
                        version = Some(v.trim().to_owned());
                    }
                }
                continue;
            }
            if version.is_none() {
                return Err(err(line_no, "missing '# version:' header".into()));
            }
            let (code, score) = line
                .split_once('\t')
                .ok_or_else(|| err(line_no, "expected CODE<TAB>score".into()))?;
            let code = code.trim();
            let valid_code = (2..=4).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_digit());
            if !valid_code {
                return Err(err(line_no, format!("bad code {code:?}")));
            }
            let score: f64 = score.trim().parse().map_err(|_| err(line_no, format!("bad score {score:?}")))?;
            if !(-10.0..=10.0).contains(&score) {
                return Err(err(line_no, format!("score {score} outside [-10, 10]")));
            }
            scores.insert(code.to_owned(), score);
        }
        let version = version.filter(|v| !v.is_empty()).ok_or_else(|| err(1, "missing '# version:' header".into()))?;
        for root in 1..=20 {
            let key = format!("{root:02}");
            if !scores.contains_key(&key) {
                return Err(err(0, format!("no entry for root {key}")));
            }
        }
        Ok(GoldsteinTable { version, scores })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Most specific entry among the code's 4-, 3- and 2-digit prefixes.
    pub fn goldstein(&self, code: &str) -> Result<f64, EnrichError> {
        let ascii_digits = code.len() >= 2 && code.bytes().all(|b| b.is_ascii_digit());
        if ascii_digits {
            for len in (2..=code.len().min(4)).rev() {
                if let Some(&score) = self.scores.get(&code[..len]) {
                    return Ok(score);
                }
            }
        }
        Err(EnrichError::UnknownRoot(code.to_owned()))
    }
}
