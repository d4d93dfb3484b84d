//! Validated actor and CAMEO event codes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("actor code {0:?} must be a non-empty run of 3-letter uppercase segments")]
    Actor(String),
    #[error("event code {0:?} must be 2-4 digits")]
    EventDigits(String),
    #[error("event code {0:?} has a root outside 01-20")]
    EventRoot(String),
}

/// Concatenated 3-letter segments, e.g. `SYRGOV` or `IMGMOSISI`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ActorCode(String);

impl ActorCode {
    pub fn new(code: impl Into<String>) -> Result<Self, CodeError> {
        let code = code.into();
        if code.is_empty() || code.len() % 3 != 0 || !code.bytes().all(|b| b.is_ascii_uppercase()) {
            return Err(CodeError::Actor(code));
        }
        Ok(ActorCode(code))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        (0..self.0.len()).step_by(3).map(move |i| &self.0[i..i + 3])
    }

    pub fn entity(&self) -> &str {
        &self.0[..3]
    }
}

impl FromStr for ActorCode {
    type Err = CodeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActorCode::new(s)
    }
}

impl TryFrom<String> for ActorCode {
    type Error = CodeError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        ActorCode::new(s)
    }
}

impl From<ActorCode> for String {
    fn from(c: ActorCode) -> String {
        c.0
    }
}

impl fmt::Display for ActorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// CAMEO event code: 2 to 4 digits whose first two name one of the 20 roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CameoCode(String);

impl CameoCode {
    pub fn new(code: impl Into<String>) -> Result<Self, CodeError> {
        let code = code.into();
        if !(2..=4).contains(&code.len()) || !code.bytes().all(|b| b.is_ascii_digit()) {
            return Err(CodeError::EventDigits(code));
        }
        let root: u8 = code[..2].parse().expect("digits");
        if !(1..=20).contains(&root) {
            return Err(CodeError::EventRoot(code));
        }
        Ok(CameoCode(code))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Two-digit root, e.g. `"03"` for `"033"`.
    pub fn root(&self) -> &str {
        &self.0[..2]
    }

    pub fn root_number(&self) -> u8 {
        self.root().parse().expect("validated")
    }
}

impl FromStr for CameoCode {
    type Err = CodeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CameoCode::new(s)
    }
}

impl TryFrom<String> for CameoCode {
    type Error = CodeError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        CameoCode::new(s)
    }
}

impl From<CameoCode> for String {
    fn from(c: CameoCode) -> String {
        c.0
    }
}

impl fmt::Display for CameoCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actor_codes() {
        let code = ActorCode::new("IMGMOSISI").unwrap();
        assert_eq!(code.segments().collect::<Vec<_>>(), vec!["IMG", "MOS", "ISI"]);
        assert_eq!(code.entity(), "IMG");
        assert!(ActorCode::new("SY").is_err());
        assert!(ActorCode::new("").is_err());
        assert!(ActorCode::new("syr").is_err());
        assert!(ActorCode::new("SY1").is_err());
    }

    #[test]
    fn cameo_codes() {
        assert_eq!(CameoCode::new("033").unwrap().root(), "03");
        assert_eq!(CameoCode::new("20").unwrap().root_number(), 20);
        assert!(CameoCode::new("0334").is_ok());
        assert_eq!(CameoCode::new("25"), Err(CodeError::EventRoot("25".into())));
        assert_eq!(CameoCode::new("00"), Err(CodeError::EventRoot("00".into())));
        assert!(matches!(CameoCode::new("1"), Err(CodeError::EventDigits(_))));
        assert!(matches!(CameoCode::new("01234"), Err(CodeError::EventDigits(_))));
        assert!(matches!(CameoCode::new("1a"), Err(CodeError::EventDigits(_))));
    }
}
