use serde::{Deserialize, Serialize};

use super::EnrichError;
use crate::dictionaries::CodeSets;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActorDecomposition {
    pub entity: String,
    pub role: Option<String>,
    pub attribute: Option<String>,
    pub full: String,
}

/// Splits a full actor code into entity, first known role and first known
/// attribute. Segments matching neither set stay only in `full`.
pub fn decompose_actor(full: &str, code_sets: &CodeSets) -> Result<ActorDecomposition, EnrichError> {
    if full.is_empty() || full.len() % 3 != 0 || !full.is_ascii() {
        return Err(EnrichError::MalformedCode(full.to_owned()));
    }
    let mut segments = (0..full.len()).step_by(3).map(|i| &full[i..i + 3]);
    let entity = segments.next().expect("non-empty").to_owned();
    let mut role = None;
    let mut attribute = None;
    for segment in segments {
        if role.is_none() && code_sets.roles.contains(segment) {
            role = Some(segment.to_owned());
        } else if attribute.is_none() && code_sets.attributes.contains(segment) {
            attribute = Some(segment.to_owned());
        }
    }
    Ok(ActorDecomposition { entity, role, attribute, full: full.to_owned() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sets() -> CodeSets {
        CodeSets {
            roles: ["GOV", "MIL", "REB", "MED", "EDU"].into_iter().map(String::from).collect(),
            attributes: ["MOS", "INS", "ELI"].into_iter().map(String::from).collect(),
            entities_special: ["IMG", "IGO", "MNC", "NGO"].into_iter().map(String::from).collect(),
        }
    }

    #[test]
    fn examples() {
        let d = decompose_actor("SYRGOV", &sets()).unwrap();
        assert_eq!((d.entity.as_str(), d.role.as_deref(), d.attribute.as_deref()), ("SYR", Some("GOV"), None));
        let d = decompose_actor("IMGMOSISI", &sets()).unwrap();
        assert_eq!((d.entity.as_str(), d.role.as_deref(), d.attribute.as_deref()), ("IMG", None, Some("MOS")));
        assert_eq!(d.full, "IMGMOSISI");
        assert!(matches!(decompose_actor("SY", &sets()), Err(EnrichError::MalformedCode(_))));
        assert!(matches!(decompose_actor("", &sets()), Err(EnrichError::MalformedCode(_))));
    }

    #[test]
    fn first_hit_wins() {
        let d = decompose_actor("USAMILGOVINSELI", &sets()).unwrap();
        assert_eq!((d.role.as_deref(), d.attribute.as_deref()), (Some("MIL"), Some("INS")));
    }

    proptest! {
        #[test]
        fn never_invents_segments(segs in prop::collection::vec("(GOV|MIL|MOS|INS|SYR|ISI|[A-Z]{3})", 1..6)) {
            let full = segs.concat();
            let sets = sets();
            let d = decompose_actor(&full, &sets).unwrap();
            prop_assert_eq!(&d.entity, &segs[0]);
            let rest = &segs[1..];
            let first_role = rest.iter().find(|s| sets.roles.contains(*s));
            let first_attr = rest.iter().find(|s| sets.attributes.contains(*s));
            prop_assert_eq!(d.role.as_ref(), first_role);
            prop_assert_eq!(d.attribute.as_ref(), first_attr);
            prop_assert_eq!(d.full, full);
        }
    }
}
