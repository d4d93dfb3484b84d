use std::fmt;
use std::io::{self, Write};

use chrono::{Datelike, NaiveDate};
use serde::ser::{Serialize, SerializeMap, Serializer};
use thiserror::Error;

use crate::enrich::{quad_class, GeoResult};

/// Output columns, in order.
pub const COLUMNS: [&str; 27] = [
    "EventID",
    "Date",
    "Year",
    "Month",
    "Day",
    "SourceActorFull",
    "SourceActorEntity",
    "SourceActorRole",
    "SourceActorAttribute",
    "TargetActorFull",
    "TargetActorEntity",
    "TargetActorRole",
    "TargetActorAttribute",
    "EventCode",
    "EventRootCode",
    "QuadClass",
    "GoldsteinScore",
    "Issues",
    "ActionLat",
    "ActionLong",
    "LocationName",
    "GeoCountryName",
    "GeoStateName",
    "SentenceID",
    "URLs",
    "NewsSources",
    "StoryID",
];

/// Actor code plus its parts; absent parts are empty strings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ActorColumns {
    pub full: String,
    pub entity: String,
    pub role: String,
    pub attribute: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub event_id: String,
    pub date: NaiveDate,
    pub source: ActorColumns,
    pub target: ActorColumns,
    pub event_code: String,
    pub event_root_code: String,
    pub quad_class: u8,
    pub goldstein: f64,
    pub issues: Vec<(String, usize)>,
    pub geo: Option<GeoResult>,
    pub sentence_id: usize,
    pub urls: Vec<String>,
    pub news_sources: Vec<String>,
    pub story_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("records line {line}: {reason}")]
pub struct RecordError {
    pub line: usize,
    pub reason: String,
}

/// A row that breaks one of the cross-column rules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct Inconsistency(pub String);

impl EventRecord {
    pub fn to_fields(&self) -> Vec<String> {
        let (lat, lon, location, country, state) = match &self.geo {
            Some(g) => (
                g.lat.to_string(),
                g.lon.to_string(),
                clean(&g.location_name),
                clean(&g.country_name),
                clean(&g.state_name),
            ),
            None => Default::default(),
        };
        let issues: Vec<String> = self.issues.iter().map(|(tag, n)| format!("{tag}:{n}")).collect();
        vec![
            self.event_id.clone(),
            self.date.format("%Y%m%d").to_string(),
            format!("{:04}", self.date.year()),
            format!("{:02}", self.date.month()),
            format!("{:02}", self.date.day()),
            self.source.full.clone(),
            self.source.entity.clone(),
            self.source.role.clone(),
            self.source.attribute.clone(),
            self.target.full.clone(),
            self.target.entity.clone(),
            self.target.role.clone(),
            self.target.attribute.clone(),
            self.event_code.clone(),
            self.event_root_code.clone(),
            self.quad_class.to_string(),
            format!("{:.1}", self.goldstein),
            issues.join(";"),
            lat,
            lon,
            location,
            country,
            state,
            self.sentence_id.to_string(),
            join_clean(&self.urls),
            join_clean(&self.news_sources),
            self.story_id.clone(),
        ]
    }

    /// Parses one row; `Err` carries the reason without a line number.
    pub fn from_fields(fields: &[&str]) -> Result<Self, String> {
        if fields.len() != COLUMNS.len() {
            return Err(format!("expected {} columns, found {}", COLUMNS.len(), fields.len()));
        }
        let f = |i: usize| fields[i].to_owned();
        let date = NaiveDate::parse_from_str(fields[1], "%Y%m%d").map_err(|_| format!("bad Date {:?}", fields[1]))?;
        let parts = [
            (fields[2], format!("{:04}", date.year()), "Year"),
            (fields[3], format!("{:02}", date.month()), "Month"),
            (fields[4], format!("{:02}", date.day()), "Day"),
        ];
        for (got, want, name) in parts {
            if got != want {
                return Err(format!("{name} {got:?} disagrees with Date {}", fields[1]));
            }
        }
        let actor = |i: usize| ActorColumns { full: f(i), entity: f(i + 1), role: f(i + 2), attribute: f(i + 3) };
        let quad_class = fields[15].parse().map_err(|_| format!("bad QuadClass {:?}", fields[15]))?;
        let goldstein = fields[16].parse().map_err(|_| format!("bad GoldsteinScore {:?}", fields[16]))?;
        let issues = split_list(fields[17])
            .into_iter()
            .map(|item| {
                item.rsplit_once(':')
                    .and_then(|(tag, n)| Some((tag.to_owned(), n.parse().ok()?)))
                    .ok_or_else(|| format!("bad issue {item:?}"))
            })
            .collect::<Result<_, _>>()?;
        let geo = if fields[18..23].iter().all(|s| s.is_empty()) {
            None
        } else {
            Some(GeoResult {
                lat: fields[18].parse().map_err(|_| format!("bad ActionLat {:?}", fields[18]))?,
                lon: fields[19].parse().map_err(|_| format!("bad ActionLong {:?}", fields[19]))?,
                location_name: f(20),
                country_name: f(21),
                state_name: f(22),
            })
        };
        let sentence_id = fields[23].parse().map_err(|_| format!("bad SentenceID {:?}", fields[23]))?;
        Ok(EventRecord {
            event_id: f(0),
            date,
            source: actor(5),
            target: actor(9),
            event_code: f(13),
            event_root_code: f(14),
            quad_class,
            goldstein,
            issues,
            geo,
            sentence_id,
            urls: split_list(fields[24]).into_iter().map(String::from).collect(),
            news_sources: split_list(fields[25]).into_iter().map(String::from).collect(),
            story_id: f(26),
        })
    }

    /// Root is the code's 2-digit prefix and QuadClass matches the root.
    pub fn check_consistency(&self) -> Result<(), Inconsistency> {
        let bad = |msg: String| Err(Inconsistency(msg));
        if self.event_root_code.len() != 2 || !self.event_code.starts_with(&self.event_root_code) {
            return bad(format!("root {:?} is not the prefix of {:?}", self.event_root_code, self.event_code));
        }
        match quad_class(&self.event_root_code) {
            Ok(q) if q == self.quad_class => {}
            Ok(q) => return bad(format!("QuadClass {} but root {} maps to {q}", self.quad_class, self.event_root_code)),
            Err(e) => return bad(e.to_string()),
        }
        if self.source.full.is_empty() || !self.source.full.starts_with(&self.source.entity) {
            return bad(format!("source entity {:?} does not start {:?}", self.source.entity, self.source.full));
        }
        if !self.target.full.starts_with(&self.target.entity) {
            return bad(format!("target entity {:?} does not start {:?}", self.target.entity, self.target.full));
        }
        Ok(())
    }

    pub fn json(&self) -> RecordJson<'_> {
        RecordJson(self)
    }
}

impl fmt::Display for EventRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fields().join("\t"))
    }
}

/// Serializes a record as an object of its 27 columns, in column order.
pub struct RecordJson<'a>(&'a EventRecord);

impl Serialize for RecordJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let fields = self.0.to_fields();
        let mut map = serializer.serialize_map(Some(COLUMNS.len()))?;
        for (name, value) in COLUMNS.iter().zip(&fields) {
            map.serialize_entry(name, value)?;
        }
        map.end()
    }
}

pub fn header_line() -> String {
    COLUMNS.join("\t")
}

/// Header row then one row per record, LF line endings.
pub fn write_records<W: Write>(mut out: W, records: &[EventRecord]) -> io::Result<()> {
    writeln!(out, "{}", header_line())?;
    for record in records {
        writeln!(out, "{record}")?;
    }
    out.flush()
}

pub fn read_records(text: &str) -> Result<Vec<EventRecord>, RecordError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == header_line() => {}
        Some(_) => return Err(RecordError { line: 1, reason: "header does not match the 27-column schema".into() }),
        None => return Err(RecordError { line: 1, reason: "empty records file".into() }),
    }
    lines
        .filter(|(_, line)| !line.is_empty())
        .map(|(idx, line)| {
            let fields: Vec<&str> = line.split('\t').collect();
            EventRecord::from_fields(&fields).map_err(|reason| RecordError { line: idx + 1, reason })
        })
        .collect()
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

fn join_clean(items: &[String]) -> String {
    items.iter().map(|s| clean(s).replace(';', "%3B")).collect::<Vec<_>>().join(";")
}

fn split_list(field: &str) -> Vec<&str> {
    if field.is_empty() {
        Vec::new()
    } else {
        field.split(';').collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> EventRecord {
        EventRecord {
            event_id: "20140620-000001".into(),
            date: NaiveDate::from_ymd_opt(2014, 6, 20).unwrap(),
            source: ActorColumns { full: "SYRGOV".into(), entity: "SYR".into(), role: "GOV".into(), attribute: String::new() },
            target: ActorColumns { full: "SYRREB".into(), entity: "SYR".into(), role: "REB".into(), attribute: String::new() },
            event_code: "190".into(),
            event_root_code: "19".into(),
            quad_class: 4,
            goldstein: -10.0,
            issues: vec![("SECURITY".into(), 2), ("TERROR".into(), 1)],
            geo: Some(GeoResult {
                lat: 34.8021,
                lon: 38.9968,
                location_name: "Syria".into(),
                country_name: "Syria".into(),
                state_name: "Syria".into(),
            }),
            sentence_id: 3,
            urls: vec!["http://a.test/1".into(), "http://b.test/2".into()],
            news_sources: vec!["a".into(), "b".into()],
            story_id: "abc".into(),
        }
    }

    #[test]
    fn fields_layout() {
        let fields = sample().to_fields();
        assert_eq!(fields.len(), 27);
        assert_eq!(&fields[1..5], ["20140620", "2014", "06", "20"]);
        assert_eq!(fields[16], "-10.0");
        assert_eq!(fields[17], "SECURITY:2;TERROR:1");
        assert_eq!(fields[24], "http://a.test/1;http://b.test/2");
        assert_eq!(fields[26], "abc");
    }

    #[test]
    fn absent_values_are_empty() {
        let mut r = sample();
        r.target = ActorColumns::default();
        r.geo = None;
        r.issues.clear();
        let fields = r.to_fields();
        assert!(fields[9..13].iter().all(String::is_empty));
        assert!(fields[17..23].iter().all(String::is_empty));
        let back = EventRecord::from_fields(&fields.iter().map(String::as_str).collect::<Vec<_>>()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn tsv_round_trip_and_errors() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[sample()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("EventID\tDate\t"));
        assert!(text.ends_with('\n'));
        assert_eq!(read_records(&text).unwrap(), vec![sample()]);

        let broken = text.replace("\t2014\t06\t20\t", "\t2014\t07\t20\t");
        let err = read_records(&broken).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.reason.contains("Month"));
        assert_eq!(read_records("nope\n").unwrap_err().line, 1);
    }

    #[test]
    fn consistency() {
        assert!(sample().check_consistency().is_ok());
        let mut r = sample();
        r.quad_class = 3;
        assert!(r.check_consistency().is_err());
        let mut r = sample();
        r.event_root_code = "18".into();
        assert!(r.check_consistency().is_err());
    }

    #[test]
    fn json_keeps_column_order() {
        let json = serde_json::to_string(&sample().json()).unwrap();
        let keys: Vec<usize> = COLUMNS.iter().map(|c| json.find(&format!("\"{c}\"")).unwrap()).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(json.contains("\"QuadClass\":\"4\""));
    }

    proptest! {
        #[test]
        fn round_trip(
            day in 0u32..3000,
            code in "(0[1-9]|1[0-9]|20)[0-9]{0,2}",
            g in -100i32..=100,
            n in 0usize..50,
            urls in prop::collection::vec("http://[a-z]{1,6}\\.test/[a-z0-9]{0,5}", 0..4),
        ) {
            let mut r = sample();
            r.date = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap() + chrono::Days::new(day.into());
            r.event_root_code = code[..2].to_owned();
            r.quad_class = quad_class(&r.event_root_code).unwrap();
            r.event_code = code;
            r.goldstein = f64::from(g) / 10.0;
            r.sentence_id = n;
            r.urls = urls;
            let fields = r.to_fields();
            prop_assert_eq!(fields.len(), 27);
            let back = EventRecord::from_fields(&fields.iter().map(String::as_str).collect::<Vec<_>>()).unwrap();
            prop_assert!(back.check_consistency().is_ok());
            prop_assert_eq!(back, r);
        }
    }
}
