//! Gazetteer lookup and a mention-count "aboutness" heuristic.
//!
//! Place mentions are capitalized token runs that spell a gazetteer name
//! (longest name wins). An ambiguous name resolves to the candidate in the
//! country the document mentions most, then to the most populous one. The
//! document's location is the name mentioned most often, earliest first
//! mention breaking ties.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Place {
    pub name: String,
    pub country: String,
    pub admin1: String,
    pub lat: f64,
    pub lon: f64,
    pub population: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoResult {
    pub lat: f64,
    pub lon: f64,
    pub location_name: String,
    pub country_name: String,
    pub state_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("gazetteer line {line}: {reason}")]
pub struct GazetteerError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    places: Vec<Place>,
    by_name: HashMap<String, Vec<usize>>,
    longest_name: usize,
}

impl Gazetteer {
    /// TSV rows `name  country  admin1  lat  lon  population`; `#` comments.
    pub fn parse(text: &str) -> Result<Self, GazetteerError> {
        let mut places = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let err = |reason: String| GazetteerError { line, reason };
            let cols: Vec<&str> = raw.split('\t').map(str::trim).collect();
            let [name, country, admin1, lat, lon, population] = cols[..] else {
                return Err(err(format!("expected 6 tab-separated columns, found {}", cols.len())));
            };
            if name.is_empty() || country.is_empty() || admin1.is_empty() {
                return Err(err("name, country and admin1 must be non-empty".into()));
            }
            let lat: f64 = lat.parse().map_err(|_| err(format!("bad latitude {lat:?}")))?;
            let lon: f64 = lon.parse().map_err(|_| err(format!("bad longitude {lon:?}")))?;
            if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
                return Err(err(format!("coordinates ({lat}, {lon}) out of range")));
            }
            let population = population.parse().map_err(|_| err(format!("bad population {population:?}")))?;
            places.push(Place {
                name: name.to_owned(),
                country: country.to_owned(),
                admin1: admin1.to_owned(),
                lat,
                lon,
                population,
            });
        }
        Ok(Gazetteer::from_places(places))
    }

    pub fn from_places(places: Vec<Place>) -> Self {
        let mut by_name: HashMap<String, Vec<usize>> = HashMap::new();
        let mut longest_name = 0;
        for (idx, place) in places.iter().enumerate() {
            let key = words(&place.name).join(" ");
            longest_name = longest_name.max(key.split(' ').count());
            by_name.entry(key).or_default().push(idx);
        }
        Gazetteer { places, by_name, longest_name }
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    /// Gazetteer names mentioned in `text`, in order of appearance.
    pub fn mentions(&self, text: &str) -> Vec<String> {
        let tokens = words(text);
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            if !tokens[i].starts_with(char::is_uppercase) {
                i += 1;
                continue;
            }
            let max = self.longest_name.min(tokens.len() - i);
            let hit = (1..=max).rev().find_map(|len| {
                let key = tokens[i..i + len].join(" ");
                self.by_name.contains_key(&key).then_some((key, len))
            });
            match hit {
                Some((key, len)) => {
                    out.push(key);
                    i += len;
                }
                None => i += 1,
            }
        }
        out
    }

    pub fn geolocate(&self, text: &str) -> Option<GeoResult> {
        let mentions = self.mentions(text);
        if mentions.is_empty() {
            return None;
        }

        // name -> (count, first position)
        let mut tally: Vec<(&str, usize, usize)> = Vec::new();
        for (pos, name) in mentions.iter().enumerate() {
            match tally.iter_mut().find(|(n, _, _)| *n == name) {
                Some(entry) => entry.1 += 1,
                None => tally.push((name, 1, pos)),
            }
        }

        // Unambiguous mentions vote for their country.
        let mut country_votes: HashMap<&str, usize> = HashMap::new();
        for name in &mentions {
            let candidates = &self.by_name[name];
            let first = &self.places[candidates[0]].country;
            if candidates.iter().all(|&c| self.places[c].country == *first) {
                *country_votes.entry(first.as_str()).or_default() += 1;
            }
        }

        let (focus, _, _) = tally
            .iter()
            .copied()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
            .expect("non-empty");
        let place = self.resolve(focus, &country_votes);
        Some(GeoResult {
            lat: place.lat,
            lon: place.lon,
            location_name: place.name.clone(),
            country_name: place.country.clone(),
            state_name: place.admin1.clone(),
        })
    }

    fn resolve(&self, name: &str, country_votes: &HashMap<&str, usize>) -> &Place {
        let candidates: Vec<&Place> = self.by_name[name].iter().map(|&i| &self.places[i]).collect();
        let votes = |p: &Place| country_votes.get(p.country.as_str()).copied().unwrap_or(0);
        // max_by keeps the last maximum, so scan in reverse to favour file order
        candidates
            .iter()
            .rev()
            .copied()
            .max_by(|a, b| votes(a).cmp(&votes(b)).then(a.population.cmp(&b.population)))
            .expect("names in the index have candidates")
    }
}

/// Word tokens: alphanumeric runs, keeping inner apostrophes, hyphens and
/// periods ("Washington D.C", "Port-au-Prince").
fn words(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (k, &(pos, c)) in chars.iter().enumerate() {
        let joiner = matches!(c, '\'' | '-' | '.')
            && start.is_some()
            && chars.get(k + 1).is_some_and(|&(_, n)| n.is_alphanumeric());
        if c.is_alphanumeric() || joiner {
            start.get_or_insert(pos);
        } else if let Some(s) = start.take() {
            out.push(&text[s..pos]);
        }
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    out
}
