//! Seeded generator of bracketed sentences built from a dictionary's own
//! vocabulary. Used for throughput measurement.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dictionaries::DictionarySet;

/// `count` trees, one per line, reproducible from `seed`. Roughly one in ten
/// sentences contains no dictionary verb.
pub fn synthetic_corpus(dicts: &DictionarySet, count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let actors: Vec<&[String]> = dicts.actors().iter().flat_map(|a| a.patterns.iter().map(Vec::as_slice)).collect();
    let verbs: Vec<&[String]> = dicts.verbs().iter().flat_map(|v| v.verb_forms.iter().map(Vec::as_slice)).collect();
    assert!(!actors.is_empty() && !verbs.is_empty(), "dictionaries need actors and verbs");
    (0..count).map(|_| sentence(&mut rng, &actors, &verbs)).collect()
}

fn sentence(rng: &mut ChaCha8Rng, actors: &[&[String]], verbs: &[&[String]]) -> String {
    let subject = noun_phrase(rng, actors);
    let vp = if rng.gen_bool(0.1) {
        "(VP (VBD was) (ADJP (RB very) (JJ quiet)))".to_owned()
    } else {
        verb_phrase(rng, actors, verbs, 0)
    };
    let lead = if rng.gen_bool(0.2) { "(PP (IN On) (NP (NNP Monday))) (, ,) " } else { "" };
    format!("(ROOT (S {lead}{subject} {vp} (. .)))")
}

fn noun_phrase(rng: &mut ChaCha8Rng, actors: &[&[String]]) -> String {
    let name = actors.choose(rng).expect("non-empty");
    let leaves: Vec<String> = name.iter().map(|t| format!("(NNP {})", title_case(t))).collect();
    let det = if rng.gen_bool(0.3) { "(DT the) " } else { "" };
    let np = format!("(NP {det}{})", leaves.join(" "));
    if rng.gen_bool(0.15) {
        let other = actors.choose(rng).expect("non-empty");
        let inner: Vec<String> = other.iter().map(|t| format!("(NNP {})", title_case(t))).collect();
        format!("(NP {np} (PP (IN of) (NP {})))", inner.join(" "))
    } else {
        np
    }
}

fn verb_phrase(rng: &mut ChaCha8Rng, actors: &[&[String]], verbs: &[&[String]], depth: usize) -> String {
    let form = verbs.choose(rng).expect("non-empty");
    let mut parts = vec![format!("(VBD {})", form[0].to_lowercase())];
    parts.extend(form[1..].iter().map(|t| format!("(RP {})", t.to_lowercase())));
    if depth == 0 && rng.gen_bool(0.15) {
        let inner = verb_phrase(rng, actors, verbs, depth + 1);
        let inner = inner.replacen("(VBD ", "(VB ", 1);
        parts.push(format!("(S (VP (TO to) {inner}))"));
    } else {
        parts.push(noun_phrase(rng, actors));
        if rng.gen_bool(0.25) {
            parts.push("(PP (IN over) (NP (DT the) (NN weekend)))".to_owned());
        }
    }
    format!("(VP {})", parts.join(" "))
}

fn title_case(token: &str) -> String {
    let lower = token.to_lowercase();
    let mut chars = lower.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}
