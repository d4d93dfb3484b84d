//! Tree-driven who-did-what-to-whom coding.
//!
//! For one sentence the coder
//!
//! 1. picks the main clause: the first clause node in preorder, or the root
//!    when the tree has none;
//! 2. takes the first NP child of that clause preceding its VP as the source
//!    and resolves it against the actor dictionary;
//! 3. resolves the verb of each VP conjunct from its head onward, descending
//!    through auxiliary chains (`has denounced`, `to aid`);
//! 4. takes the first NP inside the VP (not crossing into nested clauses) as
//!    the target;
//! 5. composes the verb with an embedded complement verb when the outer
//!    entry has a rule for the inner root (`intend` + `aid`);
//! 6. emits one event per resolved verb conjunct.
//!
//! Clauses nested more than three deep are skipped. Passive voice gets no
//! special treatment and pronouns never resolve to actors.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::codes::{ActorCode, CameoCode};
use crate::dictionaries::{DictionarySet, VerbEntry};
use crate::store::StoryDocument;
use crate::treebank::{detokenize, parse_treebank, LabelFamily, Node, ParseTree};

pub const MAX_CLAUSE_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodedEvent {
    pub source_code: ActorCode,
    pub target_code: Option<ActorCode>,
    pub event_code: CameoCode,
    pub sentence_id: usize,
    pub trigger_text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SkipReason {
    NoVerbMatch,
    NoSourceActor,
    ComplexSentence,
}

/// Either at least one event or the reason none were produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodingOutcome {
    Coded(Vec<CodedEvent>),
    Skipped(SkipReason),
}

impl CodingOutcome {
    pub fn events(&self) -> &[CodedEvent] {
        match self {
            CodingOutcome::Coded(events) => events,
            CodingOutcome::Skipped(_) => &[],
        }
    }

    pub fn skipped_reason(&self) -> Option<SkipReason> {
        match self {
            CodingOutcome::Coded(_) => None,
            CodingOutcome::Skipped(reason) => Some(*reason),
        }
    }

    pub fn into_events(self) -> Vec<CodedEvent> {
        match self {
            CodingOutcome::Coded(events) => events,
            CodingOutcome::Skipped(_) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoderError {
    #[error("story {0} has no parse trees")]
    NoParses(String),
}

/// Outer verb code, or the composed code when the outer entry has a rule
/// for the inner verb's root.
pub fn compose_codes(outer: &VerbEntry, inner: &VerbEntry) -> CameoCode {
    compose_with(outer, &inner.code).0
}

fn compose_with(outer: &VerbEntry, inner_code: &CameoCode) -> (CameoCode, bool) {
    match outer.rule_for(inner_code.root()) {
        Some(composed) => (composed.clone(), true),
        None => (outer.code.clone(), false),
    }
}

struct VerbHit {
    code: CameoCode,
    target: Option<ActorCode>,
    trigger: String,
}

struct Sentence<'a> {
    dicts: &'a DictionarySet,
    at_date: NaiveDate,
}

pub fn code_sentence(tree: &ParseTree, dicts: &DictionarySet, at_date: NaiveDate) -> CodingOutcome {
    let ctx = Sentence { dicts, at_date };
    let clause = main_clause(tree.root());
    if clause_depth(clause) > MAX_CLAUSE_DEPTH {
        return CodingOutcome::Skipped(SkipReason::ComplexSentence);
    }

    let children = clause.children();
    let first_vp = children.iter().position(|c| c.family() == LabelFamily::Verb);
    let before_vp = &children[..first_vp.unwrap_or(children.len())];
    let source = before_vp
        .iter()
        .find(|c| c.family() == LabelFamily::Noun)
        .and_then(|np| ctx.resolve_actor(np));
    let Some(source) = source else {
        return CodingOutcome::Skipped(SkipReason::NoSourceActor);
    };

    let mut events = Vec::new();
    let clause_vps = children.iter().filter(|c| c.family() == LabelFamily::Verb);
    for vp in clause_vps.flat_map(conjuncts) {
        if let Some(hit) = ctx.resolve_vp(vp) {
            events.push(CodedEvent {
                source_code: source.clone(),
                target_code: hit.target,
                event_code: hit.code,
                sentence_id: 0,
                trigger_text: hit.trigger,
            });
        }
    }
    if events.is_empty() {
        CodingOutcome::Skipped(SkipReason::NoVerbMatch)
    } else {
        CodingOutcome::Coded(events)
    }
}

/// Codes every stored sentence, then collapses repeated
/// (source, target, event code) triples to their first occurrence.
pub fn code_story(doc: &StoryDocument, dicts: &DictionarySet) -> Result<Vec<CodedEvent>, CoderError> {
    let trees = match doc.parse_trees.as_deref() {
        Some(trees) if !trees.is_empty() => trees,
        _ => return Err(CoderError::NoParses(doc.story_id.clone())),
    };
    let at_date = doc.event_date();
    let mut events: Vec<CodedEvent> = Vec::new();
    for (sentence_id, raw) in trees.iter().enumerate() {
        let tree = match parse_treebank(raw) {
            Ok(tree) => tree,
            Err(e) => {
                warn!(story = %doc.story_id, sentence_id, error = %e, "skipping unparseable stored tree");
                continue;
            }
        };
        for mut event in code_sentence(&tree, dicts, at_date).into_events() {
            let seen = events.iter().any(|e| {
                e.source_code == event.source_code
                    && e.target_code == event.target_code
                    && e.event_code == event.event_code
            });
            if !seen {
                event.sentence_id = sentence_id;
                events.push(event);
            }
        }
    }
    Ok(events)
}

fn main_clause(root: &Node) -> &Node {
    root.preorder().find(|n| n.family() == LabelFamily::Clause).unwrap_or(root)
}

/// Number of clause nodes on the deepest path, counting `node` itself when
/// it is a clause.
fn clause_depth(node: &Node) -> usize {
    let own = usize::from(node.family() == LabelFamily::Clause);
    own + node.children().iter().map(clause_depth).max().unwrap_or(0)
}

/// A VP without its own verb but with VP children is a coordination;
/// each child VP is coded on its own.
fn conjuncts(vp: &Node) -> Vec<&Node> {
    let has_head = vp.children().iter().any(Node::is_verbal_leaf);
    let sub_vps: Vec<&Node> = vp.children().iter().filter(|c| c.family() == LabelFamily::Verb).collect();
    if has_head || sub_vps.is_empty() {
        vec![vp]
    } else {
        sub_vps.into_iter().flat_map(conjuncts).collect()
    }
}

/// First VP reached by descending through S / SBAR wrappers.
fn complement_vp(node: &Node) -> Option<&Node> {
    match node.family() {
        LabelFamily::Verb => Some(node),
        LabelFamily::Clause | LabelFamily::Sbar => node.children().iter().find_map(complement_vp),
        _ => None,
    }
}

/// Tokens an NP offers to actor lookup: everything except material inside
/// nested PP, VP, or clause nodes.
fn np_tokens(np: &Node) -> Vec<&str> {
    fn walk<'a>(node: &'a Node, out: &mut Vec<&'a str>) {
        if let Some(token) = node.token() {
            out.push(token);
            return;
        }
        for child in node.children() {
            match child.family() {
                LabelFamily::Prep | LabelFamily::Verb | LabelFamily::Clause | LabelFamily::Sbar => {}
                _ => walk(child, out),
            }
        }
    }
    let mut out = Vec::new();
    walk(np, &mut out);
    out
}

impl Sentence<'_> {
    /// Leftmost start position in the NP that matches an actor pattern.
    fn resolve_actor(&self, np: &Node) -> Option<ActorCode> {
        let tokens = np_tokens(np);
        (0..tokens.len()).find_map(|start| self.dicts.match_actor(&tokens[start..], self.at_date).map(|(c, _)| c.clone()))
    }

    /// First NP in the VP, looking through PPs but not into clauses or
    /// nested VPs.
    fn object_of(&self, vp: &Node) -> Option<ActorCode> {
        fn first_np(node: &Node) -> Option<&Node> {
            for child in node.children() {
                match child.family() {
                    LabelFamily::Noun => return Some(child),
                    LabelFamily::Prep => {
                        if let Some(np) = first_np(child) {
                            return Some(np);
                        }
                    }
                    _ => {}
                }
            }
            None
        }
        first_np(vp).and_then(|np| self.resolve_actor(np))
    }

    fn resolve_vp(&self, vp: &Node) -> Option<VerbHit> {
        let children = vp.children();
        if let Some(head_pos) = children.iter().position(Node::is_verbal_leaf) {
            let head = &children[head_pos];
            let tokens: Vec<&str> = vp.tokens();
            let offset = head.span().start - vp.span().start;
            let tail = &tokens[offset..];
            if let Some((entry, len)) = self.dicts.match_verb(tail) {
                let trigger = detokenize(tail[..len].iter().copied());
                let direct_target = self.object_of(vp);
                let inner = children[head_pos + 1..]
                    .iter()
                    .filter_map(complement_vp)
                    .next()
                    .and_then(|inner_vp| self.resolve_vp(inner_vp));
                if let Some(inner) = inner {
                    let (code, composed) = compose_with(entry, &inner.code);
                    if composed {
                        return Some(VerbHit {
                            code,
                            target: inner.target.or(direct_target),
                            trigger: format!("{trigger} {}", inner.trigger),
                        });
                    }
                }
                return Some(VerbHit { code: entry.code.clone(), target: direct_target, trigger });
            }
        }
        // auxiliary or unknown head: continue down the verb chain
        children.iter().find(|c| c.family() == LabelFamily::Verb).and_then(|inner| self.resolve_vp(inner))
    }
}
