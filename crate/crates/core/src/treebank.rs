//! Penn-Treebank style bracketed constituency trees.
//!
//! A tree is read from a single line such as
//! `(ROOT (S (NP (NNP Obama)) (VP (VBD denounced) (NP (NNP Russia)))))`.
//! Preterminals carry their token directly, so `(NNP Obama)` is one leaf
//! node with label `NNP` and token `Obama`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreebankError {
    #[error("unbalanced brackets at byte {offset}")]
    UnbalancedBrackets { offset: usize },
    #[error("tree has no leaves")]
    EmptyTree,
    #[error("malformed node at byte {offset}: {reason}")]
    MalformedNode { offset: usize, reason: &'static str },
    #[error("root label {0:?} is neither ROOT nor a clause label")]
    InvalidRoot(String),
}

/// Half-open range of leaf indices covered by a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

/// Coarse syntactic family of a label; everything the coder does not care
/// about is `Other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelFamily {
    Noun,
    Verb,
    Prep,
    Clause,
    Sbar,
    Other,
}

impl LabelFamily {
    pub fn of(label: &str) -> Self {
        // -LRB-, -NONE- and friends start with a dash and have no base.
        if label.starts_with('-') {
            return LabelFamily::Other;
        }
        let base = label.split(['-', '=']).next().unwrap_or(label);
        match base {
            "NP" => LabelFamily::Noun,
            "VP" => LabelFamily::Verb,
            "PP" => LabelFamily::Prep,
            "S" | "SINV" | "SQ" => LabelFamily::Clause,
            "SBAR" | "SBARQ" => LabelFamily::Sbar,
            _ => LabelFamily::Other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    label: String,
    children: Vec<Node>,
    token: Option<String>,
    span: Span,
}

impl Node {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn children(&self) -> &[Node] {
        &self.children
    }

    pub fn token(&self) -> Option<&str> {
        self.token.as_deref()
    }

    pub fn span(&self) -> Span {
        self.span
    }

    pub fn is_leaf(&self) -> bool {
        self.token.is_some()
    }

    pub fn family(&self) -> LabelFamily {
        LabelFamily::of(&self.label)
    }

    /// Verbal preterminal: VB*, MD or TO.
    pub fn is_verbal_leaf(&self) -> bool {
        self.is_leaf() && (self.label.starts_with("VB") || self.label == "MD" || self.label == "TO")
    }

    /// Preorder traversal, self first.
    pub fn preorder(&self) -> Preorder<'_> {
        Preorder { stack: vec![self] }
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.preorder().filter(|n| n.is_leaf())
    }

    pub fn tokens(&self) -> Vec<&str> {
        self.leaves().filter_map(Node::token).collect()
    }

    /// Detokenized surface text of the subtree.
    pub fn text(&self) -> String {
        detokenize(self.leaves().filter_map(Node::token))
    }

    fn write_brackets(&self, out: &mut String) {
        out.push('(');
        out.push_str(&self.label);
        if let Some(token) = &self.token {
            out.push(' ');
            out.push_str(token);
        }
        for child in &self.children {
            out.push(' ');
            child.write_brackets(out);
        }
        out.push(')');
    }
}

pub struct Preorder<'a> {
    stack: Vec<&'a Node>,
}

impl<'a> Iterator for Preorder<'a> {
    type Item = &'a Node;

    fn next(&mut self) -> Option<&'a Node> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev());
        Some(node)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    root: Node,
    sentence_text: String,
}

impl ParseTree {
    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn sentence_text(&self) -> &str {
        &self.sentence_text
    }

    pub fn tokens(&self) -> Vec<&str> {
        self.root.tokens()
    }

    pub fn len(&self) -> usize {
        self.root.span.end
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl FromStr for ParseTree {
    type Err = TreebankError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_treebank(s)
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChunkKind {
    NounPhrase,
    VerbPhrase,
    PrepPhrase,
}

impl ChunkKind {
    fn of(family: LabelFamily) -> Option<Self> {
        match family {
            LabelFamily::Noun => Some(ChunkKind::NounPhrase),
            LabelFamily::Verb => Some(ChunkKind::VerbPhrase),
            LabelFamily::Prep => Some(ChunkKind::PrepPhrase),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PhraseChunk<'a> {
    pub kind: ChunkKind,
    pub node: &'a Node,
    pub head_token_index: usize,
}

enum Item {
    Node(Node),
    Atom(String),
}

struct Partial {
    label: Option<String>,
    items: Vec<Item>,
    offset: usize,
}

enum Lexeme<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(text: &str) -> impl Iterator<Item = (usize, Lexeme<'_>)> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    std::iter::from_fn(move || {
        while pos < bytes.len() && (bytes[pos] as char).is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            return None;
        }
        let start = pos;
        match bytes[pos] {
            b'(' => {
                pos += 1;
                Some((start, Lexeme::Open))
            }
            b')' => {
                pos += 1;
                Some((start, Lexeme::Close))
            }
            _ => {
                while pos < bytes.len()
                    && !matches!(bytes[pos], b'(' | b')')
                    && !(bytes[pos] as char).is_ascii_whitespace()
                {
                    pos += 1;
                }
                Some((start, Lexeme::Atom(&text[start..pos])))
            }
        }
    })
}

/// Parse one bracketed sentence.
///
/// An unlabeled outermost bracket, as in `( (S ...))`, is read as `ROOT`.
pub fn parse_treebank(text: &str) -> Result<ParseTree, TreebankError> {
    let mut stack: Vec<Partial> = Vec::new();
    let mut root: Option<Node> = None;

    for (offset, lexeme) in lex(text) {
        if root.is_some() {
            return Err(match lexeme {
                Lexeme::Close => TreebankError::UnbalancedBrackets { offset },
                _ => TreebankError::MalformedNode { offset, reason: "content after the root node" },
            });
        }
        match lexeme {
            Lexeme::Open => stack.push(Partial { label: None, items: Vec::new(), offset }),
            Lexeme::Atom(atom) => match stack.last_mut() {
                None => {
                    return Err(TreebankError::MalformedNode { offset, reason: "token outside brackets" })
                }
                Some(top) if top.label.is_none() && top.items.is_empty() => top.label = Some(atom.to_owned()),
                Some(top) => top.items.push(Item::Atom(atom.to_owned())),
            },
            Lexeme::Close => {
                let partial = stack.pop().ok_or(TreebankError::UnbalancedBrackets { offset })?;
                let is_root = stack.is_empty();
                let node = close_node(partial, is_root)?;
                match stack.last_mut() {
                    Some(parent) => parent.items.push(Item::Node(node)),
                    None => root = Some(node),
                }
            }
        }
    }

    if let Some(open) = stack.first() {
        return Err(TreebankError::UnbalancedBrackets { offset: open.offset });
    }
    let mut root = root.ok_or(TreebankError::EmptyTree)?;
    if root.label != "ROOT" && root.family() != LabelFamily::Clause {
        return Err(TreebankError::InvalidRoot(root.label));
    }
    let mut next = 0;
    assign_spans(&mut root, &mut next);
    if next == 0 {
        return Err(TreebankError::EmptyTree);
    }
    let sentence_text = root.text();
    Ok(ParseTree { root, sentence_text })
}

fn close_node(partial: Partial, is_root: bool) -> Result<Node, TreebankError> {
    let Partial { label, items, offset } = partial;
    let malformed = |reason| TreebankError::MalformedNode { offset, reason };

    if items.is_empty() {
        return match label {
            Some(_) if is_root => Err(TreebankError::EmptyTree),
            Some(_) => Err(malformed("node has a label but no children")),
            None => Err(malformed("empty brackets")),
        };
    }

    let atoms = items.iter().filter(|i| matches!(i, Item::Atom(..))).count();
    if atoms > 0 {
        if atoms > 1 || items.len() > 1 {
            return Err(malformed("preterminal must hold exactly one token"));
        }
        let Some(label) = label else {
            return Err(malformed("token without a label"));
        };
        let Some(Item::Atom(token)) = items.into_iter().next() else { unreachable!() };
        return Ok(Node { label, children: Vec::new(), token: Some(token), span: Span { start: 0, end: 0 } });
    }

    let label = match label {
        Some(label) => label,
        None if is_root => "ROOT".to_owned(),
        None => return Err(malformed("unlabeled inner node")),
    };
    let children = items
        .into_iter()
        .map(|i| match i {
            Item::Node(n) => n,
            Item::Atom(..) => unreachable!(),
        })
        .collect();
    Ok(Node { label, children, token: None, span: Span { start: 0, end: 0 } })
}

fn assign_spans(node: &mut Node, next: &mut usize) {
    let start = *next;
    if node.is_leaf() {
        *next += 1;
    } else {
        for child in &mut node.children {
            assign_spans(child, next);
        }
    }
    node.span = Span { start, end: *next };
}

/// Canonical single-spaced bracketing.
pub fn serialize(tree: &ParseTree) -> String {
    let mut out = String::new();
    tree.root.write_brackets(&mut out);
    out
}

/// Maximal NP, VP and PP nodes in preorder. A node is skipped when an
/// ancestor already has the same kind.
pub fn extract_chunks(tree: &ParseTree) -> Vec<PhraseChunk<'_>> {
    let mut out = Vec::new();
    collect_chunks(&tree.root, [false; 3], &mut out);
    out
}

fn collect_chunks<'a>(node: &'a Node, mut inside: [bool; 3], out: &mut Vec<PhraseChunk<'a>>) {
    if let Some(kind) = ChunkKind::of(node.family()) {
        let slot = kind as usize;
        if !inside[slot] {
            out.push(PhraseChunk { kind, node, head_token_index: head_index(kind, node) });
            inside[slot] = true;
        }
    }
    for child in &node.children {
        collect_chunks(child, inside, out);
    }
}

fn head_index(kind: ChunkKind, node: &Node) -> usize {
    let leaves: Vec<&Node> = node.leaves().collect();
    let found = match kind {
        ChunkKind::NounPhrase => leaves.iter().rev().find(|l| l.label.starts_with("NN") || l.label.starts_with("PRP")),
        ChunkKind::VerbPhrase => leaves.iter().find(|l| l.label.starts_with("VB") || l.label == "MD"),
        ChunkKind::PrepPhrase => leaves.iter().find(|l| l.label == "IN" || l.label == "TO"),
    };
    found.map(|l| l.span.start).unwrap_or(match kind {
        ChunkKind::NounPhrase => node.span.end - 1,
        _ => node.span.start,
    })
}

fn unescape(token: &str) -> &str {
    match token {
        "-LRB-" => "(",
        "-RRB-" => ")",
        "-LSB-" => "[",
        "-RSB-" => "]",
        "-LCB-" => "{",
        "-RCB-" => "}",
        "``" | "''" => "\"",
        other => other,
    }
}

/// Join treebank tokens back into readable text.
pub fn detokenize<'a>(tokens: impl IntoIterator<Item = &'a str>) -> String {
    const NO_SPACE_BEFORE: &[&str] = &[
        ",", ".", ";", ":", "!", "?", "%", ")", "]", "}", "'s", "'S", "n't", "'re", "'ve", "'ll", "'d", "'m", "''",
    ];
    const NO_SPACE_AFTER: &[&str] = &["(", "[", "{", "$", "``"];

    let mut out = String::new();
    let mut glue_next = true;
    for raw in tokens {
        let attach = NO_SPACE_BEFORE.contains(&raw) || NO_SPACE_BEFORE.contains(&unescape(raw));
        if !glue_next && !attach {
            out.push(' ');
        }
        out.push_str(unescape(raw));
        glue_next = NO_SPACE_AFTER.contains(&raw) || NO_SPACE_AFTER.contains(&unescape(raw));
    }
    out
}

/// Split a batch file into documents: one tree per line, blank lines between
/// documents.
pub fn parse_batch(text: &str) -> Result<Vec<Vec<ParseTree>>, (usize, TreebankError)> {
    let mut docs = Vec::new();
    let mut current = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                docs.push(std::mem::take(&mut current));
            }
            continue;
        }
        current.push(parse_treebank(line).map_err(|e| (idx + 1, e))?);
    }
    if !current.is_empty() {
        docs.push(current);
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const OBAMA: &str = "(ROOT (S (NP (NNP Obama)) (VP (VBD denounced) (NP (NNP Russia)))))";

    #[test]
    fn parses_three_leaf_sentence() {
        let tree = parse_treebank(OBAMA).unwrap();
        assert_eq!(tree.root().span(), Span { start: 0, end: 3 });
        assert_eq!(tree.tokens(), vec!["Obama", "denounced", "Russia"]);
        assert_eq!(tree.sentence_text(), "Obama denounced Russia");
        let leaves: Vec<Span> = tree.root().leaves().map(Node::span).collect();
        assert_eq!(leaves, vec![Span { start: 0, end: 1 }, Span { start: 1, end: 2 }, Span { start: 2, end: 3 }]);
    }

    #[test]
    fn single_leaf_tree() {
        let tree = parse_treebank("(ROOT (NP (NN x)))").unwrap();
        assert_eq!(tree.root().span(), Span { start: 0, end: 1 });
        assert_eq!(serialize(&tree), "(ROOT (NP (NN x)))");
    }

    #[test]
    fn error_cases() {
        assert!(matches!(parse_treebank("(ROOT (S (NP"), Err(TreebankError::UnbalancedBrackets { .. })));
        assert!(matches!(parse_treebank("(ROOT (NN x)))"), Err(TreebankError::UnbalancedBrackets { .. })));
        assert_eq!(parse_treebank(""), Err(TreebankError::EmptyTree));
        assert_eq!(parse_treebank("(ROOT)"), Err(TreebankError::EmptyTree));
        assert!(matches!(parse_treebank("(ROOT ())"), Err(TreebankError::MalformedNode { .. })));
        assert!(matches!(parse_treebank("(ROOT (NP))"), Err(TreebankError::MalformedNode { .. })));
        assert!(matches!(parse_treebank("(ROOT (NN x y))"), Err(TreebankError::MalformedNode { .. })));
        assert!(matches!(parse_treebank("(ROOT (NP x (NN y)))"), Err(TreebankError::MalformedNode { .. })));
        assert!(matches!(parse_treebank("(ROOT (NN x)) (ROOT (NN y))"), Err(TreebankError::MalformedNode { .. })));
        assert_eq!(parse_treebank("(NP (NN x))"), Err(TreebankError::InvalidRoot("NP".into())));
    }

    #[test]
    fn unlabeled_outer_bracket_is_root() {
        let tree = parse_treebank("( (S (NP (PRP We)) (VP (VBD left))))").unwrap();
        assert_eq!(tree.root().label(), "ROOT");
        assert_eq!(serialize(&tree), "(ROOT (S (NP (PRP We)) (VP (VBD left))))");
    }

    #[test]
    fn bare_clause_root_accepted() {
        let tree = parse_treebank("(S (NP (NNS Rebels)) (VP (VBD protested)))").unwrap();
        assert_eq!(tree.root().label(), "S");
    }

    #[test]
    fn whitespace_normalized_on_serialize() {
        let messy = "(ROOT\n  (S (NP   (NNP Obama))\t(VP (VBD denounced) (NP (NNP Russia)) ) ) )";
        assert_eq!(serialize(&parse_treebank(messy).unwrap()), OBAMA);
    }

    #[test]
    fn chunks_in_preorder() {
        let tree = parse_treebank(OBAMA).unwrap();
        let chunks = extract_chunks(&tree);
        let got: Vec<(ChunkKind, String)> = chunks.iter().map(|c| (c.kind, c.node.text())).collect();
        assert_eq!(
            got,
            vec![
                (ChunkKind::NounPhrase, "Obama".to_string()),
                (ChunkKind::VerbPhrase, "denounced Russia".to_string()),
                (ChunkKind::NounPhrase, "Russia".to_string()),
            ]
        );
        assert_eq!(chunks[1].head_token_index, 1);
    }

    #[test]
    fn nested_np_not_listed() {
        let tree =
            parse_treebank("(ROOT (NP (NP (DT the) (NN leader)) (PP (IN of) (NP (NNP Syria)))))").unwrap();
        let chunks = extract_chunks(&tree);
        let kinds: Vec<ChunkKind> = chunks.iter().map(|c| c.kind).collect();
        assert_eq!(kinds, vec![ChunkKind::NounPhrase, ChunkKind::PrepPhrase]);
        assert_eq!(chunks[0].head_token_index, 3);
    }

    #[test]
    fn chunks_of_trivial_trees() {
        let tree = parse_treebank("(ROOT (NP (NN x)))").unwrap();
        assert_eq!(extract_chunks(&tree).len(), 1);
        let tree = parse_treebank("(ROOT (INTJ (UH Hello)))").unwrap();
        assert!(extract_chunks(&tree).is_empty());
    }

    #[test]
    fn detokenizes_punctuation_and_brackets() {
        let tree = parse_treebank(
            "(ROOT (S (NP (NNP Iran) (-LRB- -LRB-) (NNP Tehran) (-RRB- -RRB-)) (VP (VBD said) (NP (PRP it))) (, ,) (. .)))",
        )
        .unwrap();
        assert_eq!(tree.sentence_text(), "Iran (Tehran) said it,.");
    }

    #[test]
    fn label_families() {
        assert_eq!(LabelFamily::of("NP-SBJ"), LabelFamily::Noun);
        assert_eq!(LabelFamily::of("S"), LabelFamily::Clause);
        assert_eq!(LabelFamily::of("SBAR"), LabelFamily::Sbar);
        assert_eq!(LabelFamily::of("-LRB-"), LabelFamily::Other);
        assert_eq!(LabelFamily::of("NNP"), LabelFamily::Other);
    }

    #[test]
    fn batch_splits_on_blank_lines() {
        let text = format!("{OBAMA}\n{OBAMA}\n\n\n(ROOT (NP (NN x)))\n");
        let docs = parse_batch(&text).unwrap();
        assert_eq!(docs.iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 1]);
        let err = parse_batch("(ROOT (NP (NN x)))\n(ROOT (NP").unwrap_err();
        assert_eq!(err.0, 2);
    }

    fn arb_token() -> impl Strategy<Value = String> {
        prop_oneof![
            "[A-Za-z][a-z]{0,8}",
            Just("-LRB-".to_string()),
            Just(",".to_string()),
            Just("Zürich".to_string()),
        ]
    }

    fn arb_node() -> impl Strategy<Value = String> {
        let leaf = ("(NN|NNP|VBD|IN|DT|JJ)", arb_token()).prop_map(|(l, t)| format!("({l} {t})"));
        leaf.prop_recursive(5, 48, 4, |inner| {
            ("(NP|VP|PP|S|SBAR|ADJP|NP-SBJ)", prop::collection::vec(inner, 1..4))
                .prop_map(|(l, kids)| format!("({l} {})", kids.join(" ")))
        })
    }

    proptest! {
        #[test]
        fn round_trip(body in arb_node(), pad in "[ \t]{1,3}") {
            let text = format!("(ROOT{pad}{body})");
            let first = parse_treebank(&text).unwrap();
            let canonical = serialize(&first);
            let second = parse_treebank(&canonical).unwrap();
            prop_assert_eq!(&first, &second);
            prop_assert_eq!(serialize(&second), canonical);
        }

        #[test]
        fn spans_partition_tokens(body in arb_node()) {
            let tree = parse_treebank(&format!("(ROOT {body})")).unwrap();
            for node in tree.root().preorder() {
                if node.is_leaf() {
                    prop_assert_eq!(node.span().len(), 1);
                } else {
                    let kids = node.children();
                    prop_assert_eq!(node.span().start, kids[0].span().start);
                    prop_assert_eq!(node.span().end, kids[kids.len() - 1].span().end);
                    for pair in kids.windows(2) {
                        prop_assert_eq!(pair[0].span().end, pair[1].span().start);
                    }
                }
            }
            let leaf_tokens: Vec<&str> = tree.root().leaves().map(|l| l.token().unwrap()).collect();
            prop_assert_eq!(leaf_tokens.len(), tree.len());
        }

        #[test]
        fn chunks_are_maximal(body in arb_node()) {
            let tree = parse_treebank(&format!("(ROOT {body})")).unwrap();
            let chunks = extract_chunks(&tree);
            for a in &chunks {
                for b in &chunks {
                    if std::ptr::eq(a.node, b.node) || a.kind != b.kind {
                        continue;
                    }
                    let nested = b.node.preorder().skip(1).any(|n| std::ptr::eq(n, a.node));
                    prop_assert!(!nested);
                }
            }
        }
    }
}
