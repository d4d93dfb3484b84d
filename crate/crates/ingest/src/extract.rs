//! Main-content extraction.
//!
//! Every container element (`div`, `article`, `section`, `main`, `td`,
//! `body`) outside navigation chrome is a candidate block. A block's text is
//! its direct `<p>` children, minus paragraphs that are mostly link text. The
//! score is that text's length scaled down by the link density of the whole
//! block, plus a bonus per paragraph; the best block wins, earliest first.

use scraper::{ElementRef, Html, Node, Selector};
use thiserror::Error;

pub const MIN_CONTENT_CHARS: usize = 250;
const PARAGRAPH_BONUS: f64 = 50.0;
const MAX_PARAGRAPH_LINK_DENSITY: f64 = 0.5;

const CANDIDATES: &[&str] = &["div", "article", "section", "main", "td", "body"];
const CHROME: &[&str] = &["nav", "header", "footer", "aside", "form"];
const INVISIBLE: &[&str] = &["script", "style", "noscript", "template"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extracted {
    pub title: String,
    pub body_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("no block with at least {MIN_CONTENT_CHARS} characters of text")]
    NoContent,
}

pub fn extract_content(html: &str) -> Result<Extracted, ExtractError> {
    extract_with_threshold(html, MIN_CONTENT_CHARS)
}

pub fn extract_with_threshold(html: &str, min_chars: usize) -> Result<Extracted, ExtractError> {
    let doc = Html::parse_document(html);
    let mut best: Option<(f64, Vec<String>)> = None;
    for el in doc.root_element().descendants().filter_map(ElementRef::wrap) {
        if !CANDIDATES.contains(&el.value().name()) || in_chrome(el) {
            continue;
        }
        let paragraphs: Vec<String> = el
            .children()
            .filter_map(ElementRef::wrap)
            .filter(|c| c.value().name() == "p")
            .filter_map(|p| {
                let (total, links) = text_stats(p);
                let text = normalize(&visible_text(p));
                let dense = total > 0 && links as f64 / total as f64 > MAX_PARAGRAPH_LINK_DENSITY;
                (!text.is_empty() && !dense).then_some(text)
            })
            .collect();
        if paragraphs.is_empty() {
            continue;
        }
        let (total, links) = text_stats(el);
        let density = if total == 0 { 0.0 } else { links as f64 / total as f64 };
        let chars: usize = paragraphs.iter().map(|p| p.chars().count()).sum();
        let score = chars as f64 * (1.0 - density) + PARAGRAPH_BONUS * paragraphs.len() as f64;
        if best.as_ref().map_or(true, |(s, _)| score > *s) {
            best = Some((score, paragraphs));
        }
    }
    let body_text = match best {
        Some((_, paragraphs)) => paragraphs.join("\n\n"),
        None => return Err(ExtractError::NoContent),
    };
    if body_text.chars().count() < min_chars {
        return Err(ExtractError::NoContent);
    }
    Ok(Extracted { title: title(&doc), body_text })
}

/// og:title, then `<title>`, then the first `<h1>`.
fn title(doc: &Html) -> String {
    let sel = |s: &str| Selector::parse(s).expect("static selector");
    let og = doc
        .select(&sel(r#"meta[property="og:title"]"#))
        .filter_map(|m| m.value().attr("content"))
        .map(normalize)
        .find(|t| !t.is_empty());
    og.or_else(|| doc.select(&sel("title")).map(|t| normalize(&t.text().collect::<String>())).find(|t| !t.is_empty()))
        .or_else(|| doc.select(&sel("h1")).map(|t| normalize(&visible_text(t))).find(|t| !t.is_empty()))
        .unwrap_or_default()
}

fn in_chrome(el: ElementRef<'_>) -> bool {
    el.ancestors()
        .filter_map(ElementRef::wrap)
        .chain(std::iter::once(el))
        .any(|a| CHROME.contains(&a.value().name()))
}

/// (visible characters, characters inside links), whitespace excluded.
fn text_stats(el: ElementRef<'_>) -> (usize, usize) {
    fn walk(node: ego_tree::NodeRef<'_, Node>, in_link: bool, acc: &mut (usize, usize)) {
        for child in node.children() {
            match child.value() {
                Node::Text(t) => {
                    let n = t.chars().filter(|c| !c.is_whitespace()).count();
                    acc.0 += n;
                    if in_link {
                        acc.1 += n;
                    }
                }
                Node::Element(e) if INVISIBLE.contains(&e.name()) => {}
                Node::Element(e) => walk(child, in_link || e.name() == "a", acc),
                _ => {}
            }
        }
    }
    let mut acc = (0, 0);
    walk(*el, el.value().name() == "a", &mut acc);
    acc
}

fn visible_text(el: ElementRef<'_>) -> String {
    fn walk(node: ego_tree::NodeRef<'_, Node>, out: &mut String) {
        for child in node.children() {
            match child.value() {
                Node::Text(t) => out.push_str(t),
                Node::Element(e) if INVISIBLE.contains(&e.name()) => {}
                Node::Element(e) => {
                    if e.name() == "br" {
                        out.push(' ');
                    }
                    walk(child, out);
                }
                _ => {}
            }
        }
    }
    let mut out = String::new();
    walk(*el, &mut out);
    out
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
