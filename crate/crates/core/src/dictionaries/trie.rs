use std::collections::HashMap;

/// Token-level trie mapping patterns to entry indices.
///
/// Keys are stored uppercase; each node keeps the entries whose pattern ends
/// there, in insertion order.
#[derive(Debug, Clone, Default)]
pub(crate) struct TokenTrie {
    nodes: Vec<TrieNode>,
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    children: HashMap<String, usize>,
    values: Vec<usize>,
}

impl TokenTrie {
    pub fn new() -> Self {
        TokenTrie { nodes: vec![TrieNode::default()] }
    }

    /// Entry list at the end of `pattern`, creating the path if needed.
    pub fn values_mut(&mut self, pattern: &[String]) -> &mut Vec<usize> {
        let mut at = 0;
        for token in pattern {
            at = match self.nodes[at].children.get(token.as_str()) {
                Some(&next) => next,
                None => {
                    self.nodes.push(TrieNode::default());
                    let next = self.nodes.len() - 1;
                    self.nodes[at].children.insert(token.clone(), next);
                    next
                }
            };
        }
        &mut self.nodes[at].values
    }

    /// Deepest accepted entry along `tokens`, as `(entry, matched_len)`.
    /// At a given depth the first accepted entry in insertion order wins.
    pub fn longest_match<S: AsRef<str>>(
        &self,
        tokens: &[S],
        mut accept: impl FnMut(usize) -> bool,
    ) -> Option<(usize, usize)> {
        let mut at = 0;
        let mut best = None;
        let mut key = String::new();
        for (depth, token) in tokens.iter().enumerate() {
            key.clear();
            key.extend(token.as_ref().chars().flat_map(char::to_uppercase));
            match self.nodes[at].children.get(key.as_str()) {
                Some(&next) => at = next,
                None => break,
            }
            if let Some(&hit) = self.nodes[at].values.iter().find(|&&v| accept(v)) {
                best = Some((hit, depth + 1));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> Vec<String> {
        s.split(' ').map(str::to_owned).collect()
    }

    #[test]
    fn prefers_longest_then_first() {
        let mut trie = TokenTrie::new();
        trie.values_mut(&pat("ISLAMIC")).push(0);
        trie.values_mut(&pat("ISLAMIC STATE")).push(1);
        trie.values_mut(&pat("ISLAMIC STATE")).push(2);
        assert_eq!(trie.longest_match(&["islamic", "State", "fighters"], |_| true), Some((1, 2)));
        assert_eq!(trie.longest_match(&["islamic", "State"], |v| v != 1), Some((2, 2)));
        assert_eq!(trie.longest_match(&["Islamic", "jihad"], |_| true), Some((0, 1)));
        assert_eq!(trie.longest_match::<&str>(&[], |_| true), None);
    }
}
