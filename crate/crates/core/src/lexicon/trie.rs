//! Codepoint trie used for longest-prefix lookups.

/// Index of a node in [`Trie::nodes`].
type NodeId = u32;

#[derive(Debug, Clone, Default)]
struct Node {
    /// Sorted by char for binary search.
    children: Vec<(char, NodeId)>,
    value: Option<u32>,
}

/// An immutable-after-build map from strings to `u32` values supporting
/// longest-prefix queries over a char iterator.
#[derive(Debug, Clone)]
pub(crate) struct Trie {
    nodes: Vec<Node>,
}

/// Result of a longest-prefix lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PrefixMatch {
    pub value: u32,
    pub chars: usize,
    pub bytes: usize,
}

impl Default for Trie {
    fn default() -> Self {
        Trie {
            nodes: vec![Node::default()],
        }
    }
}

impl Trie {
    /// Inserts `key`, returning the value already stored there if any.
    /// An existing value is kept.
    pub fn insert(&mut self, key: impl IntoIterator<Item = char>, value: u32) -> Option<u32> {
        let mut node = 0usize;
        for c in key {
            node = match self.nodes[node].children.binary_search_by_key(&c, |e| e.0) {
                Ok(i) => self.nodes[node].children[i].1 as usize,
                Err(i) => {
                    let id = self.nodes.len();
                    self.nodes.push(Node::default());
                    self.nodes[node].children.insert(i, (c, id as NodeId));
                    id
                }
            };
        }
        match self.nodes[node].value {
            Some(existing) => Some(existing),
            None => {
                self.nodes[node].value = Some(value);
                None
            }
        }
    }

    /// Longest key that is a prefix of `input`.
    #[inline]
    pub fn longest_prefix(&self, input: impl Iterator<Item = char>) -> Option<PrefixMatch> {
        let mut node = 0usize;
        let mut bytes = 0;
        let mut best = None;
        for (seen, c) in input.enumerate() {
            let children = &self.nodes[node].children;
            match children.binary_search_by_key(&c, |e| e.0) {
                Ok(i) => node = children[i].1 as usize,
                Err(_) => break,
            }
            bytes += c.len_utf8();
            if let Some(value) = self.nodes[node].value {
                best = Some(PrefixMatch {
                    value,
                    chars: seen + 1,
                    bytes,
                });
            }
        }
        best
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1 && self.nodes[0].value.is_none()
    }
}
