use std::collections::HashMap;
use std::ops::Range;

use super::load::{LexiconEntry, NegatorSet};
use super::trie::{PrefixMatch, Trie};
use crate::model::Emotion;

/// What a vocabulary term means to the analyzer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tag {
    Emotion { emotion: Emotion, weight: f64 },
    Negator,
}

/// Identifies a distinct vocabulary term inside a [`Matcher`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TermId(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Term(TermId),
    /// A single codepoint not covered by any term.
    Filler,
}

/// A tile of the input. `start`/`end` are codepoint offsets, `bytes` the
/// matching byte range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub bytes: Range<usize>,
    pub kind: SegmentKind,
}

impl Segment {
    pub fn surface<'t>(&self, text: &'t str) -> &'t str {
        &text[self.bytes.clone()]
    }

    pub fn term(&self) -> Option<TermId> {
        match self.kind {
            SegmentKind::Term(id) => Some(id),
            SegmentKind::Filler => None,
        }
    }
}

/// Forward-maximum-matching segmenter over a fixed vocabulary.
///
/// Terms made only of ASCII are matched ASCII-case-insensitively; all
/// other terms match exactly.
#[derive(Debug, Clone, Default)]
pub struct Matcher {
    exact: Trie,
    folded: Trie,
    terms: Vec<String>,
    tags: Vec<Vec<Tag>>,
}

fn is_pure_ascii(term: &str) -> bool {
    term.bytes().all(|b| b.is_ascii())
}

impl Matcher {
    /// Compiles an arbitrary tagged vocabulary. A term listed more than
    /// once (or differing only in ASCII case, for ASCII terms) collects all
    /// of its tags under one id.
    pub fn from_vocabulary<I, S>(vocabulary: I) -> Self
    where
        I: IntoIterator<Item = (S, Tag)>,
        S: AsRef<str>,
    {
        let mut m = Matcher::default();
        let mut ids: HashMap<String, u32> = HashMap::new();
        for (term, tag) in vocabulary {
            let term = term.as_ref();
            assert!(!term.is_empty(), "vocabulary terms must be non-empty");
            let key = if is_pure_ascii(term) {
                term.to_ascii_lowercase()
            } else {
                term.to_string()
            };
            let id = *ids.entry(key).or_insert_with(|| {
                let id = m.terms.len() as u32;
                if is_pure_ascii(term) {
                    m.folded
                        .insert(term.chars().map(|c| c.to_ascii_lowercase()), id);
                } else {
                    m.exact.insert(term.chars(), id);
                }
                m.terms.push(term.to_string());
                m.tags.push(Vec::new());
                id
            });
            m.tags[id as usize].push(tag);
        }
        m
    }

    /// Compiles emotion terms and negators together.
    pub fn build(lexicon: &[LexiconEntry], negators: &NegatorSet) -> Self {
        let emotion_terms = lexicon.iter().map(|e| {
            (
                e.term.as_str(),
                Tag::Emotion {
                    emotion: e.emotion,
                    weight: e.weight,
                },
            )
        });
        let negator_terms = negators.iter().map(|t| (t, Tag::Negator));
        Matcher::from_vocabulary(emotion_terms.chain(negator_terms))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn tags(&self, id: TermId) -> &[Tag] {
        &self.tags[id.0 as usize]
    }

    /// The term's spelling as first supplied.
    pub fn term(&self, id: TermId) -> &str {
        &self.terms[id.0 as usize]
    }

    /// Longest vocabulary term at the start of `rest`.
    #[inline]
    fn longest_at(&self, rest: &str) -> Option<PrefixMatch> {
        let exact = self.exact.longest_prefix(rest.chars());
        if self.folded.is_empty() {
            return exact;
        }
        let folded = self
            .folded
            .longest_prefix(rest.chars().map(|c| c.to_ascii_lowercase()));
        match (exact, folded) {
            (Some(a), Some(b)) => Some(if b.chars > a.chars { b } else { a }),
            (a, b) => a.or(b),
        }
    }

    /// Lazily tiles `text` into segments.
    pub fn segments<'m, 't>(&'m self, text: &'t str) -> Segments<'m, 't> {
        Segments {
            matcher: self,
            text,
            byte: 0,
            char: 0,
        }
    }
}

/// Tiles `text` by forward maximum matching.
pub fn segment(matcher: &Matcher, text: &str) -> Vec<Segment> {
    matcher.segments(text).collect()
}

pub struct Segments<'m, 't> {
    matcher: &'m Matcher,
    text: &'t str,
    byte: usize,
    char: usize,
}

impl Iterator for Segments<'_, '_> {
    type Item = Segment;

    #[inline]
    fn next(&mut self) -> Option<Segment> {
        let rest = &self.text[self.byte..];
        let first = rest.chars().next()?;
        let (kind, chars, bytes) = match self.matcher.longest_at(rest) {
            Some(m) => (SegmentKind::Term(TermId(m.value)), m.chars, m.bytes),
            None => (SegmentKind::Filler, 1, first.len_utf8()),
        };
        let seg = Segment {
            start: self.char,
            end: self.char + chars,
            bytes: self.byte..self.byte + bytes,
            kind,
        };
        self.char += chars;
        self.byte += bytes;
        Some(seg)
    }
}
