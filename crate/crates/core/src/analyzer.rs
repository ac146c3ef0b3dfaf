//! Rule-based emotion analyzer.
//!
//! A tweet is scored in two passes. Emoticon literals are pulled out of the
//! text first and counted directly. The remaining text is segmented against
//! the lexicon, and every emotion term adds its weight unless an odd number
//! of negators precedes it closely enough in the same clause. The two
//! frequency vectors are summed and the label is their argmax, or neutral
//! when nothing matched.

use std::borrow::Cow;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::lexicon::{
    load_emoticons, load_lexicon, load_negators, EmoticonEntry, LexiconEntry, LoadError, Matcher,
    NegatorSet, SegmentKind, Tag, Trie, DEMO_EMOTICONS, DEMO_LEXICON, DEMO_NEGATORS,
};
use crate::model::{argmax_label, Emotion, EmotionVector};

/// Widest supported negation window; the scope tracker is a 128-bit shift
/// register.
pub const MAX_NEGATION_WINDOW: usize = 127;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleConfigError {
    #[error("negation window {0} exceeds the maximum of {MAX_NEGATION_WINDOW}")]
    WindowTooLarge(usize),
    #[error("clause breaker set must not be empty")]
    NoClauseBreakers,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleConfig {
    negation_window: usize,
    clause_breakers: BTreeSet<char>,
}

pub const DEFAULT_CLAUSE_BREAKERS: &str = "，。！？；,.!?;…\n";

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            negation_window: 3,
            clause_breakers: DEFAULT_CLAUSE_BREAKERS.chars().collect(),
        }
    }
}

impl RuleConfig {
    /// `negation_window` is the number of segments allowed between a
    /// negator and the term it governs.
    pub fn new(
        negation_window: usize,
        clause_breakers: impl IntoIterator<Item = char>,
    ) -> Result<Self, RuleConfigError> {
        if negation_window > MAX_NEGATION_WINDOW {
            return Err(RuleConfigError::WindowTooLarge(negation_window));
        }
        let clause_breakers: BTreeSet<char> = clause_breakers.into_iter().collect();
        if clause_breakers.is_empty() {
            return Err(RuleConfigError::NoClauseBreakers);
        }
        Ok(RuleConfig {
            negation_window,
            clause_breakers,
        })
    }

    pub fn with_negation_window(self, negation_window: usize) -> Result<Self, RuleConfigError> {
        RuleConfig::new(negation_window, self.clause_breakers)
    }

    pub fn negation_window(&self) -> usize {
        self.negation_window
    }

    pub fn clause_breakers(&self) -> &BTreeSet<char> {
        &self.clause_breakers
    }

    fn window_mask(&self) -> u128 {
        let bits = self.negation_window + 1;
        if bits >= 128 {
            u128::MAX
        } else {
            (1u128 << bits) - 1
        }
    }
}

/// Exact-match lookup of emoticon literals.
#[derive(Debug, Clone, Default)]
pub struct EmoticonTable {
    trie: Trie,
    entries: Vec<Vec<(Emotion, f64)>>,
}

impl EmoticonTable {
    pub fn new(entries: &[EmoticonEntry]) -> Self {
        let mut table = EmoticonTable::default();
        for e in entries {
            assert!(!e.literal.is_empty(), "emoticon literals must be non-empty");
            let next = table.entries.len() as u32;
            let slot = match table.trie.insert(e.literal.chars(), next) {
                Some(existing) => existing as usize,
                None => {
                    table.entries.push(Vec::new());
                    next as usize
                }
            };
            table.entries[slot].push((e.emotion, e.weight));
        }
        table
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Immutable analyzer state shared by all workers.
#[derive(Debug, Clone)]
pub struct AnalyzerResources {
    matcher: Matcher,
    emoticons: EmoticonTable,
    rules: RuleConfig,
}

impl AnalyzerResources {
    pub fn new(
        lexicon: &[LexiconEntry],
        emoticons: &[EmoticonEntry],
        negators: &NegatorSet,
        rules: RuleConfig,
    ) -> Self {
        AnalyzerResources {
            matcher: Matcher::build(lexicon, negators),
            emoticons: EmoticonTable::new(emoticons),
            rules,
        }
    }

    /// The bundled demo lexicon, emoticon table and negators with default rules.
    pub fn demo() -> Self {
        Self::demo_with(RuleConfig::default())
    }

    pub fn demo_with(rules: RuleConfig) -> Self {
        Self::try_demo(rules).expect("bundled demo resources are valid")
    }

    fn try_demo(rules: RuleConfig) -> Result<Self, LoadError> {
        let lexicon = load_lexicon(DEMO_LEXICON.as_bytes())?;
        let emoticons = load_emoticons(DEMO_EMOTICONS.as_bytes())?;
        let negators = load_negators(DEMO_NEGATORS.as_bytes())?;
        Ok(AnalyzerResources::new(
            &lexicon, &emoticons, &negators, rules,
        ))
    }

    pub fn matcher(&self) -> &Matcher {
        &self.matcher
    }

    pub fn emoticons(&self) -> &EmoticonTable {
        &self.emoticons
    }

    pub fn rules(&self) -> &RuleConfig {
        &self.rules
    }
}

/// Removes emoticon literals from `text` (longest literal first, scanning
/// left to right) and counts them.
pub fn extract_emoticons<'t>(
    text: &'t str,
    table: &EmoticonTable,
) -> (Cow<'t, str>, EmotionVector) {
    let mut counts = EmotionVector::zero();
    if table.is_empty() {
        return (Cow::Borrowed(text), counts);
    }
    let mut residual: Option<String> = None;
    // start of the pending run of unmatched text
    let mut kept_from = 0;
    let mut pos = 0;
    while pos < text.len() {
        let rest = &text[pos..];
        match table.trie.longest_prefix(rest.chars()) {
            Some(m) => {
                for (emotion, weight) in &table.entries[m.value as usize] {
                    counts.add_weight(*emotion, *weight);
                }
                residual
                    .get_or_insert_with(|| String::with_capacity(text.len()))
                    .push_str(&text[kept_from..pos]);
                pos += m.bytes;
                kept_from = pos;
            }
            None => pos += rest.chars().next().map_or(1, char::len_utf8),
        }
    }
    match residual {
        None => (Cow::Borrowed(text), counts),
        Some(mut s) => {
            s.push_str(&text[kept_from..]);
            (Cow::Owned(s), counts)
        }
    }
}

/// Lexicon score of emoticon-free text under the negation rule.
pub fn score_text(residual: &str, resources: &AnalyzerResources) -> EmotionVector {
    let matcher = &resources.matcher;
    let rules = &resources.rules;
    let window = rules.window_mask();
    let mut v = EmotionVector::zero();
    // bit k set: the segment k+1 positions back, in this clause, is a negator
    let mut negators: u128 = 0;
    for seg in matcher.segments(residual) {
        match seg.kind {
            SegmentKind::Filler => {
                let c = residual[seg.bytes.clone()]
                    .chars()
                    .next()
                    .unwrap_or_default();
                if rules.clause_breakers.contains(&c) {
                    negators = 0;
                } else {
                    negators <<= 1;
                }
            }
            SegmentKind::Term(id) => {
                let tags = matcher.tags(id);
                let negated = (negators & window).count_ones() % 2 == 1;
                let mut is_negator = false;
                for tag in tags {
                    match *tag {
                        Tag::Emotion { emotion, weight } if !negated => {
                            v.add_weight(emotion, weight)
                        }
                        Tag::Emotion { .. } => {}
                        Tag::Negator => is_negator = true,
                    }
                }
                negators = (negators << 1) | u128::from(is_negator);
            }
        }
    }
    v
}

/// Labels `text` and returns the combined frequency vector.
pub fn classify(text: &str, resources: &AnalyzerResources) -> (Emotion, EmotionVector) {
    let (residual, from_emoticons) = extract_emoticons(text, &resources.emoticons);
    let v = score_text(&residual, resources) + from_emoticons;
    (argmax_label(&v), v)
}
