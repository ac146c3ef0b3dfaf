//! Linguistic resources and the multi-pattern matcher built from them.

mod load;
mod matcher;
mod trie;

pub use load::{
    emoticons_to_tsv, lexicon_to_tsv, load_emoticons, load_lexicon, load_negators, EmoticonEntry,
    LexiconEntry, LoadError, NegatorSet,
};
pub use matcher::{segment, Matcher, Segment, SegmentKind, Segments, Tag, TermId};

pub(crate) use trie::Trie;

/// Demo emotion lexicon bundled with the crate.
pub const DEMO_LEXICON: &str = include_str!("../../resources/lexicon.tsv");
/// Demo emoticon table.
pub const DEMO_EMOTICONS: &str = include_str!("../../resources/emoticons.tsv");
/// Demo negator list.
pub const DEMO_NEGATORS: &str = include_str!("../../resources/negators.txt");
