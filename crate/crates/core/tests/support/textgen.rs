//! Random microblog-like texts assembled from the demo vocabulary.

use eap_core::lexicon::{
    load_emoticons, load_lexicon, load_negators, DEMO_EMOTICONS, DEMO_LEXICON, DEMO_NEGATORS,
};
use rand::seq::IndexedRandom;
use rand::Rng;

/// Characters that are neither lexicon, negator nor emoticon material.
pub const FILLER: &[&str] = &[
    "今", "天", "我", "们", "这", "里", "大", "家", "看", "到", "消", "息", "城", "市", "x", "y",
    " ", "，", "。", "！", "?", "\n", "#", "@",
];

pub struct Vocabulary {
    pub terms: Vec<String>,
    pub negators: Vec<String>,
    pub emoticons: Vec<String>,
}

impl Vocabulary {
    pub fn demo() -> Self {
        Vocabulary {
            terms: load_lexicon(DEMO_LEXICON.as_bytes())
                .unwrap()
                .into_iter()
                .map(|e| e.term)
                .collect(),
            negators: load_negators(DEMO_NEGATORS.as_bytes())
                .unwrap()
                .iter()
                .map(str::to_string)
                .collect(),
            emoticons: load_emoticons(DEMO_EMOTICONS.as_bytes())
                .unwrap()
                .into_iter()
                .map(|e| e.literal)
                .collect(),
        }
    }

    /// Concatenation of up to `max_pieces` random pieces.
    pub fn text<R: Rng>(&self, rng: &mut R, max_pieces: usize) -> String {
        let n = rng.random_range(0..=max_pieces);
        let mut out = String::new();
        for _ in 0..n {
            let piece = match rng.random_range(0..10) {
                0..=2 => self.terms.choose(rng).unwrap().as_str(),
                3 => self.negators.choose(rng).unwrap().as_str(),
                4 => self.emoticons.choose(rng).unwrap().as_str(),
                _ => FILLER.choose(rng).unwrap(),
            };
            out.push_str(piece);
        }
        out
    }

    /// Text made only of filler characters.
    pub fn filler<R: Rng>(&self, rng: &mut R, max_chars: usize) -> String {
        let n = rng.random_range(0..=max_chars);
        (0..n).map(|_| *FILLER.choose(rng).unwrap()).collect()
    }

    /// True if `text` ends in a proper prefix of some emoticon literal.
    pub fn ends_in_emoticon_prefix(&self, text: &str) -> bool {
        self.emoticons.iter().any(|lit| {
            lit.char_indices()
                .skip(1)
                .any(|(i, _)| text.ends_with(&lit[..i]))
        })
    }
}
