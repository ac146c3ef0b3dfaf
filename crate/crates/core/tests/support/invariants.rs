//! Analyzer invariants as reusable checks over randomly drawn texts.
//!
//! Each check draws its own inputs from `rng` and returns `Ok(true)` when
//! the invariant held, `Ok(false)` when the draw did not meet the check's
//! precondition, and `Err` with a counterexample otherwise.

use eap_core::analyzer::{classify, score_text, AnalyzerResources, RuleConfig};
use eap_core::lexicon::{
    load_emoticons, load_lexicon, load_negators, segment, EmoticonEntry, NegatorSet, SegmentKind,
    DEMO_EMOTICONS, DEMO_LEXICON, DEMO_NEGATORS,
};
use eap_core::model::{Emotion, EmotionVector};
use rand::seq::IndexedRandom;
use rand::Rng;

use super::textgen::Vocabulary;

/// Dyadic or small-integer factors, so scaled sums stay exact.
pub const SCALE_FACTORS: [f64; 7] = [0.25, 0.5, 2.0, 3.0, 7.0, 10.0, 1024.0];

const MAX_PIECES: usize = 12;

pub struct Fixtures {
    pub vocab: Vocabulary,
    pub demo: AnalyzerResources,
    pub scaled: Vec<(f64, AnalyzerResources)>,
    pub empty: AnalyzerResources,
    pub emoticons: Vec<EmoticonEntry>,
}

fn scaled_demo(factor: f64) -> AnalyzerResources {
    let mut lexicon = load_lexicon(DEMO_LEXICON.as_bytes()).unwrap();
    let mut emoticons = load_emoticons(DEMO_EMOTICONS.as_bytes()).unwrap();
    lexicon.iter_mut().for_each(|e| e.weight *= factor);
    emoticons.iter_mut().for_each(|e| e.weight *= factor);
    let negators = load_negators(DEMO_NEGATORS.as_bytes()).unwrap();
    AnalyzerResources::new(&lexicon, &emoticons, &negators, RuleConfig::default())
}

fn close(a: &EmotionVector, b: &EmotionVector) -> bool {
    a.weights()
        .iter()
        .zip(b.weights())
        .all(|(x, y)| (x - y).abs() <= 1e-9)
}

impl Fixtures {
    pub fn new() -> Self {
        Fixtures {
            vocab: Vocabulary::demo(),
            demo: AnalyzerResources::demo(),
            scaled: SCALE_FACTORS
                .iter()
                .map(|f| (*f, scaled_demo(*f)))
                .collect(),
            empty: AnalyzerResources::new(&[], &[], &NegatorSet::default(), RuleConfig::default()),
            emoticons: load_emoticons(DEMO_EMOTICONS.as_bytes()).unwrap(),
        }
    }

    pub fn neutral_iff_zero<R: Rng>(&self, rng: &mut R) -> Result<bool, String> {
        let text = self.vocab.text(rng, MAX_PIECES);
        let (label, v) = classify(&text, &self.demo);
        if (label == Emotion::Neutral) != v.is_zero() {
            return Err(format!("{text:?}: {label} with {v:?}"));
        }
        Ok(true)
    }

    pub fn scale_invariant<R: Rng>(&self, rng: &mut R) -> Result<bool, String> {
        let text = self.vocab.text(rng, MAX_PIECES);
        let (factor, scaled) = self.scaled.choose(rng).unwrap();
        let base = classify(&text, &self.demo).0;
        let got = classify(&text, scaled).0;
        if base != got {
            return Err(format!("{text:?}: {base} became {got} at x{factor}"));
        }
        Ok(true)
    }

    /// Appending an emoticon adds exactly its weight, provided the text does
    /// not end in a prefix of some emoticon (which could fuse with it).
    pub fn emoticon_additive<R: Rng>(&self, rng: &mut R) -> Result<bool, String> {
        let text = self.vocab.text(rng, MAX_PIECES);
        let e = self.emoticons.choose(rng).unwrap();
        if self.vocab.ends_in_emoticon_prefix(&text) {
            return Ok(false);
        }
        let mut expected = classify(&text, &self.demo).1;
        expected.add_weight(e.emotion, e.weight);
        let got = classify(&format!("{text}{}", e.literal), &self.demo).1;
        if !close(&got, &expected) {
            return Err(format!("{text:?} + {}: {got:?} != {expected:?}", e.literal));
        }
        Ok(true)
    }

    /// Two negators directly before a term leave its contribution intact.
    /// Draws where segmentation fuses the pieces differently are skipped.
    pub fn double_negation<R: Rng>(&self, rng: &mut R) -> Result<bool, String> {
        let vocab = &self.vocab;
        let term = vocab.terms.choose(rng).unwrap();
        let n1 = vocab.negators.choose(rng).unwrap();
        let n2 = vocab.negators.choose(rng).unwrap();
        let prefix = vocab.filler(rng, 6);
        let suffix = vocab.filler(rng, 6);
        let negated = format!("{prefix}。{n1}{n2}{term}。{suffix}");
        let pieces: Vec<&str> = segment(self.demo.matcher(), &negated)
            .into_iter()
            .filter(|s| matches!(s.kind, SegmentKind::Term(_)))
            .map(|s| s.surface(&negated))
            .collect();
        if pieces != [n1.as_str(), n2.as_str(), term.as_str()] {
            return Ok(false);
        }
        let plain = format!("{prefix}。{term}。{suffix}");
        let (a, b) = (
            score_text(&negated, &self.demo),
            score_text(&plain, &self.demo),
        );
        if a != b || b.is_zero() {
            return Err(format!("{negated:?} scored {a:?}, {plain:?} scored {b:?}"));
        }
        Ok(true)
    }

    pub fn empty_is_neutral<R: Rng>(&self, rng: &mut R) -> Result<bool, String> {
        let text = self.vocab.text(rng, MAX_PIECES);
        let (label, v) = classify(&text, &self.empty);
        if label != Emotion::Neutral || !v.is_zero() {
            return Err(format!("{text:?}: {label} with {v:?}"));
        }
        Ok(true)
    }
}
