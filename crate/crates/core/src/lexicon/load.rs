use std::collections::{BTreeSet, HashSet};
use std::io::{self, BufRead};

use thiserror::Error;

use crate::model::{parse_emotion, Emotion};

/// Line numbers are 1-based.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("line {line}: malformed entry ({reason})")]
    MalformedLine { line: usize, reason: &'static str },
    #[error("line {line}: unknown emotion `{label}`")]
    UnknownEmotion { line: usize, label: String },
    #[error("line {line}: duplicate entry `{term}` for {emotion}")]
    DuplicateTerm {
        line: usize,
        term: String,
        emotion: Emotion,
    },
    #[error("line {line}: weight must be positive")]
    NonPositiveWeight { line: usize },
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
}

impl LoadError {
    pub fn line(&self) -> Option<usize> {
        match self {
            LoadError::MalformedLine { line, .. }
            | LoadError::UnknownEmotion { line, .. }
            | LoadError::DuplicateTerm { line, .. }
            | LoadError::NonPositiveWeight { line } => Some(*line),
            LoadError::Io(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub term: String,
    pub emotion: Emotion,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmoticonEntry {
    pub literal: String,
    pub emotion: Emotion,
    pub weight: f64,
}

/// Parses `term<TAB>emotion[<TAB>weight]` lines into `(term, emotion, weight)`.
fn load_tsv<R: BufRead>(source: R) -> Result<Vec<(String, Emotion, f64)>, LoadError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in source.split(b'\n').enumerate() {
        let line_no = idx + 1;
        let raw = raw?;
        let line = std::str::from_utf8(&raw).map_err(|_| LoadError::MalformedLine {
            line: line_no,
            reason: "invalid UTF-8",
        })?;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let malformed = |reason| LoadError::MalformedLine {
            line: line_no,
            reason,
        };
        let (term, label, weight) = match fields.as_slice() {
            [term, label] => (*term, *label, None),
            [term, label, weight] => (*term, *label, Some(*weight)),
            _ => return Err(malformed("expected 2 or 3 tab-separated fields")),
        };
        if term.is_empty() {
            return Err(malformed("empty term"));
        }
        let emotion = match parse_emotion(label) {
            Ok(e) if e.is_emotional() => e,
            _ => {
                return Err(LoadError::UnknownEmotion {
                    line: line_no,
                    label: label.to_string(),
                })
            }
        };
        let weight = match weight {
            None => 1.0,
            Some(w) => {
                let w: f64 = w
                    .trim()
                    .parse()
                    .map_err(|_| malformed("unparsable weight"))?;
                if w.is_nan() || w <= 0.0 {
                    return Err(LoadError::NonPositiveWeight { line: line_no });
                }
                if w.is_infinite() {
                    return Err(malformed("infinite weight"));
                }
                w
            }
        };
        if !seen.insert((term.to_string(), emotion)) {
            return Err(LoadError::DuplicateTerm {
                line: line_no,
                term: term.to_string(),
                emotion,
            });
        }
        out.push((term.to_string(), emotion, weight));
    }
    Ok(out)
}

pub fn load_lexicon<R: BufRead>(source: R) -> Result<Vec<LexiconEntry>, LoadError> {
    Ok(load_tsv(source)?
        .into_iter()
        .map(|(term, emotion, weight)| LexiconEntry {
            term,
            emotion,
            weight,
        })
        .collect())
}

pub fn load_emoticons<R: BufRead>(source: R) -> Result<Vec<EmoticonEntry>, LoadError> {
    Ok(load_tsv(source)?
        .into_iter()
        .map(|(literal, emotion, weight)| EmoticonEntry {
            literal,
            emotion,
            weight,
        })
        .collect())
}

/// Terms that trigger negation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NegatorSet {
    terms: BTreeSet<String>,
}

impl NegatorSet {
    pub fn new<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        NegatorSet {
            terms: terms
                .into_iter()
                .map(Into::into)
                .filter(|t: &String| !t.is_empty())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains(term)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }
}

/// One term per line; blank lines and `#` comments are skipped.
pub fn load_negators<R: BufRead>(source: R) -> Result<NegatorSet, LoadError> {
    let mut terms = BTreeSet::new();
    for (idx, raw) in source.split(b'\n').enumerate() {
        let raw = raw?;
        let line = std::str::from_utf8(&raw).map_err(|_| LoadError::MalformedLine {
            line: idx + 1,
            reason: "invalid UTF-8",
        })?;
        let term = line.trim();
        if term.is_empty() || term.starts_with('#') {
            continue;
        }
        terms.insert(term.to_string());
    }
    Ok(NegatorSet { terms })
}

fn format_weight(w: f64) -> String {
    // `{}` on f64 is the shortest repr that parses back to the same value
    format!("{w}")
}

/// Writes entries in the lexicon TSV format.
pub fn lexicon_to_tsv(entries: &[LexiconEntry]) -> String {
    entries
        .iter()
        .map(|e| format!("{}\t{}\t{}\n", e.term, e.emotion, format_weight(e.weight)))
        .collect()
}

pub fn emoticons_to_tsv(entries: &[EmoticonEntry]) -> String {
    entries
        .iter()
        .map(|e| {
            format!(
                "{}\t{}\t{}\n",
                e.literal,
                e.emotion,
                format_weight(e.weight)
            )
        })
        .collect()
}
