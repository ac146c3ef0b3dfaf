//! Brute-force longest-match segmenter used as an independent reference.

/// `(start, end, matched)` in codepoint offsets.
pub type OracleSegment = (usize, usize, bool);

fn term_matches(term: &str, window: &[char]) -> bool {
    let candidate: String = window.iter().collect();
    if term.is_ascii() {
        candidate.is_ascii() && term.eq_ignore_ascii_case(&candidate)
    } else {
        term == candidate
    }
}

/// At every offset, try each term length from longest to shortest.
pub fn oracle_segment(terms: &[String], text: &str) -> Vec<OracleSegment> {
    let chars: Vec<char> = text.chars().collect();
    let max_len = terms.iter().map(|t| t.chars().count()).max().unwrap_or(0);
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let mut matched = 0;
        for len in (1..=max_len.min(chars.len() - i)).rev() {
            let window = &chars[i..i + len];
            if terms
                .iter()
                .any(|t| t.chars().count() == len && term_matches(t, window))
            {
                matched = len;
                break;
            }
        }
        if matched > 0 {
            out.push((i, i + matched, true));
            i += matched;
        } else {
            out.push((i, i + 1, false));
            i += 1;
        }
    }
    out
}

pub const ALPHABET: &[char] = &['a', 'b', 'A', 'B', '开', '心', '不', ':', '('];

fn word<R: rand::Rng>(rng: &mut R, len: usize) -> String {
    (0..len)
        .map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())])
        .collect()
}

/// Up to 50 terms of 1 to 4 characters and a text of up to 60, all over a
/// small alphabet so matches and near-misses are frequent.
pub fn random_instance<R: rand::Rng>(rng: &mut R) -> (Vec<String>, String) {
    let n = rng.random_range(0..=50);
    let terms = (0..n)
        .map(|_| {
            let len = rng.random_range(1..=4);
            word(rng, len)
        })
        .collect();
    let len = rng.random_range(0..=60);
    (terms, word(rng, len))
}
