//! Synthetic JSONL corpora.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::textgen::Vocabulary;

/// Local midnight of 2013-04-20 at +08:00.
pub const QUAKE_DAY_START: i64 = 1_366_387_200;
pub const QUAKE_DATE: &str = "2013-04-20";
pub const QUAKE_HOUR: usize = 8;
pub const STRUCK: &str = "sichuan";
pub const CALM: &str = "beijing";
pub const PER_HOUR: usize = 1040;

const WORDS: &[&str] = &[
    "今天", "我们", "这里", "大家", "一起", "看到", "消息", "城市", "早上", "朋友",
];

/// Terms per label, in happy, sad, angry, surprise, fear order. None of
/// them fuses with `WORDS` under the demo lexicon.
const CUES: [&[&str]; 5] = [
    &["开心", "高兴", "快乐", "幸福"],
    &["伤心", "难过", "心疼"],
    &["生气", "愤怒", "讨厌"],
    &["惊讶", "震惊", "没想到"],
    &["害怕", "恐惧", "担心"],
];

/// Label mixes as weights over happy, sad, angry, surprise, fear, neutral.
const BASELINE: [f64; 6] = [0.50, 0.12, 0.08, 0.10, 0.05, 0.15];
const AFTERMATH: [f64; 6] = [0.12, 0.25, 0.05, 0.08, 0.35, 0.15];

fn pick_label<R: Rng>(rng: &mut R, mix: &[f64; 6]) -> usize {
    let mut x = rng.random::<f64>() * mix.iter().sum::<f64>();
    for (i, w) in mix.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    5
}

fn sentence<R: Rng>(rng: &mut R, label: usize) -> String {
    let mut s = String::new();
    for _ in 0..rng.random_range(1..4) {
        s.push_str(WORDS.choose(rng).unwrap());
    }
    if label < 5 {
        s.push_str(CUES[label].choose(rng).unwrap());
    }
    s.push('。');
    s
}

pub fn record(id: &str, text: &str, created_at: i64, region: &str) -> String {
    json!({"id": id, "text": text, "created_at": created_at, "user_region": region}).to_string()
}

/// One day, two regions, `PER_HOUR` tweets per region-hour. From
/// `QUAKE_HOUR` on, the struck region's mix moves from happy to fear/sad.
pub fn earthquake(seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::with_capacity(2 * 24 * PER_HOUR);
    for hour in 0..24 {
        for region in [STRUCK, CALM] {
            let mix = if region == STRUCK && hour >= QUAKE_HOUR {
                &AFTERMATH
            } else {
                &BASELINE
            };
            for i in 0..PER_HOUR {
                let label = pick_label(&mut rng, mix);
                let text = sentence(&mut rng, label);
                let at = QUAKE_DAY_START + hour as i64 * 3600 + rng.random_range(0..3600);
                lines.push(record(&format!("{region}-{hour}-{i}"), &text, at, region));
            }
        }
    }
    lines
}

/// `n` lines over three days and all regions; roughly 5% repeat an
/// earlier id and 2% are unparsable.
pub fn mixed_fixture(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab = Vocabulary::demo();
    let regions: Vec<&str> = eap_core::model::RegionCode::all()
        .map(|r| r.code())
        .collect();
    let mut lines: Vec<String> = Vec::with_capacity(n);
    let mut next_id = 0u64;
    while lines.len() < n {
        let roll = rng.random_range(0..100);
        if roll < 2 {
            lines.push(format!("{{\"id\":\"broken-{}\"", lines.len()));
            continue;
        }
        let id = if roll < 7 && next_id > 0 {
            rng.random_range(0..next_id)
        } else {
            next_id += 1;
            next_id - 1
        };
        let text = vocab.text(&mut rng, 16);
        let at = QUAKE_DAY_START + rng.random_range(0..3 * 86_400);
        let region = regions.choose(&mut rng).unwrap();
        lines.push(record(&format!("t{id}"), &text, at, region));
    }
    lines
}

/// A text of exactly `chars` codepoints drawn from the demo vocabulary.
pub fn text_of_len<R: Rng>(vocab: &Vocabulary, rng: &mut R, chars: usize) -> String {
    let mut out = String::new();
    while out.chars().count() < chars {
        out.push_str(&vocab.text(rng, 8));
    }
    out.chars().take(chars).collect()
}
