//! Precision evaluation against manually checked samples.
//!
//! Annotators only verify tweets the analyzer labelled as emotional, so the
//! report carries per-class precision and its macro mean; recall is not
//! measurable under that protocol and is not reported.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Emotion;

pub const DEFAULT_PER_CLASS: usize = 500;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldRecord {
    pub id: String,
    pub gold: Emotion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub label: Emotion,
    /// Local calendar day, `YYYY-MM-DD`.
    #[serde(default)]
    pub day: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("gold id `{0}` has no prediction")]
    GoldIdNotPredicted(String),
    #[error("gold id `{0}` appears more than once")]
    DuplicateGold(String),
    #[error("prediction id `{0}` appears more than once")]
    DuplicatePrediction(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrecisionReport {
    /// `None` for classes that were never predicted.
    pub per_class: BTreeMap<Emotion, Option<f64>>,
    /// Number of evaluated predictions per class.
    pub support: BTreeMap<Emotion, u64>,
    /// Mean of the defined per-class precisions.
    pub macro_precision: Option<f64>,
}

/// Unweighted mean of the defined precisions.
pub fn macro_precision<I: IntoIterator<Item = Option<f64>>>(per_class: I) -> Option<f64> {
    let defined: Vec<f64> = per_class.into_iter().flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

/// Per-class precision of `predictions` over the ids present in `gold`.
/// Neutral predictions are not scored.
pub fn precision_report(
    gold: &[GoldRecord],
    predictions: &[Prediction],
) -> Result<PrecisionReport, EvalError> {
    let mut predicted: HashMap<&str, Emotion> = HashMap::with_capacity(predictions.len());
    for p in predictions {
        if predicted.insert(&p.id, p.label).is_some() {
            return Err(EvalError::DuplicatePrediction(p.id.clone()));
        }
    }
    let mut hits = [0u64; 5];
    let mut support = [0u64; 5];
    let mut seen = HashMap::with_capacity(gold.len());
    for g in gold {
        if seen.insert(g.id.as_str(), ()).is_some() {
            return Err(EvalError::DuplicateGold(g.id.clone()));
        }
        let label = *predicted
            .get(g.id.as_str())
            .ok_or_else(|| EvalError::GoldIdNotPredicted(g.id.clone()))?;
        if !label.is_emotional() {
            continue;
        }
        support[label.index()] += 1;
        if label == g.gold {
            hits[label.index()] += 1;
        }
    }
    let per_class: BTreeMap<Emotion, Option<f64>> = Emotion::EMOTIONAL
        .iter()
        .map(|e| {
            let i = e.index();
            (
                *e,
                (support[i] > 0).then(|| hits[i] as f64 / support[i] as f64),
            )
        })
        .collect();
    Ok(PrecisionReport {
        macro_precision: macro_precision(per_class.values().copied()),
        support: Emotion::EMOTIONAL
            .iter()
            .map(|e| (*e, support[e.index()]))
            .collect(),
        per_class,
    })
}

/// 64-bit FNV-1a; stable across platforms and releases.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

struct Reservoir {
    rng: ChaCha8Rng,
    seen: u64,
    /// (stream position, prediction)
    items: Vec<(usize, Prediction)>,
}

/// Draws up to `per_class` predictions uniformly without replacement from
/// every (day, emotional label) stratum in one pass.
///
/// Each stratum has its own generator derived from `seed` and the stratum
/// key, so a stratum's sample does not depend on how strata interleave in
/// the input. Output is ordered by day, label, then input position.
///
/// # Panics
///
/// Panics if `per_class` is 0.
pub fn sample_for_annotation<I>(predictions: I, per_class: usize, seed: u64) -> Vec<Prediction>
where
    I: IntoIterator<Item = Prediction>,
{
    assert!(per_class > 0, "per_class must be positive");
    let mut strata: BTreeMap<(String, Emotion), Reservoir> = BTreeMap::new();
    for (pos, p) in predictions.into_iter().enumerate() {
        if !p.label.is_emotional() {
            continue;
        }
        let key = (p.day.clone(), p.label);
        let r = strata.entry(key).or_insert_with(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let stratum = format!("{}\t{}", p.day, p.label);
            rng.set_stream(fnv1a(stratum.as_bytes()));
            Reservoir {
                rng,
                seen: 0,
                items: Vec::new(),
            }
        });
        r.seen += 1;
        if r.items.len() < per_class {
            r.items.push((pos, p));
        } else {
            let j = r.rng.random_range(0..r.seen) as usize;
            if j < per_class {
                r.items[j] = (pos, p);
            }
        }
    }
    strata
        .into_values()
        .flat_map(|mut r| {
            r.items.sort_by_key(|(pos, _)| *pos);
            r.items.into_iter().map(|(_, p)| p)
        })
        .collect()
}
