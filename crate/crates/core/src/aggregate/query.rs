use std::cmp::Ordering;
use std::collections::BTreeMap;

use chrono::NaiveDate;
use parking_lot::RwLockReadGuard;
use serde::{Deserialize, Serialize};

use super::{first_hour_of, AggregateConfig, BucketCounts, BucketKey};
use crate::model::{Emotion, RegionCode};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DailyScore {
    pub region: RegionCode,
    pub date: NaiveDate,
    /// `100 * happy / denominator` under the configured [`super::ScoreBasis`];
    /// absent when the denominator is 0.
    pub score: Option<f64>,
    pub alarm: bool,
    pub counts: BucketCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub region: RegionCode,
    pub score: f64,
    /// `score - national_average`.
    pub delta: f64,
}

/// One row per local hour; a row is `None` when that hour has no emotional
/// tweets, else the five emotional ratios in label order.
pub type HourlyRatios = [Option<[f64; 5]>; 24];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub total: u64,
    pub region_counts: BTreeMap<RegionCode, u64>,
    /// Fraction of `total` per region with at least one tweet.
    pub region_shares: BTreeMap<RegionCode, f64>,
    pub label_counts: BTreeMap<Emotion, u64>,
    /// Fraction of `total` per label; empty when `total` is 0.
    pub label_distribution: BTreeMap<Emotion, f64>,
}

/// Point-in-time read access to an [`super::AggregateStore`].
pub struct StoreView<'a> {
    config: &'a AggregateConfig,
    buckets: RwLockReadGuard<'a, BTreeMap<BucketKey, BucketCounts>>,
}

impl<'a> StoreView<'a> {
    pub(super) fn new(
        config: &'a AggregateConfig,
        buckets: RwLockReadGuard<'a, BTreeMap<BucketKey, BucketCounts>>,
    ) -> Self {
        StoreView { config, buckets }
    }

    pub fn config(&self) -> &AggregateConfig {
        self.config
    }

    fn hour_counts(&self, region: RegionCode, date: NaiveDate) -> [BucketCounts; 24] {
        let first = first_hour_of(date);
        let range = BucketKey {
            region,
            hour: first,
        }..BucketKey {
            region,
            hour: first + 24,
        };
        let mut out = [BucketCounts::default(); 24];
        for (key, counts) in self.buckets.range(range) {
            out[(key.hour - first) as usize] = *counts;
        }
        out
    }

    /// Sum of the day's 24 buckets for `region`.
    pub fn day_counts(&self, region: RegionCode, date: NaiveDate) -> BucketCounts {
        let mut total = BucketCounts::default();
        for counts in self.hour_counts(region, date) {
            total.merge(&counts);
        }
        total
    }

    pub fn daily_score(&self, region: RegionCode, date: NaiveDate) -> DailyScore {
        let counts = self.day_counts(region, date);
        let denominator = self.config.score_basis.denominator(&counts);
        let score = (denominator > 0)
            .then(|| 100.0 * counts.get(Emotion::Happy) as f64 / denominator as f64);
        DailyScore {
            region,
            date,
            score,
            alarm: score.is_some_and(|s| s < self.config.alarm_threshold),
            counts,
        }
    }

    /// Daily scores of all 36 regions in code-table order.
    pub fn daily_scores(&self, date: NaiveDate) -> Vec<DailyScore> {
        RegionCode::all()
            .map(|r| self.daily_score(r, date))
            .collect()
    }

    /// Unweighted mean of the defined province scores (abroad and other
    /// excluded).
    pub fn national_average(&self, date: NaiveDate) -> Option<f64> {
        let scores: Vec<f64> = RegionCode::provinces()
            .filter_map(|r| self.daily_score(r, date).score)
            .collect();
        (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64)
    }

    /// Provinces with a defined score, best first; equal scores sort by
    /// region code.
    pub fn global_rank(&self, date: NaiveDate) -> Vec<RankEntry> {
        let Some(average) = self.national_average(date) else {
            return Vec::new();
        };
        let mut entries: Vec<RankEntry> = RegionCode::provinces()
            .filter_map(|region| {
                self.daily_score(region, date).score.map(|score| RankEntry {
                    region,
                    score,
                    delta: score - average,
                })
            })
            .collect();
        entries.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.region.code().cmp(b.region.code()))
        });
        entries
    }

    pub fn hourly_ratios(&self, region: RegionCode, date: NaiveDate) -> HourlyRatios {
        self.hour_counts(region, date).map(|counts| {
            let emotional = counts.emotional();
            (emotional > 0)
                .then(|| Emotion::EMOTIONAL.map(|e| counts.get(e) as f64 / emotional as f64))
        })
    }

    /// Tweet shares per region and label over the local days `from..=to`.
    pub fn corpus_stats(&self, from: NaiveDate, to: NaiveDate) -> CorpusStats {
        let lo = first_hour_of(from);
        let hi = first_hour_of(to) + 24;
        let mut region_counts = BTreeMap::new();
        let mut labels = BucketCounts::default();
        for (key, counts) in self.buckets.iter() {
            if key.hour < lo || key.hour >= hi || counts.total() == 0 {
                continue;
            }
            *region_counts.entry(key.region).or_insert(0) += counts.total();
            labels.merge(counts);
        }
        let total = labels.total();
        let region_shares = region_counts
            .iter()
            .map(|(r, n)| (*r, *n as f64 / total as f64))
            .collect();
        let label_counts = Emotion::ALL.iter().map(|e| (*e, labels.get(*e))).collect();
        let label_distribution = if total == 0 {
            BTreeMap::new()
        } else {
            Emotion::ALL
                .iter()
                .map(|e| (*e, labels.get(*e) as f64 / total as f64))
                .collect()
        };
        CorpusStats {
            from,
            to,
            total,
            region_counts,
            region_shares,
            label_counts,
            label_distribution,
        }
    }
}
