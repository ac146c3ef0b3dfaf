//! Hourly per-region emotion counts and the statistics derived from them:
//! daily happiness scores with alarms, the national average and ranking,
//! hourly emotion ratios and corpus statistics.

mod query;
mod snapshot;

use std::collections::BTreeMap;

use chrono::{Days, NaiveDate};
use parking_lot::{RwLock, RwLockReadGuard};
use serde::Serialize;

use crate::model::{ClassifiedTweet, Emotion, RegionCode};

pub use query::{CorpusStats, DailyScore, HourlyRatios, RankEntry, StoreView};
pub use snapshot::RestoreError;

pub const DEFAULT_UTC_OFFSET_SECS: i32 = 8 * 3600;
pub const DEFAULT_ALARM_THRESHOLD: f64 = 35.0;

/// Denominator of the daily happiness score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ScoreBasis {
    /// Happy share of the five emotional labels.
    #[default]
    Emotional,
    /// Happy share of all tweets, neutral included.
    AllTweets,
}

impl ScoreBasis {
    pub fn denominator(self, counts: &BucketCounts) -> u64 {
        match self {
            ScoreBasis::Emotional => counts.emotional(),
            ScoreBasis::AllTweets => counts.total(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateConfig {
    /// Fixed offset from UTC that defines local hours and days.
    pub utc_offset_secs: i32,
    /// Scores strictly below this raise an alarm.
    pub alarm_threshold: f64,
    pub score_basis: ScoreBasis,
}

impl Default for AggregateConfig {
    fn default() -> Self {
        AggregateConfig {
            utc_offset_secs: DEFAULT_UTC_OFFSET_SECS,
            alarm_threshold: DEFAULT_ALARM_THRESHOLD,
            score_basis: ScoreBasis::default(),
        }
    }
}

impl AggregateConfig {
    /// Local hour index (hours since the local epoch) of a UTC timestamp.
    pub fn hour_of(&self, created_at: i64) -> i64 {
        (created_at + i64::from(self.utc_offset_secs)).div_euclid(3600)
    }
}

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).unwrap()
}

/// First local hour index of `date`.
pub fn first_hour_of(date: NaiveDate) -> i64 {
    date.signed_duration_since(epoch()).num_days() * 24
}

/// Local calendar day containing hour index `hour`.
pub fn date_of_hour(hour: i64) -> NaiveDate {
    let days = hour.div_euclid(24);
    if days >= 0 {
        epoch() + Days::new(days as u64)
    } else {
        epoch() - Days::new(days.unsigned_abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BucketKey {
    pub region: RegionCode,
    pub hour: i64,
}

/// Per-label tweet counts of one bucket, indexed like [`Emotion::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BucketCounts([u64; 6]);

impl BucketCounts {
    pub fn from_counts(counts: [u64; 6]) -> Self {
        BucketCounts(counts)
    }

    pub fn get(&self, emotion: Emotion) -> u64 {
        self.0[emotion.index()]
    }

    pub fn counts(&self) -> [u64; 6] {
        self.0
    }

    pub fn increment(&mut self, emotion: Emotion) {
        self.0[emotion.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Count over the five emotional labels.
    pub fn emotional(&self) -> u64 {
        self.total() - self.get(Emotion::Neutral)
    }

    pub fn merge(&mut self, other: &BucketCounts) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
    }
}

impl Serialize for BucketCounts {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(6))?;
        for e in Emotion::ALL {
            map.serialize_entry(e.name(), &self.get(e))?;
        }
        map.end()
    }
}

/// Anything that accepts classified tweets.
pub trait Recorder: Sync {
    fn record(&self, tweet: &ClassifiedTweet);
}

/// Thread-safe store of hourly buckets.
///
/// Writers serialize on one lock; every read goes through a [`StoreView`]
/// that holds the read side, so a query never observes a half-applied batch.
#[derive(Debug, Default)]
pub struct AggregateStore {
    config: AggregateConfig,
    buckets: RwLock<BTreeMap<BucketKey, BucketCounts>>,
}

impl AggregateStore {
    pub fn new(config: AggregateConfig) -> Self {
        AggregateStore {
            config,
            buckets: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn config(&self) -> &AggregateConfig {
        &self.config
    }

    /// Counts one tweet with `label` at `created_at` in `region`.
    pub fn record_label(&self, region: RegionCode, created_at: i64, label: Emotion) {
        let key = BucketKey {
            region,
            hour: self.config.hour_of(created_at),
        };
        self.buckets
            .write()
            .entry(key)
            .or_default()
            .increment(label);
    }

    /// Adds pre-aggregated counts to one bucket.
    pub fn add_counts(&self, key: BucketKey, counts: BucketCounts) {
        self.buckets.write().entry(key).or_default().merge(&counts);
    }

    /// A consistent read view; writers block while it is held.
    pub fn view(&self) -> StoreView<'_> {
        StoreView::new(&self.config, self.buckets.read())
    }

    pub fn len(&self) -> usize {
        self.buckets.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.read().is_empty()
    }

    pub fn buckets(&self) -> Vec<(BucketKey, BucketCounts)> {
        self.buckets.read().iter().map(|(k, v)| (*k, *v)).collect()
    }

    fn read_map(&self) -> RwLockReadGuard<'_, BTreeMap<BucketKey, BucketCounts>> {
        self.buckets.read()
    }

    pub fn daily_score(&self, region: RegionCode, date: NaiveDate) -> DailyScore {
        self.view().daily_score(region, date)
    }

    pub fn national_average(&self, date: NaiveDate) -> Option<f64> {
        self.view().national_average(date)
    }

    pub fn global_rank(&self, date: NaiveDate) -> Vec<RankEntry> {
        self.view().global_rank(date)
    }

    pub fn hourly_ratios(&self, region: RegionCode, date: NaiveDate) -> HourlyRatios {
        self.view().hourly_ratios(region, date)
    }

    pub fn corpus_stats(&self, from: NaiveDate, to: NaiveDate) -> CorpusStats {
        self.view().corpus_stats(from, to)
    }
}

impl Recorder for AggregateStore {
    fn record(&self, tweet: &ClassifiedTweet) {
        self.record_label(tweet.region, tweet.tweet.created_at, tweet.label);
    }
}
