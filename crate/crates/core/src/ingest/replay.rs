use std::collections::BTreeMap;
use std::io::{self, BufRead};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dedup::DedupStore;
use super::record::{classify_tweet, parse_record};
use crate::aggregate::Recorder;
use crate::analyzer::AnalyzerResources;
use crate::model::{Emotion, Tweet};

/// Unthrottled replays classify this many fresh records per parallel batch.
pub const DEFAULT_BATCH_SIZE: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("replay rate must be a positive number, got {0}")]
    BadRate(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayPlan {
    rate: Option<f64>,
    batch_size: usize,
}

impl Default for ReplayPlan {
    fn default() -> Self {
        ReplayPlan {
            rate: None,
            batch_size: DEFAULT_BATCH_SIZE,
        }
    }
}

impl ReplayPlan {
    pub fn unthrottled() -> Self {
        ReplayPlan::default()
    }

    /// Caps delivery at `rate` records per second.
    pub fn throttled(rate: f64) -> Result<Self, PlanError> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(PlanError::BadRate(rate));
        }
        Ok(ReplayPlan {
            rate: Some(rate),
            batch_size: 1,
        })
    }

    pub fn rate(&self) -> Option<f64> {
        self.rate
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size.max(1);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplaySummary {
    /// Non-blank input lines.
    pub read: u64,
    pub duplicates: u64,
    pub rejected: u64,
    pub classified: u64,
    /// Classified records per label.
    pub labels: BTreeMap<Emotion, u64>,
}

impl ReplaySummary {
    pub fn is_conserved(&self) -> bool {
        self.read == self.duplicates + self.rejected + self.classified
    }

    pub fn merge(&mut self, other: &ReplaySummary) {
        self.read += other.read;
        self.duplicates += other.duplicates;
        self.rejected += other.rejected;
        self.classified += other.classified;
        for (label, n) in &other.labels {
            *self.labels.entry(*label).or_insert(0) += n;
        }
    }
}

/// The source failed mid-stream. Everything read before the failure has
/// been delivered and is reflected in `summary`.
#[derive(Debug, Error)]
#[error("replay source failed after {} records: {source}", summary.read)]
pub struct ReplayError {
    pub summary: ReplaySummary,
    #[source]
    pub source: io::Error,
}

struct Pacer {
    start: Instant,
    interval: Option<f64>,
}

impl Pacer {
    /// Blocks until record `n` (1-based) may be released.
    fn wait(&self, n: u64) {
        if let Some(interval) = self.interval {
            let due = self.start + Duration::from_secs_f64(n as f64 * interval);
            let now = Instant::now();
            if due > now {
                std::thread::sleep(due - now);
            }
        }
    }
}

fn flush<S: Recorder + ?Sized>(
    batch: &mut Vec<Tweet>,
    resources: &AnalyzerResources,
    sink: &S,
    summary: &mut ReplaySummary,
) {
    if batch.is_empty() {
        return;
    }
    let classified: Vec<_> = if batch.len() == 1 {
        batch
            .drain(..)
            .map(|t| classify_tweet(t, resources))
            .collect()
    } else {
        batch
            .par_drain(..)
            .map(|t| classify_tweet(t, resources))
            .collect()
    };
    for c in &classified {
        sink.record(c);
        summary.classified += 1;
        *summary.labels.entry(c.label).or_insert(0) += 1;
    }
}

/// Parses, de-duplicates, classifies and records every line of `source`.
///
/// Dedup checks happen in read order; classification of a batch may run on
/// several threads, but the sink sees records in read order.
pub fn replay<R, S>(
    mut source: R,
    plan: &ReplayPlan,
    resources: &AnalyzerResources,
    dedup: &DedupStore,
    sink: &S,
) -> Result<ReplaySummary, ReplayError>
where
    R: BufRead,
    S: Recorder + ?Sized,
{
    let pacer = Pacer {
        start: Instant::now(),
        interval: plan.rate.map(|r| 1.0 / r),
    };
    let mut summary = ReplaySummary::default();
    let mut batch = Vec::with_capacity(plan.batch_size.min(DEFAULT_BATCH_SIZE));
    let mut line = Vec::new();
    loop {
        line.clear();
        match source.read_until(b'\n', &mut line) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(source) => {
                flush(&mut batch, resources, sink, &mut summary);
                return Err(ReplayError { summary, source });
            }
        }
        let Ok(text) = std::str::from_utf8(&line) else {
            summary.read += 1;
            summary.rejected += 1;
            pacer.wait(summary.read);
            continue;
        };
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        summary.read += 1;
        pacer.wait(summary.read);
        match parse_record(text) {
            Err(_) => summary.rejected += 1,
            Ok(tweet) if !dedup.check(&tweet.id) => summary.duplicates += 1,
            Ok(tweet) => {
                batch.push(tweet);
                if batch.len() >= plan.batch_size {
                    flush(&mut batch, resources, sink, &mut summary);
                }
            }
        }
    }
    flush(&mut batch, resources, sink, &mut summary);
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::AggregateStore;
    use crate::model::ClassifiedTweet;
    use parking_lot::Mutex;

    fn line(id: &str, text: &str) -> String {
        format!(
            r#"{{"id":"{id}","text":"{text}","created_at":1366416000,"user_region":"sichuan"}}"#
        )
    }

    #[derive(Default)]
    struct Collect(Mutex<Vec<ClassifiedTweet>>);

    impl Recorder for Collect {
        fn record(&self, tweet: &ClassifiedTweet) {
            self.0.lock().push(tweet.clone());
        }
    }

    #[test]
    fn counts_duplicates() {
        let input = [line("1", "开心"), line("2", "害怕"), line("1", "开心")].join("\n");
        let sink = Collect::default();
        let summary = replay(
            input.as_bytes(),
            &ReplayPlan::default(),
            &AnalyzerResources::demo(),
            &DedupStore::default(),
            &sink,
        )
        .unwrap();
        assert_eq!(
            (
                summary.read,
                summary.duplicates,
                summary.rejected,
                summary.classified
            ),
            (3, 1, 0, 2)
        );
        assert_eq!(summary.labels[&Emotion::Happy], 1);
        assert_eq!(summary.labels[&Emotion::Fear], 1);
        let ids: Vec<_> = sink.0.lock().iter().map(|c| c.tweet.id.clone()).collect();
        assert_eq!(ids, ["1", "2"]);
    }

    #[test]
    fn empty_input() {
        let summary = replay(
            &b""[..],
            &ReplayPlan::default(),
            &AnalyzerResources::demo(),
            &DedupStore::default(),
            &AggregateStore::default(),
        )
        .unwrap();
        assert_eq!(summary, ReplaySummary::default());
    }

    #[test]
    fn rejects_are_counted_not_fatal() {
        let input = format!("garbage\n\n{}\n\u{0}\n", line("1", "x"));
        let mut bytes = input.into_bytes();
        bytes.extend_from_slice(b"\xff\xfe\n");
        let summary = replay(
            &bytes[..],
            &ReplayPlan::default(),
            &AnalyzerResources::demo(),
            &DedupStore::default(),
            &AggregateStore::default(),
        )
        .unwrap();
        assert_eq!(summary.read, 4);
        assert_eq!(summary.rejected, 3);
        assert_eq!(summary.classified, 1);
        assert!(summary.is_conserved());
    }

    #[test]
    fn second_pass_is_all_duplicates() {
        let input: String = (0..50)
            .map(|i| line(&i.to_string(), "开心") + "\n")
            .collect();
        let dedup = DedupStore::default();
        let store = AggregateStore::default();
        let resources = AnalyzerResources::demo();
        let plan = ReplayPlan::default().with_batch_size(7);
        let first = replay(input.as_bytes(), &plan, &resources, &dedup, &store).unwrap();
        let snap = store.snapshot();
        let second = replay(input.as_bytes(), &plan, &resources, &dedup, &store).unwrap();
        assert_eq!(first.classified, 50);
        assert_eq!(second.classified, 0);
        assert_eq!(second.duplicates, 50);
        assert_eq!(store.snapshot(), snap);
    }

    struct FailAfter<'a> {
        data: &'a [u8],
    }

    impl io::Read for FailAfter<'_> {
        fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
            if self.data.is_empty() {
                return Err(io::Error::other("disk on fire"));
            }
            let n = buf.len().min(self.data.len());
            buf[..n].copy_from_slice(&self.data[..n]);
            self.data = &self.data[n..];
            Ok(n)
        }
    }

    #[test]
    fn io_error_returns_partial_summary() {
        let input = format!("{}\n{}\n", line("1", "开心"), line("2", "开心"));
        let store = AggregateStore::default();
        let err = replay(
            io::BufReader::new(FailAfter {
                data: input.as_bytes(),
            }),
            &ReplayPlan::default(),
            &AnalyzerResources::demo(),
            &DedupStore::default(),
            &store,
        )
        .unwrap_err();
        assert_eq!(err.summary.classified, 2);
        assert!(err.summary.is_conserved());
        assert_eq!(store.buckets()[0].1.total(), 2);
    }

    #[test]
    fn throttle_holds_rate() {
        let input: String = (0..20)
            .map(|i| line(&i.to_string(), "开心") + "\n")
            .collect();
        let started = Instant::now();
        let summary = replay(
            input.as_bytes(),
            &ReplayPlan::throttled(100.0).unwrap(),
            &AnalyzerResources::demo(),
            &DedupStore::default(),
            &AggregateStore::default(),
        )
        .unwrap();
        assert_eq!(summary.classified, 20);
        assert!(started.elapsed() >= Duration::from_millis(200));
    }

    #[test]
    fn plan_validation() {
        assert!(ReplayPlan::throttled(0.0).is_err());
        assert!(ReplayPlan::throttled(-1.0).is_err());
        assert!(ReplayPlan::throttled(f64::NAN).is_err());
        assert_eq!(ReplayPlan::throttled(200.0).unwrap().rate(), Some(200.0));
    }
}
