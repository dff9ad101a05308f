//! Size metrics per commit: pLOC, tLOC, pClasses, tClasses, tCommands.
//!
//! Series are computed incrementally by applying each commit's file deltas
//! to a live-file table. [`replay_snapshot`] recomputes a single commit
//! from scratch and exists to cross-check the incremental path.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use chrono::{DateTime, Utc};
use thiserror::Error;

use crate::classify::{analyze_file, FileFacts, FileKind, LanguageProfile};
use crate::history::{ClassifiedCommit, HistoryError};
use crate::ingest::{ChangeKind, CommitRecord, ContentProvider, Rev};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("cannot normalize an empty series")]
    EmptySeries,
    #[error("rev {0} is outside the history")]
    RevOutOfRange(Rev),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    PLoc,
    TLoc,
    PClasses,
    TClasses,
    TCommands,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::PLoc,
        Metric::TLoc,
        Metric::PClasses,
        Metric::TClasses,
        Metric::TCommands,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::PLoc => "pLOC",
            Metric::TLoc => "tLOC",
            Metric::PClasses => "pClasses",
            Metric::TClasses => "tClasses",
            Metric::TCommands => "tCommands",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MetricsSnapshot {
    pub rev: Rev,
    pub timestamp: DateTime<Utc>,
    pub p_loc: u64,
    pub t_loc: u64,
    pub p_classes: u64,
    pub t_classes: u64,
    pub t_commands: u64,
}

impl MetricsSnapshot {
    pub fn empty(rev: Rev, timestamp: DateTime<Utc>) -> Self {
        Self {
            rev,
            timestamp,
            p_loc: 0,
            t_loc: 0,
            p_classes: 0,
            t_classes: 0,
            t_commands: 0,
        }
    }

    pub fn get(&self, metric: Metric) -> u64 {
        match metric {
            Metric::PLoc => self.p_loc,
            Metric::TLoc => self.t_loc,
            Metric::PClasses => self.p_classes,
            Metric::TClasses => self.t_classes,
            Metric::TCommands => self.t_commands,
        }
    }

    fn add(&mut self, facts: &FileFacts) {
        match facts.kind {
            FileKind::ProductionCode => {
                self.p_loc += facts.loc;
                self.p_classes += facts.classes;
            }
            FileKind::TestCode => {
                self.t_loc += facts.loc;
                self.t_classes += facts.classes;
                self.t_commands += facts.test_commands;
            }
            FileKind::Other => {}
        }
    }

    fn sub(&mut self, facts: &FileFacts) {
        match facts.kind {
            FileKind::ProductionCode => {
                self.p_loc -= facts.loc;
                self.p_classes -= facts.classes;
            }
            FileKind::TestCode => {
                self.t_loc -= facts.loc;
                self.t_classes -= facts.classes;
                self.t_commands -= facts.test_commands;
            }
            FileKind::Other => {}
        }
    }
}

/// Sums the facts of every live file at one commit.
pub fn compute_snapshot<'a, I>(rev: Rev, timestamp: DateTime<Utc>, live: I) -> MetricsSnapshot
where
    I: IntoIterator<Item = &'a FileFacts>,
{
    let mut snapshot = MetricsSnapshot::empty(rev, timestamp);
    for facts in live {
        snapshot.add(facts);
    }
    snapshot
}

/// Production/test shares in percent. When a denominator is zero the ratio
/// reads as 100 (all production) and the matching flag is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRatios {
    pub p_class_ratio: f64,
    pub p_loc_ratio: f64,
    pub t_loc_ratio: f64,
    pub class_ratio_undefined: bool,
    pub loc_ratio_undefined: bool,
}

fn share(part: u64, other: u64) -> Option<f64> {
    let total = part + other;
    (total > 0).then(|| (part as f64 * 100.0) / total as f64)
}

pub fn derived_ratios(snapshot: &MetricsSnapshot) -> DerivedRatios {
    let p_class = share(snapshot.p_classes, snapshot.t_classes);
    let p_loc = share(snapshot.p_loc, snapshot.t_loc);
    let p_loc_ratio = p_loc.unwrap_or(100.0);
    DerivedRatios {
        p_class_ratio: p_class.unwrap_or(100.0),
        p_loc_ratio,
        t_loc_ratio: 100.0 - p_loc_ratio,
        class_ratio_undefined: p_class.is_none(),
        loc_ratio_undefined: p_loc.is_none(),
    }
}

/// One snapshot per commit, in rev order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetricsSeries {
    pub snapshots: Vec<MetricsSnapshot>,
}

impl MetricsSeries {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn at(&self, rev: Rev) -> Option<&MetricsSnapshot> {
        self.snapshots.get(rev.index()).filter(|s| s.rev == rev)
    }

    pub fn values(&self, metric: Metric) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.get(metric) as f64).collect()
    }
}

/// Incremental per-commit metrics over an already classified history.
pub fn compute_series(history: &[CommitRecord], classified: &[ClassifiedCommit]) -> MetricsSeries {
    let mut live: HashMap<&str, FileFacts> = HashMap::new();
    let mut running = MetricsSnapshot::empty(Rev(1), DateTime::<Utc>::MIN_UTC);
    let mut snapshots = Vec::with_capacity(classified.len());
    for (commit, record) in classified.iter().zip(history) {
        for change in &commit.changes {
            if let Some(old) = live.remove(change.path.as_str()) {
                running.sub(&old);
            }
            if let Some(facts) = change.facts {
                running.add(&facts);
                live.insert(change.path.as_str(), facts);
            }
        }
        running.rev = commit.rev;
        running.timestamp = record.timestamp;
        snapshots.push(running);
    }
    MetricsSeries { snapshots }
}

/// Rebuilds the snapshot at `rev` from scratch: replays the path set up to
/// `rev`, fetches every live file as of `rev` and re-analyzes it.
pub fn replay_snapshot<P: ContentProvider + ?Sized>(
    history: &[CommitRecord],
    provider: &P,
    profile: &LanguageProfile,
    rev: Rev,
) -> Result<MetricsSnapshot, crate::Error> {
    if rev.0 == 0 || rev.index() >= history.len() {
        return Err(MetricsError::RevOutOfRange(rev).into());
    }
    let mut paths = BTreeSet::new();
    for commit in &history[..=rev.index()] {
        for change in &commit.changes {
            match change.kind {
                ChangeKind::Deleted => paths.remove(&change.path),
                _ => paths.insert(change.path.clone()),
            };
        }
    }
    let mut facts = Vec::with_capacity(paths.len());
    for path in paths.iter().filter(|p| profile.is_source_path(p)) {
        let text = provider
            .fetch(path, rev)
            .ok_or_else(|| HistoryError::ContentUnavailable {
                path: path.clone(),
                rev,
            })?;
        facts.push(analyze_file(path, &text, profile));
    }
    Ok(compute_snapshot(rev, history[rev.index()].timestamp, &facts))
}

/// Series rescaled so the last point is 100.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSeries {
    pub values: Vec<f64>,
    /// The final raw value was zero; `values` are all zero.
    pub zero_final: bool,
}

/// Expresses every value as a percentage of the final one. Intermediate
/// points may exceed 100 when the metric shrinks later on.
pub fn cumulative_percentage(values: &[f64]) -> Result<NormalizedSeries, MetricsError> {
    let &last = values.last().ok_or(MetricsError::EmptySeries)?;
    if last <= 0.0 {
        return Ok(NormalizedSeries {
            values: vec![0.0; values.len()],
            zero_final: true,
        });
    }
    let mut out: Vec<f64> = values.iter().map(|v| v * 100.0 / last).collect();
    *out.last_mut().expect("non-empty") = 100.0;
    Ok(NormalizedSeries {
        values: out,
        zero_final: false,
    })
}

pub fn normalize_metric(series: &MetricsSeries, metric: Metric) -> Result<NormalizedSeries, MetricsError> {
    cumulative_percentage(&series.values(metric))
}
