//! Labelling windows of the metrics series with co-evolution scenarios.
//!
//! Each window gets one trend per metric (up, flat, down) from the change
//! across the window relative to the metric's final value. The five trends
//! are then matched against a rulebook, most specific rule first.

use std::fmt;

use thiserror::Error;

use crate::ingest::{ReleaseMarker, Rev};
use crate::metrics::{Metric, MetricsSeries};

pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_BLOCK_SIZE: usize = 50;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhaseError {
    #[error("rulebook line {line}: {message}")]
    Rule { line: usize, message: String },
    #[error("rulebook has no rules")]
    EmptyRulebook,
    #[error("window size must be positive")]
    ZeroWindow,
    #[error("epsilon must be a positive finite number")]
    BadEpsilon,
    #[error("metrics series is empty")]
    EmptySeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trend {
    Up,
    Flat,
    Down,
}

impl Trend {
    pub fn symbol(self) -> char {
        match self {
            Trend::Up => 'U',
            Trend::Flat => 'F',
            Trend::Down => 'D',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'U' => Some(Trend::Up),
            'F' => Some(Trend::Flat),
            'D' => Some(Trend::Down),
            _ => None,
        }
    }
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Relative change `(end - start) / max(final, 1)` compared against
/// `epsilon`.
pub fn trend_symbol(start: f64, end: f64, final_value: f64, epsilon: f64) -> Trend {
    let delta = (end - start) / final_value.max(1.0);
    if delta > epsilon {
        Trend::Up
    } else if delta < -epsilon {
        Trend::Down
    } else {
        Trend::Flat
    }
}

/// Trends over (pLOC, tLOC, pClasses, tClasses, tCommands).
pub type Trends = [Trend; 5];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseRule {
    /// `None` is a wildcard.
    pub pattern: [Option<Trend>; 5],
    pub label: String,
}

impl PhaseRule {
    pub fn new(pattern: &str, label: &str) -> Self {
        let cells: Vec<Option<Trend>> = pattern
            .split_whitespace()
            .map(|t| t.chars().next().and_then(Trend::from_symbol))
            .collect();
        Self {
            pattern: cells.try_into().expect("five cells"),
            label: label.to_string(),
        }
    }

    pub fn specificity(&self) -> usize {
        self.pattern.iter().filter(|c| c.is_some()).count()
    }

    pub fn matches(&self, trends: &Trends) -> bool {
        self.pattern
            .iter()
            .zip(trends)
            .all(|(cell, t)| cell.is_none_or(|c| c == *t))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rulebook {
    rules: Vec<PhaseRule>,
}

impl Default for Rulebook {
    /// The eight co-evolution scenarios. Only the first row is pinned down
    /// by prose; the cells of the others are a best reading of the table
    /// and can be overridden with a rulebook file.
    fn default() -> Self {
        Self::new(vec![
            PhaseRule::new("U F * * *", "pure development"),
            PhaseRule::new("F U * * *", "pure testing"),
            PhaseRule::new("U U * * *", "co-evolution"),
            PhaseRule::new("F U F F *", "test refinement"),
            PhaseRule::new("F F U U *", "skeleton co-evolution"),
            PhaseRule::new("F F * U F", "test case skeletons"),
            PhaseRule::new("F F * F U", "test command skeletons"),
            PhaseRule::new("F D * * U", "test refactoring"),
        ])
        .expect("default rulebook is valid")
    }
}

impl Rulebook {
    pub fn new(rules: Vec<PhaseRule>) -> Result<Self, PhaseError> {
        if rules.is_empty() {
            return Err(PhaseError::EmptyRulebook);
        }
        Ok(Self { rules })
    }

    /// One rule per line: five symbols from `U F D *`, then the label.
    pub fn parse(text: &str) -> Result<Self, PhaseError> {
        let mut rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let err = |message: String| PhaseError::Rule { line, message };
            let mut rest = body;
            let mut pattern = [None; 5];
            for cell in pattern.iter_mut() {
                let token_end = rest.find(char::is_whitespace).unwrap_or(rest.len());
                let token = &rest[..token_end];
                *cell = match token {
                    "*" => None,
                    t if t.len() == 1 => Some(
                        Trend::from_symbol(t.chars().next().unwrap())
                            .ok_or_else(|| err(format!("unknown trend symbol {t:?}")))?,
                    ),
                    "" => return Err(err("expected five trend symbols".into())),
                    t => return Err(err(format!("unknown trend symbol {t:?}"))),
                };
                rest = rest[token_end..].trim_start();
            }
            if rest.is_empty() {
                return Err(err("missing label".into()));
            }
            let rule = PhaseRule {
                pattern,
                label: rest.to_string(),
            };
            if rule.specificity() == 0 {
                return Err(err("rule must constrain at least one metric".into()));
            }
            rules.push(rule);
        }
        Self::new(rules)
    }

    pub fn rules(&self) -> &[PhaseRule] {
        &self.rules
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for rule in &self.rules {
            for cell in rule.pattern {
                out.push(cell.map_or('*', Trend::symbol));
                out.push(' ');
            }
            out.push_str(&rule.label);
            out.push('\n');
        }
        out
    }
}

/// Label of the most specific matching rule (rulebook order breaks ties),
/// or `None` when nothing matches.
pub fn classify_phase<'r>(trends: &Trends, rulebook: &'r Rulebook) -> Option<&'r str> {
    let mut order: Vec<&PhaseRule> = rulebook.rules.iter().collect();
    order.sort_by_key(|r| std::cmp::Reverse(r.specificity()));
    order.into_iter().find(|r| r.matches(trends)).map(|r| r.label.as_str())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowMode {
    /// Windows run from release to release.
    #[default]
    Releases,
    /// Fixed-size blocks of this many commits.
    Blocks(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSegment {
    pub start: Rev,
    pub end: Rev,
    pub trends: Trends,
    /// `None` is unclassified.
    pub label: Option<String>,
}

impl PhaseSegment {
    pub fn label_or_unclassified(&self) -> &str {
        self.label.as_deref().unwrap_or("unclassified")
    }
}

fn boundaries(first: Rev, last: Rev, releases: &[ReleaseMarker], mode: WindowMode) -> Vec<Rev> {
    let mut points = vec![first];
    match mode {
        WindowMode::Releases => {
            let mut inner: Vec<Rev> = releases
                .iter()
                .map(|m| m.rev)
                .filter(|&r| r > first && r < last)
                .collect();
            inner.sort();
            inner.dedup();
            points.extend(inner);
        }
        WindowMode::Blocks(size) => {
            let mut at = first.0 as usize + size;
            while at < last.0 as usize {
                points.push(Rev(at as u32));
                at += size;
            }
        }
    }
    points.push(last);
    points
}

/// Splits the analyzed range into windows that share endpoints and labels
/// each one.
pub fn segment_phases(
    series: &MetricsSeries,
    releases: &[ReleaseMarker],
    mode: WindowMode,
    epsilon: f64,
    rulebook: &Rulebook,
) -> Result<Vec<PhaseSegment>, PhaseError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(PhaseError::BadEpsilon);
    }
    if mode == WindowMode::Blocks(0) {
        return Err(PhaseError::ZeroWindow);
    }
    let (Some(first), Some(last)) = (series.snapshots.first(), series.snapshots.last()) else {
        return Err(PhaseError::EmptySeries);
    };
    if series.len() < 2 {
        return Ok(vec![PhaseSegment {
            start: first.rev,
            end: last.rev,
            trends: [Trend::Flat; 5],
            label: None,
        }]);
    }
    let offset = first.rev.0;
    let value = |rev: Rev, metric: Metric| series.snapshots[(rev.0 - offset) as usize].get(metric) as f64;

    let points = boundaries(first.rev, last.rev, releases, mode);
    Ok(points
        .windows(2)
        .map(|w| {
            let (start, end) = (w[0], w[1]);
            let trends = Metric::ALL.map(|m| trend_symbol(value(start, m), value(end, m), last.get(m) as f64, epsilon));
            PhaseSegment {
                start,
                end,
                trends,
                label: classify_phase(&trends, rulebook).map(str::to_string),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricsSnapshot;
    use chrono::DateTime;
    use Trend::{Down as D, Flat as F, Up as U};

    #[test]
    fn trend_thresholds() {
        assert_eq!(trend_symbol(10.0, 10.0, 100.0, 0.01), F);
        assert_eq!(trend_symbol(10.0, 20.0, 100.0, 0.01), U);
        // |delta| = 0.005 <= 0.01
        assert_eq!(trend_symbol(50.0, 49.5, 100.0, 0.01), F);
        assert_eq!(trend_symbol(50.0, 48.0, 100.0, 0.01), D);
        // final value below one is clamped
        assert_eq!(trend_symbol(0.0, 0.5, 0.0, 0.01), U);
    }

    #[test]
    fn default_rulebook_labels() {
        let book = Rulebook::default();
        assert_eq!(classify_phase(&[U, F, F, F, F], &book), Some("pure development"));
        assert_eq!(classify_phase(&[U, F, U, D, U], &book), Some("pure development"));
        assert_eq!(classify_phase(&[F, U, U, U, U], &book), Some("pure testing"));
        assert_eq!(classify_phase(&[U, U, D, D, D], &book), Some("co-evolution"));
        assert_eq!(classify_phase(&[F, D, F, F, U], &book), Some("test refactoring"));
        // more specific row beats "pure testing"
        assert_eq!(classify_phase(&[F, U, F, F, U], &book), Some("test refinement"));
        assert_eq!(classify_phase(&[F, F, U, U, F], &book), Some("skeleton co-evolution"));
        assert_eq!(classify_phase(&[F, F, F, U, F], &book), Some("test case skeletons"));
        assert_eq!(classify_phase(&[F, F, F, F, U], &book), Some("test command skeletons"));
        assert_eq!(classify_phase(&[F; 5], &book), None);
        assert_eq!(classify_phase(&[D, D, D, D, D], &book), None);
    }

    #[test]
    fn equal_specificity_uses_rulebook_order() {
        let book = Rulebook::parse("U * * * * first\n* * * * U second\n").unwrap();
        assert_eq!(classify_phase(&[U, F, F, F, U], &book), Some("first"));
    }

    #[test]
    fn rulebook_parse_round_trip() {
        let book = Rulebook::default();
        assert_eq!(Rulebook::parse(&book.to_text()).unwrap(), book);
    }

    #[test]
    fn rulebook_errors() {
        assert_eq!(Rulebook::parse("# nothing\n"), Err(PhaseError::EmptyRulebook));
        assert!(matches!(
            Rulebook::parse("U F X * * bad\n"),
            Err(PhaseError::Rule { line: 1, .. })
        ));
        assert!(matches!(
            Rulebook::parse("\nU F * *\n"),
            Err(PhaseError::Rule { line: 2, .. })
        ));
        assert!(matches!(
            Rulebook::parse("U F * * *\n"),
            Err(PhaseError::Rule { line: 1, .. })
        ));
        assert!(matches!(
            Rulebook::parse("* * * * * any\n"),
            Err(PhaseError::Rule { line: 1, .. })
        ));
    }

    fn series(rows: &[[u64; 5]]) -> MetricsSeries {
        let t = DateTime::from_timestamp(0, 0).unwrap();
        MetricsSeries {
            snapshots: rows
                .iter()
                .enumerate()
                .map(|(i, r)| MetricsSnapshot {
                    rev: Rev::from_index(i),
                    timestamp: t,
                    p_loc: r[0],
                    t_loc: r[1],
                    p_classes: r[2],
                    t_classes: r[3],
                    t_commands: r[4],
                })
                .collect(),
        }
    }

    fn marker(label: &str, rev: u32) -> ReleaseMarker {
        ReleaseMarker {
            label: label.into(),
            rev: Rev(rev),
        }
    }

    #[test]
    fn flat_series_is_unclassified() {
        let s = series(&[[10, 5, 1, 1, 2]; 6]);
        let segs = segment_phases(&s, &[marker("1", 3)], WindowMode::Releases, 0.01, &Rulebook::default()).unwrap();
        assert_eq!(segs.len(), 2);
        assert!(segs.iter().all(|s| s.label.is_none() && s.trends == [F; 5]));
    }

    #[test]
    fn release_windows_tile_the_range() {
        let s = series(&[[1, 1, 1, 1, 1]; 10]);
        let releases = [
            marker("a", 4),
            marker("b", 4),
            marker("c", 1),
            marker("d", 10),
            marker("e", 7),
        ];
        let segs = segment_phases(&s, &releases, WindowMode::Releases, 0.01, &Rulebook::default()).unwrap();
        let windows: Vec<_> = segs.iter().map(|s| (s.start.0, s.end.0)).collect();
        assert_eq!(windows, [(1, 4), (4, 7), (7, 10)]);
    }

    #[test]
    fn block_windows() {
        let s = series(&[[1, 1, 1, 1, 1]; 12]);
        let segs = segment_phases(&s, &[], WindowMode::Blocks(5), 0.01, &Rulebook::default()).unwrap();
        let windows: Vec<_> = segs.iter().map(|s| (s.start.0, s.end.0)).collect();
        assert_eq!(windows, [(1, 6), (6, 11), (11, 12)]);
    }

    #[test]
    fn single_commit_is_one_unclassified_segment() {
        let s = series(&[[10, 0, 1, 0, 0]]);
        let segs = segment_phases(&s, &[], WindowMode::Releases, 0.01, &Rulebook::default()).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].label, None);
        assert_eq!((segs[0].start, segs[0].end), (Rev(1), Rev(1)));
    }

    #[test]
    fn synthetic_windows_get_labels() {
        // window 1: pLOC 700 -> 1000 (+30% of final), tLOC flat
        // window 2: tLOC 400 -> 500 (+20% of final), pLOC flat
        let s = series(&[[700, 400, 7, 4, 10], [1000, 400, 10, 4, 10], [1000, 500, 10, 5, 12]]);
        let segs = segment_phases(&s, &[marker("r", 2)], WindowMode::Releases, 0.01, &Rulebook::default()).unwrap();
        assert_eq!(segs[0].label.as_deref(), Some("pure development"));
        assert_eq!(segs[1].label.as_deref(), Some("pure testing"));
    }

    #[test]
    fn argument_validation() {
        let s = series(&[[1, 1, 1, 1, 1]; 3]);
        let book = Rulebook::default();
        assert_eq!(
            segment_phases(&s, &[], WindowMode::Releases, 0.0, &book),
            Err(PhaseError::BadEpsilon)
        );
        assert_eq!(
            segment_phases(&s, &[], WindowMode::Blocks(0), 0.01, &book),
            Err(PhaseError::ZeroWindow)
        );
        assert_eq!(
            segment_phases(&MetricsSeries::default(), &[], WindowMode::Releases, 0.01, &book),
            Err(PhaseError::EmptySeries)
        );
    }
}
