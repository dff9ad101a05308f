//! Normalized commit history, release markers and file-content access.
//!
//! The commit log is a line-delimited JSON format, one commit per line:
//!
//! ```text
//! {"vcs_id":"r1","timestamp":"2001-06-22T10:00:00Z","author":"oburn","changes":[{"path":"src/Foo.java","kind":"A"}]}
//! ```
//!
//! Renames and copies are expected to arrive as a delete of the old path
//! plus an add of the new one; nothing here tries to detect them.

mod content;
mod releases;

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};

use chrono::{DateTime, SecondsFormat, TimeDelta, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use content::{ContentProvider, MemoryContent, SnapshotDir};
pub use releases::{load_releases, serialize_releases, ReleaseMarker};

/// 1-based position of a commit in the history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rev(pub u32);

impl Rev {
    /// Zero-based index into a per-commit vector.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(index: usize) -> Self {
        Rev(index as u32 + 1)
    }
}

impl fmt::Display for Rev {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChangeKind {
    #[serde(rename = "A")]
    Added,
    #[serde(rename = "M")]
    Modified,
    #[serde(rename = "D")]
    Deleted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathChange {
    pub path: String,
    pub kind: ChangeKind,
}

impl PathChange {
    pub fn new(path: impl Into<String>, kind: ChangeKind) -> Self {
        Self {
            path: path.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitRecord {
    pub rev: Rev,
    pub vcs_id: String,
    pub timestamp: DateTime<Utc>,
    pub author: String,
    pub changes: Vec<PathChange>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate vcs_id {vcs_id:?}")]
    DuplicateVcsId { line: usize, vcs_id: String },
    #[error("line {line}: timestamp {timestamp} precedes an earlier commit at {previous}")]
    TimestampRegression {
        line: usize,
        timestamp: DateTime<Utc>,
        previous: DateTime<Utc>,
    },
    #[error("line {line}: commit has no changes")]
    EmptyChanges { line: usize },
    #[error("line {line}: empty path")]
    EmptyPath { line: usize },
    #[error("line {line}: path {path:?} listed twice in one commit")]
    DuplicatePath { line: usize, path: String },
    #[error("line {line}: release reference {reference:?} matches no commit")]
    UnknownRelease { line: usize, reference: String },
    #[error("line {line}: release {label:?} is dated before the first commit")]
    ReleaseBeforeHistory { line: usize, label: String },
    #[error("line {line}: duplicate release label {label:?}")]
    DuplicateReleaseLabel { line: usize, label: String },
    #[error("line {line}: malformed release entry: {message}")]
    MalformedRelease { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl IngestError {
    pub fn line(&self) -> Option<usize> {
        match self {
            IngestError::Malformed { line, .. }
            | IngestError::DuplicateVcsId { line, .. }
            | IngestError::TimestampRegression { line, .. }
            | IngestError::EmptyChanges { line }
            | IngestError::EmptyPath { line }
            | IngestError::DuplicatePath { line, .. }
            | IngestError::UnknownRelease { line, .. }
            | IngestError::ReleaseBeforeHistory { line, .. }
            | IngestError::DuplicateReleaseLabel { line, .. }
            | IngestError::MalformedRelease { line, .. } => Some(*line),
            IngestError::Io(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// How far a timestamp may fall behind the latest one seen so far.
    pub skew_tolerance: TimeDelta,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            skew_tolerance: TimeDelta::zero(),
        }
    }
}

#[derive(Deserialize)]
struct RawCommit {
    vcs_id: String,
    timestamp: String,
    author: String,
    changes: Vec<PathChange>,
}

#[derive(Serialize)]
struct RawCommitRef<'a> {
    vcs_id: &'a str,
    timestamp: String,
    author: &'a str,
    changes: &'a [PathChange],
}

pub fn parse_timestamp(text: &str) -> Option<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(text.trim())
        .ok()
        .map(|t| t.with_timezone(&Utc))
}

pub fn format_timestamp(timestamp: &DateTime<Utc>) -> String {
    timestamp.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

/// Parses the canonical commit log. Blank lines are skipped; revs are
/// assigned 1..N in order of appearance.
pub fn parse_commit_log<R: BufRead>(reader: R, options: &ParseOptions) -> Result<Vec<CommitRecord>, IngestError> {
    let mut records = Vec::new();
    let mut seen_ids = HashSet::new();
    let mut latest: Option<DateTime<Utc>> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawCommit = serde_json::from_str(&line).map_err(|e| IngestError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let timestamp = parse_timestamp(&raw.timestamp).ok_or_else(|| IngestError::Malformed {
            line: line_no,
            message: format!("invalid timestamp {:?}", raw.timestamp),
        })?;
        if raw.changes.is_empty() {
            return Err(IngestError::EmptyChanges { line: line_no });
        }
        let mut paths = HashSet::with_capacity(raw.changes.len());
        for change in &raw.changes {
            if change.path.is_empty() {
                return Err(IngestError::EmptyPath { line: line_no });
            }
            if !paths.insert(change.path.as_str()) {
                return Err(IngestError::DuplicatePath {
                    line: line_no,
                    path: change.path.clone(),
                });
            }
        }
        if !seen_ids.insert(raw.vcs_id.clone()) {
            return Err(IngestError::DuplicateVcsId {
                line: line_no,
                vcs_id: raw.vcs_id,
            });
        }
        if let Some(previous) = latest {
            if timestamp < previous - options.skew_tolerance {
                return Err(IngestError::TimestampRegression {
                    line: line_no,
                    timestamp,
                    previous,
                });
            }
        }
        latest = Some(latest.map_or(timestamp, |t| t.max(timestamp)));

        records.push(CommitRecord {
            rev: Rev::from_index(records.len()),
            vcs_id: raw.vcs_id,
            timestamp,
            author: raw.author,
            changes: raw.changes,
        });
    }
    Ok(records)
}

pub fn serialize_commit_log<W: Write>(history: &[CommitRecord], mut out: W) -> std::io::Result<()> {
    for commit in history {
        let raw = RawCommitRef {
            vcs_id: &commit.vcs_id,
            timestamp: format_timestamp(&commit.timestamp),
            author: &commit.author,
            changes: &commit.changes,
        };
        serde_json::to_writer(&mut out, &raw)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
