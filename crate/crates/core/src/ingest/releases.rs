use std::collections::HashSet;
use std::io::{BufRead, Write};

use super::{parse_timestamp, CommitRecord, IngestError, Rev};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseMarker {
    pub label: String,
    pub rev: Rev,
}

/// Reads `label<TAB>reference` lines, where the reference is a `vcs_id`
/// from the history or an RFC 3339 timestamp. A timestamp snaps to the last
/// commit at or before it. Blank lines and `#` comment lines are ignored.
///
/// The result is sorted by rev; labels sharing a commit keep input order.
pub fn load_releases<R: BufRead>(reader: R, history: &[CommitRecord]) -> Result<Vec<ReleaseMarker>, IngestError> {
    let mut markers = Vec::new();
    let mut labels = HashSet::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        let (label, reference) = trimmed.split_once('\t').ok_or_else(|| IngestError::MalformedRelease {
            line: line_no,
            message: "expected label<TAB>reference".into(),
        })?;
        let label = label.trim();
        let reference = reference.trim();
        if label.is_empty() || reference.is_empty() {
            return Err(IngestError::MalformedRelease {
                line: line_no,
                message: "empty label or reference".into(),
            });
        }
        if !labels.insert(label.to_string()) {
            return Err(IngestError::DuplicateReleaseLabel {
                line: line_no,
                label: label.to_string(),
            });
        }

        let rev = if let Some(commit) = history.iter().find(|c| c.vcs_id == reference) {
            commit.rev
        } else if let Some(at) = parse_timestamp(reference) {
            history
                .iter()
                .filter(|c| c.timestamp <= at)
                .map(|c| c.rev)
                .max()
                .ok_or_else(|| IngestError::ReleaseBeforeHistory {
                    line: line_no,
                    label: label.to_string(),
                })?
        } else {
            return Err(IngestError::UnknownRelease {
                line: line_no,
                reference: reference.to_string(),
            });
        };
        markers.push(ReleaseMarker {
            label: label.to_string(),
            rev,
        });
    }

    markers.sort_by_key(|m| m.rev);
    Ok(markers)
}

/// Writes markers in the releases-file format, referencing each by the
/// `vcs_id` of its commit.
pub fn serialize_releases<W: Write>(
    markers: &[ReleaseMarker],
    history: &[CommitRecord],
    mut out: W,
) -> std::io::Result<()> {
    for marker in markers {
        let commit = &history[marker.rev.index()];
        writeln!(out, "{}\t{}", marker.label, commit.vcs_id)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{ChangeKind, PathChange};
    use chrono::{DateTime, TimeDelta, Utc};

    fn history(n: usize) -> Vec<CommitRecord> {
        let start = DateTime::parse_from_rfc3339("2002-06-01T00:00:00Z")
            .unwrap()
            .with_timezone(&Utc);
        (0..n)
            .map(|i| CommitRecord {
                rev: Rev::from_index(i),
                vcs_id: format!("r{}", i + 1),
                timestamp: start + TimeDelta::hours(i as i64),
                author: "dev".into(),
                changes: vec![PathChange::new(format!("F{i}.java"), ChangeKind::Added)],
            })
            .collect()
    }

    /// Linear scan oracle: last commit whose timestamp is at or before `at`.
    fn last_commit_at_or_before(history: &[CommitRecord], at: DateTime<Utc>) -> Option<Rev> {
        let mut found = None;
        for commit in history {
            if commit.timestamp <= at {
                found = Some(commit.rev);
            }
        }
        found
    }

    #[test]
    fn empty_file() {
        let h = history(3);
        assert!(load_releases("".as_bytes(), &h).unwrap().is_empty());
    }

    #[test]
    fn lookup_by_vcs_id() {
        let h = history(300);
        let markers = load_releases("2.2\tr280\n".as_bytes(), &h).unwrap();
        assert_eq!(
            markers,
            vec![ReleaseMarker {
                label: "2.2".into(),
                rev: Rev(280)
            }]
        );
    }

    #[test]
    fn timestamp_snaps_to_previous_commit() {
        let h = history(20);
        // halfway between commit 10 (09:00) and commit 11 (10:00)
        let at = "2002-06-01T09:30:00Z";
        let expected = last_commit_at_or_before(&h, parse_timestamp(at).unwrap()).unwrap();
        assert_eq!(expected, Rev(10));
        let markers = load_releases(format!("1.0\t{at}\n").as_bytes(), &h).unwrap();
        assert_eq!(markers[0].rev, expected);
    }

    #[test]
    fn timestamp_equal_to_commit_picks_that_commit() {
        let h = history(5);
        let markers = load_releases("x\t2002-06-01T02:00:00Z\n".as_bytes(), &h).unwrap();
        assert_eq!(markers[0].rev, Rev(3));
    }

    #[test]
    fn errors() {
        let h = history(5);
        assert!(matches!(
            load_releases("1.0\tnope\n".as_bytes(), &h),
            Err(IngestError::UnknownRelease { line: 1, .. })
        ));
        assert!(matches!(
            load_releases("1.0\t2001-01-01T00:00:00Z\n".as_bytes(), &h),
            Err(IngestError::ReleaseBeforeHistory { line: 1, .. })
        ));
        assert!(matches!(
            load_releases("1.0\tr1\n1.0\tr2\n".as_bytes(), &h),
            Err(IngestError::DuplicateReleaseLabel { line: 2, .. })
        ));
        assert!(matches!(
            load_releases("1.0 r1\n".as_bytes(), &h),
            Err(IngestError::MalformedRelease { line: 1, .. })
        ));
    }

    #[test]
    fn sorted_and_stable_on_shared_commit() {
        let h = history(10);
        let text = "# releases\n3.0\tr9\n2.0\tr4\n2.0-final\tr4\n";
        let markers = load_releases(text.as_bytes(), &h).unwrap();
        let labels: Vec<_> = markers.iter().map(|m| m.label.as_str()).collect();
        assert_eq!(labels, ["2.0", "2.0-final", "3.0"]);
    }

    #[test]
    fn serialize_round_trip() {
        let h = history(10);
        let markers = load_releases("a\tr2\nb\tr7\n".as_bytes(), &h).unwrap();
        let mut buf = Vec::new();
        serialize_releases(&markers, &h, &mut buf).unwrap();
        assert_eq!(load_releases(buf.as_slice(), &h).unwrap(), markers);
    }
}
