//! Adapter between a local git repository and the normalized inputs.
//!
//! `export` walks the first-parent history with `git log --name-status`,
//! turning renames into a delete plus an add and copies into an add.
//! [`GitContent`] serves file text with `git show <commit>:<path>`.

use std::path::{Path, PathBuf};
use std::process::Command;

use chrono::{DateTime, Utc};
use testevo_core::ingest::{parse_timestamp, ChangeKind, CommitRecord, PathChange};
use testevo_core::{ContentProvider, Rev};

use crate::error::CliError;

fn git(repo: &Path, args: &[&str]) -> Result<Vec<u8>, CliError> {
    let output = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(args)
        .output()
        .map_err(|e| CliError::Internal(format!("cannot run git: {e}")))?;
    if !output.status.success() {
        return Err(CliError::invalid(
            "git repository",
            repo,
            String::from_utf8_lossy(&output.stderr).trim(),
        ));
    }
    Ok(output.stdout)
}

fn parse_status_line(line: &str) -> Option<Vec<PathChange>> {
    let mut fields = line.split('\t');
    let status = fields.next()?;
    let first = fields.next()?.to_string();
    let second = fields.next().map(str::to_string);
    Some(match status.chars().next()? {
        'A' => vec![PathChange::new(first, ChangeKind::Added)],
        'M' | 'T' => vec![PathChange::new(first, ChangeKind::Modified)],
        'D' => vec![PathChange::new(first, ChangeKind::Deleted)],
        'R' => vec![
            PathChange::new(first, ChangeKind::Deleted),
            PathChange::new(second?, ChangeKind::Added),
        ],
        'C' => vec![PathChange::new(second?, ChangeKind::Added)],
        _ => return None,
    })
}

/// Parses `git log --format=%x00%H%x09%cI%x09%an --name-status` output.
/// Commits without file changes (empty merges) are dropped.
pub fn parse_git_log(text: &str) -> Vec<CommitRecord> {
    let mut records = Vec::new();
    for block in text.split('\0').skip(1) {
        let mut lines = block.lines();
        let Some(header) = lines.next() else { continue };
        let mut head = header.splitn(3, '\t');
        let (Some(id), Some(ts), Some(author)) = (head.next(), head.next(), head.next()) else {
            continue;
        };
        let Some(timestamp) = parse_timestamp(ts) else { continue };
        let mut changes: Vec<PathChange> = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            for change in parse_status_line(line).unwrap_or_default() {
                // a path touched twice in one commit keeps its last action
                changes.retain(|c| c.path != change.path);
                changes.push(change);
            }
        }
        if changes.is_empty() {
            continue;
        }
        records.push(CommitRecord {
            rev: Rev::from_index(records.len()),
            vcs_id: id.to_string(),
            timestamp,
            author: author.to_string(),
            changes,
        });
    }
    records
}

pub fn export_history(repo: &Path) -> Result<Vec<CommitRecord>, CliError> {
    let out = git(
        repo,
        &[
            "log",
            "--reverse",
            "--first-parent",
            "--diff-merges=first-parent",
            "-M",
            "--name-status",
            "--format=%x00%H%x09%cI%x09%an",
        ],
    )?;
    Ok(parse_git_log(&String::from_utf8_lossy(&out)))
}

/// Tags as `(label, commit time)`, in commit-time order. Times rather than
/// ids let tags on side branches snap onto the first-parent line.
pub fn export_tags(repo: &Path) -> Result<Vec<(String, DateTime<Utc>)>, CliError> {
    let out = git(
        repo,
        &[
            "for-each-ref",
            "--sort=creatordate",
            "--format=%(refname:short)%09%(*committerdate:iso-strict)%09%(committerdate:iso-strict)",
            "refs/tags",
        ],
    )?;
    let mut tags: Vec<(String, DateTime<Utc>)> = String::from_utf8_lossy(&out)
        .lines()
        .filter_map(|line| {
            let mut f = line.split('\t');
            let name = f.next()?.to_string();
            let peeled = f.next().unwrap_or("");
            let direct = f.next().unwrap_or("");
            let ts = if peeled.is_empty() { direct } else { peeled };
            Some((name, parse_timestamp(ts)?))
        })
        .collect();
    tags.sort_by_key(|(_, t)| *t);
    Ok(tags)
}

/// File contents read straight from a git repository.
pub struct GitContent {
    repo: PathBuf,
    ids: Vec<String>,
}

impl GitContent {
    pub fn new(repo: impl Into<PathBuf>, history: &[CommitRecord]) -> Self {
        Self {
            repo: repo.into(),
            ids: history.iter().map(|c| c.vcs_id.clone()).collect(),
        }
    }
}

impl ContentProvider for GitContent {
    fn fetch(&self, path: &str, rev: Rev) -> Option<String> {
        let id = self.ids.get(rev.index())?;
        let spec = format!("{id}:{path}");
        let out = Command::new("git")
            .arg("-C")
            .arg(&self.repo)
            .args(["show", &spec])
            .output()
            .ok()?;
        out.status
            .success()
            .then(|| String::from_utf8_lossy(&out.stdout).into_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renames_and_copies() {
        let log = "\0aaa\t2020-01-01T00:00:00+01:00\tAnn\n\nA\tsrc/A.java\nA\tREADME\n\
                   \0bbb\t2020-01-02T00:00:00Z\tBob\n\nR087\tsrc/A.java\tsrc/b/A.java\nC100\tsrc/b/A.java\tsrc/c/A.java\nM\tREADME\n\
                   \0ccc\t2020-01-03T00:00:00Z\tBob\n";
        let records = parse_git_log(log);
        assert_eq!(records.len(), 2, "empty merge dropped");
        assert_eq!(records[0].timestamp.to_rfc3339(), "2019-12-31T23:00:00+00:00");
        let kinds: Vec<_> = records[1].changes.iter().map(|c| (c.path.as_str(), c.kind)).collect();
        assert_eq!(
            kinds,
            [
                ("src/A.java", ChangeKind::Deleted),
                ("src/b/A.java", ChangeKind::Added),
                ("src/c/A.java", ChangeKind::Added),
                ("README", ChangeKind::Modified),
            ]
        );
        assert_eq!(records[1].rev, Rev(2));
    }
}
