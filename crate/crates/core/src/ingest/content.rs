use std::collections::HashMap;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use super::{ChangeKind, CommitRecord, Rev};

/// Source of file text as of a given revision.
///
/// Implementations must be deterministic: the same `(path, rev)` always
/// yields the same answer. Fetches may happen from several threads.
pub trait ContentProvider: Send + Sync {
    /// Text of `path` as it exists after commit `rev`, or `None` if the
    /// path does not exist there or cannot be read.
    fn fetch(&self, path: &str, rev: Rev) -> Option<String>;
}

impl<P: ContentProvider + ?Sized> ContentProvider for &P {
    fn fetch(&self, path: &str, rev: Rev) -> Option<String> {
        (**self).fetch(path, rev)
    }
}

impl<P: ContentProvider + ?Sized> ContentProvider for Box<P> {
    fn fetch(&self, path: &str, rev: Rev) -> Option<String> {
        (**self).fetch(path, rev)
    }
}

/// Versions per path, with `None` marking a deletion.
type Versions<T> = Vec<(Rev, Option<T>)>;

fn latest_at<T>(versions: &Versions<T>, rev: Rev) -> Option<&T> {
    let upto = versions.partition_point(|(r, _)| *r <= rev);
    versions[..upto].last().and_then(|(_, v)| v.as_ref())
}

/// In-memory store of file versions.
#[derive(Debug, Default, Clone)]
pub struct MemoryContent {
    files: HashMap<String, Versions<Arc<str>>>,
}

impl MemoryContent {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records the text of `path` from `rev` onwards. Versions of one path
    /// must be inserted in rev order.
    pub fn insert(&mut self, path: impl Into<String>, rev: Rev, text: impl Into<Arc<str>>) {
        self.push(path.into(), rev, Some(text.into()));
    }

    pub fn delete(&mut self, path: impl Into<String>, rev: Rev) {
        self.push(path.into(), rev, None);
    }

    fn push(&mut self, path: String, rev: Rev, value: Option<Arc<str>>) {
        let versions = self.files.entry(path).or_default();
        debug_assert!(versions.last().is_none_or(|(r, _)| *r <= rev));
        if let Some(last) = versions.last_mut().filter(|(r, _)| *r == rev) {
            last.1 = value;
        } else {
            versions.push((rev, value));
        }
    }
}

impl ContentProvider for MemoryContent {
    fn fetch(&self, path: &str, rev: Rev) -> Option<String> {
        self.files
            .get(path)
            .and_then(|v| latest_at(v, rev))
            .map(|s| s.to_string())
    }
}

/// Snapshot directory laid out as `<root>/<vcs_id>/<path>`: one copy of each
/// file for every commit that added or modified it.
#[derive(Debug, Clone)]
pub struct SnapshotDir {
    root: PathBuf,
    versions: HashMap<String, Versions<Arc<str>>>,
}

impl SnapshotDir {
    pub fn new(root: impl Into<PathBuf>, history: &[CommitRecord]) -> Self {
        let mut versions: HashMap<String, Versions<Arc<str>>> = HashMap::new();
        for commit in history {
            let id: Arc<str> = Arc::from(commit.vcs_id.as_str());
            for change in &commit.changes {
                let entry = match change.kind {
                    ChangeKind::Added | ChangeKind::Modified => Some(id.clone()),
                    ChangeKind::Deleted => None,
                };
                versions
                    .entry(change.path.clone())
                    .or_default()
                    .push((commit.rev, entry));
            }
        }
        Self {
            root: root.into(),
            versions,
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}

fn is_safe_relative(path: &Path) -> bool {
    path.components().all(|c| matches!(c, Component::Normal(_)))
}

impl ContentProvider for SnapshotDir {
    fn fetch(&self, path: &str, rev: Rev) -> Option<String> {
        let vcs_id = latest_at(self.versions.get(path)?, rev)?;
        let rel = Path::new(path);
        if !is_safe_relative(rel) || !is_safe_relative(Path::new(&**vcs_id)) {
            return None;
        }
        std::fs::read_to_string(self.root.join(&**vcs_id).join(rel)).ok()
    }
}
