//! Replay of the commit stream into an entity timeline.
//!
//! Every distinct lifetime of a source path becomes one [`CodeEntity`].
//! Deleted entities stay in the registry, and re-adding a deleted path
//! creates a fresh entity introduced at the re-add, so moves show up as
//! new rows rather than continuing the old ones.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classify::{
    analyze_file, expected_unit_basename, match_test_to_unit, FileFacts, FileKind, LanguageProfile, TestTarget,
};
use crate::ingest::{ChangeKind, CommitRecord, ContentProvider, Rev};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HistoryError {
    #[error("content of {path} at rev {rev} is unavailable")]
    ContentUnavailable { path: String, rev: Rev },
}

/// One path change with the facts of the new file revision. `facts` is
/// `None` for deletions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedChange {
    pub path: String,
    pub kind: ChangeKind,
    pub facts: Option<FileFacts>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedCommit {
    pub rev: Rev,
    /// Sorted by path.
    pub changes: Vec<ClassifiedChange>,
}

/// Fetches and analyzes every added or modified source file. Non-source
/// files are not fetched and get [`FileKind::Other`]. Files are processed
/// in parallel; results come back in history order, changes sorted by path.
pub fn classify_history<P: ContentProvider + ?Sized>(
    history: &[CommitRecord],
    provider: &P,
    profile: &LanguageProfile,
) -> Result<Vec<ClassifiedCommit>, HistoryError> {
    let results: Vec<Result<ClassifiedCommit, HistoryError>> = history
        .par_iter()
        .map(|commit| {
            let mut changes = commit
                .changes
                .iter()
                .map(|change| {
                    let facts = match change.kind {
                        ChangeKind::Deleted => None,
                        _ if !profile.is_source_path(&change.path) => Some(FileFacts::default()),
                        _ => {
                            let text = provider.fetch(&change.path, commit.rev).ok_or_else(|| {
                                HistoryError::ContentUnavailable {
                                    path: change.path.clone(),
                                    rev: commit.rev,
                                }
                            })?;
                            Some(analyze_file(&change.path, &text, profile))
                        }
                    };
                    Ok(ClassifiedChange {
                        path: change.path.clone(),
                        kind: change.kind,
                        facts,
                    })
                })
                .collect::<Result<Vec<_>, HistoryError>>()?;
            changes.sort_by(|a, b| a.path.cmp(&b.path));
            Ok(ClassifiedCommit {
                rev: commit.rev,
                changes,
            })
        })
        .collect();
    results.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EntityId(pub u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EntityRole {
    ProductionUnit,
    UnitTest,
    IntegrationTest,
}

impl EntityRole {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityRole::ProductionUnit => "production",
            EntityRole::UnitTest => "unit_test",
            EntityRole::IntegrationTest => "integration_test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeEntity {
    pub id: EntityId,
    pub path: String,
    pub role: EntityRole,
    pub paired_with: Option<EntityId>,
    pub introduced_rev: Rev,
    pub deleted_rev: Option<Rev>,
    /// A unit test whose production partner was deleted while it lived on.
    pub orphaned: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EventKind {
    AddedProduction,
    ModifiedProduction,
    AddedTest,
    ModifiedTest,
    Deleted,
}

impl EventKind {
    pub fn is_test(self) -> bool {
        matches!(self, EventKind::AddedTest | EventKind::ModifiedTest)
    }

    fn for_change(added: bool, kind: FileKind) -> Self {
        match (added, kind == FileKind::TestCode) {
            (true, false) => EventKind::AddedProduction,
            (true, true) => EventKind::AddedTest,
            (false, false) => EventKind::ModifiedProduction,
            (false, true) => EventKind::ModifiedTest,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventColor {
    Red,
    Blue,
    Green,
    Yellow,
}

/// Colour class of an event mark; deletions are not drawn.
pub fn event_color(kind: EventKind) -> Option<EventColor> {
    match kind {
        EventKind::AddedProduction => Some(EventColor::Red),
        EventKind::ModifiedProduction => Some(EventColor::Blue),
        EventKind::AddedTest => Some(EventColor::Green),
        EventKind::ModifiedTest => Some(EventColor::Yellow),
        EventKind::Deleted => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FileEvent {
    pub rev: Rev,
    pub entity: EntityId,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub rev: Rev,
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rev {}: {}: {}", self.rev, self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Timeline {
    /// Indexed by [`EntityId`].
    pub entities: Vec<CodeEntity>,
    pub events: Vec<FileEvent>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Timeline {
    pub fn entity(&self, id: EntityId) -> &CodeEntity {
        &self.entities[id.index()]
    }

    pub fn by_path<'a>(&'a self, path: &'a str) -> impl Iterator<Item = &'a CodeEntity> + 'a {
        self.entities.iter().filter(move |e| e.path == path)
    }
}

pub fn build_timeline<P: ContentProvider + ?Sized>(
    history: &[CommitRecord],
    provider: &P,
    profile: &LanguageProfile,
) -> Result<Timeline, HistoryError> {
    let classified = classify_history(history, provider, profile)?;
    Ok(timeline_from_classified(&classified, profile))
}

struct EntityState {
    path: String,
    kind: FileKind,
    paired_with: Option<EntityId>,
    introduced_rev: Rev,
    deleted_rev: Option<Rev>,
    orphaned: bool,
    /// Basename this entity indexes under: its own for production code,
    /// the expected unit's for test code.
    key: Option<String>,
}

impl EntityState {
    fn alive(&self) -> bool {
        self.deleted_rev.is_none()
    }
}

fn basename(path: &str) -> &str {
    path.rsplit('/').next().unwrap_or(path)
}

#[derive(Default)]
struct Replay<'p> {
    entities: Vec<EntityState>,
    events: Vec<FileEvent>,
    diagnostics: Vec<Diagnostic>,
    live: HashMap<String, EntityId>,
    /// Live production entities by basename.
    production: HashMap<String, BTreeSet<EntityId>>,
    /// Live tests without a live partner, by the basename they look for.
    seeking: HashMap<String, BTreeSet<EntityId>>,
    profile: Option<&'p LanguageProfile>,
}

impl<'p> Replay<'p> {
    fn profile(&self) -> &'p LanguageProfile {
        self.profile.expect("profile set")
    }

    fn state(&mut self, id: EntityId) -> &mut EntityState {
        &mut self.entities[id.index()]
    }

    fn diag(&mut self, rev: Rev, path: &str, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            rev,
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn index_as(
        &mut self,
        id: EntityId,
        kind: FileKind,
        dirty_tests: &mut BTreeSet<EntityId>,
        dirty_units: &mut BTreeSet<String>,
    ) {
        let path = self.entities[id.index()].path.clone();
        match kind {
            FileKind::TestCode => {
                let key = expected_unit_basename(&path, self.profile());
                if let Some(k) = &key {
                    self.seeking.entry(k.clone()).or_default().insert(id);
                    dirty_tests.insert(id);
                }
                self.state(id).key = key;
            }
            _ => {
                let key = basename(&path).to_string();
                self.production.entry(key.clone()).or_default().insert(id);
                dirty_units.insert(key.clone());
                self.state(id).key = Some(key);
            }
        }
        self.state(id).kind = kind;
    }

    fn unindex(&mut self, id: EntityId) {
        let (kind, key) = {
            let s = &self.entities[id.index()];
            (s.kind, s.key.clone())
        };
        if let Some(key) = key {
            let map = if kind == FileKind::TestCode {
                &mut self.seeking
            } else {
                &mut self.production
            };
            if let Some(set) = map.get_mut(&key) {
                set.remove(&id);
                if set.is_empty() {
                    map.remove(&key);
                }
            }
        }
    }

    fn unpair(&mut self, id: EntityId) -> Option<EntityId> {
        let partner = self.state(id).paired_with.take()?;
        self.state(partner).paired_with = None;
        Some(partner)
    }

    fn start_seeking(&mut self, test: EntityId, dirty_tests: &mut BTreeSet<EntityId>) {
        if let Some(key) = self.entities[test.index()].key.clone() {
            self.seeking.entry(key).or_default().insert(test);
            dirty_tests.insert(test);
        }
    }

    fn apply(
        &mut self,
        rev: Rev,
        change: &ClassifiedChange,
        dirty_tests: &mut BTreeSet<EntityId>,
        dirty_units: &mut BTreeSet<String>,
    ) {
        let existing = self.live.get(&change.path).copied();
        let Some(facts) = change.facts else {
            // deletion
            let Some(id) = existing else {
                if self.profile().is_source_path(&change.path) {
                    self.diag(rev, &change.path, "deleted but never added; ignored");
                }
                return;
            };
            self.events.push(FileEvent {
                rev,
                entity: id,
                kind: EventKind::Deleted,
            });
            self.unindex(id);
            self.live.remove(&change.path);
            self.state(id).deleted_rev = Some(rev);
            let kind = self.entities[id.index()].kind;
            match (kind, self.entities[id.index()].paired_with) {
                (FileKind::TestCode, Some(unit)) => {
                    // the unit is claimable again
                    if let Some(k) = self.entities[unit.index()].key.clone() {
                        dirty_units.insert(k);
                    }
                }
                (FileKind::ProductionCode, Some(test)) if self.entities[test.index()].alive() => {
                    self.state(test).orphaned = true;
                    self.start_seeking(test, dirty_tests);
                }
                _ => {}
            }
            return;
        };
        if !facts.kind.is_source() {
            return;
        }

        let id = match existing {
            Some(id) => id,
            None => {
                if change.kind == ChangeKind::Modified {
                    self.diag(rev, &change.path, "modified before being added; treated as added");
                }
                let id = EntityId(self.entities.len() as u32);
                self.entities.push(EntityState {
                    path: change.path.clone(),
                    kind: facts.kind,
                    paired_with: None,
                    introduced_rev: rev,
                    deleted_rev: None,
                    orphaned: false,
                    key: None,
                });
                self.live.insert(change.path.clone(), id);
                self.events.push(FileEvent {
                    rev,
                    entity: id,
                    kind: EventKind::for_change(true, facts.kind),
                });
                self.index_as(id, facts.kind, dirty_tests, dirty_units);
                return;
            }
        };

        if change.kind == ChangeKind::Added {
            self.diag(rev, &change.path, "added while already present; treated as modified");
        }
        self.events.push(FileEvent {
            rev,
            entity: id,
            kind: EventKind::for_change(false, facts.kind),
        });
        let old_kind = self.entities[id.index()].kind;
        if old_kind != facts.kind {
            self.unindex(id);
            if let Some(partner) = self.unpair(id) {
                self.state(id).orphaned = false;
                self.state(partner).orphaned = false;
                if self.entities[partner.index()].alive() {
                    if facts.kind == FileKind::TestCode {
                        // former test partner needs a new unit
                        self.start_seeking(partner, dirty_tests);
                    } else if let Some(k) = self.entities[partner.index()].key.clone() {
                        dirty_units.insert(k);
                    }
                }
            }
            self.index_as(id, facts.kind, dirty_tests, dirty_units);
        }
    }

    fn claimable(&self, unit: EntityId) -> bool {
        match self.entities[unit.index()].paired_with {
            None => true,
            Some(test) => !self.entities[test.index()].alive(),
        }
    }

    fn try_pair(&mut self, rev: Rev, test: EntityId) {
        let Some(key) = self.entities[test.index()].key.clone() else {
            return;
        };
        let candidates: Vec<(String, EntityId)> = self
            .production
            .get(&key)
            .into_iter()
            .flatten()
            .filter(|&&u| self.claimable(u))
            .map(|&u| (self.entities[u.index()].path.clone(), u))
            .collect();
        if candidates.is_empty() {
            return;
        }
        let path = self.entities[test.index()].path.clone();
        let found = match_test_to_unit(&path, candidates.iter().map(|(p, _)| p.as_str()), self.profile());
        if !found.ambiguous.is_empty() {
            let msg = format!(
                "ambiguous unit match ({}); left as integration test",
                found.ambiguous.join(", ")
            );
            self.diag(rev, &path, msg);
        }
        let TestTarget::Unit(unit_path) = found.target else {
            return;
        };
        let unit = candidates
            .iter()
            .find(|(p, _)| *p == unit_path)
            .map(|(_, u)| *u)
            .expect("match comes from candidates");
        // a deleted previous partner on either side loses its pairing
        self.unpair(unit);
        self.unpair(test);
        self.state(unit).paired_with = Some(test);
        self.state(test).paired_with = Some(unit);
        self.state(test).orphaned = false;
        if let Some(set) = self.seeking.get_mut(&key) {
            set.remove(&test);
            if set.is_empty() {
                self.seeking.remove(&key);
            }
        }
    }

    fn settle(&mut self, rev: Rev, mut dirty_tests: BTreeSet<EntityId>, dirty_units: BTreeSet<String>) {
        for key in dirty_units {
            if let Some(waiting) = self.seeking.get(&key) {
                dirty_tests.extend(waiting.iter().copied());
            }
        }
        for test in dirty_tests {
            let s = &self.entities[test.index()];
            let seeking = s.alive() && s.kind == FileKind::TestCode && (s.paired_with.is_none() || s.orphaned);
            if seeking {
                self.try_pair(rev, test);
            }
        }
    }
}

/// Replays classified commits into the entity registry and event list.
pub fn timeline_from_classified(commits: &[ClassifiedCommit], profile: &LanguageProfile) -> Timeline {
    let mut replay = Replay {
        profile: Some(profile),
        ..Replay::default()
    };
    for commit in commits {
        let mut dirty_tests = BTreeSet::new();
        let mut dirty_units = BTreeSet::new();
        for change in &commit.changes {
            replay.apply(commit.rev, change, &mut dirty_tests, &mut dirty_units);
        }
        replay.settle(commit.rev, dirty_tests, dirty_units);
    }

    let entities = replay
        .entities
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let role = match (s.kind, s.paired_with) {
                (FileKind::TestCode, Some(_)) => EntityRole::UnitTest,
                (FileKind::TestCode, None) => EntityRole::IntegrationTest,
                _ => EntityRole::ProductionUnit,
            };
            CodeEntity {
                id: EntityId(i as u32),
                path: s.path,
                role,
                paired_with: s.paired_with,
                introduced_rev: s.introduced_rev,
                deleted_rev: s.deleted_rev,
                orphaned: s.orphaned && role == EntityRole::UnitTest,
            }
        })
        .collect();
    Timeline {
        entities,
        events: replay.events,
        diagnostics: replay.diagnostics,
    }
}

/// Row per entity, 0 at the bottom. Indexed by [`EntityId`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RowLayout {
    rows: Vec<u32>,
    row_count: u32,
}

impl RowLayout {
    pub fn row(&self, id: EntityId) -> u32 {
        self.rows[id.index()]
    }

    pub fn row_count(&self) -> u32 {
        self.row_count
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EntityId, u32)> + '_ {
        self.rows.iter().enumerate().map(|(i, &r)| (EntityId(i as u32), r))
    }
}

/// Production units (with their paired unit tests) in order of
/// introduction, then integration tests stacked on top in the same order.
pub fn assign_rows(entities: &[CodeEntity]) -> RowLayout {
    let mut rows = vec![0u32; entities.len()];
    let by_intro = |e: &&CodeEntity| (e.introduced_rev, e.id);

    let mut units: Vec<&CodeEntity> = entities
        .iter()
        .filter(|e| e.role == EntityRole::ProductionUnit)
        .collect();
    units.sort_by_key(by_intro);
    let mut integration: Vec<&CodeEntity> = entities
        .iter()
        .filter(|e| e.role == EntityRole::IntegrationTest)
        .collect();
    integration.sort_by_key(by_intro);

    let mut next = 0u32;
    for unit in units {
        rows[unit.id.index()] = next;
        if let Some(test) = unit.paired_with {
            rows[test.index()] = next;
        }
        next += 1;
    }
    for test in integration {
        rows[test.id.index()] = next;
        next += 1;
    }
    RowLayout { rows, row_count: next }
}
