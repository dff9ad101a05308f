//! Seeded generator of synthetic Java repositories, for benchmarks and
//! end-to-end checks of the pipeline.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, TimeDelta, Utc};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{
    serialize_commit_log, serialize_releases, ChangeKind, CommitRecord, MemoryContent, PathChange, ReleaseMarker, Rev,
};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub commits: usize,
    /// Upper bound on distinct file paths the generator introduces.
    pub files: usize,
    pub seed: u64,
    /// A release marker every this many commits (0 disables).
    pub release_every: usize,
    pub start: DateTime<Utc>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            commits: 100,
            files: 40,
            seed: 7,
            release_every: 0,
            start: DateTime::from_timestamp(1_000_000_000, 0).expect("valid epoch"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthRepo {
    pub history: Vec<CommitRecord>,
    pub content: MemoryContent,
    pub releases: Vec<ReleaseMarker>,
    /// Every (rev, path, text) written, in commit order.
    pub snapshots: Vec<(Rev, String, String)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Production,
    UnitTest,
    IntegrationTest,
    Resource,
}

struct LiveFile {
    path: String,
    role: Role,
    version: u32,
}

fn production_source(class: &str, version: u32) -> String {
    let mut s = format!("package synth;\n\n/**\n * {class} revision {version}.\n */\npublic class {class} {{\n");
    for m in 0..=(version % 7) {
        s.push_str(&format!(
            "\n    // step {m}\n    public int step{m}(int x) {{\n        return x + {m};\n    }}\n"
        ));
    }
    if version % 3 == 2 {
        s.push_str(&format!("\n    static class {class}Helper {{\n    }}\n"));
    }
    s.push_str("}\n");
    s
}

fn test_source(class: &str, version: u32) -> String {
    let mut s =
        format!("package synth;\n\nimport junit.framework.TestCase;\n\npublic class {class} extends TestCase {{\n");
    for m in 0..=(version % 5) {
        s.push_str(&format!(
            "\n    public void testStep{m}() {{\n        assertEquals({m}, {m});\n    }}\n"
        ));
    }
    s.push_str("}\n");
    s
}

fn render(file: &LiveFile) -> String {
    let stem = file.path.rsplit('/').next().unwrap().trim_end_matches(".java");
    match file.role {
        Role::Production => production_source(stem, file.version),
        Role::UnitTest | Role::IntegrationTest => test_source(stem, file.version),
        Role::Resource => format!("key{}=value\n", file.version),
    }
}

pub fn generate(config: &SynthConfig) -> SynthRepo {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut live: Vec<LiveFile> = Vec::new();
    let mut introduced = 0usize;
    let mut next_unit = 0usize;
    let mut history = Vec::with_capacity(config.commits);
    let mut content = MemoryContent::new();
    let mut snapshots = Vec::new();
    let mut at = config.start;
    let authors = ["alice", "bob", "carol"];

    for i in 0..config.commits {
        let rev = Rev::from_index(i);
        let mut changes: Vec<PathChange> = Vec::new();
        let mut touched = std::collections::HashSet::new();
        let ops = rng.random_range(1..=3);
        for _ in 0..ops {
            let roll: f64 = rng.random();
            let can_add = introduced < config.files;
            if (live.is_empty() || roll < 0.35) && can_add {
                let role = match rng.random_range(0..10) {
                    0..=5 => Role::Production,
                    6..=7 => Role::UnitTest,
                    8 => Role::IntegrationTest,
                    _ => Role::Resource,
                };
                let pkg = rng.random_range(0..4);
                let path = match role {
                    Role::Production => {
                        next_unit += 1;
                        format!("src/pkg{pkg}/Unit{next_unit}.java")
                    }
                    Role::UnitTest => {
                        let unit = rng.random_range(1..=next_unit.max(1));
                        format!("test/pkg{pkg}/Unit{unit}Test.java")
                    }
                    Role::IntegrationTest => format!("test/it/Scenario{introduced}Test.java"),
                    Role::Resource => format!("conf/settings{introduced}.properties"),
                };
                if live.iter().any(|f| f.path == path) || touched.contains(&path) {
                    continue;
                }
                introduced += 1;
                touched.insert(path.clone());
                let file = LiveFile { path, role, version: 0 };
                let text = render(&file);
                content.insert(file.path.clone(), rev, text.as_str());
                snapshots.push((rev, file.path.clone(), text));
                changes.push(PathChange::new(file.path.clone(), ChangeKind::Added));
                live.push(file);
            } else if !live.is_empty() && roll < 0.95 {
                let idx = rng.random_range(0..live.len());
                if !touched.insert(live[idx].path.clone()) {
                    continue;
                }
                live[idx].version += 1;
                let text = render(&live[idx]);
                content.insert(live[idx].path.clone(), rev, text.as_str());
                snapshots.push((rev, live[idx].path.clone(), text));
                changes.push(PathChange::new(live[idx].path.clone(), ChangeKind::Modified));
            } else if !live.is_empty() {
                let idx = rng.random_range(0..live.len());
                if touched.contains(&live[idx].path) {
                    continue;
                }
                let file = live.swap_remove(idx);
                touched.insert(file.path.clone());
                content.delete(file.path.clone(), rev);
                changes.push(PathChange::new(file.path.clone(), ChangeKind::Deleted));
                // half of the deletions are moves to another package
                if file.role == Role::Production && rng.random_bool(0.5) && introduced < config.files {
                    let base = file.path.rsplit('/').next().unwrap().to_string();
                    let moved = format!("src/moved{}/{base}", rng.random_range(0..3));
                    if !live.iter().any(|f| f.path == moved) && touched.insert(moved.clone()) {
                        introduced += 1;
                        let file = LiveFile {
                            path: moved,
                            role: Role::Production,
                            version: file.version,
                        };
                        let text = render(&file);
                        content.insert(file.path.clone(), rev, text.as_str());
                        snapshots.push((rev, file.path.clone(), text));
                        changes.push(PathChange::new(file.path.clone(), ChangeKind::Added));
                        live.push(file);
                    }
                }
            }
        }
        if changes.is_empty() {
            // keep every commit non-empty: touch or create a resource file
            let path = "conf/touch.properties".to_string();
            let kind = if !live.iter().any(|f| f.path == path) {
                live.push(LiveFile {
                    path: path.clone(),
                    role: Role::Resource,
                    version: 0,
                });
                ChangeKind::Added
            } else {
                ChangeKind::Modified
            };
            let file = live.iter_mut().find(|f| f.path == path).unwrap();
            if kind == ChangeKind::Modified {
                file.version += 1;
            }
            let text = render(file);
            content.insert(path.clone(), rev, text.as_str());
            snapshots.push((rev, path.clone(), text));
            changes.push(PathChange::new(path, kind));
        }
        at += TimeDelta::minutes(rng.random_range(1..600));
        history.push(CommitRecord {
            rev,
            vcs_id: format!("c{:05}", i + 1),
            timestamp: at,
            author: authors.choose(&mut rng).unwrap().to_string(),
            changes,
        });
    }

    let releases = if config.release_every == 0 {
        Vec::new()
    } else {
        (config.release_every..=config.commits)
            .step_by(config.release_every)
            .enumerate()
            .map(|(n, r)| ReleaseMarker {
                label: format!("0.{}", n + 1),
                rev: Rev(r as u32),
            })
            .collect()
    };

    SynthRepo {
        history,
        content,
        releases,
        snapshots,
    }
}

impl SynthRepo {
    /// Writes `log.jsonl`, `releases.tsv` and a `content/<vcs_id>/<path>`
    /// snapshot tree under `dir`.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        let mut log = BufWriter::new(fs::File::create(dir.join("log.jsonl"))?);
        serialize_commit_log(&self.history, &mut log)?;
        log.flush()?;
        let mut rel = BufWriter::new(fs::File::create(dir.join("releases.tsv"))?);
        serialize_releases(&self.releases, &self.history, &mut rel)?;
        rel.flush()?;
        let root = dir.join("content");
        for (rev, path, text) in &self.snapshots {
            let file = root.join(&self.history[rev.index()].vcs_id).join(path);
            fs::create_dir_all(file.parent().expect("has parent"))?;
            fs::write(file, text)?;
        }
        Ok(())
    }
}
