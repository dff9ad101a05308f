use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/pacman")
        .join(name)
        .display()
        .to_string()
}

fn testevo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_testevo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

/// A two-file repository with `commits` commits under `dir`.
fn tiny_repo(dir: &Path, commits: usize) -> PathBuf {
    let mut log = String::new();
    for i in 1..=commits {
        let kind = if i == 1 { "A" } else { "M" };
        log.push_str(&format!(
            r#"{{"vcs_id":"r{i}","timestamp":"2010-01-{i:02}T00:00:00Z","author":"a","changes":[{{"path":"src/A.java","kind":"{kind}"}},{{"path":"test/ATest.java","kind":"{kind}"}}]}}"#
        ));
        log.push('\n');
        let methods: String = (0..i).map(|m| format!("    int m{m}() {{ return {m}; }}\n")).collect();
        let file = dir.join(format!("content/r{i}/src/A.java"));
        fs::create_dir_all(file.parent().unwrap()).unwrap();
        fs::write(file, format!("public class A {{\n{methods}}}\n")).unwrap();
        let file = dir.join(format!("content/r{i}/test/ATest.java"));
        fs::create_dir_all(file.parent().unwrap()).unwrap();
        fs::write(
            file,
            "public class ATest extends junit.framework.TestCase {\n    public void testA() { }\n}\n",
        )
        .unwrap();
    }
    let log_path = dir.join("log.jsonl");
    fs::write(&log_path, log).unwrap();
    log_path
}

#[test]
fn missing_log_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = testevo(&[
        "analyze",
        "--log",
        &path(dir.path(), "nope.jsonl"),
        "--out",
        &path(dir.path(), "o"),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("nope.jsonl"));
}

#[test]
fn missing_log_argument_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = testevo(&["analyze", "--out", &path(dir.path(), "o")]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn correlate_without_releases_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = testevo(&[
        "correlate",
        "--log",
        &fixture("log.jsonl"),
        "--coverage",
        &fixture("coverage.txt"),
        "--out",
        &path(dir.path(), "o"),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("taken");
    fs::write(&blocker, "x").unwrap();
    let out = testevo(&[
        "analyze",
        "--log",
        &fixture("log.jsonl"),
        "--out",
        &blocker.display().to_string(),
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn coverage_out_of_range_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cov.txt"), "1.0 75 60 50 55\n1.1 80 120 58 61\n").unwrap();
    let out = testevo(&[
        "coverage",
        "--coverage",
        &path(dir.path(), "cov.txt"),
        "--out",
        &path(dir.path(), "o"),
    ]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
    assert!(!dir.path().join("o").exists(), "nothing written on failure");
}

#[test]
fn malformed_rulebook_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("rules.txt"),
        "U F * * * pure development\nU X * * * broken\n",
    )
    .unwrap();
    let out = testevo(&[
        "phases",
        "--log",
        &fixture("log.jsonl"),
        "--rulebook",
        &path(dir.path(), "rules.txt"),
        "--out",
        &path(dir.path(), "o"),
    ]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn coverage_for_unknown_release_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cov.txt"), "1.0 75 60 50 55\n9.9 80 70 58 61\n").unwrap();
    let out = testevo(&[
        "correlate",
        "--log",
        &fixture("log.jsonl"),
        "--releases",
        &fixture("releases.tsv"),
        "--coverage",
        &path(dir.path(), "cov.txt"),
        "--out",
        &path(dir.path(), "o"),
    ]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(stderr(&out).contains("9.9"), "{}", stderr(&out));
}

#[test]
fn missing_content_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let log = tiny_repo(dir.path(), 2);
    fs::remove_dir_all(dir.path().join("content")).unwrap();
    let out = testevo(&[
        "analyze",
        "--log",
        &log.display().to_string(),
        "--out",
        &path(dir.path(), "o"),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn single_commit_gives_one_unclassified_window() {
    let dir = tempfile::tempdir().unwrap();
    let log = tiny_repo(dir.path(), 1);
    let out = testevo(&[
        "phases",
        "--log",
        &log.display().to_string(),
        "--out",
        &path(dir.path(), "o"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let phases = fs::read_to_string(dir.path().join("o/phases.tsv")).unwrap();
    let rows: Vec<&str> = phases.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("1\t1\t"));
    assert!(rows[0].ends_with("\tunclassified"));
}

#[test]
fn single_release_leaves_correlation_undefined() {
    let dir = tempfile::tempdir().unwrap();
    let log = tiny_repo(dir.path(), 3);
    fs::write(dir.path().join("releases.tsv"), "1.0\tr3\n").unwrap();
    fs::write(dir.path().join("cov.txt"), "1.0 50 40 30 20\n").unwrap();
    let out = testevo(&[
        "correlate",
        "--log",
        &log.display().to_string(),
        "--releases",
        &path(dir.path(), "releases.tsv"),
        "--coverage",
        &path(dir.path(), "cov.txt"),
        "--out",
        &path(dir.path(), "o"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let table = fs::read_to_string(dir.path().join("o/correlation.tsv")).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(
        rows,
        [
            "class\tundefined\t1",
            "method\tundefined\t1",
            "block\tundefined\t1",
            "statement\tundefined\t1"
        ]
    );
}

#[test]
fn config_file_supplies_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!(
        "log = {:?}\nreleases = {:?}\nout = \"result\"\n\n[view]\nwidth = 640\n\n[phases]\nwindow = 10\n",
        fixture("log.jsonl"),
        fixture("releases.tsv"),
    );
    fs::write(dir.path().join("testevo.toml"), config).unwrap();
    let out = testevo(&["run-all", "--config", &path(dir.path(), "testevo.toml")]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let result = dir.path().join("result");
    let svg = fs::read_to_string(result.join("growth-history.svg")).unwrap();
    assert!(svg.contains("width=\"640.000\""));
    let phases = fs::read_to_string(result.join("phases.tsv")).unwrap();
    assert_eq!(phases.lines().count(), 4, "three blocks of ten commits:\n{phases}");
    assert!(!result.join("scatter.svg").exists(), "no coverage, no correlation");
}

#[test]
fn metrics_tsv_matches_fixture_totals() {
    let dir = tempfile::tempdir().unwrap();
    let out = testevo(&[
        "analyze",
        "--log",
        &fixture("log.jsonl"),
        "--out",
        &path(dir.path(), "o"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let metrics = fs::read_to_string(dir.path().join("o/metrics.tsv")).unwrap();
    let last: Vec<&str> = metrics.lines().last().unwrap().split('\t').collect();
    assert_eq!(&last[2..7], ["30", "27", "4", "4", "11"]);
    assert_eq!(last[8], (30.0 * 100.0 / 57.0).to_string());
}

fn git(dir: &Path, args: &[&str]) {
    let status = Command::new("git")
        .arg("-C")
        .arg(dir)
        .args(args)
        .env("GIT_AUTHOR_DATE", "2012-05-01T10:00:00Z")
        .env("GIT_COMMITTER_DATE", "2012-05-01T10:00:00Z")
        .status()
        .expect("git runs");
    assert!(status.success(), "git {args:?}");
}

#[test]
fn exports_and_reads_a_git_repository() {
    if Command::new("git").arg("--version").output().is_err() {
        eprintln!("git not available; skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("repo");
    fs::create_dir_all(repo.join("src")).unwrap();
    git(&repo, &["init", "-q"]);
    git(&repo, &["config", "user.email", "dev@example.com"]);
    git(&repo, &["config", "user.name", "Dev"]);
    fs::write(repo.join("src/Shop.java"), "public class Shop {\n    int a;\n}\n").unwrap();
    git(&repo, &["add", "."]);
    git(&repo, &["commit", "-q", "-m", "shop"]);
    git(&repo, &["tag", "v1"]);
    fs::create_dir_all(repo.join("test")).unwrap();
    fs::write(
        repo.join("test/ShopTest.java"),
        "public class ShopTest extends junit.framework.TestCase {\n    public void testA() { }\n}\n",
    )
    .unwrap();
    git(&repo, &["add", "."]);
    git(&repo, &["commit", "-q", "-m", "test"]);
    git(&repo, &["mv", "src/Shop.java", "src/Store.java"]);
    git(&repo, &["commit", "-q", "-m", "rename"]);

    let export = dir.path().join("export");
    let out = testevo(&[
        "export-git",
        &repo.display().to_string(),
        "--out",
        &export.display().to_string(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let log = fs::read_to_string(export.join("log.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 3);
    assert!(log.lines().nth(2).unwrap().contains(r#""kind":"D""#));
    let releases = fs::read_to_string(export.join("releases.tsv")).unwrap();
    assert!(releases.starts_with("v1\t"), "{releases}");

    let out = testevo(&[
        "analyze",
        "--log",
        &path(&export, "log.jsonl"),
        "--releases",
        &path(&export, "releases.tsv"),
        "--git-repo",
        &repo.display().to_string(),
        "--out",
        &path(dir.path(), "o"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let entities = fs::read_to_string(dir.path().join("o/entities.tsv")).unwrap();
    assert!(entities.contains("src/Store.java\tproduction"), "{entities}");
    let metrics = fs::read_to_string(dir.path().join("o/metrics.tsv")).unwrap();
    let last: Vec<&str> = metrics.lines().last().unwrap().split('\t').collect();
    assert_eq!(&last[2..5], ["3", "3", "1"]);
}
