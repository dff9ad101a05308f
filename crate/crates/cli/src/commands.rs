use std::io::Write as _;
use std::path::Path;

use chrono::TimeDelta;
use testevo_core::classify::LanguageProfile;
use testevo_core::coverage::{parse_coverage_report, serialize_coverage, CoverageRecord};
use testevo_core::export::{
    write_correlation_tsv, write_entities_tsv, write_metrics_tsv, write_phases_tsv, write_scatter_tsv,
};
use testevo_core::history::{assign_rows, classify_history, timeline_from_classified, RowLayout, Timeline};
use testevo_core::ingest::{
    format_timestamp, load_releases, parse_commit_log, serialize_commit_log, ParseOptions, SnapshotDir,
};
use testevo_core::metrics::{compute_series, MetricsSeries};
use testevo_core::phases::{segment_phases, Rulebook};
use testevo_core::stats::{build_scatter, correlate};
use testevo_core::views::{
    emit_svg, render_change_history, render_coverage_evolution, render_growth_history, render_scatter,
};
use testevo_core::{CommitRecord, ContentProvider, ReleaseMarker};

use crate::config::{read_input, ContentSource, RunConfig};
use crate::error::CliError;
use crate::git::{export_history, export_tags, GitContent};
use crate::output::Outputs;

/// At most this many replay diagnostics are echoed to standard error.
const MAX_DIAGNOSTICS_SHOWN: usize = 20;

pub struct Analysis {
    pub history: Vec<CommitRecord>,
    pub releases: Vec<ReleaseMarker>,
    pub timeline: Timeline,
    pub layout: RowLayout,
    pub series: MetricsSeries,
}

fn require<'a>(path: &'a Option<std::path::PathBuf>, what: &'static str) -> Result<&'a Path, CliError> {
    path.as_deref().ok_or(CliError::MissingArgument(what))
}

pub fn load_history(cfg: &RunConfig) -> Result<Vec<CommitRecord>, CliError> {
    let path = require(&cfg.log, "commit log (--log)")?;
    let text = read_input(path, "commit log")?;
    let options = ParseOptions {
        skew_tolerance: TimeDelta::seconds(cfg.skew_tolerance_secs),
    };
    parse_commit_log(text.as_bytes(), &options).map_err(|e| CliError::invalid("commit log", path, e))
}

fn load_release_markers(cfg: &RunConfig, history: &[CommitRecord]) -> Result<Vec<ReleaseMarker>, CliError> {
    let Some(path) = cfg.releases.as_deref() else {
        return Ok(Vec::new());
    };
    let text = read_input(path, "releases file")?;
    load_releases(text.as_bytes(), history).map_err(|e| CliError::invalid("releases file", path, e))
}

fn load_profile(cfg: &RunConfig) -> Result<LanguageProfile, CliError> {
    match cfg.profile.as_deref() {
        None => Ok(LanguageProfile::java()),
        Some(path) => {
            let text = read_input(path, "profile")?;
            LanguageProfile::from_toml(&text).map_err(|e| CliError::invalid("profile", path, e))
        }
    }
}

fn load_rulebook(cfg: &RunConfig) -> Result<Rulebook, CliError> {
    match cfg.rulebook.as_deref() {
        None => Ok(Rulebook::default()),
        Some(path) => {
            let text = read_input(path, "rulebook")?;
            Rulebook::parse(&text).map_err(|e| CliError::invalid("rulebook", path, e))
        }
    }
}

fn load_coverage(cfg: &RunConfig) -> Result<Vec<CoverageRecord>, CliError> {
    let path = require(&cfg.coverage, "coverage report (--coverage)")?;
    let text = read_input(path, "coverage report")?;
    parse_coverage_report(text.as_bytes()).map_err(|e| CliError::invalid("coverage report", path, e))
}

fn content_provider(cfg: &RunConfig, history: &[CommitRecord]) -> Result<Box<dyn ContentProvider>, CliError> {
    let source = match &cfg.content {
        Some(source) => source.clone(),
        // conventional layout next to the log
        None => {
            let log = require(&cfg.log, "commit log (--log)")?;
            ContentSource::Dir(log.parent().unwrap_or(Path::new(".")).join("content"))
        }
    };
    match source {
        ContentSource::Dir(dir) => {
            if !dir.is_dir() {
                return Err(CliError::MissingInput {
                    what: "content directory",
                    path: dir,
                });
            }
            Ok(Box::new(SnapshotDir::new(dir, history)))
        }
        ContentSource::Git(repo) => {
            if !repo.exists() {
                return Err(CliError::MissingInput {
                    what: "git repository",
                    path: repo,
                });
            }
            Ok(Box::new(GitContent::new(repo, history)))
        }
    }
}

/// Ingest, classify and replay the whole history.
pub fn analyze(cfg: &RunConfig) -> Result<Analysis, CliError> {
    let history = load_history(cfg)?;
    let releases = load_release_markers(cfg, &history)?;
    let profile = load_profile(cfg)?;
    let provider = content_provider(cfg, &history)?;
    let classified =
        classify_history(&history, &provider, &profile).map_err(|e| CliError::Validation(format!("content: {e}")))?;
    let timeline = timeline_from_classified(&classified, &profile);
    let series = compute_series(&history, &classified);
    let layout = assign_rows(&timeline.entities);

    let diagnostics = &timeline.diagnostics;
    for d in diagnostics.iter().take(MAX_DIAGNOSTICS_SHOWN) {
        eprintln!("note: commit {} {}: {}", d.rev, d.path, d.message);
    }
    if diagnostics.len() > MAX_DIAGNOSTICS_SHOWN {
        eprintln!("note: {} more", diagnostics.len() - MAX_DIAGNOSTICS_SHOWN);
    }
    Ok(Analysis {
        history,
        releases,
        timeline,
        layout,
        series,
    })
}

fn tsv(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    write(&mut buf).expect("writing to memory");
    buf
}

pub fn analyze_outputs(a: &Analysis, cfg: &RunConfig, out: &mut Outputs) {
    out.add("metrics.tsv", tsv(|b| write_metrics_tsv(&a.series, b)));
    out.add("entities.tsv", tsv(|b| write_entities_tsv(&a.timeline, &a.layout, b)));
    let change = render_change_history(&a.timeline.events, &a.layout, &a.history, &a.releases, &cfg.view);
    out.add("change-history.svg", emit_svg(&change));
    let growth = render_growth_history(&a.series, &a.releases, &cfg.view);
    out.add("growth-history.svg", emit_svg(&growth));
}

pub fn phase_outputs(a: &Analysis, cfg: &RunConfig, rulebook: &Rulebook, out: &mut Outputs) -> Result<(), CliError> {
    let segments = segment_phases(&a.series, &a.releases, cfg.window, cfg.epsilon, rulebook)
        .map_err(|e| CliError::Validation(format!("phases: {e}")))?;
    out.add("phases.tsv", tsv(|b| write_phases_tsv(&segments, b)));
    Ok(())
}

pub fn coverage_outputs(records: &[CoverageRecord], cfg: &RunConfig, out: &mut Outputs) {
    out.add(
        "coverage-evolution.svg",
        emit_svg(&render_coverage_evolution(records, &cfg.view)),
    );
    out.add("coverage.tsv", tsv(|b| serialize_coverage(records, b)));
}

pub fn correlate_outputs(
    a: &Analysis,
    records: &[CoverageRecord],
    cfg: &RunConfig,
    out: &mut Outputs,
) -> Result<(), CliError> {
    let points = build_scatter(&a.series, &a.releases, records)
        .map_err(|e| CliError::invalid("coverage report", cfg.coverage.clone().unwrap_or_default(), e))?;
    let results = correlate(&points);
    for r in &results {
        if let Err(reason) = &r.rho {
            eprintln!("note: {} correlation undefined ({reason})", r.level);
        }
    }
    out.add("scatter.svg", emit_svg(&render_scatter(&points, &cfg.view)));
    out.add("scatter.tsv", tsv(|b| write_scatter_tsv(&points, b)));
    out.add("correlation.tsv", tsv(|b| write_correlation_tsv(&results, b)));
    Ok(())
}

fn finish(out: Outputs, cfg: &RunConfig) -> Result<(), CliError> {
    let written = out.write(&cfg.out)?;
    let mut stdout = std::io::stdout().lock();
    for path in written {
        let _ = writeln!(stdout, "wrote {}", path.display());
    }
    Ok(())
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<(), CliError> {
    let a = analyze(cfg)?;
    let mut out = Outputs::default();
    analyze_outputs(&a, cfg, &mut out);
    finish(out, cfg)
}

pub fn cmd_coverage(cfg: &RunConfig) -> Result<(), CliError> {
    let records = load_coverage(cfg)?;
    let mut out = Outputs::default();
    coverage_outputs(&records, cfg, &mut out);
    finish(out, cfg)
}

pub fn cmd_phases(cfg: &RunConfig) -> Result<(), CliError> {
    let rulebook = load_rulebook(cfg)?;
    let a = analyze(cfg)?;
    let mut out = Outputs::default();
    phase_outputs(&a, cfg, &rulebook, &mut out)?;
    finish(out, cfg)
}

pub fn cmd_correlate(cfg: &RunConfig) -> Result<(), CliError> {
    require(&cfg.releases, "releases file (--releases)")?;
    let records = load_coverage(cfg)?;
    let a = analyze(cfg)?;
    let mut out = Outputs::default();
    correlate_outputs(&a, &records, cfg, &mut out)?;
    finish(out, cfg)
}

/// Analyze and phases always; coverage when a report is given; correlate
/// when releases are given as well.
pub fn cmd_run_all(cfg: &RunConfig) -> Result<(), CliError> {
    let rulebook = load_rulebook(cfg)?;
    let records = match cfg.coverage {
        Some(_) => Some(load_coverage(cfg)?),
        None => None,
    };
    let a = analyze(cfg)?;
    let mut out = Outputs::default();
    analyze_outputs(&a, cfg, &mut out);
    phase_outputs(&a, cfg, &rulebook, &mut out)?;
    if let Some(records) = &records {
        coverage_outputs(records, cfg, &mut out);
        if cfg.releases.is_some() {
            correlate_outputs(&a, records, cfg, &mut out)?;
        }
    }
    finish(out, cfg)
}

/// Writes `log.jsonl` and `releases.tsv` (from tags) for a git repository.
pub fn cmd_export_git(repo: &Path, out_dir: &Path) -> Result<(), CliError> {
    if !repo.exists() {
        return Err(CliError::MissingInput {
            what: "git repository",
            path: repo.to_path_buf(),
        });
    }
    let history = export_history(repo)?;
    let first = history.first().map(|c| c.timestamp);
    let tags = export_tags(repo)?;
    let mut out = Outputs::default();
    out.add("log.jsonl", tsv(|b| serialize_commit_log(&history, b)));
    let mut releases = String::new();
    for (label, at) in tags {
        if first.is_some_and(|f| at >= f) {
            releases.push_str(&format!("{label}\t{}\n", format_timestamp(&at)));
        }
    }
    out.add("releases.tsv", releases.into_bytes());
    let written = out.write(out_dir)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
