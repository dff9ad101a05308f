use proptest::prelude::*;
use testevo_core::classify::LanguageProfile;
use testevo_core::export::{parse_metrics_tsv, write_metrics_tsv};
use testevo_core::history::{assign_rows, build_timeline, classify_history, EntityRole};
use testevo_core::ingest::{
    load_releases, parse_commit_log, serialize_commit_log, serialize_releases, ParseOptions, SnapshotDir,
};
use testevo_core::metrics::{compute_series, derived_ratios};
use testevo_core::phases::{segment_phases, Rulebook, WindowMode, DEFAULT_EPSILON};
use testevo_core::synth::{generate, SynthConfig};
use testevo_core::views::{emit_svg, render_change_history, render_growth_history, ViewOptions};

fn config(seed: u64) -> SynthConfig {
    SynthConfig {
        commits: 120,
        files: 50,
        seed,
        release_every: 30,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pairing_is_symmetric_and_one_to_one(seed in 0u64..10_000) {
        let repo = generate(&config(seed));
        let timeline = build_timeline(&repo.history, &repo.content, &LanguageProfile::java()).unwrap();
        let mut partners = std::collections::HashSet::new();
        for e in &timeline.entities {
            if let Some(p) = e.paired_with {
                prop_assert_eq!(timeline.entity(p).paired_with, Some(e.id));
                prop_assert!(partners.insert(p), "{} claimed twice", p);
                let roles = (e.role, timeline.entity(p).role);
                prop_assert!(matches!(
                    roles,
                    (EntityRole::ProductionUnit, EntityRole::UnitTest) | (EntityRole::UnitTest, EntityRole::ProductionUnit)
                ));
            } else {
                prop_assert_ne!(e.role, EntityRole::UnitTest);
            }
        }
    }

    #[test]
    fn rows_keep_pairs_together_and_never_overlap(seed in 0u64..10_000) {
        let repo = generate(&config(seed));
        let timeline = build_timeline(&repo.history, &repo.content, &LanguageProfile::java()).unwrap();
        let layout = assign_rows(&timeline.entities);
        prop_assert_eq!(layout.len(), timeline.entities.len());
        for e in &timeline.entities {
            if let Some(p) = e.paired_with {
                prop_assert_eq!(layout.row(e.id), layout.row(p));
            }
            prop_assert!(layout.row(e.id) < layout.row_count());
        }
        let mut rows: Vec<u32> = timeline.entities.iter().filter(|e| e.role != EntityRole::UnitTest || e.paired_with.is_none()).map(|e| layout.row(e.id)).collect();
        let before = rows.len();
        rows.sort();
        rows.dedup();
        prop_assert_eq!(rows.len(), before, "two rows shared outside a pair");
    }

    #[test]
    fn windows_cover_history_and_share_endpoints(seed in 0u64..10_000, block in 1usize..40) {
        let repo = generate(&config(seed));
        let profile = LanguageProfile::java();
        let classified = classify_history(&repo.history, &repo.content, &profile).unwrap();
        let series = compute_series(&repo.history, &classified);
        let rulebook = Rulebook::default();
        for mode in [WindowMode::Releases, WindowMode::Blocks(block)] {
            let segments = segment_phases(&series, &repo.releases, mode, DEFAULT_EPSILON, &rulebook).unwrap();
            prop_assert_eq!(segments.first().unwrap().start.0, 1);
            prop_assert_eq!(segments.last().unwrap().end.0 as usize, repo.history.len());
            for w in segments.windows(2) {
                prop_assert_eq!(w[0].end, w[1].start);
            }
        }
    }
}

#[test]
fn written_repository_reads_back_identically() {
    let repo = generate(&config(17));
    let dir = tempfile::tempdir().unwrap();
    repo.write_to(dir.path()).unwrap();

    let log = std::fs::read(dir.path().join("log.jsonl")).unwrap();
    let history = parse_commit_log(log.as_slice(), &ParseOptions::default()).unwrap();
    assert_eq!(history, repo.history);
    let releases = load_releases(
        std::fs::read(dir.path().join("releases.tsv")).unwrap().as_slice(),
        &history,
    )
    .unwrap();
    assert_eq!(releases, repo.releases);

    let profile = LanguageProfile::java();
    let disk = SnapshotDir::new(dir.path().join("content"), &history);
    let from_disk = classify_history(&history, &disk, &profile).unwrap();
    let from_memory = classify_history(&repo.history, &repo.content, &profile).unwrap();
    assert_eq!(from_disk, from_memory);

    let mut again = Vec::new();
    serialize_commit_log(&history, &mut again).unwrap();
    assert_eq!(again, log);
    let mut rel = Vec::new();
    serialize_releases(&releases, &history, &mut rel).unwrap();
    assert_eq!(load_releases(rel.as_slice(), &history).unwrap(), releases);
}

#[test]
fn metrics_table_round_trips() {
    let repo = generate(&config(23));
    let profile = LanguageProfile::java();
    let classified = classify_history(&repo.history, &repo.content, &profile).unwrap();
    let series = compute_series(&repo.history, &classified);
    let mut tsv = Vec::new();
    write_metrics_tsv(&series, &mut tsv).unwrap();
    let rows = parse_metrics_tsv(tsv.as_slice()).unwrap();
    assert_eq!(rows.len(), series.len());
    for ((snapshot, ratios), original) in rows.iter().zip(&series.snapshots) {
        assert_eq!(snapshot, original);
        let r = derived_ratios(original);
        assert_eq!(*ratios, [r.p_class_ratio, r.p_loc_ratio, r.t_loc_ratio]);
    }
}

#[test]
fn views_are_stable_across_runs() {
    let repo = generate(&config(31));
    let profile = LanguageProfile::java();
    let render = || {
        let classified = classify_history(&repo.history, &repo.content, &profile).unwrap();
        let timeline = testevo_core::history::timeline_from_classified(&classified, &profile);
        let layout = assign_rows(&timeline.entities);
        let series = compute_series(&repo.history, &classified);
        let options = ViewOptions::default();
        (
            emit_svg(&render_change_history(
                &timeline.events,
                &layout,
                &repo.history,
                &repo.releases,
                &options,
            )),
            emit_svg(&render_growth_history(&series, &repo.releases, &options)),
        )
    };
    assert_eq!(render(), render());
}
