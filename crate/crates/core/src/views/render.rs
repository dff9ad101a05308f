use chrono::{DateTime, TimeDelta, Utc};

use super::{Anchor, AxisMode, Element, Glyph, PlotArea, ViewDocument, ViewKind, ViewOptions};
use crate::coverage::{CoverageLevel, CoverageRecord};
use crate::history::{event_color, FileEvent, RowLayout};
use crate::ingest::{CommitRecord, ReleaseMarker, Rev};
use crate::metrics::{derived_ratios, normalize_metric, Metric, MetricsSeries};
use crate::stats::ScatterPoint;

/// Mark count above which downsampling (when enabled) kicks in.
pub const DOWNSAMPLE_THRESHOLD: usize = 200_000;

const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 44.0;
const AXIS_COLOR: &str = "#333333";
const RELEASE_COLOR: &str = "#888888";

const GROWTH_STYLE: [(&str, &str, bool); 7] = [
    ("pLOC", "#CC0000", false),
    ("tLOC", "#00AA00", false),
    ("pClasses", "#993300", false),
    ("tClasses", "#006633", false),
    ("tCommands", "#6633CC", false),
    ("pClassRatio", "#666666", true),
    ("pLOCRatio", "#000000", true),
];

fn level_style(level: CoverageLevel) -> (&'static str, Glyph) {
    match level {
        CoverageLevel::Class => ("#1B9E77", Glyph::Square),
        CoverageLevel::Method => ("#D95F02", Glyph::Circle),
        CoverageLevel::Block => ("#7570B3", Glyph::Triangle),
        CoverageLevel::Statement => ("#E7298A", Glyph::Diamond),
    }
}

fn plot_area(options: &ViewOptions, x_range: (f64, f64), y_range: (f64, f64)) -> PlotArea {
    PlotArea {
        left: MARGIN_LEFT,
        top: MARGIN_TOP,
        right: (options.width - MARGIN_RIGHT).max(MARGIN_LEFT + 1.0),
        bottom: (options.height - MARGIN_BOTTOM).max(MARGIN_TOP + 1.0),
        x_range,
        y_range,
    }
}

fn new_document(kind: ViewKind, options: &ViewOptions, plot: PlotArea) -> ViewDocument {
    let width = options.width.max(plot.right + MARGIN_RIGHT);
    let height = options.height.max(plot.bottom + MARGIN_BOTTOM);
    let mut doc = ViewDocument {
        kind,
        width,
        height,
        plot,
        elements: Vec::new(),
    };
    doc.elements
        .push(text(width / 2.0, 18.0, kind.title(), 14.0, Anchor::Middle));
    doc
}

fn text(x: f64, y: f64, s: &str, size: f64, anchor: Anchor) -> Element {
    Element::Text {
        x,
        y,
        text: s.to_string(),
        size,
        anchor,
        vertical: false,
    }
}

fn line(from: (f64, f64), to: (f64, f64), stroke: &str, dashed: bool) -> Element {
    Element::Line {
        from,
        to,
        stroke: stroke.to_string(),
        width: 1.0,
        dashed,
    }
}

/// Round step from {1, 2, 5} x 10^k giving at most about `max_ticks` ticks.
fn nice_step(range: f64, max_ticks: usize) -> f64 {
    let raw = range / max_ticks.max(1) as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let norm = raw / magnitude;
    let factor = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    factor * magnitude
}

fn numeric_ticks(lo: f64, hi: f64, max_ticks: usize, integer: bool) -> Vec<(f64, String)> {
    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return vec![(lo, format_tick(lo, 1.0))];
    }
    let mut step = nice_step(hi - lo, max_ticks);
    if integer {
        step = step.max(1.0);
    }
    let start = (lo / step).ceil();
    let mut ticks = Vec::new();
    let mut i = 0.0;
    loop {
        let v = (start + i) * step;
        if v > hi + step * 1e-9 {
            break;
        }
        ticks.push((v, format_tick(v, step)));
        i += 1.0;
    }
    ticks
}

fn format_tick(v: f64, step: f64) -> String {
    if step >= 1.0 {
        format!("{:.0}", v)
    } else {
        let decimals = (-step.log10().floor()) as usize;
        format!("{v:.decimals$}")
    }
}

struct AxisSpec {
    x_ticks: Vec<(f64, String)>,
    y_ticks: Vec<(f64, String)>,
    x_title: String,
    y_title: String,
}

fn draw_axes(doc: &mut ViewDocument, spec: AxisSpec) {
    let p = doc.plot;
    let mut els = vec![
        line((p.left, p.bottom), (p.right, p.bottom), AXIS_COLOR, false),
        line((p.left, p.top), (p.left, p.bottom), AXIS_COLOR, false),
    ];
    for (v, label) in &spec.x_ticks {
        let x = p.x(*v);
        els.push(line((x, p.bottom), (x, p.bottom + 4.0), AXIS_COLOR, false));
        els.push(text(x, p.bottom + 16.0, label, 10.0, Anchor::Middle));
    }
    for (v, label) in &spec.y_ticks {
        let y = p.y(*v);
        els.push(line((p.left - 4.0, y), (p.left, y), AXIS_COLOR, false));
        els.push(text(p.left - 6.0, y + 3.0, label, 10.0, Anchor::End));
    }
    els.push(text(
        (p.left + p.right) / 2.0,
        doc.height - 8.0,
        &spec.x_title,
        11.0,
        Anchor::Middle,
    ));
    els.push(Element::Text {
        x: 14.0,
        y: (p.top + p.bottom) / 2.0,
        text: spec.y_title,
        size: 11.0,
        anchor: Anchor::Middle,
        vertical: true,
    });
    doc.elements.extend(els);
}

fn draw_releases(doc: &mut ViewDocument, positions: impl IntoIterator<Item = (f64, String)>) {
    let p = doc.plot;
    for (v, label) in positions {
        let x = p.x(v);
        doc.elements.push(line((x, p.top), (x, p.bottom), RELEASE_COLOR, true));
        doc.elements.push(text(x, p.top - 4.0, &label, 9.0, Anchor::Middle));
    }
}

fn draw_legend(doc: &mut ViewDocument, entries: &[(&str, &str, Glyph)]) {
    let y = 34.0;
    let mut x = MARGIN_LEFT;
    for (label, color, glyph) in entries {
        doc.elements.push(Element::Mark {
            class: "legend".into(),
            x: x + 4.0,
            y: y - 4.0,
            size: 8.0,
            glyph: *glyph,
            fill: color.to_string(),
        });
        doc.elements.push(text(x + 12.0, y, label, 10.0, Anchor::Start));
        x += 12.0 + 6.0 * label.chars().count() as f64 + 16.0;
    }
}

/// X positions of commits in the chosen axis mode.
struct CommitAxis<'a> {
    history: &'a [CommitRecord],
    mode: AxisMode,
}

impl CommitAxis<'_> {
    fn first_time(&self) -> Option<DateTime<Utc>> {
        self.history.first().map(|c| c.timestamp)
    }

    fn value(&self, rev: Rev) -> f64 {
        match self.mode {
            AxisMode::Index => rev.0 as f64,
            AxisMode::Time => match (self.first_time(), self.history.get(rev.index())) {
                (Some(first), Some(commit)) => (commit.timestamp - first).num_milliseconds() as f64 / 1000.0,
                _ => 0.0,
            },
        }
    }

    fn range(&self) -> (f64, f64) {
        let n = self.history.len().max(1) as f64;
        match self.mode {
            AxisMode::Index => (0.5, n + 0.5),
            AxisMode::Time => {
                let span = self.history.last().map_or(0.0, |c| self.value(c.rev));
                let pad = if span > 0.0 { span * 0.02 } else { 1.0 };
                (-pad, span + pad)
            }
        }
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        match self.mode {
            AxisMode::Index => numeric_ticks(1.0, self.history.len().max(1) as f64, 10, true),
            AxisMode::Time => {
                let Some(first) = self.first_time() else {
                    return Vec::new();
                };
                let span = self.history.last().map_or(0.0, |c| self.value(c.rev));
                let count = if span > 0.0 { 5 } else { 1 };
                (0..count)
                    .map(|i| {
                        let v = if count == 1 {
                            0.0
                        } else {
                            span * i as f64 / (count - 1) as f64
                        };
                        let at = first + TimeDelta::milliseconds((v * 1000.0).round() as i64);
                        (v, at.format("%Y-%m-%d").to_string())
                    })
                    .collect()
            }
        }
    }
}

/// One square per non-deletion event at (commit, entity row). Marks are
/// ordered by commit, then production before test, so a test mark always
/// paints over a production mark in the same cell.
pub fn render_change_history(
    events: &[FileEvent],
    layout: &RowLayout,
    history: &[CommitRecord],
    releases: &[ReleaseMarker],
    options: &ViewOptions,
) -> ViewDocument {
    let axis = CommitAxis {
        history,
        mode: options.axis,
    };
    let rows = layout.row_count().max(1) as f64;
    let plot = plot_area(options, axis.range(), (0.0, rows));
    let mut doc = new_document(ViewKind::ChangeHistory, options, plot);

    draw_axes(
        &mut doc,
        AxisSpec {
            x_ticks: axis.ticks(),
            y_ticks: numeric_ticks(0.0, rows, 8, true),
            x_title: match options.axis {
                AxisMode::Index => "commit".into(),
                AxisMode::Time => "time".into(),
            },
            y_title: "source entities".into(),
        },
    );
    draw_releases(&mut doc, releases.iter().map(|m| (axis.value(m.rev), m.label.clone())));

    let mut marks: Vec<(Rev, bool, u32, u32, &str)> = events
        .iter()
        .filter_map(|e| {
            let color = event_color(e.kind)?;
            Some((
                e.rev,
                e.kind.is_test(),
                layout.row(e.entity),
                e.entity.0,
                options.palette.color(color),
            ))
        })
        .collect();
    marks.sort_by_key(|&(rev, is_test, row, entity, _)| (rev, is_test, row, entity));
    let stride = if options.downsample && marks.len() > DOWNSAMPLE_THRESHOLD {
        marks.len().div_ceil(DOWNSAMPLE_THRESHOLD)
    } else {
        1
    };

    let cell_w = (plot.right - plot.left) / history.len().max(1) as f64;
    let cell_h = (plot.bottom - plot.top) / rows;
    let size = options.mark_size.min(cell_w).min(cell_h).max(0.5);
    for (rev, is_test, row, _, fill) in marks.into_iter().step_by(stride) {
        let (x, y) = plot.point(axis.value(rev), row as f64 + 0.5);
        doc.elements.push(Element::Mark {
            class: if is_test { "test" } else { "production" }.into(),
            x,
            y,
            size,
            glyph: Glyph::Square,
            fill: fill.to_string(),
        });
    }

    let palette = &options.palette;
    draw_legend(
        &mut doc,
        &[
            ("added production", &palette.added_production, Glyph::Square),
            ("modified production", &palette.modified_production, Glyph::Square),
            ("added test", &palette.added_test, Glyph::Square),
            ("modified test", &palette.modified_test, Glyph::Square),
        ],
    );
    doc
}

/// Five metrics as a percentage of their final value plus the two raw
/// production-share ratios, one polyline each, over commit index.
pub fn render_growth_history(
    series: &MetricsSeries,
    releases: &[ReleaseMarker],
    options: &ViewOptions,
) -> ViewDocument {
    let (first, last) = match (series.snapshots.first(), series.snapshots.last()) {
        (Some(a), Some(b)) => (a.rev.0 as f64, b.rev.0 as f64),
        _ => (1.0, 1.0),
    };

    let mut lines: Vec<Vec<f64>> = Metric::ALL
        .iter()
        .map(|&m| normalize_metric(series, m).map(|n| n.values).unwrap_or_default())
        .collect();
    let ratios: Vec<_> = series.snapshots.iter().map(derived_ratios).collect();
    lines.push(ratios.iter().map(|r| r.p_class_ratio).collect());
    lines.push(ratios.iter().map(|r| r.p_loc_ratio).collect());

    let peak = lines.iter().flatten().copied().fold(100.0, f64::max);
    let y_max = if peak > 100.0 {
        (peak / 10.0).ceil() * 10.0
    } else {
        100.0
    };
    let plot = plot_area(options, (first, last), (0.0, y_max));
    let mut doc = new_document(ViewKind::GrowthHistory, options, plot);

    draw_axes(
        &mut doc,
        AxisSpec {
            x_ticks: numeric_ticks(first, last, 10, true),
            y_ticks: numeric_ticks(0.0, y_max, 10, false),
            x_title: "commit".into(),
            y_title: "% of final value".into(),
        },
    );
    draw_releases(&mut doc, releases.iter().map(|m| (m.rev.0 as f64, m.label.clone())));

    for (values, (name, color, dashed)) in lines.iter().zip(GROWTH_STYLE) {
        let points = series
            .snapshots
            .iter()
            .zip(values)
            .map(|(s, &v)| plot.point(s.rev.0 as f64, v))
            .collect::<Vec<_>>();
        doc.elements.push(Element::Polyline {
            class: name.into(),
            segments: if points.is_empty() { Vec::new() } else { vec![points] },
            stroke: color.into(),
            width: if dashed { 1.0 } else { 1.5 },
            dashed,
        });
    }

    let legend: Vec<_> = GROWTH_STYLE.iter().map(|&(n, c, _)| (n, c, Glyph::Square)).collect();
    draw_legend(&mut doc, &legend);
    doc
}

/// Four coverage levels over release index. Missing measurements split a
/// level's line; each measured point also gets a glyph.
pub fn render_coverage_evolution(records: &[CoverageRecord], options: &ViewOptions) -> ViewDocument {
    let n = records.len().max(1);
    let plot = plot_area(options, (0.5, n as f64 + 0.5), (0.0, 100.0));
    let mut doc = new_document(ViewKind::CoverageEvolution, options, plot);

    let every = n.div_ceil(12);
    let x_ticks = records
        .iter()
        .enumerate()
        .filter(|(i, _)| i % every == 0)
        .map(|(i, r)| ((i + 1) as f64, r.release.clone()))
        .collect();
    draw_axes(
        &mut doc,
        AxisSpec {
            x_ticks,
            y_ticks: numeric_ticks(0.0, 100.0, 10, false),
            x_title: "release".into(),
            y_title: "coverage (%)".into(),
        },
    );

    for level in CoverageLevel::ALL {
        let mut segments: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut current = Vec::new();
        for (i, record) in records.iter().enumerate() {
            match record.get(level) {
                Some(v) => current.push(plot.point((i + 1) as f64, v)),
                None if !current.is_empty() => segments.push(std::mem::take(&mut current)),
                None => {}
            }
        }
        if !current.is_empty() {
            segments.push(current);
        }
        let (color, _) = level_style(level);
        doc.elements.push(Element::Polyline {
            class: level.name().into(),
            segments,
            stroke: color.into(),
            width: 1.5,
            dashed: false,
        });
    }
    for level in CoverageLevel::ALL {
        let (color, glyph) = level_style(level);
        for (i, record) in records.iter().enumerate() {
            if let Some(v) = record.get(level) {
                let (x, y) = plot.point((i + 1) as f64, v);
                doc.elements.push(Element::Mark {
                    class: level.name().into(),
                    x,
                    y,
                    size: options.mark_size + 2.0,
                    glyph,
                    fill: color.into(),
                });
            }
        }
    }

    let legend: Vec<_> = CoverageLevel::ALL
        .iter()
        .map(|&l| {
            let (c, g) = level_style(l);
            (l.name(), c, g)
        })
        .collect();
    draw_legend(&mut doc, &legend);
    doc
}

/// tLOCRatio against coverage, one glyph shape per level.
pub fn render_scatter(points: &[ScatterPoint], options: &ViewOptions) -> ViewDocument {
    let plot = plot_area(options, (0.0, 100.0), (0.0, 100.0));
    let mut doc = new_document(ViewKind::Scatter, options, plot);
    draw_axes(
        &mut doc,
        AxisSpec {
            x_ticks: numeric_ticks(0.0, 100.0, 10, false),
            y_ticks: numeric_ticks(0.0, 100.0, 10, false),
            x_title: "tLOCRatio (%)".into(),
            y_title: "coverage (%)".into(),
        },
    );
    for point in points {
        let (color, glyph) = level_style(point.level);
        let (x, y) = plot.point(point.t_loc_ratio, point.coverage);
        doc.elements.push(Element::Mark {
            class: point.level.name().into(),
            x,
            y,
            size: options.mark_size + 2.0,
            glyph,
            fill: color.into(),
        });
    }
    let legend: Vec<_> = CoverageLevel::ALL
        .iter()
        .map(|&l| {
            let (c, g) = level_style(l);
            (l.name(), c, g)
        })
        .collect();
    draw_legend(&mut doc, &legend);
    doc
}
