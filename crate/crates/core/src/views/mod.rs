//! Chart documents and their SVG serialization.
//!
//! Renderers build a [`ViewDocument`], a flat list of drawing elements in
//! paint order, and [`emit_svg`] turns it into bytes. Every number is
//! printed with three decimals so identical documents give identical files.

mod render;

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Deserialize;

use crate::history::EventColor;

pub use render::{
    render_change_history, render_coverage_evolution, render_growth_history, render_scatter, DOWNSAMPLE_THRESHOLD,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewKind {
    ChangeHistory,
    GrowthHistory,
    CoverageEvolution,
    Scatter,
}

impl ViewKind {
    pub fn title(self) -> &'static str {
        match self {
            ViewKind::ChangeHistory => "Change history",
            ViewKind::GrowthHistory => "Growth history",
            ViewKind::CoverageEvolution => "Coverage evolution",
            ViewKind::Scatter => "Test code share vs coverage",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Glyph {
    Square,
    Circle,
    Triangle,
    Diamond,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Start,
    Middle,
    End,
}

impl Anchor {
    fn as_str(self) -> &'static str {
        match self {
            Anchor::Start => "start",
            Anchor::Middle => "middle",
            Anchor::End => "end",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Line {
        from: (f64, f64),
        to: (f64, f64),
        stroke: String,
        width: f64,
        dashed: bool,
    },
    /// A data series; each segment is drawn as a connected run, gaps
    /// between segments are left open.
    Polyline {
        class: String,
        segments: Vec<Vec<(f64, f64)>>,
        stroke: String,
        width: f64,
        dashed: bool,
    },
    Mark {
        class: String,
        x: f64,
        y: f64,
        size: f64,
        glyph: Glyph,
        fill: String,
    },
    Text {
        x: f64,
        y: f64,
        text: String,
        size: f64,
        anchor: Anchor,
        vertical: bool,
    },
}

impl Element {
    /// Every coordinate the element places on the canvas.
    pub fn coordinates(&self) -> Vec<(f64, f64)> {
        match self {
            Element::Line { from, to, .. } => vec![*from, *to],
            Element::Polyline { segments, .. } => segments.iter().flatten().copied().collect(),
            Element::Mark { x, y, size, .. } => {
                let h = size / 2.0;
                vec![(x - h, y - h), (x + h, y + h)]
            }
            Element::Text { x, y, .. } => vec![(*x, *y)],
        }
    }
}

/// Pixel rectangle of the plot area together with the data ranges it maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotArea {
    pub left: f64,
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl PlotArea {
    pub fn x(&self, v: f64) -> f64 {
        let (lo, hi) = self.x_range;
        if hi > lo {
            self.left + (v - lo) / (hi - lo) * (self.right - self.left)
        } else {
            (self.left + self.right) / 2.0
        }
    }

    pub fn y(&self, v: f64) -> f64 {
        let (lo, hi) = self.y_range;
        if hi > lo {
            self.bottom - (v - lo) / (hi - lo) * (self.bottom - self.top)
        } else {
            (self.top + self.bottom) / 2.0
        }
    }

    pub fn point(&self, x: f64, y: f64) -> (f64, f64) {
        (self.x(x), self.y(y))
    }

    pub fn contains(&self, (x, y): (f64, f64)) -> bool {
        const SLACK: f64 = 1e-9;
        x >= self.left - SLACK && x <= self.right + SLACK && y >= self.top - SLACK && y <= self.bottom + SLACK
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViewDocument {
    pub kind: ViewKind,
    pub width: f64,
    pub height: f64,
    pub plot: PlotArea,
    pub elements: Vec<Element>,
}

impl ViewDocument {
    pub fn marks(&self) -> impl Iterator<Item = (usize, &Element)> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| matches!(e, Element::Mark { .. }))
    }

    pub fn polylines(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter().filter(|e| matches!(e, Element::Polyline { .. }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Palette {
    pub added_production: String,
    pub modified_production: String,
    pub added_test: String,
    pub modified_test: String,
}

impl Default for Palette {
    fn default() -> Self {
        Self {
            added_production: "#CC0000".into(),
            modified_production: "#0033CC".into(),
            added_test: "#00AA00".into(),
            modified_test: "#D4C400".into(),
        }
    }
}

impl Palette {
    pub fn color(&self, color: EventColor) -> &str {
        match color {
            EventColor::Red => &self.added_production,
            EventColor::Blue => &self.modified_production,
            EventColor::Green => &self.added_test,
            EventColor::Yellow => &self.modified_test,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisMode {
    /// Commit index.
    #[default]
    Index,
    /// Commit timestamp.
    Time,
}

impl FromStr for AxisMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "index" => Ok(AxisMode::Index),
            "time" => Ok(AxisMode::Time),
            other => Err(format!("unknown axis mode {other:?} (expected index or time)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ViewOptions {
    pub width: f64,
    pub height: f64,
    pub mark_size: f64,
    pub axis: AxisMode,
    /// Thin the change-history marks when there are more than
    /// [`DOWNSAMPLE_THRESHOLD`] of them.
    pub downsample: bool,
    pub palette: Palette,
}

impl Default for ViewOptions {
    fn default() -> Self {
        Self {
            width: 960.0,
            height: 600.0,
            mark_size: 4.0,
            axis: AxisMode::Index,
            downsample: false,
            palette: Palette::default(),
        }
    }
}

/// Fixed three-decimal formatting; negative zero prints as zero.
pub fn fmt_num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn dash(dashed: bool) -> &'static str {
    if dashed {
        " stroke-dasharray=\"4 3\""
    } else {
        ""
    }
}

fn emit_element(out: &mut String, element: &Element) {
    let f = fmt_num;
    // writing to a String cannot fail
    let _ = match element {
        Element::Line {
            from,
            to,
            stroke,
            width,
            dashed,
        } => writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"{}/>",
            f(from.0),
            f(from.1),
            f(to.0),
            f(to.1),
            escape(stroke),
            f(*width),
            dash(*dashed)
        ),
        Element::Polyline {
            class,
            segments,
            stroke,
            width,
            dashed,
        } => {
            let mut d = String::new();
            for segment in segments {
                for (i, (x, y)) in segment.iter().enumerate() {
                    if !d.is_empty() {
                        d.push(' ');
                    }
                    d.push(if i == 0 { 'M' } else { 'L' });
                    d.push_str(&f(*x));
                    d.push(' ');
                    d.push_str(&f(*y));
                }
            }
            writeln!(
                out,
                "<path class=\"{}\" d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{}/>",
                escape(class),
                d,
                escape(stroke),
                f(*width),
                dash(*dashed)
            )
        }
        Element::Mark {
            class,
            x,
            y,
            size,
            glyph,
            fill,
        } => {
            let h = size / 2.0;
            let class = escape(class);
            let fill = escape(fill);
            match glyph {
                Glyph::Square => writeln!(
                    out,
                    "<rect class=\"{class}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"/>",
                    f(x - h),
                    f(y - h),
                    f(*size),
                    f(*size)
                ),
                Glyph::Circle => writeln!(
                    out,
                    "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>",
                    f(*x),
                    f(*y),
                    f(h)
                ),
                Glyph::Triangle => writeln!(
                    out,
                    "<polygon class=\"{class}\" points=\"{},{} {},{} {},{}\" fill=\"{fill}\"/>",
                    f(*x),
                    f(y - h),
                    f(x + h),
                    f(y + h),
                    f(x - h),
                    f(y + h)
                ),
                Glyph::Diamond => writeln!(
                    out,
                    "<polygon class=\"{class}\" points=\"{},{} {},{} {},{} {},{}\" fill=\"{fill}\"/>",
                    f(*x),
                    f(y - h),
                    f(x + h),
                    f(*y),
                    f(*x),
                    f(y + h),
                    f(x - h),
                    f(*y)
                ),
            }
        }
        Element::Text {
            x,
            y,
            text,
            size,
            anchor,
            vertical,
        } => {
            let rotate = if *vertical {
                format!(" transform=\"rotate(-90 {} {})\"", f(*x), f(*y))
            } else {
                String::new()
            };
            writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"{}\"{}>{}</text>",
                f(*x),
                f(*y),
                f(*size),
                anchor.as_str(),
                rotate,
                escape(text)
            )
        }
    };
}

pub fn emit_svg(document: &ViewDocument) -> Vec<u8> {
    let mut out = String::new();
    let (w, h) = (fmt_num(document.width), fmt_num(document.height));
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(out, "<title>{}</title>", escape(document.kind.title()));
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#FFFFFF\"/>"
    );
    for element in &document.elements {
        emit_element(&mut out, element);
    }
    out.push_str("</svg>\n");
    out.into_bytes()
}
