//! Tab-separated exports of series, entities, phases and correlation data.
//!
//! Floats use Rust's shortest round-trip formatting, which is independent
//! of locale, so every file re-parses to the values that were written.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::coverage::CoverageLevel;
use crate::history::{RowLayout, Timeline};
use crate::ingest::{format_timestamp, parse_timestamp, Rev};
use crate::metrics::{derived_ratios, MetricsSeries, MetricsSnapshot};
use crate::phases::PhaseSegment;
use crate::stats::{CorrelationResult, ScatterPoint};

pub const METRICS_HEADER: &str =
    "rev\ttimestamp\tpLOC\ttLOC\tpClasses\ttClasses\ttCommands\tpClassRatio\tpLOCRatio\ttLOCRatio";
pub const ENTITIES_HEADER: &str = "id\tpath\trole\trow\tpaired_with\tintroduced_rev\tdeleted_rev\torphaned";
pub const PHASES_HEADER: &str = "rev_start\trev_end\tpLOC\ttLOC\tpClasses\ttClasses\ttCommands\tlabel";
pub const SCATTER_HEADER: &str = "release\ttLOCRatio\tlevel\tcoverage";
pub const CORRELATION_HEADER: &str = "level\trho\tn";

#[derive(Debug, Error)]
pub enum TsvError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn write_metrics_tsv<W: Write>(series: &MetricsSeries, mut out: W) -> io::Result<()> {
    writeln!(out, "{METRICS_HEADER}")?;
    for s in &series.snapshots {
        let r = derived_ratios(s);
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.rev,
            format_timestamp(&s.timestamp),
            s.p_loc,
            s.t_loc,
            s.p_classes,
            s.t_classes,
            s.t_commands,
            r.p_class_ratio,
            r.p_loc_ratio,
            r.t_loc_ratio
        )?;
    }
    Ok(())
}

/// One parsed metrics row: the snapshot and the three ratio columns
/// (pClassRatio, pLOCRatio, tLOCRatio) as written.
pub type MetricsRow = (MetricsSnapshot, [f64; 3]);

fn rows<R: BufRead>(reader: R, header: &str, columns: usize) -> Result<Vec<(usize, Vec<String>)>, TsvError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let n = idx + 1;
        if n == 1 {
            if line != header {
                return Err(TsvError::Malformed {
                    line: n,
                    message: "unexpected header".into(),
                });
            }
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(str::to_string).collect();
        if fields.len() != columns {
            return Err(TsvError::Malformed {
                line: n,
                message: format!("expected {columns} columns, found {}", fields.len()),
            });
        }
        out.push((n, fields));
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(line: usize, text: &str, name: &str) -> Result<T, TsvError> {
    text.parse().map_err(|_| TsvError::Malformed {
        line,
        message: format!("bad {name} value {text:?}"),
    })
}

pub fn parse_metrics_tsv<R: BufRead>(reader: R) -> Result<Vec<MetricsRow>, TsvError> {
    rows(reader, METRICS_HEADER, 10)?
        .into_iter()
        .map(|(line, f)| {
            let timestamp = parse_timestamp(&f[1]).ok_or_else(|| TsvError::Malformed {
                line,
                message: format!("bad timestamp {:?}", f[1]),
            })?;
            let snapshot = MetricsSnapshot {
                rev: Rev(field(line, &f[0], "rev")?),
                timestamp,
                p_loc: field(line, &f[2], "pLOC")?,
                t_loc: field(line, &f[3], "tLOC")?,
                p_classes: field(line, &f[4], "pClasses")?,
                t_classes: field(line, &f[5], "tClasses")?,
                t_commands: field(line, &f[6], "tCommands")?,
            };
            let ratios = [
                field(line, &f[7], "pClassRatio")?,
                field(line, &f[8], "pLOCRatio")?,
                field(line, &f[9], "tLOCRatio")?,
            ];
            Ok((snapshot, ratios))
        })
        .collect()
}

fn opt<T: std::fmt::Display>(value: Option<T>) -> String {
    value.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn write_entities_tsv<W: Write>(timeline: &Timeline, layout: &RowLayout, mut out: W) -> io::Result<()> {
    writeln!(out, "{ENTITIES_HEADER}")?;
    for e in &timeline.entities {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            e.id.0,
            e.path,
            e.role.as_str(),
            layout.row(e.id),
            opt(e.paired_with.map(|p| p.0)),
            e.introduced_rev,
            opt(e.deleted_rev),
            e.orphaned
        )?;
    }
    Ok(())
}

pub fn write_phases_tsv<W: Write>(segments: &[PhaseSegment], mut out: W) -> io::Result<()> {
    writeln!(out, "{PHASES_HEADER}")?;
    for s in segments {
        write!(out, "{}\t{}", s.start, s.end)?;
        for t in s.trends {
            write!(out, "\t{t}")?;
        }
        writeln!(out, "\t{}", s.label_or_unclassified())?;
    }
    Ok(())
}

pub fn write_scatter_tsv<W: Write>(points: &[ScatterPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "{SCATTER_HEADER}")?;
    for p in points {
        writeln!(out, "{}\t{}\t{}\t{}", p.release, p.t_loc_ratio, p.level, p.coverage)?;
    }
    Ok(())
}

pub fn parse_scatter_tsv<R: BufRead>(reader: R) -> Result<Vec<ScatterPoint>, TsvError> {
    rows(reader, SCATTER_HEADER, 4)?
        .into_iter()
        .map(|(line, f)| {
            Ok(ScatterPoint {
                release: f[0].clone(),
                t_loc_ratio: field(line, &f[1], "tLOCRatio")?,
                level: CoverageLevel::from_name(&f[2]).ok_or_else(|| TsvError::Malformed {
                    line,
                    message: format!("unknown level {:?}", f[2]),
                })?,
                coverage: field(line, &f[3], "coverage")?,
            })
        })
        .collect()
}

/// Undefined coefficients are written as `undefined`.
pub fn write_correlation_tsv<W: Write>(results: &[CorrelationResult], mut out: W) -> io::Result<()> {
    writeln!(out, "{CORRELATION_HEADER}")?;
    for r in results {
        match &r.rho {
            Ok(rho) => writeln!(out, "{}\t{}\t{}", r.level, rho, r.n)?,
            Err(_) => writeln!(out, "{}\tundefined\t{}", r.level, r.n)?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::StatsError;
    use chrono::DateTime;

    fn series(n: usize) -> MetricsSeries {
        let t = DateTime::from_timestamp(1_200_000_000, 0).unwrap();
        MetricsSeries {
            snapshots: (0..n)
                .map(|i| MetricsSnapshot {
                    p_loc: 100 * i as u64 + 7,
                    t_loc: 3 * i as u64,
                    p_classes: i as u64 + 1,
                    t_classes: i as u64 / 2,
                    t_commands: i as u64,
                    ..MetricsSnapshot::empty(Rev::from_index(i), t + chrono::TimeDelta::seconds(i as i64))
                })
                .collect(),
        }
    }

    #[test]
    fn empty_series_is_header_only() {
        let mut buf = Vec::new();
        write_metrics_tsv(&MetricsSeries::default(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{METRICS_HEADER}\n"));
    }

    #[test]
    fn metrics_round_trip() {
        let s = series(3);
        let mut buf = Vec::new();
        write_metrics_tsv(&s, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().lines().count(), 4);
        let parsed = parse_metrics_tsv(buf.as_slice()).unwrap();
        for ((snap, r), orig) in parsed.iter().zip(&s.snapshots) {
            assert_eq!(snap, orig);
            let d = derived_ratios(orig);
            assert_eq!(*r, [d.p_class_ratio, d.p_loc_ratio, d.t_loc_ratio]);
        }
    }

    #[test]
    fn scatter_round_trip() {
        let points = vec![
            ScatterPoint {
                release: "2.4".into(),
                t_loc_ratio: 6.5,
                level: CoverageLevel::Block,
                coverage: 84.0,
            },
            ScatterPoint {
                release: "0.14".into(),
                t_loc_ratio: 7.0,
                level: CoverageLevel::Block,
                coverage: 8.9,
            },
        ];
        let mut buf = Vec::new();
        write_scatter_tsv(&points, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("2.4\t6.5\tblock\t84\n"));
        assert_eq!(parse_scatter_tsv(buf.as_slice()).unwrap(), points);
    }

    #[test]
    fn correlation_marks_undefined() {
        let results = vec![
            CorrelationResult {
                level: CoverageLevel::Class,
                rho: Ok(0.5),
                n: 3,
            },
            CorrelationResult {
                level: CoverageLevel::Method,
                rho: Err(StatsError::TooFewPoints(1)),
                n: 1,
            },
        ];
        let mut buf = Vec::new();
        write_correlation_tsv(&results, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "level\trho\tn\nclass\t0.5\t3\nmethod\tundefined\t1\n"
        );
    }

    #[test]
    fn bad_header_rejected() {
        assert!(parse_scatter_tsv("nope\n".as_bytes()).is_err());
    }
}
