//! Per-release coverage measurements.
//!
//! One line per release: `label class method block statement`, each value a
//! percentage or `-` when that level was not measured.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoverageError {
    #[error("coverage line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("coverage line {line}: {level} coverage {value} is outside [0, 100]")]
    OutOfRange {
        line: usize,
        level: CoverageLevel,
        value: f64,
    },
    #[error("coverage line {line}: release {label:?} listed twice")]
    DuplicateRelease { line: usize, label: String },
    #[error("reading coverage report: {0}")]
    Io(#[from] io::Error),
}

impl CoverageError {
    pub fn line(&self) -> Option<usize> {
        match self {
            CoverageError::Malformed { line, .. }
            | CoverageError::OutOfRange { line, .. }
            | CoverageError::DuplicateRelease { line, .. } => Some(*line),
            CoverageError::Io(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoverageLevel {
    Class,
    Method,
    Block,
    Statement,
}

impl CoverageLevel {
    /// File column order.
    pub const ALL: [CoverageLevel; 4] = [
        CoverageLevel::Class,
        CoverageLevel::Method,
        CoverageLevel::Block,
        CoverageLevel::Statement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoverageLevel::Class => "class",
            CoverageLevel::Method => "method",
            CoverageLevel::Block => "block",
            CoverageLevel::Statement => "statement",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name() == name)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for CoverageLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRecord {
    pub release: String,
    /// Indexed by [`CoverageLevel::index`]; `None` means not measured.
    pub levels: [Option<f64>; 4],
}

impl CoverageRecord {
    pub fn get(&self, level: CoverageLevel) -> Option<f64> {
        self.levels[level.index()]
    }

    pub fn available(&self) -> impl Iterator<Item = (CoverageLevel, f64)> + '_ {
        CoverageLevel::ALL
            .into_iter()
            .filter_map(|l| self.get(l).map(|v| (l, v)))
    }
}

fn parse_value(token: &str, level: CoverageLevel, line: usize) -> Result<Option<f64>, CoverageError> {
    if token == "-" {
        return Ok(None);
    }
    let number = token.strip_suffix('%').unwrap_or(token);
    let value: f64 = number.parse().map_err(|_| CoverageError::Malformed {
        line,
        message: format!("{level} coverage {token:?} is not a number"),
    })?;
    if !(0.0..=100.0).contains(&value) {
        return Err(CoverageError::OutOfRange { line, level, value });
    }
    Ok(Some(value))
}

pub fn parse_coverage_report<R: BufRead>(reader: R) -> Result<Vec<CoverageRecord>, CoverageError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in reader.lines().enumerate() {
        let line = idx + 1;
        let raw = raw?;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != 5 {
            return Err(CoverageError::Malformed {
                line,
                message: format!("expected a label and four values, found {} fields", tokens.len()),
            });
        }
        let label = tokens[0].to_string();
        let mut levels = [None; 4];
        for (slot, (level, token)) in levels.iter_mut().zip(CoverageLevel::ALL.into_iter().zip(&tokens[1..])) {
            *slot = parse_value(token, level, line)?;
        }
        if !seen.insert(label.clone()) {
            return Err(CoverageError::DuplicateRelease { line, label });
        }
        records.push(CoverageRecord { release: label, levels });
    }
    Ok(records)
}

pub fn serialize_coverage<W: Write>(records: &[CoverageRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "# release class method block statement")?;
    for record in records {
        write!(out, "{}", record.release)?;
        for value in record.levels {
            match value {
                Some(v) => write!(out, "\t{v}")?,
                None => write!(out, "\t-")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}
