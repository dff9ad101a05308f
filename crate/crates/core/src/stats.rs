//! Test-code share against coverage: scatter points and Pearson correlation.

use std::collections::HashMap;

use thiserror::Error;

use crate::coverage::{CoverageLevel, CoverageRecord};
use crate::ingest::{ReleaseMarker, Rev};
use crate::metrics::{derived_ratios, MetricsSeries};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StatsError {
    #[error("sample lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("correlation needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("correlation undefined: a variable is constant")]
    ConstantVariable,
    #[error("correlation undefined: non-finite sample value")]
    NonFinite,
    #[error("coverage refers to unknown release {0:?}")]
    UnknownRelease(String),
    #[error("release {label:?} points at {rev}, outside the metrics series")]
    ReleaseOutOfRange { label: String, rev: Rev },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub release: String,
    pub t_loc_ratio: f64,
    pub level: CoverageLevel,
    pub coverage: f64,
}

/// One point per (release, measured level), pairing the coverage value with
/// the tLOCRatio of the release commit. Points follow record order, then
/// level order.
pub fn build_scatter(
    series: &MetricsSeries,
    releases: &[ReleaseMarker],
    coverage: &[CoverageRecord],
) -> Result<Vec<ScatterPoint>, StatsError> {
    let by_label: HashMap<&str, Rev> = releases.iter().map(|m| (m.label.as_str(), m.rev)).collect();
    let mut points = Vec::new();
    for record in coverage {
        let rev = *by_label
            .get(record.release.as_str())
            .ok_or_else(|| StatsError::UnknownRelease(record.release.clone()))?;
        let snapshot = series.at(rev).ok_or_else(|| StatsError::ReleaseOutOfRange {
            label: record.release.clone(),
            rev,
        })?;
        let t_loc_ratio = derived_ratios(snapshot).t_loc_ratio;
        points.extend(record.available().map(|(level, value)| ScatterPoint {
            release: record.release.clone(),
            t_loc_ratio,
            level,
            coverage: value,
        }));
    }
    Ok(points)
}

/// Pearson's product-moment correlation, accumulated in one pass with
/// running means so large offsets do not cancel.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFewPoints(xs.len()));
    }
    let (mut mean_x, mut mean_y) = (0.0, 0.0);
    let (mut m2x, mut m2y, mut cxy) = (0.0, 0.0, 0.0);
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if !(x.is_finite() && y.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        let n = (i + 1) as f64;
        let dx = x - mean_x;
        let dy = y - mean_y;
        mean_x += dx / n;
        mean_y += dy / n;
        let dx_after = x - mean_x;
        let dy_after = y - mean_y;
        m2x += dx * dx_after;
        m2y += dy * dy_after;
        cxy += dx * dy_after;
    }
    if m2x <= 0.0 || m2y <= 0.0 {
        return Err(StatsError::ConstantVariable);
    }
    let rho = cxy / (m2x.sqrt() * m2y.sqrt());
    if !rho.is_finite() {
        return Err(StatsError::NonFinite);
    }
    Ok(rho.clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub level: CoverageLevel,
    /// `Err` when the coefficient is undefined for this level.
    pub rho: Result<f64, StatsError>,
    pub n: usize,
}

/// One result per coverage level, in level order, whether or not the level
/// has enough points.
pub fn correlate(points: &[ScatterPoint]) -> Vec<CorrelationResult> {
    CoverageLevel::ALL
        .into_iter()
        .map(|level| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = points
                .iter()
                .filter(|p| p.level == level)
                .map(|p| (p.t_loc_ratio, p.coverage))
                .unzip();
            CorrelationResult {
                level,
                rho: pearson(&xs, &ys),
                n: xs.len(),
            }
        })
        .collect()
}
