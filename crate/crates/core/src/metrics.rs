//! Modified Hausdorff distance between resampled trajectories and the
//! threshold-filtered stability summary.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeError, Trajectory};

/// Below this, a per-cycle MHD is treated as noise.
pub const DEFAULT_THRESHOLD: f64 = 0.2;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("distance between point sets needs both sets nonempty")]
    EmptySet,
    #[error("resampling spacing must be positive, got {0}")]
    InvalidSpacing(f64),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<(f64, f64)>,
}

impl PointSet {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        PointSet { points }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl From<Vec<(f64, f64)>> for PointSet {
    fn from(points: Vec<(f64, f64)>) -> Self {
        PointSet::new(points)
    }
}

/// Nearest-neighbour distances against `b`, with `b` sorted by x so the scan
/// from each query can stop once the x gap alone exceeds the best distance.
struct SortedByX {
    pts: Vec<(f64, f64)>,
}

impl SortedByX {
    fn new(b: &[(f64, f64)]) -> Self {
        let mut pts = b.to_vec();
        pts.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
        SortedByX { pts }
    }

    fn nearest(&self, (x, y): (f64, f64)) -> f64 {
        let split = self.pts.partition_point(|p| p.0 < x);
        let mut best_sq = f64::INFINITY;
        for p in &self.pts[split..] {
            let dx = p.0 - x;
            if dx * dx > best_sq {
                break;
            }
            best_sq = best_sq.min(dx * dx + (p.1 - y).powi(2));
        }
        for p in self.pts[..split].iter().rev() {
            let dx = x - p.0;
            if dx * dx > best_sq {
                break;
            }
            best_sq = best_sq.min(dx * dx + (p.1 - y).powi(2));
        }
        best_sq.sqrt()
    }
}

/// Mean over `a` of the distance to the nearest point of `b`.
pub fn directed_mhd(a: &PointSet, b: &PointSet) -> Result<f64, MetricsError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricsError::EmptySet);
    }
    let index = SortedByX::new(&b.points);
    let sum: f64 = a.points.iter().map(|&p| index.nearest(p)).sum();
    Ok(sum / a.len() as f64)
}

/// Symmetric form: the larger of the two directed distances.
pub fn mhd(a: &PointSet, b: &PointSet) -> Result<f64, MetricsError> {
    Ok(directed_mhd(a, b)?.max(directed_mhd(b, a)?))
}

/// Positions every `spacing` meters along `t`, endpoints included.
pub fn trajectory_points(t: &Trajectory, spacing: f64) -> Result<PointSet, MetricsError> {
    if !(spacing > 0.0) {
        return Err(MetricsError::InvalidSpacing(spacing));
    }
    if t.is_empty() {
        return Err(LatticeError::EmptyTrajectory.into());
    }
    Ok(PointSet::new(t.resample(spacing)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub label: String,
    /// Absent for the always-replan configuration.
    pub alpha: Option<f64>,
    /// Absent when no value reaches the threshold.
    pub mean_filtered_mhd: Option<f64>,
    pub filtered_count: usize,
    pub zero_count: usize,
    pub raw_count: usize,
    pub threshold: f64,
}

pub fn summarize(
    mhds: &[f64],
    threshold: f64,
    label: &str,
    alpha: Option<f64>,
) -> StabilitySummary {
    let kept: Vec<f64> = mhds.iter().copied().filter(|&v| v >= threshold).collect();
    let mean_filtered_mhd = if kept.is_empty() {
        None
    } else {
        Some(kept.iter().sum::<f64>() / kept.len() as f64)
    };
    StabilitySummary {
        label: label.to_string(),
        alpha,
        mean_filtered_mhd,
        filtered_count: kept.len(),
        zero_count: mhds.iter().filter(|&&v| v == 0.0).count(),
        raw_count: mhds.len(),
        threshold,
    }
}

/// CSV with header `label,alpha,mean_filtered_mhd,filtered_count,zero_count,raw_count,threshold`;
/// absent values are empty fields.
pub fn write_summary_csv<W: std::io::Write>(
    out: W,
    rows: &[StabilitySummary],
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary_csv<R: std::io::Read>(input: R) -> Result<Vec<StabilitySummary>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}
