use serde::Serialize;

use super::geometry::{edge_polyline, polyline_length, trace_polyline, EdgeShape, Pose};
use super::LatticeError;

const DIRECTIONS_8: [(i32, i32); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

const DIRECTIONS_16: [(i32, i32); 16] = [
    (1, 0),
    (2, 1),
    (1, 1),
    (1, 2),
    (0, 1),
    (-1, 2),
    (-1, 1),
    (-2, 1),
    (-1, 0),
    (-2, -1),
    (-1, -1),
    (-1, -2),
    (0, -1),
    (1, -2),
    (1, -1),
    (2, -1),
];

#[derive(Debug, Clone, PartialEq)]
pub struct MotionPrimitive {
    pub start_heading: u8,
    pub end_heading: u8,
    /// End offset in cells.
    pub dx: i32,
    pub dy: i32,
    /// Heading-index change, signed.
    pub dh: i8,
    pub arc_length: f64,
    pub shape: EdgeShape,
    /// Cells swept, relative to the start cell, in traversal order.
    pub swath: Vec<(i32, i32)>,
}

/// Recombinant control set: every primitive starts and ends on the lattice
/// grid, so equal net offsets reach identical states.
#[derive(Debug, Clone)]
pub struct ControlSet {
    headings: u8,
    spacing_cells: i32,
    resolution: f64,
    primitives: Vec<MotionPrimitive>,
    by_heading: Vec<Vec<usize>>,
}

impl ControlSet {
    /// Straight, gentle-left and gentle-right primitives for every heading.
    ///
    /// A turn from heading `k` to `k±1` ends at the sum of the two heading
    /// direction vectors, scaled by the lattice spacing.
    pub fn build(headings: u8, spacing: f64, resolution: f64) -> Result<Self, LatticeError> {
        let dirs: &[(i32, i32)] = match headings {
            8 => &DIRECTIONS_8,
            16 => &DIRECTIONS_16,
            other => return Err(LatticeError::UnsupportedHeadingCount(other)),
        };
        if !(resolution > 0.0) {
            return Err(LatticeError::InvalidSpacing(spacing, resolution));
        }
        let cells = (spacing / resolution).round();
        if cells < 1.0 || (cells * resolution - spacing).abs() > 1e-9 {
            return Err(LatticeError::InvalidSpacing(spacing, resolution));
        }
        let spacing_cells = cells as i32;
        let n = headings as i32;
        let mut primitives = Vec::new();
        let mut by_heading = vec![Vec::new(); headings as usize];
        for k in 0..n {
            for dh in [0i32, 1, -1] {
                let end = (k + dh).rem_euclid(n);
                let (ax, ay) = dirs[k as usize];
                let (dx, dy) = if dh == 0 {
                    (ax, ay)
                } else {
                    let (bx, by) = dirs[end as usize];
                    (ax + bx, ay + by)
                };
                let (dx, dy) = (dx * spacing_cells, dy * spacing_cells);
                let shape = if dh == 0 { EdgeShape::Line } else { EdgeShape::Curve };
                let start = Pose::new(0.5, 0.5, heading_angle(headings, k as u8));
                let stop = Pose::new(
                    0.5 + dx as f64,
                    0.5 + dy as f64,
                    heading_angle(headings, end as u8),
                );
                let pts = edge_polyline(&start, &stop, shape);
                let arc_length = polyline_length(&pts) * resolution;
                let swath =
                    trace_polyline(&pts.iter().map(|p| (p.x, p.y)).collect::<Vec<_>>());
                by_heading[k as usize].push(primitives.len());
                primitives.push(MotionPrimitive {
                    start_heading: k as u8,
                    end_heading: end as u8,
                    dx,
                    dy,
                    dh: dh as i8,
                    arc_length,
                    shape,
                    swath,
                });
            }
        }
        Ok(ControlSet {
            headings,
            spacing_cells,
            resolution,
            primitives,
            by_heading,
        })
    }

    /// Adds rotations by one heading step without translation, for vehicles
    /// that can turn on the spot. A rotation by `theta` radians is costed as
    /// an arc of `arm * theta` meters (the wheel travel of a skid-steer base
    /// with half-track `arm`) through the start cell.
    pub fn with_in_place_turns(mut self, arm: f64) -> Result<Self, LatticeError> {
        if !(arm > 0.0 && arm.is_finite()) {
            return Err(LatticeError::InvalidParameter(format!(
                "in-place turn arm must be positive, got {arm}"
            )));
        }
        let n = self.headings as i32;
        for k in 0..n {
            for dh in [1i32, -1] {
                let end = (k + dh).rem_euclid(n);
                let theta = super::geometry::wrap_angle(
                    self.heading_angle(end as u8) - self.heading_angle(k as u8),
                )
                .abs();
                self.by_heading[k as usize].push(self.primitives.len());
                self.primitives.push(MotionPrimitive {
                    start_heading: k as u8,
                    end_heading: end as u8,
                    dx: 0,
                    dy: 0,
                    dh: dh as i8,
                    arc_length: arm * theta,
                    shape: EdgeShape::Line,
                    swath: vec![(0, 0)],
                });
            }
        }
        Ok(self)
    }

    pub fn headings(&self) -> u8 {
        self.headings
    }

    pub fn spacing_cells(&self) -> i32 {
        self.spacing_cells
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn primitives(&self) -> &[MotionPrimitive] {
        &self.primitives
    }

    pub fn for_heading(&self, heading: u8) -> impl Iterator<Item = &MotionPrimitive> {
        self.by_heading[heading as usize]
            .iter()
            .map(move |&k| &self.primitives[k])
    }

    pub fn heading_angle(&self, heading: u8) -> f64 {
        heading_angle(self.headings, heading)
    }

    /// Heading index whose angle is closest to `angle`.
    pub fn nearest_heading(&self, angle: f64) -> u8 {
        (0..self.headings)
            .min_by(|&a, &b| {
                let da = super::geometry::wrap_angle(angle - self.heading_angle(a)).abs();
                let db = super::geometry::wrap_angle(angle - self.heading_angle(b)).abs();
                da.total_cmp(&db)
            })
            .unwrap_or(0)
    }

    /// The primitive connecting two lattice states, if any.
    pub fn connecting(
        &self,
        from: &super::LatticeState,
        to: &super::LatticeState,
    ) -> Option<&MotionPrimitive> {
        self.for_heading(from.heading).find(|p| {
            p.end_heading == to.heading && from.x + p.dx == to.x && from.y + p.dy == to.y
        })
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct PrimitiveJson {
            h0: u8,
            dx: i32,
            dy: i32,
            dh: i8,
            arc: f64,
            swath: Vec<[i32; 2]>,
        }
        #[derive(Serialize)]
        #[allow(non_snake_case)]
        struct SetJson {
            H: u8,
            spacing: f64,
            primitives: Vec<PrimitiveJson>,
        }
        let set = SetJson {
            H: self.headings,
            spacing: self.spacing_cells as f64 * self.resolution,
            primitives: self
                .primitives
                .iter()
                .map(|p| PrimitiveJson {
                    h0: p.start_heading,
                    dx: p.dx,
                    dy: p.dy,
                    dh: p.dh,
                    arc: p.arc_length,
                    swath: p.swath.iter().map(|&(i, j)| [i, j]).collect(),
                })
                .collect(),
        };
        serde_json::to_string(&set).expect("control set serializes")
    }
}

pub fn heading_angle(headings: u8, heading: u8) -> f64 {
    let (x, y) = match headings {
        8 => DIRECTIONS_8[heading as usize % 8],
        _ => DIRECTIONS_16[heading as usize % 16],
    };
    (y as f64).atan2(x as f64)
}
