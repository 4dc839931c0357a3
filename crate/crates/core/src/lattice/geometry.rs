use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Samples used to approximate curved edges by a polyline.
pub const CURVE_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Radians, counter-clockwise from +x.
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Pose { x, y, heading }
    }

    pub fn position(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        ((self.x - x).powi(2) + (self.y - y).powi(2)).sqrt()
    }
}

/// How an edge's geometry is reconstructed from its two end poses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeShape {
    /// Cubic Hermite curve with end tangents along the pose headings,
    /// tangent magnitude equal to the chord length.
    Curve,
    /// Straight segment with linearly blended heading.
    Line,
}

pub fn wrap_angle(a: f64) -> f64 {
    let mut a = (a + PI).rem_euclid(2.0 * PI) - PI;
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

fn hermite(a: &Pose, b: &Pose, t: f64) -> (f64, f64, f64) {
    let chord = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
    let (m0x, m0y) = (chord * a.heading.cos(), chord * a.heading.sin());
    let (m1x, m1y) = (chord * b.heading.cos(), chord * b.heading.sin());
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let x = h00 * a.x + h10 * m0x + h01 * b.x + h11 * m1x;
    let y = h00 * a.y + h10 * m0y + h01 * b.y + h11 * m1y;
    // derivative for the heading
    let d00 = 6.0 * t2 - 6.0 * t;
    let d10 = 3.0 * t2 - 4.0 * t + 1.0;
    let d01 = -6.0 * t2 + 6.0 * t;
    let d11 = 3.0 * t2 - 2.0 * t;
    let dx = d00 * a.x + d10 * m0x + d01 * b.x + d11 * m1x;
    let dy = d00 * a.y + d10 * m0y + d01 * b.y + d11 * m1y;
    (x, y, dy.atan2(dx))
}

/// Dense polyline for an edge, first and last points equal to the end poses.
pub fn edge_polyline(a: &Pose, b: &Pose, shape: EdgeShape) -> Vec<Pose> {
    match shape {
        EdgeShape::Line => vec![*a, *b],
        EdgeShape::Curve => {
            let mut pts = Vec::with_capacity(CURVE_SAMPLES + 1);
            pts.push(*a);
            for k in 1..CURVE_SAMPLES {
                let (x, y, h) = hermite(a, b, k as f64 / CURVE_SAMPLES as f64);
                pts.push(Pose::new(x, y, h));
            }
            pts.push(*b);
            pts
        }
    }
}

pub fn polyline_length(pts: &[Pose]) -> f64 {
    pts.windows(2)
        .map(|w| w[0].distance_to(w[1].x, w[1].y))
        .sum()
}

/// Pose at arc-length fraction `frac` in [0, 1] along an edge.
pub fn edge_pose_at(a: &Pose, b: &Pose, shape: EdgeShape, frac: f64) -> Pose {
    let frac = frac.clamp(0.0, 1.0);
    if frac == 0.0 {
        return *a;
    }
    if frac == 1.0 {
        return *b;
    }
    match shape {
        EdgeShape::Line => Pose::new(
            a.x + (b.x - a.x) * frac,
            a.y + (b.y - a.y) * frac,
            wrap_angle(a.heading + wrap_angle(b.heading - a.heading) * frac),
        ),
        EdgeShape::Curve => {
            let pts = edge_polyline(a, b, shape);
            let total = polyline_length(&pts);
            let target = frac * total;
            let mut acc = 0.0;
            for w in pts.windows(2) {
                let seg = w[0].distance_to(w[1].x, w[1].y);
                if acc + seg >= target && seg > 0.0 {
                    let u = (target - acc) / seg;
                    let h = w[0].heading + wrap_angle(w[1].heading - w[0].heading) * u;
                    return Pose::new(
                        w[0].x + (w[1].x - w[0].x) * u,
                        w[0].y + (w[1].y - w[0].y) * u,
                        wrap_angle(h),
                    );
                }
                acc += seg;
            }
            *b
        }
    }
}

/// Appends every grid cell touched by the segment `a -> b` (supercover),
/// in traversal order. Coordinates are in cell units: cell `(i, j)` spans
/// `[i, i+1) x [j, j+1)`. Passing exactly through a corner adds both
/// side cells.
pub fn trace_segment(a: (f64, f64), b: (f64, f64), out: &mut Vec<(i32, i32)>) {
    let mut i = a.0.floor() as i32;
    let mut j = a.1.floor() as i32;
    let (ei, ej) = (b.0.floor() as i32, b.1.floor() as i32);
    push_cell(out, (i, j));
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let step_i = if dx > 0.0 { 1 } else { -1 };
    let step_j = if dy > 0.0 { 1 } else { -1 };
    let boundary = |p: f64, cell: i32, d: f64| -> f64 {
        if d > 0.0 {
            ((cell + 1) as f64 - p) / d
        } else if d < 0.0 {
            (p - cell as f64) / -d
        } else {
            f64::INFINITY
        }
    };
    let mut t_x = boundary(a.0, i, dx);
    let mut t_y = boundary(a.1, j, dy);
    let delta_x = if dx != 0.0 { 1.0 / dx.abs() } else { f64::INFINITY };
    let delta_y = if dy != 0.0 { 1.0 / dy.abs() } else { f64::INFINITY };
    let max_steps = (ei - i).unsigned_abs() + (ej - j).unsigned_abs() + 2;
    for _ in 0..max_steps {
        if (i, j) == (ei, ej) {
            break;
        }
        let t = t_x.min(t_y);
        if t > 1.0 + 1e-12 {
            break;
        }
        if (t_x - t_y).abs() < 1e-9 {
            push_cell(out, (i + step_i, j));
            push_cell(out, (i, j + step_j));
            i += step_i;
            j += step_j;
            t_x += delta_x;
            t_y += delta_y;
        } else if t_x < t_y {
            i += step_i;
            t_x += delta_x;
        } else {
            j += step_j;
            t_y += delta_y;
        }
        push_cell(out, (i, j));
    }
}

fn push_cell(out: &mut Vec<(i32, i32)>, c: (i32, i32)) {
    if !out.contains(&c) {
        out.push(c);
    }
}

/// Supercover of a polyline given in cell units.
pub fn trace_polyline(pts: &[(f64, f64)]) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    if let Some(first) = pts.first() {
        push_cell(&mut out, (first.0.floor() as i32, first.1.floor() as i32));
    }
    for w in pts.windows(2) {
        trace_segment(w[0], w[1], &mut out);
    }
    out
}
