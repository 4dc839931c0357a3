use serde::{Deserialize, Serialize};

use super::geometry::{edge_polyline, edge_pose_at, polyline_length, EdgeShape, Pose};
use super::{swath_duration, ControlSet, LatticeError, LatticeState};
use crate::gridmap::CostMap;

/// The edge arriving at a waypoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub shape: EdgeShape,
    pub arc_length: f64,
    /// Absolute cell indices swept by the edge.
    pub swath: Vec<(i32, i32)>,
    /// Last evaluated traversal time; kept when the edge becomes infeasible.
    pub duration: f64,
    pub feasible: bool,
}

impl Edge {
    pub fn evaluate(map: &CostMap, shape: EdgeShape, arc_length: f64, swath: Vec<(i32, i32)>) -> Option<Edge> {
        let duration = swath_duration(map, arc_length, swath.iter().copied())?;
        Some(Edge {
            shape,
            arc_length,
            swath,
            duration,
            feasible: true,
        })
    }

    fn recosted(&self, map: &CostMap) -> Edge {
        match swath_duration(map, self.arc_length, self.swath.iter().copied()) {
            Some(duration) => Edge {
                duration,
                feasible: true,
                ..self.clone()
            },
            None => Edge {
                feasible: false,
                ..self.clone()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub pose: Pose,
    pub arrival_time: f64,
    /// `None` only for the first waypoint.
    pub edge: Option<Edge>,
}

/// Timed pose sequence; cost is total duration in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub id: u64,
    pub birth_cycle: u32,
    waypoints: Vec<Waypoint>,
}

impl Trajectory {
    pub fn new(id: u64, birth_cycle: u32, start: Pose) -> Self {
        Trajectory {
            id,
            birth_cycle,
            waypoints: vec![Waypoint {
                pose: start,
                arrival_time: 0.0,
                edge: None,
            }],
        }
    }

    pub fn push(&mut self, pose: Pose, edge: Edge) {
        let arrival_time = self.duration() + edge.duration;
        self.waypoints.push(Waypoint {
            pose,
            arrival_time,
            edge: Some(edge),
        });
    }

    /// Builds a trajectory from consecutive lattice states of a search path.
    pub fn from_lattice_path(
        path: &[LatticeState],
        controls: &ControlSet,
        map: &CostMap,
        id: u64,
        birth_cycle: u32,
    ) -> Result<Self, LatticeError> {
        let first = path.first().ok_or(LatticeError::EmptyTrajectory)?;
        let mut t = Trajectory::new(id, birth_cycle, first.pose(map, controls));
        for w in path.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let broken = || LatticeError::BrokenPath(*a, *b);
            let p = controls.connecting(a, b).ok_or_else(broken)?;
            let swath = p.swath.iter().map(|&(i, j)| (a.x + i, a.y + j)).collect();
            let edge = Edge::evaluate(map, p.shape, p.arc_length, swath).ok_or_else(broken)?;
            t.push(b.pose(map, controls), edge);
        }
        Ok(t)
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn start(&self) -> Pose {
        self.waypoints[0].pose
    }

    pub fn end(&self) -> Pose {
        self.waypoints[self.waypoints.len() - 1].pose
    }

    pub fn duration(&self) -> f64 {
        self.waypoints.last().map_or(0.0, |w| w.arrival_time)
    }

    pub fn length(&self) -> f64 {
        self.edges().map(|e| e.arc_length).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.waypoints.iter().filter_map(|w| w.edge.as_ref())
    }

    pub fn is_feasible(&self) -> bool {
        self.edges().all(|e| e.feasible)
    }

    /// Every edge traversable on `map`.
    pub fn is_collision_free(&self, map: &CostMap) -> bool {
        self.edges()
            .all(|e| swath_duration(map, e.arc_length, e.swath.iter().copied()).is_some())
    }

    /// Index of the waypoint closest to `(x, y)`; ties go to the earlier one.
    pub fn nearest_waypoint(&self, x: f64, y: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, w) in self.waypoints.iter().enumerate() {
            let d = w.pose.distance_to(x, y);
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        best
    }

    /// Arc length at which the path geometry passes closest to `(x, y)`;
    /// ties go to the earlier point.
    pub fn project(&self, x: f64, y: f64) -> f64 {
        let mut best = (self.start().distance_to(x, y), 0.0);
        let mut acc = 0.0;
        for k in 1..self.waypoints.len() {
            let (a, b) = (&self.waypoints[k - 1], &self.waypoints[k]);
            let e = b.edge.as_ref().expect("interior waypoint has an edge");
            let poly = edge_polyline(&a.pose, &b.pose, e.shape);
            let poly_len = polyline_length(&poly);
            let mut along = 0.0;
            for w in poly.windows(2) {
                let (p, q) = (w[0].position(), w[1].position());
                let seg = ((q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)).sqrt();
                let (d, t) = point_segment(p, q, (x, y));
                if d < best.0 {
                    let frac = if poly_len > 0.0 { (along + t * seg) / poly_len } else { 0.0 };
                    best = (d, acc + frac * e.arc_length);
                }
                along += seg;
            }
            acc += e.arc_length;
        }
        best.1
    }

    /// Index of the first waypoint at or beyond arc length `s`, clamped to
    /// the last waypoint.
    pub fn waypoint_at_or_after(&self, s: f64) -> usize {
        let mut acc = 0.0;
        for (k, w) in self.waypoints.iter().enumerate() {
            if let Some(e) = &w.edge {
                acc += e.arc_length;
            }
            if acc >= s - 1e-9 {
                return k;
            }
        }
        self.waypoints.len() - 1
    }

    /// Drops the waypoints before `from`; arrival times restart at zero.
    pub fn trimmed(&self, from: usize) -> Trajectory {
        let from = from.min(self.waypoints.len() - 1);
        let mut t = Trajectory::new(self.id, self.birth_cycle, self.waypoints[from].pose);
        for w in &self.waypoints[from + 1..] {
            t.push(w.pose, w.edge.clone().expect("interior waypoint has an edge"));
        }
        t
    }

    /// Same shape with every edge re-timed against `map`. The flag is true
    /// when some edge is no longer traversable.
    pub fn recosted(&self, map: &CostMap) -> (Trajectory, bool) {
        let mut t = Trajectory::new(self.id, self.birth_cycle, self.start());
        let mut collision = false;
        for w in &self.waypoints[1..] {
            let edge = w.edge.as_ref().expect("interior waypoint has an edge").recosted(map);
            collision |= !edge.feasible;
            t.push(w.pose, edge);
        }
        (t, collision)
    }

    pub fn pose_at_time(&self, t: f64) -> Pose {
        if t <= 0.0 {
            return self.start();
        }
        for k in 1..self.waypoints.len() {
            let (a, b) = (&self.waypoints[k - 1], &self.waypoints[k]);
            if t <= b.arrival_time {
                let span = b.arrival_time - a.arrival_time;
                let frac = if span > 0.0 { (t - a.arrival_time) / span } else { 1.0 };
                let shape = b.edge.as_ref().map_or(EdgeShape::Line, |e| e.shape);
                return edge_pose_at(&a.pose, &b.pose, shape, frac);
            }
        }
        self.end()
    }

    pub fn pose_at_arc(&self, s: f64) -> Pose {
        if s <= 0.0 {
            return self.start();
        }
        let mut acc = 0.0;
        for k in 1..self.waypoints.len() {
            let (a, b) = (&self.waypoints[k - 1], &self.waypoints[k]);
            let e = b.edge.as_ref().expect("interior waypoint has an edge");
            if s <= acc + e.arc_length {
                let frac = if e.arc_length > 0.0 { (s - acc) / e.arc_length } else { 1.0 };
                return edge_pose_at(&a.pose, &b.pose, e.shape, frac);
            }
            acc += e.arc_length;
        }
        self.end()
    }

    /// Positions every `spacing` meters of arc length, plus the end point.
    pub fn resample(&self, spacing: f64) -> Vec<(f64, f64)> {
        let total = self.length();
        let mut pts = vec![self.start().position()];
        if total <= 1e-12 {
            return pts;
        }
        let mut k = 1usize;
        while (k as f64) * spacing < total - 1e-9 {
            pts.push(self.pose_at_arc(k as f64 * spacing).position());
            k += 1;
        }
        pts.push(self.end().position());
        pts
    }

    /// Distance from `(x, y)` to the closest point of the path geometry.
    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        let mut best = self.start().distance_to(x, y);
        for k in 1..self.waypoints.len() {
            let (a, b) = (&self.waypoints[k - 1], &self.waypoints[k]);
            let shape = b.edge.as_ref().map_or(EdgeShape::Line, |e| e.shape);
            for w in edge_polyline(&a.pose, &b.pose, shape).windows(2) {
                best = best.min(point_segment_distance((x, y), w[0].position(), w[1].position()));
            }
        }
        best
    }
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    point_segment(a, b, p).0
}

/// Distance from `p` to segment `a`-`b` and the fraction along it of the
/// closest point.
fn point_segment(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> (f64, f64) {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    (((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt(), t)
}
