//! Lattice of lateral samples around an existing trajectory.
//!
//! Stations are base waypoints picked at roughly regular arc-length intervals.
//! Each station carries samples at signed lateral offsets along the left
//! normal of the base heading. Between consecutive stations, the
//! center-to-center edge follows the base trajectory itself; every other edge
//! is a straight segment. Edges through blocked cells stay in the structure
//! with no duration.

use super::geometry::{trace_segment, EdgeShape, Pose};
use super::trajectory::{Edge, Trajectory};
use super::LatticeError;
use crate::gridmap::CostMap;
use crate::search::SearchGraph;

/// Largest lateral index change allowed between consecutive stations.
pub const BRANCH_LIMIT: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Station {
    pub waypoint: usize,
    pub arc_position: f64,
    pub pose: Pose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlignedNode {
    pub station: u32,
    pub lateral: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlignedEdge {
    /// Center samples on both ends: the base waypoints between the stations.
    Base {
        duration: Option<f64>,
    },
    Lateral {
        edge: Edge,
        duration: Option<f64>,
    },
}

impl AlignedEdge {
    pub fn duration(&self) -> Option<f64> {
        match self {
            AlignedEdge::Base { duration } | AlignedEdge::Lateral { duration, .. } => *duration,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.duration().is_some()
    }
}

#[derive(Debug, Clone)]
pub struct AlignedLattice {
    base: Trajectory,
    stations: Vec<Station>,
    offsets: Vec<f64>,
    /// Indexed by `(station * samples + from) * (2 * BRANCH_LIMIT + 1) + (to - from + BRANCH_LIMIT)`.
    edges: Vec<Option<AlignedEdge>>,
    v_max: f64,
}

pub fn build_aligned_lattice(
    base: &Trajectory,
    lateral_width: f64,
    lateral_spacing: f64,
    station_spacing: f64,
    map: &CostMap,
) -> Result<AlignedLattice, LatticeError> {
    if !(lateral_spacing > 0.0) || !(station_spacing > 0.0) || !(lateral_width >= 0.0) {
        return Err(LatticeError::InvalidParameter(format!(
            "width {lateral_width}, lateral spacing {lateral_spacing}, station spacing {station_spacing}"
        )));
    }
    if base.len() < 2 || base.length() <= 0.0 {
        return Err(LatticeError::DegenerateBase);
    }

    let stations = place_stations(base, station_spacing);
    let half = (lateral_width / lateral_spacing + 1e-9).floor() as i64;
    let offsets: Vec<f64> = (-half..=half).map(|k| k as f64 * lateral_spacing).collect();
    let samples = offsets.len();
    let center = half as usize;
    let fan = 2 * BRANCH_LIMIT + 1;

    let node_pose = |s: &Station, k: usize| {
        let off = offsets[k];
        let (nx, ny) = (-s.pose.heading.sin(), s.pose.heading.cos());
        Pose::new(s.pose.x + off * nx, s.pose.y + off * ny, s.pose.heading)
    };
    let to_cells = |p: &Pose| {
        (
            (p.x - map.origin().0) / map.resolution(),
            (p.y - map.origin().1) / map.resolution(),
        )
    };

    let mut edges = vec![None; (stations.len() - 1) * samples * fan];
    for (i, pair) in stations.windows(2).enumerate() {
        let (s0, s1) = (&pair[0], &pair[1]);
        for a in 0..samples {
            let lo = a.saturating_sub(BRANCH_LIMIT);
            let hi = (a + BRANCH_LIMIT).min(samples - 1);
            for b in lo..=hi {
                let slot = (i * samples + a) * fan + (b + BRANCH_LIMIT - a);
                let edge = if a == center && b == center {
                    let mut total = Some(0.0);
                    for w in &base.waypoints()[s0.waypoint + 1..=s1.waypoint] {
                        let e = w.edge.as_ref().expect("interior waypoint has an edge");
                        total = total.and_then(|acc| {
                            super::swath_duration(map, e.arc_length, e.swath.iter().copied())
                                .map(|d| acc + d)
                        });
                    }
                    AlignedEdge::Base { duration: total }
                } else {
                    let (p0, p1) = (node_pose(s0, a), node_pose(s1, b));
                    let mut swath = Vec::new();
                    trace_segment(to_cells(&p0), to_cells(&p1), &mut swath);
                    let arc = p0.distance_to(p1.x, p1.y);
                    let duration = super::swath_duration(map, arc, swath.iter().copied());
                    AlignedEdge::Lateral {
                        edge: Edge {
                            shape: EdgeShape::Line,
                            arc_length: arc,
                            swath,
                            duration: duration.unwrap_or(f64::INFINITY),
                            feasible: duration.is_some(),
                        },
                        duration,
                    }
                };
                edges[slot] = Some(edge);
            }
        }
    }

    Ok(AlignedLattice {
        base: base.clone(),
        stations,
        offsets,
        edges,
        v_max: map.v_max(),
    })
}

/// Waypoints nearest to arc positions `0, s, 2s, ...`, deduplicated, with
/// the first and last waypoints always present.
fn place_stations(base: &Trajectory, spacing: f64) -> Vec<Station> {
    let mut cumulative = Vec::with_capacity(base.len());
    let mut acc = 0.0;
    for w in base.waypoints() {
        if let Some(e) = &w.edge {
            acc += e.arc_length;
        }
        cumulative.push(acc);
    }
    let total = acc;
    let last = base.len() - 1;
    let mut picks: Vec<usize> = vec![0];
    let count = (total / spacing + 1e-9).floor() as usize;
    let mut cursor = 0;
    for k in 1..=count {
        let target = k as f64 * spacing;
        while cursor + 1 < cumulative.len()
            && (cumulative[cursor + 1] - target).abs() < (cumulative[cursor] - target).abs()
        {
            cursor += 1;
        }
        if *picks.last().unwrap() != cursor {
            picks.push(cursor);
        }
    }
    if *picks.last().unwrap() != last {
        picks.push(last);
    }
    picks
        .into_iter()
        .map(|k| Station {
            waypoint: k,
            arc_position: cumulative[k],
            pose: base.waypoints()[k].pose,
        })
        .collect()
}

impl AlignedLattice {
    pub fn base(&self) -> &Trajectory {
        &self.base
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn samples(&self) -> usize {
        self.offsets.len()
    }

    pub fn center(&self) -> u32 {
        (self.offsets.len() / 2) as u32
    }

    pub fn start(&self) -> AlignedNode {
        AlignedNode {
            station: 0,
            lateral: self.center(),
        }
    }

    pub fn goal(&self) -> AlignedNode {
        AlignedNode {
            station: (self.stations.len() - 1) as u32,
            lateral: self.center(),
        }
    }

    pub fn node_pose(&self, node: &AlignedNode) -> Pose {
        let s = &self.stations[node.station as usize];
        let off = self.offsets[node.lateral as usize];
        Pose::new(
            s.pose.x - off * s.pose.heading.sin(),
            s.pose.y + off * s.pose.heading.cos(),
            s.pose.heading,
        )
    }

    pub fn edge(&self, from: &AlignedNode, to: &AlignedNode) -> Option<&AlignedEdge> {
        if to.station != from.station + 1 {
            return None;
        }
        let (a, b) = (from.lateral as usize, to.lateral as usize);
        if a.abs_diff(b) > BRANCH_LIMIT || b >= self.samples() {
            return None;
        }
        let fan = 2 * BRANCH_LIMIT + 1;
        let slot = (from.station as usize * self.samples() + a) * fan + (b + BRANCH_LIMIT - a);
        self.edges.get(slot).and_then(Option::as_ref)
    }

    pub fn edges(&self) -> impl Iterator<Item = &AlignedEdge> {
        self.edges.iter().flatten()
    }

    /// Admissible time-to-go: straight-line distance to the final center sample.
    pub fn heuristic(&self, node: &AlignedNode) -> f64 {
        let p = self.node_pose(node);
        let g = self.node_pose(&self.goal());
        p.distance_to(g.x, g.y) / self.v_max
    }

    /// Turns a station-by-station node path into a trajectory, re-timing
    /// every edge against `map`.
    pub fn to_trajectory(
        &self,
        path: &[AlignedNode],
        map: &CostMap,
        id: u64,
        birth_cycle: u32,
    ) -> Option<Trajectory> {
        let first = path.first()?;
        let mut t = Trajectory::new(id, birth_cycle, self.node_pose(first));
        for w in path.windows(2) {
            match self.edge(&w[0], &w[1])? {
                AlignedEdge::Base { duration } => {
                    duration.as_ref()?;
                    let s0 = self.stations[w[0].station as usize].waypoint;
                    let s1 = self.stations[w[1].station as usize].waypoint;
                    for wp in &self.base.waypoints()[s0 + 1..=s1] {
                        let e = wp.edge.as_ref()?;
                        let edge = Edge::evaluate(map, e.shape, e.arc_length, e.swath.clone())?;
                        t.push(wp.pose, edge);
                    }
                }
                AlignedEdge::Lateral { edge, duration } => {
                    duration.as_ref()?;
                    let edge = Edge::evaluate(map, edge.shape, edge.arc_length, edge.swath.clone())?;
                    t.push(self.node_pose(&w[1]), edge);
                }
            }
        }
        Some(t)
    }
}

pub struct AlignedGraph<'a> {
    pub lattice: &'a AlignedLattice,
}

impl SearchGraph for AlignedGraph<'_> {
    type State = AlignedNode;

    fn state_count(&self) -> usize {
        self.lattice.stations.len() * self.lattice.samples()
    }

    fn index(&self, s: &AlignedNode) -> usize {
        s.station as usize * self.lattice.samples() + s.lateral as usize
    }

    fn state(&self, index: usize) -> AlignedNode {
        AlignedNode {
            station: (index / self.lattice.samples()) as u32,
            lateral: (index % self.lattice.samples()) as u32,
        }
    }

    fn successors(&self, s: &AlignedNode, out: &mut Vec<(AlignedNode, f64)>) {
        if s.station as usize + 1 >= self.lattice.stations.len() {
            return;
        }
        let a = s.lateral as usize;
        let lo = a.saturating_sub(BRANCH_LIMIT);
        let hi = (a + BRANCH_LIMIT).min(self.lattice.samples() - 1);
        for b in lo..=hi {
            let next = AlignedNode {
                station: s.station + 1,
                lateral: b as u32,
            };
            if let Some(d) = self.lattice.edge(s, &next).and_then(AlignedEdge::duration) {
                out.push((next, d));
            }
        }
    }
}
