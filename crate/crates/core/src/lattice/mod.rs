//! Recombinant state lattice, duration edge costs and trajectories.

mod aligned;
mod control_set;
pub mod geometry;
mod trajectory;

pub use aligned::{build_aligned_lattice, AlignedEdge, AlignedGraph, AlignedLattice, AlignedNode, Station, BRANCH_LIMIT};
pub use control_set::{heading_angle, ControlSet, MotionPrimitive};
pub use geometry::{EdgeShape, Pose};
pub use trajectory::{Edge, Trajectory, Waypoint};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::CostMap;
use crate::search::SearchGraph;

#[derive(Debug, Error, PartialEq)]
pub enum LatticeError {
    #[error("unsupported heading count {0}; use 8 or 16")]
    UnsupportedHeadingCount(u8),
    #[error("lattice spacing {0} m is not a positive multiple of the map resolution {1} m")]
    InvalidSpacing(f64, f64),
    #[error("base trajectory is too short to place stations")]
    DegenerateBase,
    #[error("invalid aligned-lattice parameter: {0}")]
    InvalidParameter(String),
    #[error("consecutive states {0:?} -> {1:?} are not joined by a feasible primitive")]
    BrokenPath(LatticeState, LatticeState),
    #[error("trajectory has no waypoints")]
    EmptyTrajectory,
}

/// Lattice node: cell indices (multiples of the lattice spacing) plus a
/// heading index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeState {
    pub x: i32,
    pub y: i32,
    pub heading: u8,
}

impl LatticeState {
    pub fn new(x: i32, y: i32, heading: u8) -> Self {
        LatticeState { x, y, heading }
    }

    pub fn position(&self, map: &CostMap) -> (f64, f64) {
        map.cell_center(self.x, self.y)
    }

    pub fn pose(&self, map: &CostMap, controls: &ControlSet) -> Pose {
        let (x, y) = self.position(map);
        Pose::new(x, y, controls.heading_angle(self.heading))
    }

    /// Nearest lattice state to a continuous pose.
    pub fn snap(pose: &Pose, map: &CostMap, controls: &ControlSet) -> LatticeState {
        let l = controls.spacing_cells() as f64;
        let fx = (pose.x - map.origin().0) / map.resolution() - 0.5;
        let fy = (pose.y - map.origin().1) / map.resolution() - 0.5;
        LatticeState {
            x: ((fx / l).round() * l) as i32,
            y: ((fy / l).round() * l) as i32,
            heading: controls.nearest_heading(pose.heading),
        }
    }
}

/// Time to traverse `arc_length` meters across `cells`, the length split
/// equally among the cells. `None` if any cell is blocked or off the map.
pub fn swath_duration<I>(map: &CostMap, arc_length: f64, cells: I) -> Option<f64>
where
    I: ExactSizeIterator<Item = (i32, i32)>,
{
    let n = cells.len();
    if n == 0 {
        return None;
    }
    let share = arc_length / n as f64;
    let mut total = 0.0;
    for (i, j) in cells {
        total += share / map.traversable_speed(i, j)?;
    }
    Some(total)
}

pub fn edge_duration(
    primitive: &MotionPrimitive,
    start: &LatticeState,
    map: &CostMap,
) -> Option<f64> {
    swath_duration(
        map,
        primitive.arc_length,
        primitive
            .swath
            .iter()
            .map(|&(i, j)| (start.x + i, start.y + j)),
    )
}

/// Feasible successors in primitive order.
pub fn successors(
    state: &LatticeState,
    map: &CostMap,
    controls: &ControlSet,
    out: &mut Vec<(LatticeState, f64)>,
) {
    for p in controls.for_heading(state.heading) {
        if let Some(d) = edge_duration(p, state, map) {
            out.push((
                LatticeState::new(state.x + p.dx, state.y + p.dy, p.end_heading),
                d,
            ));
        }
    }
}

/// Full-map lattice as a search graph.
pub struct LatticeGraph<'a> {
    pub map: &'a CostMap,
    pub controls: &'a ControlSet,
}

impl SearchGraph for LatticeGraph<'_> {
    type State = LatticeState;

    fn state_count(&self) -> usize {
        self.map.width() * self.map.height() * self.controls.headings() as usize
    }

    fn index(&self, s: &LatticeState) -> usize {
        ((s.y as usize * self.map.width()) + s.x as usize) * self.controls.headings() as usize
            + s.heading as usize
    }

    fn state(&self, index: usize) -> LatticeState {
        let h = self.controls.headings() as usize;
        let cell = index / h;
        LatticeState::new(
            (cell % self.map.width()) as i32,
            (cell / self.map.width()) as i32,
            (index % h) as u8,
        )
    }

    fn successors(&self, s: &LatticeState, out: &mut Vec<(LatticeState, f64)>) {
        successors(s, self.map, self.controls, out)
    }
}
