//! Per-cycle arbitration between a fresh plan and the previously published one.
//!
//! A cycle plans `t_now` over the full lattice, trims the previous plan to the
//! robot and re-times it on the current map (`t_prev'`), repairs it on an
//! aligned lattice if it now collides (`t_prev''`), and publishes `t_now`
//! only when its duration is below `alpha` times the kept plan's.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::CostMap;
use crate::lattice::{
    build_aligned_lattice, AlignedGraph, ControlSet, LatticeError, LatticeGraph, LatticeState,
    Pose, Trajectory,
};
use crate::metrics::{directed_mhd, mhd, trajectory_points, MetricsError};
use crate::search::{ara_star, goal_region_heuristic, SearchConfig, SearchError};

#[derive(Debug, Error, PartialEq)]
pub enum ArbiterError {
    #[error("invalid arbiter configuration: {0}")]
    InvalidConfig(String),
    #[error("no trajectory to publish at cycle {cycle}: planning found no path and no usable previous trajectory")]
    PlanningFailed { cycle: u32 },
    #[error("pose ({x:.3}, {y:.3}) is off the map")]
    PoseOffMap { x: f64, y: f64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairConfig {
    /// Largest lateral offset on either side, meters.
    #[serde(default = "default_lateral_width")]
    pub lateral_width: f64,
    #[serde(default = "default_lateral_spacing")]
    pub lateral_spacing: f64,
    /// Target arc length between stations, meters.
    #[serde(default = "default_station_spacing")]
    pub station_spacing: f64,
}

fn default_lateral_width() -> f64 {
    1.0
}
fn default_lateral_spacing() -> f64 {
    0.2
}
fn default_station_spacing() -> f64 {
    0.4
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            lateral_width: default_lateral_width(),
            lateral_spacing: default_lateral_spacing(),
            station_spacing: default_station_spacing(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    #[serde(default = "default_headings")]
    pub headings: u8,
    /// Meters; a multiple of the map resolution.
    #[serde(default = "default_lattice_spacing")]
    pub spacing: f64,
    /// Half-track used to cost turning on the spot, meters; 0 disables
    /// in-place turns.
    #[serde(default = "default_turn_arm")]
    pub in_place_turn_arm: f64,
}

fn default_headings() -> u8 {
    16
}
fn default_lattice_spacing() -> f64 {
    0.2
}
fn default_turn_arm() -> f64 {
    0.3
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            headings: default_headings(),
            spacing: default_lattice_spacing(),
            in_place_turn_arm: default_turn_arm(),
        }
    }
}

/// Distance used by the divergence fallback when it is switched on without
/// an explicit value.
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArbiterConfig {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// `None` disables repair; a colliding previous plan is then dropped.
    #[serde(default = "default_repair")]
    pub repair: Option<RepairConfig>,
    #[serde(default)]
    pub search: SearchConfig,
    /// Publish `t_now` whenever the robot is farther than this from the kept plan.
    #[serde(default)]
    pub divergence_threshold: Option<f64>,
    /// Skip arbitration entirely and publish every fresh plan.
    #[serde(default)]
    pub baseline: bool,
    #[serde(default)]
    pub lattice: LatticeConfig,
}

fn default_alpha() -> f64 {
    0.95
}
fn default_repair() -> Option<RepairConfig> {
    Some(RepairConfig::default())
}

impl Default for ArbiterConfig {
    fn default() -> Self {
        ArbiterConfig {
            alpha: default_alpha(),
            repair: default_repair(),
            search: SearchConfig::default(),
            divergence_threshold: None,
            baseline: false,
            lattice: LatticeConfig::default(),
        }
    }
}

impl ArbiterConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        ArbiterConfig {
            alpha,
            ..Default::default()
        }
    }

    /// Same lattice and search, arbitration bypassed.
    pub fn baseline() -> Self {
        ArbiterConfig {
            alpha: 1.0,
            repair: None,
            baseline: true,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), ArbiterError> {
        let bad = |m: String| Err(ArbiterError::InvalidConfig(m));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must be in (0, 1], got {}", self.alpha));
        }
        if let Some(r) = &self.repair {
            if !(r.lateral_width > 0.0 && r.lateral_spacing > 0.0 && r.station_spacing > 0.0) {
                return bad(format!("repair widths must be positive, got {r:?}"));
            }
        }
        if !(self.lattice.in_place_turn_arm >= 0.0) {
            return bad(format!(
                "in-place turn arm must be non-negative, got {}",
                self.lattice.in_place_turn_arm
            ));
        }
        if let Some(d) = self.divergence_threshold {
            if !(d > 0.0) {
                return bad(format!("divergence threshold must be positive, got {d}"));
            }
        }
        self.search.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Route {
    /// No previous trajectory.
    First,
    /// Fresh plan beat the kept one (or arbitration is off).
    New,
    /// Trimmed previous plan kept.
    Keep,
    /// Repaired previous plan kept.
    Repair,
    /// Previous plan collides and could not be repaired.
    RepairFailedFallback,
    /// Robot drifted beyond the divergence threshold from the kept plan.
    DivergenceFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle: u32,
    pub route: Route,
    pub cost_now: Option<f64>,
    pub cost_prev_updated: Option<f64>,
    pub cost_prev_repaired: Option<f64>,
    pub selected_id: u64,
    /// Symmetric MHD between this selection and the previous selection
    /// trimmed to the current pose; absent without a previous selection.
    pub mhd: Option<f64>,
    /// Directed MHD from this selection to the trimmed previous selection.
    pub mhd_directed: Option<f64>,
    /// Absent for the baseline configuration.
    pub alpha: Option<f64>,
    #[serde(default)]
    pub label: String,
    pub expansions_now: usize,
    pub expansions_repair: Option<usize>,
}

impl CycleRecord {
    /// Checks the cost relation implied by the route.
    pub fn route_invariant_holds(&self) -> bool {
        let alpha = self.alpha.unwrap_or(1.0);
        match self.route {
            Route::First => self.cost_prev_updated.is_none() && self.cost_prev_repaired.is_none(),
            Route::Keep => match (self.cost_now, self.cost_prev_updated) {
                (Some(now), Some(prev)) => now >= alpha * prev,
                (None, Some(_)) => true,
                _ => false,
            },
            Route::Repair => match (self.cost_now, self.cost_prev_repaired) {
                (Some(now), Some(rep)) => now >= alpha * rep,
                (None, Some(_)) => true,
                _ => false,
            },
            Route::New => {
                if self.alpha.is_none() {
                    return self.cost_now.is_some();
                }
                let beaten = self.cost_prev_repaired.or(self.cost_prev_updated);
                match (self.cost_now, beaten) {
                    (Some(now), Some(c)) => now < alpha * c,
                    _ => false,
                }
            }
            Route::RepairFailedFallback => {
                self.cost_now.is_some() && self.cost_prev_repaired.is_none()
            }
            Route::DivergenceFallback => self.cost_now.is_some(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ArbiterState {
    pub previous: Option<Trajectory>,
    pub goal: Option<(f64, f64)>,
    pub cycle_index: u32,
    pub next_id: u64,
}

#[derive(Debug, Clone)]
pub struct CycleOutcome {
    pub selected: Trajectory,
    pub record: CycleRecord,
    pub state: ArbiterState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Now,
    Candidate,
}

/// Publishes the fresh plan only when strictly cheaper than `alpha` times the
/// candidate; ties keep the candidate.
pub fn select(cost_now: f64, cost_candidate: Option<f64>, alpha: f64) -> Choice {
    match cost_candidate {
        Some(c) if !(cost_now < alpha * c) => Choice::Candidate,
        _ => Choice::Now,
    }
}

/// Trims `t_prev` to its nearest waypoint not behind `x_now` and re-times
/// the rest on `map`. The flag reports a now-blocked edge.
pub fn update_previous(
    t_prev: &Trajectory,
    x_now: &Pose,
    map: &CostMap,
) -> Result<(Trajectory, bool), LatticeError> {
    if t_prev.is_empty() {
        return Err(LatticeError::EmptyTrajectory);
    }
    let k = t_prev.waypoint_at_or_after(t_prev.project(x_now.x, x_now.y));
    Ok(t_prev.trimmed(k).recosted(map))
}

#[derive(Debug, Clone)]
pub struct RepairOutcome {
    pub trajectory: Option<Trajectory>,
    pub expansions: usize,
}

/// Searches the lattice aligned with `base` from its first to its last
/// center sample.
pub fn repair(
    base: &Trajectory,
    map: &CostMap,
    config: &RepairConfig,
    search: &SearchConfig,
    id: u64,
    cycle: u32,
) -> Result<RepairOutcome, ArbiterError> {
    let lattice = match build_aligned_lattice(
        base,
        config.lateral_width,
        config.lateral_spacing,
        config.station_spacing,
        map,
    ) {
        Ok(l) => l,
        Err(LatticeError::DegenerateBase) => {
            return Ok(RepairOutcome {
                trajectory: None,
                expansions: 0,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let graph = AlignedGraph { lattice: &lattice };
    let goal = lattice.goal();
    let result = ara_star(
        &graph,
        lattice.start(),
        |n| *n == goal,
        |n| lattice.heuristic(n),
        &SearchConfig {
            goal_tolerance: None,
            trace: false,
            ..search.clone()
        },
    )?;
    let trajectory = result
        .best()
        .and_then(|s| lattice.to_trajectory(&s.path, map, id, cycle));
    Ok(RepairOutcome {
        trajectory,
        expansions: result.total_expansions,
    })
}

#[derive(Debug, Clone)]
pub struct FreshPlan {
    pub trajectory: Option<Trajectory>,
    pub expansions: usize,
}

pub struct Arbiter {
    config: ArbiterConfig,
    controls: ControlSet,
}

impl Arbiter {
    pub fn new(config: ArbiterConfig, resolution: f64) -> Result<Self, ArbiterError> {
        config.validate()?;
        let mut controls =
            ControlSet::build(config.lattice.headings, config.lattice.spacing, resolution)?;
        if config.lattice.in_place_turn_arm > 0.0 {
            controls = controls.with_in_place_turns(config.lattice.in_place_turn_arm)?;
        }
        Ok(Arbiter { config, controls })
    }

    pub fn config(&self) -> &ArbiterConfig {
        &self.config
    }

    pub fn controls(&self) -> &ControlSet {
        &self.controls
    }

    /// Goal tolerance in meters.
    pub fn goal_tolerance(&self, map: &CostMap) -> f64 {
        self.config.search.goal_tolerance.unwrap_or(map.resolution())
    }

    /// ARA* over the full lattice from the lattice state nearest `x_now`.
    pub fn plan_fresh(
        &self,
        x_now: &Pose,
        goal: (f64, f64),
        map: &CostMap,
        id: u64,
        cycle: u32,
    ) -> Result<FreshPlan, ArbiterError> {
        if !map.contains_point(x_now.x, x_now.y) {
            return Err(ArbiterError::PoseOffMap {
                x: x_now.x,
                y: x_now.y,
            });
        }
        let start = LatticeState::snap(x_now, map, &self.controls);
        if !map.contains(start.x, start.y) {
            return Err(ArbiterError::PoseOffMap {
                x: x_now.x,
                y: x_now.y,
            });
        }
        let graph = LatticeGraph {
            map,
            controls: &self.controls,
        };
        let tol = self.goal_tolerance(map);
        let result = ara_star(
            &graph,
            start,
            |s| {
                let (x, y) = s.position(map);
                ((x - goal.0).powi(2) + (y - goal.1).powi(2)).sqrt() <= tol + 1e-9
            },
            |s| goal_region_heuristic(s.position(map), goal, tol, map.v_max()),
            &self.config.search,
        )?;
        let trajectory = match result.best() {
            Some(sol) => Some(Trajectory::from_lattice_path(
                &sol.path,
                &self.controls,
                map,
                id,
                cycle,
            )?),
            None => None,
        };
        Ok(FreshPlan {
            trajectory,
            expansions: result.total_expansions,
        })
    }

    pub fn plan_cycle(
        &self,
        state: &ArbiterState,
        x_now: &Pose,
        goal: (f64, f64),
        map: &CostMap,
    ) -> Result<CycleOutcome, ArbiterError> {
        let cycle = state.cycle_index;
        let mut next_id = state.next_id;
        let previous = if state.goal == Some(goal) {
            state.previous.as_ref()
        } else {
            None
        };

        let fresh = self.plan_fresh(x_now, goal, map, next_id, cycle)?;
        if fresh.trajectory.is_some() {
            next_id += 1;
        }
        let t_now = fresh.trajectory;
        let cost_now = t_now.as_ref().map(Trajectory::duration);

        let updated = previous
            .map(|p| update_previous(p, x_now, map))
            .transpose()?;

        let mut record = CycleRecord {
            cycle,
            route: Route::First,
            cost_now,
            cost_prev_updated: None,
            cost_prev_repaired: None,
            selected_id: 0,
            mhd: None,
            mhd_directed: None,
            alpha: (!self.config.baseline).then_some(self.config.alpha),
            label: String::new(),
            expansions_now: fresh.expansions,
            expansions_repair: None,
        };

        let (selected, route) = if self.config.baseline {
            let t = t_now.ok_or(ArbiterError::PlanningFailed { cycle })?;
            let route = if updated.is_some() { Route::New } else { Route::First };
            (t, route)
        } else {
            match &updated {
                None => (
                    t_now.ok_or(ArbiterError::PlanningFailed { cycle })?,
                    Route::First,
                ),
                Some((t_prev, collision)) => {
                    record.cost_prev_updated = Some(t_prev.duration());
                    let candidate = if *collision {
                        match &self.config.repair {
                            Some(rc) => {
                                let out =
                                    repair(t_prev, map, rc, &self.config.search, next_id, cycle)?;
                                record.expansions_repair = Some(out.expansions);
                                out.trajectory.map(|t| {
                                    next_id += 1;
                                    record.cost_prev_repaired = Some(t.duration());
                                    (t, Route::Repair)
                                })
                            }
                            None => None,
                        }
                    } else {
                        Some((t_prev.clone(), Route::Keep))
                    };
                    let diverged = match (self.config.divergence_threshold, &candidate) {
                        (Some(d), Some((c, _))) => c.distance_to(x_now.x, x_now.y) > d,
                        _ => false,
                    };
                    match (t_now, candidate) {
                        (Some(now), _) if diverged => (now, Route::DivergenceFallback),
                        (Some(now), Some((cand, route))) => {
                            match select(now.duration(), Some(cand.duration()), self.config.alpha)
                            {
                                Choice::Now => (now, Route::New),
                                Choice::Candidate => (cand, route),
                            }
                        }
                        (Some(now), None) => (now, Route::RepairFailedFallback),
                        (None, Some((cand, route))) => (cand, route),
                        (None, None) => return Err(ArbiterError::PlanningFailed { cycle }),
                    }
                }
            }
        };

        record.route = route;
        record.selected_id = selected.id;
        if let Some((t_prev, _)) = &updated {
            let spacing = map.resolution();
            let a = trajectory_points(&selected, spacing)?;
            let b = trajectory_points(t_prev, spacing)?;
            record.mhd = Some(mhd(&a, &b)?);
            record.mhd_directed = Some(directed_mhd(&a, &b)?);
        }

        let state = ArbiterState {
            previous: Some(selected.clone()),
            goal: Some(goal),
            cycle_index: cycle + 1,
            next_id,
        };
        Ok(CycleOutcome {
            selected,
            record,
            state,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::CellState;
    use crate::lattice::AlignedNode;

    fn open_map() -> CostMap {
        CostMap::filled(40, 30, 0.2, (0.0, 0.0), 1.0, CellState::Free).unwrap()
    }

    #[test]
    fn selection_is_strict_and_scale_free() {
        assert_eq!(select(1.0, Some(1.0), 0.95), Choice::Candidate);
        assert_eq!(select(1.0, Some(1.0), 1.0), Choice::Candidate);
        assert_eq!(select(0.99, Some(1.0), 1.0), Choice::Now);
        assert_eq!(select(5.0, None, 0.95), Choice::Now);
        for (now, cand) in [(52.87, 56.83), (48.24, 48.70), (10.0, 10.4), (9.4, 10.0)] {
            let base = select(now, Some(cand), 0.95);
            for c in [0.5, 3.0, 17.25] {
                assert_eq!(select(now * c, Some(cand * c), 0.95), base);
            }
        }
    }

    #[test]
    fn repair_matches_exhaustive_enumeration() {
        let mut m = open_map();
        let cs = ControlSet::build(16, 0.2, 0.2).unwrap();
        let path: Vec<LatticeState> = (0..=20).map(|k| LatticeState::new(5 + k, 15, 0)).collect();
        let base = Trajectory::from_lattice_path(&path, &cs, &m, 1, 0).unwrap();
        let rc = RepairConfig {
            lateral_width: 0.6,
            lateral_spacing: 0.2,
            station_spacing: 1.0,
        };
        let mid = build_aligned_lattice(&base, 0.6, 0.2, 1.0, &m).unwrap().stations()[2].pose;
        let (ci, cj) = m.cell_index(mid.x, mid.y);
        m.set_state(ci, cj, CellState::Obstacle);
        let (t_prev, hit) = base.recosted(&m);
        assert!(hit);

        let al = build_aligned_lattice(&t_prev, 0.6, 0.2, 1.0, &m).unwrap();
        assert_eq!(al.stations().len(), 5);
        let c = al.center() as i64;
        let mut best = f64::INFINITY;
        let mut best_dev = 0;
        for code in 0..81u32 {
            let steps: Vec<i64> = (0..4).map(|k| (code / 3u32.pow(k) % 3) as i64 - 1).collect();
            let mut lat = vec![c];
            for d in &steps {
                lat.push(lat.last().unwrap() + d);
            }
            if lat[4] != c || lat.iter().any(|&l| l < 0 || l >= al.samples() as i64) {
                continue;
            }
            let node = |s: usize| AlignedNode {
                station: s as u32,
                lateral: lat[s] as u32,
            };
            let cost: Option<f64> = (0..4)
                .map(|s| al.edge(&node(s), &node(s + 1)).and_then(|e| e.duration()))
                .sum();
            if let Some(cost) = cost {
                if cost < best {
                    best = cost;
                    best_dev = lat.iter().map(|l| (l - c).abs()).max().unwrap();
                }
            }
        }
        assert_eq!(best_dev, 1);

        let out = repair(&t_prev, &m, &rc, &SearchConfig::default(), 2, 1).unwrap();
        let t = out.trajectory.unwrap();
        assert!((t.duration() - best).abs() < 1e-9);
        assert!(t.is_collision_free(&m));
        let dev = t
            .waypoints()
            .iter()
            .map(|w| base.distance_to(w.pose.x, w.pose.y))
            .fold(0.0, f64::max);
        assert!((dev - 0.2).abs() < 1e-9, "deviation {dev}");
    }

    #[test]
    fn config_validation() {
        assert!(ArbiterConfig::with_alpha(0.0).validate().is_err());
        assert!(ArbiterConfig::with_alpha(1.01).validate().is_err());
        assert!(ArbiterConfig::with_alpha(1.0).validate().is_ok());
        let c = ArbiterConfig {
            repair: Some(RepairConfig {
                lateral_width: 0.0,
                ..Default::default()
            }),
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let parsed: ArbiterConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(parsed, ArbiterConfig::default());
    }

    #[test]
    fn first_cycle_then_keep_on_static_map() {
        let m = open_map();
        let arb = Arbiter::new(ArbiterConfig::default(), m.resolution()).unwrap();
        let start = Pose::new(1.1, 1.1, 0.0);
        let goal = m.cell_center(30, 20);
        let c0 = arb.plan_cycle(&ArbiterState::default(), &start, goal, &m).unwrap();
        assert_eq!(c0.record.route, Route::First);
        assert_eq!(c0.record.mhd, None);
        let c1 = arb.plan_cycle(&c0.state, &start, goal, &m).unwrap();
        assert_eq!(c1.record.route, Route::Keep);
        assert_eq!(c1.record.mhd, Some(0.0));
        assert_eq!(c1.selected.id, c0.selected.id);
        assert!(c1.record.route_invariant_holds());
    }

    #[test]
    fn update_previous_trims_and_flags_collision() {
        let m = open_map();
        let arb = Arbiter::new(ArbiterConfig::default(), m.resolution()).unwrap();
        let t = arb
            .plan_fresh(&Pose::new(1.1, 1.1, 0.0), m.cell_center(30, 5), &m, 0, 0)
            .unwrap()
            .trajectory
            .unwrap();
        let k = 3;
        let at = t.waypoints()[k].pose;
        let (trimmed, hit) = update_previous(&t, &at, &m).unwrap();
        assert!(!hit);
        assert_eq!(trimmed.len(), t.len() - k);
        assert!((trimmed.duration() - (t.duration() - t.waypoints()[k].arrival_time)).abs() < 1e-9);

        let between = t.pose_at_time(0.5 * (t.waypoints()[k].arrival_time + t.waypoints()[k + 1].arrival_time));
        let (ahead, _) = update_previous(&t, &between, &m).unwrap();
        assert_eq!(ahead.start(), t.waypoints()[k + 1].pose);

        let mut blocked = m.clone();
        let (i, j) = *trimmed.edges().last().unwrap().swath.first().unwrap();
        blocked.set_state(i, j, CellState::Obstacle);
        assert!(update_previous(&t, &at, &blocked).unwrap().1);
    }

    #[test]
    fn collision_triggers_repair_or_fallback() {
        let m = open_map();
        let arb = Arbiter::new(ArbiterConfig::default(), m.resolution()).unwrap();
        let start = Pose::new(1.1, 3.1, 0.0);
        let goal = m.cell_center(34, 15);
        let c0 = arb.plan_cycle(&ArbiterState::default(), &start, goal, &m).unwrap();
        let mid = c0.selected.waypoints()[c0.selected.len() / 2].pose;
        let mut blocked = m.clone();
        let (i, j) = blocked.cell_index(mid.x, mid.y);
        blocked.set_state(i, j, CellState::Obstacle);
        let c1 = arb.plan_cycle(&c0.state, &start, goal, &blocked).unwrap();
        assert!(matches!(c1.record.route, Route::Repair | Route::New));
        assert!(c1.record.expansions_repair.is_some());
        assert!(c1.selected.is_collision_free(&blocked));
        assert!(c1.record.route_invariant_holds());

        let no_repair = Arbiter::new(
            ArbiterConfig {
                repair: None,
                ..Default::default()
            },
            m.resolution(),
        )
        .unwrap();
        let c1 = no_repair.plan_cycle(&c0.state, &start, goal, &blocked).unwrap();
        assert_eq!(c1.record.route, Route::RepairFailedFallback);
    }

    #[test]
    fn goal_change_resets_previous() {
        let m = open_map();
        let arb = Arbiter::new(ArbiterConfig::default(), m.resolution()).unwrap();
        let start = Pose::new(1.1, 1.1, 0.0);
        let c0 = arb.plan_cycle(&ArbiterState::default(), &start, m.cell_center(30, 20), &m).unwrap();
        let c1 = arb.plan_cycle(&c0.state, &start, m.cell_center(20, 25), &m).unwrap();
        assert_eq!(c1.record.route, Route::First);
        assert_eq!(c1.record.cycle, 1);
    }

    #[test]
    fn walled_start_fails_without_candidate() {
        let mut m = open_map();
        for j in 0..30 {
            m.set_state(10, j, CellState::Obstacle);
        }
        let arb = Arbiter::new(ArbiterConfig::default(), m.resolution()).unwrap();
        let err = arb
            .plan_cycle(&ArbiterState::default(), &Pose::new(1.1, 1.1, 0.0), m.cell_center(30, 20), &m)
            .unwrap_err();
        assert_eq!(err, ArbiterError::PlanningFailed { cycle: 0 });
    }

    #[test]
    fn divergence_forces_fresh_plan() {
        let m = open_map();
        let cfg = ArbiterConfig {
            divergence_threshold: Some(0.5),
            ..Default::default()
        };
        let arb = Arbiter::new(cfg, m.resolution()).unwrap();
        let goal = m.cell_center(35, 3);
        let c0 = arb
            .plan_cycle(&ArbiterState::default(), &Pose::new(1.1, 0.7, 0.0), goal, &m)
            .unwrap();
        let c1 = arb.plan_cycle(&c0.state, &Pose::new(1.1, 4.1, 0.0), goal, &m).unwrap();
        assert_eq!(c1.record.route, Route::DivergenceFallback);
    }

    #[test]
    fn baseline_always_publishes_fresh() {
        let m = open_map();
        let arb = Arbiter::new(ArbiterConfig::baseline(), m.resolution()).unwrap();
        let start = Pose::new(1.1, 1.1, 0.0);
        let goal = m.cell_center(30, 20);
        let c0 = arb.plan_cycle(&ArbiterState::default(), &start, goal, &m).unwrap();
        let c1 = arb.plan_cycle(&c0.state, &start, goal, &m).unwrap();
        assert_eq!(c1.record.route, Route::New);
        assert_ne!(c1.selected.id, c0.selected.id);
        assert_eq!(c1.record.alpha, None);
        assert!(c1.record.route_invariant_holds());
    }
}
