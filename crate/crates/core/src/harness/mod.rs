//! Closed-loop simulation: progressive reveal, one arbitration cycle per
//! step, and a robot that follows the published trajectory.

mod scenario;
mod sweep;

pub use scenario::{MapSource, Scenario};
pub use sweep::{alpha_label, alpha_sweep, sweep_scenarios_observed, SweepResult, BASELINE_LABEL};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arbiter::{Arbiter, ArbiterError, ArbiterState, CycleOutcome, CycleRecord};
use crate::gridmap::{CostMap, MapError, RevealModel};
use crate::lattice::{LatticeError, Pose, Trajectory};

/// Consecutive cycles without movement before a run is declared stuck.
pub const STUCK_CYCLES: u32 = 10;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Arbiter(#[from] ArbiterError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("cycle {cycle}: {source}")]
    Cycle {
        cycle: u32,
        #[source]
        source: ArbiterError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    GoalReached,
    Stuck,
    CycleLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub digest: String,
    pub cycles: Vec<CycleRecord>,
    pub outcome: Outcome,
    pub total_path_length: f64,
    pub final_pose: Pose,
}

/// Pose `step_time` seconds past `offset` along `t`, clamped at the end,
/// displaced along the left normal by Gaussian noise of deviation `sigma`.
pub fn follow_step<R: Rng>(
    t: &Trajectory,
    offset: f64,
    step_time: f64,
    sigma: f64,
    rng: &mut R,
) -> Result<Pose, LatticeError> {
    if t.is_empty() {
        return Err(LatticeError::EmptyTrajectory);
    }
    let mut p = t.pose_at_time(offset + step_time);
    if sigma > 0.0 {
        let n = Normal::new(0.0, sigma)
            .map_err(|e| LatticeError::InvalidParameter(e.to_string()))?
            .sample(rng);
        p.x -= n * p.heading.sin();
        p.y += n * p.heading.cos();
    }
    Ok(p)
}

pub fn run_scenario(s: &Scenario, label: &str) -> Result<RunLog, HarnessError> {
    run_scenario_observed(s, label, |_, _| {})
}

/// Like [`run_scenario`], calling `observe` after every cycle with the
/// outcome and the map it was planned on.
pub fn run_scenario_observed<F>(
    s: &Scenario,
    label: &str,
    mut observe: F,
) -> Result<RunLog, HarnessError>
where
    F: FnMut(&CycleOutcome, &CostMap),
{
    s.validate()?;
    let truth = s.build_map()?;
    let arbiter = Arbiter::new(s.arbiter.clone(), truth.resolution())?;
    let tolerance = arbiter.goal_tolerance(&truth);
    let goal = (s.goal.x, s.goal.y);
    let mut reveal = RevealModel::new(truth, s.sensor_radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.rng_seed);
    let mut state = ArbiterState::default();
    let mut pose = s.start;
    let mut cycles = Vec::new();
    let mut total_path_length = 0.0;
    let mut idle = 0;
    let at_goal = |p: &Pose| p.distance_to(goal.0, goal.1) <= tolerance + 1e-9;

    let mut outcome = Outcome::CycleLimit;
    for cycle in 0..s.max_cycles {
        if at_goal(&pose) {
            outcome = Outcome::GoalReached;
            break;
        }
        reveal.reveal(pose.x, pose.y)?;
        let result = arbiter.plan_cycle(&state, &pose, goal, reveal.revealed());
        let out = match result {
            Ok(out) => out,
            Err(ArbiterError::PlanningFailed { .. }) => {
                outcome = Outcome::Stuck;
                break;
            }
            Err(source) => return Err(HarnessError::Cycle { cycle, source }),
        };
        observe(&out, reveal.revealed());
        let mut record = out.record.clone();
        record.label = label.to_string();
        cycles.push(record);

        let next = follow_step(&out.selected, 0.0, s.step_time, s.tracking_noise_sigma, &mut rng)?;
        let moved = pose.distance_to(next.x, next.y);
        total_path_length += moved;
        pose = next;
        state = out.state;
        if moved < 1e-9 {
            idle += 1;
            if idle >= STUCK_CYCLES {
                outcome = Outcome::Stuck;
                break;
            }
        } else {
            idle = 0;
        }
    }
    if outcome == Outcome::CycleLimit && at_goal(&pose) {
        outcome = Outcome::GoalReached;
    }
    Ok(RunLog {
        digest: s.digest(),
        cycles,
        outcome,
        total_path_length,
        final_pose: pose,
    })
}

pub fn write_cycles_jsonl<W: std::io::Write>(
    mut out: W,
    records: &[CycleRecord],
) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_cycles_jsonl(text: &str) -> Result<Vec<CycleRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
