//! Anytime Repairing A* over any graph with dense state indices.
//!
//! Each pass is a weighted A* with inflation `epsilon`; states whose g-value
//! improves after they were closed in the current pass go to INCONS and are
//! merged back into OPEN before the next, smaller epsilon. The final pass at
//! `epsilon = 1` returns an optimal path when the heuristic is consistent.
//!
//! Ordering of OPEN: smaller `g + epsilon * h` first, then larger `g`, then
//! smaller state index. Goal states are never expanded; the best goal g seen
//! so far terminates a pass once no OPEN key is below it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub trait SearchGraph {
    type State: Copy + PartialEq + std::fmt::Debug;

    /// Upper bound (exclusive) on `index`.
    fn state_count(&self) -> usize;
    fn index(&self, state: &Self::State) -> usize;
    fn state(&self, index: usize) -> Self::State;
    /// Appends `(successor, edge cost)` pairs; costs must be positive.
    fn successors(&self, state: &Self::State, out: &mut Vec<(Self::State, f64)>);
}

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    #[serde(default = "default_epsilon_start")]
    pub epsilon_start: f64,
    #[serde(default = "default_epsilon_step")]
    pub epsilon_step: f64,
    #[serde(default = "default_budget")]
    pub expansion_budget: usize,
    /// Meters; `None` means one map cell.
    #[serde(default)]
    pub goal_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub trace: bool,
}

fn default_epsilon_start() -> f64 {
    3.0
}
fn default_epsilon_step() -> f64 {
    0.5
}
fn default_budget() -> usize {
    400_000
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            epsilon_start: default_epsilon_start(),
            epsilon_step: default_epsilon_step(),
            expansion_budget: default_budget(),
            goal_tolerance: None,
            trace: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if !(self.epsilon_start >= 1.0) {
            return Err(SearchError::InvalidConfig(format!(
                "epsilon_start must be >= 1, got {}",
                self.epsilon_start
            )));
        }
        if !(self.epsilon_step > 0.0) {
            return Err(SearchError::InvalidConfig(format!(
                "epsilon_step must be > 0, got {}",
                self.epsilon_step
            )));
        }
        if self.expansion_budget == 0 {
            return Err(SearchError::InvalidConfig(
                "expansion_budget must be >= 1".into(),
            ));
        }
        if let Some(t) = self.goal_tolerance {
            if !(t >= 0.0) {
                return Err(SearchError::InvalidConfig(format!(
                    "goal_tolerance must be >= 0, got {t}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    Solved,
    NoPath,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<S> {
    pub path: Vec<S>,
    pub cost: f64,
    pub epsilon: f64,
    /// Cumulative expansions when this solution was published.
    pub expansions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub pass: u32,
    pub epsilon: f64,
    pub index: usize,
    pub g: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<S> {
    pub solutions: Vec<Solution<S>>,
    pub status: SearchStatus,
    pub total_expansions: usize,
    pub trace: Vec<TraceRecord>,
}

impl<S> SearchResult<S> {
    pub fn best(&self) -> Option<&Solution<S>> {
        self.solutions.last()
    }
}

/// Euclidean distance over the top speed.
pub fn heuristic_time(position: (f64, f64), goal: (f64, f64), v_max: f64) -> f64 {
    ((position.0 - goal.0).powi(2) + (position.1 - goal.1).powi(2)).sqrt() / v_max
}

/// Time to reach the edge of a circular goal region; zero inside it.
/// Consistent whenever every edge takes at least `chord / v_max`.
pub fn goal_region_heuristic(
    position: (f64, f64),
    goal: (f64, f64),
    tolerance: f64,
    v_max: f64,
) -> f64 {
    (heuristic_time(position, goal, v_max) - tolerance / v_max).max(0.0)
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    key: f64,
    g: f64,
    index: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // BinaryHeap pops the greatest element, so "greater" means "expand first".
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then(self.g.total_cmp(&other.g))
            .then(other.index.cmp(&self.index))
    }
}

const NO_PARENT: u32 = u32::MAX;
const NEVER: u32 = u32::MAX;

pub fn ara_star<G, F, H>(
    graph: &G,
    start: G::State,
    is_goal: F,
    heuristic: H,
    config: &SearchConfig,
) -> Result<SearchResult<G::State>, SearchError>
where
    G: SearchGraph,
    F: Fn(&G::State) -> bool,
    H: Fn(&G::State) -> f64,
{
    config.validate()?;
    let n = graph.state_count();
    assert!(n < NO_PARENT as usize, "state space too large for u32 indices");
    let mut g = vec![f64::INFINITY; n];
    let mut h_cache = vec![f64::NAN; n];
    let mut parent = vec![NO_PARENT; n];
    let mut in_open = vec![false; n];
    let mut in_incons = vec![false; n];
    let mut closed_pass = vec![NEVER; n];
    let mut incons: Vec<u32> = Vec::new();
    let mut heap: BinaryHeap<Entry> = BinaryHeap::new();
    let mut succ = Vec::new();
    let mut trace = Vec::new();

    let start_idx = graph.index(&start);
    g[start_idx] = 0.0;
    let mut best_goal: Option<usize> = None;
    let mut best_g = f64::INFINITY;
    if is_goal(&start) {
        best_goal = Some(start_idx);
        best_g = 0.0;
    } else {
        in_open[start_idx] = true;
        heap.push(Entry {
            key: 0.0,
            g: 0.0,
            index: start_idx as u32,
        });
    }

    let h_of = |idx: usize, h_cache: &mut Vec<f64>| -> f64 {
        if h_cache[idx].is_nan() {
            h_cache[idx] = heuristic(&graph.state(idx));
        }
        h_cache[idx]
    };

    let mut epsilon = config.epsilon_start;
    let mut pass: u32 = 0;
    let mut expansions = 0usize;
    let mut solutions = Vec::new();
    let status;

    loop {
        // OPEN <- OPEN ∪ INCONS, keys recomputed for the current epsilon
        let mut members: Vec<u32> = heap
            .drain()
            .filter(|e| in_open[e.index as usize] && e.g == g[e.index as usize])
            .map(|e| e.index)
            .collect();
        for idx in incons.drain(..) {
            in_incons[idx as usize] = false;
            in_open[idx as usize] = true;
            members.push(idx);
        }
        members.sort_unstable();
        members.dedup();
        for idx in members {
            let gi = g[idx as usize];
            let key = gi + epsilon * h_of(idx as usize, &mut h_cache);
            heap.push(Entry { key, g: gi, index: idx });
        }

        let mut exhausted = false;
        while let Some(&top) = heap.peek() {
            let idx = top.index as usize;
            if !in_open[idx] || top.g != g[idx] {
                heap.pop();
                continue;
            }
            if best_g <= top.key {
                break;
            }
            if expansions >= config.expansion_budget {
                exhausted = true;
                break;
            }
            heap.pop();
            in_open[idx] = false;
            closed_pass[idx] = pass;
            expansions += 1;
            if config.trace {
                trace.push(TraceRecord {
                    pass,
                    epsilon,
                    index: idx,
                    g: g[idx],
                    f: top.key,
                });
            }
            let state = graph.state(idx);
            succ.clear();
            graph.successors(&state, &mut succ);
            for &(next, cost) in &succ {
                let ni = graph.index(&next);
                let ng = g[idx] + cost;
                if ng >= g[ni] {
                    continue;
                }
                g[ni] = ng;
                parent[ni] = idx as u32;
                if is_goal(&next) {
                    if ng < best_g {
                        best_g = ng;
                        best_goal = Some(ni);
                    }
                    continue;
                }
                if closed_pass[ni] == pass {
                    if !in_incons[ni] {
                        in_incons[ni] = true;
                        incons.push(ni as u32);
                    }
                } else {
                    in_open[ni] = true;
                    let key = ng + epsilon * h_of(ni, &mut h_cache);
                    heap.push(Entry {
                        key,
                        g: ng,
                        index: ni as u32,
                    });
                }
            }
        }

        if exhausted {
            status = SearchStatus::BudgetExhausted;
            break;
        }
        let Some(goal_idx) = best_goal else {
            status = SearchStatus::NoPath;
            break;
        };
        let mut path = vec![graph.state(goal_idx)];
        let mut cur = goal_idx;
        while parent[cur] != NO_PARENT && cur != start_idx {
            cur = parent[cur] as usize;
            path.push(graph.state(cur));
        }
        path.reverse();
        solutions.push(Solution {
            path,
            cost: best_g,
            epsilon,
            expansions,
        });
        if epsilon <= 1.0 {
            status = SearchStatus::Solved;
            break;
        }
        epsilon = (epsilon - config.epsilon_step).max(1.0);
        pass += 1;
    }

    Ok(SearchResult {
        solutions,
        status,
        total_expansions: expansions,
        trace,
    })
}
