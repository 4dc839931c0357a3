mod common;

use std::collections::HashSet;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    brute_directed_mhd, dijkstra, report, solvable_stability_scenarios, stability_scenario,
    STABILITY_ALPHAS,
};
use regional_planner::arbiter::{
    repair, select, update_previous, Arbiter, ArbiterConfig, Choice, CycleRecord, Route,
};
use regional_planner::gridmap::{CellState, CostMap, PerlinMapParams};
use regional_planner::harness::{
    alpha_label, run_scenario, sweep_scenarios_observed, MapSource, Scenario, SweepResult,
    BASELINE_LABEL,
};
use regional_planner::lattice::{LatticeGraph, LatticeState, Pose};
use regional_planner::metrics::{directed_mhd, mhd, PointSet, DEFAULT_THRESHOLD};
use regional_planner::search::{ara_star, goal_region_heuristic, SearchStatus};

#[test]
fn criterion_1_selector_fixtures() {
    let cases = [
        (52.87, 56.83, Choice::Now),
        (48.24, 48.70, Choice::Candidate),
        (48.28, 48.70, Choice::Candidate),
    ];
    let mut ok = true;
    for (now, prev, want) in cases {
        ok &= select(now, Some(prev), 0.95) == want;
    }
    report(1, ok, "three selector fixtures at alpha 0.95");
    assert!(ok);
}

#[test]
fn criterion_2_mhd_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=500);
        let m = rng.gen_range(1..=500);
        let spread = rng.gen_range(0.1..50.0);
        let a: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(-spread..spread), rng.gen_range(-spread..spread)))
            .collect();
        let b: Vec<(f64, f64)> = (0..m)
            .map(|_| (rng.gen_range(-spread..spread), rng.gen_range(-spread..spread)))
            .collect();
        let (pa, pb) = (PointSet::new(a.clone()), PointSet::new(b.clone()));
        let ab = brute_directed_mhd(&a, &b);
        let ba = brute_directed_mhd(&b, &a);
        worst = worst
            .max((directed_mhd(&pa, &pb).unwrap() - ab).abs())
            .max((mhd(&pa, &pb).unwrap() - ab.max(ba)).abs());
    }
    let ok = worst <= 1e-9;
    report(2, ok, &format!("1000 pairs, max |error| {worst:.3e} m"));
    assert!(ok);
}

#[test]
fn criterion_3_ara_star_matches_dijkstra() {
    let mut solved = 0;
    let mut failures = Vec::new();
    for seed in 0..50u64 {
        let s = Scenario {
            map_source: MapSource::Perlin {
                params: PerlinMapParams::new(300 + seed, 64, 64, 0.15),
                footprint_radius: 0.0,
                clear_radius: 0.6,
            },
            ..stability_scenario(seed)
        };
        let map = s.build_map().unwrap();
        let arb = Arbiter::new(ArbiterConfig::default(), map.resolution()).unwrap();
        let graph = LatticeGraph {
            map: &map,
            controls: arb.controls(),
        };
        let start = LatticeState::snap(&s.start, &map, arb.controls());
        let goal = (s.goal.x, s.goal.y);
        let tol = arb.goal_tolerance(&map);
        let is_goal = |st: &LatticeState| {
            let (x, y) = st.position(&map);
            ((x - goal.0).powi(2) + (y - goal.1).powi(2)).sqrt() <= tol + 1e-9
        };
        let optimal = dijkstra(&graph, start, is_goal);
        let result = ara_star(
            &graph,
            start,
            is_goal,
            |st| goal_region_heuristic(st.position(&map), goal, tol, map.v_max()),
            &arb.config().search,
        )
        .unwrap();
        let Some(opt) = optimal else {
            if result.status != SearchStatus::NoPath || !result.solutions.is_empty() {
                failures.push(format!("seed {seed}: oracle finds no path, search does"));
            }
            continue;
        };
        solved += 1;
        let sols = &result.solutions;
        let last = sols.last();
        if result.status != SearchStatus::Solved || last.map(|l| l.epsilon) != Some(1.0) {
            failures.push(format!("seed {seed}: did not finish at epsilon 1"));
            continue;
        }
        let final_cost = last.unwrap().cost;
        if (final_cost - opt).abs() > 1e-9 {
            failures.push(format!("seed {seed}: final {final_cost} vs optimal {opt}"));
        }
        for sol in sols {
            if sol.cost > sol.epsilon * opt + 1e-9 {
                failures.push(format!("seed {seed}: cost {} above {} x optimal", sol.cost, sol.epsilon));
            }
        }
        if sols.windows(2).any(|w| w[1].cost > w[0].cost) {
            failures.push(format!("seed {seed}: solution costs increased"));
        }
    }
    let ok = failures.is_empty() && solved > 0;
    report(
        3,
        ok,
        &format!("50 maps ({solved} solvable), {} violations {:?}", failures.len(), failures.first()),
    );
    assert!(ok, "{failures:?}");
}

/// A cell of edge `k`'s swath that no other edge sweeps and whose
/// surroundings within `clearance` are free.
fn isolated_cell(
    t: &regional_planner::lattice::Trajectory,
    k: usize,
    map: &CostMap,
    clearance: f64,
) -> Option<(i32, i32)> {
    let others: HashSet<(i32, i32)> = t
        .waypoints()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .filter_map(|(_, w)| w.edge.as_ref())
        .flat_map(|e| e.swath.iter().copied())
        .collect();
    let reach = (clearance / map.resolution()).ceil() as i32;
    let edge = t.waypoints()[k].edge.as_ref()?;
    edge.swath.iter().copied().find(|&(i, j)| {
        !others.contains(&(i, j))
            && (-reach..=reach).all(|dj| {
                (-reach..=reach).all(|di| {
                    (di * di + dj * dj) as f64 * map.resolution().powi(2) > clearance * clearance
                        || map.state(i + di, j + dj) == Some(CellState::Free)
                })
            })
    })
}

#[test]
fn criterion_4_repair_is_cheaper_than_replanning() {
    let mut scenarios = 0;
    let mut cheaper = 0;
    let mut failures = Vec::new();
    let mut seed = 400u64;
    while scenarios < 50 {
        seed += 1;
        let s = Scenario {
            map_source: MapSource::Perlin {
                params: PerlinMapParams::new(seed, 48, 48, 0.25),
                footprint_radius: 0.0,
                clear_radius: 0.6,
            },
            start: Pose::new(0.7, 0.7, 0.0),
            goal: Pose::new(8.9, 8.9, 0.0),
            ..stability_scenario(seed)
        };
        let map = s.build_map().unwrap();
        let arb = Arbiter::new(ArbiterConfig::default(), map.resolution()).unwrap();
        let goal = (s.goal.x, s.goal.y);
        let Some(t_prev) = arb.plan_fresh(&s.start, goal, &map, 0, 0).unwrap().trajectory else {
            continue;
        };
        let (t_upd, hit) = update_previous(&t_prev, &t_prev.start(), &map).unwrap();
        assert!(!hit);
        let mut arc = 0.0;
        let total = t_upd.length();
        let blocked_cell = t_upd.waypoints().iter().enumerate().skip(1).find_map(|(k, w)| {
            arc += w.edge.as_ref().unwrap().arc_length;
            if arc < 1.5 || arc > total - 1.5 {
                return None;
            }
            isolated_cell(&t_upd, k, &map, 1.0)
        });
        let Some((i, j)) = blocked_cell else { continue };
        let mut blocked = map.clone();
        blocked.set_state(i, j, CellState::Obstacle);
        let (t_prev1, hit) = update_previous(&t_upd, &t_upd.start(), &blocked).unwrap();
        let infeasible = t_prev1.edges().filter(|e| !e.feasible).count();
        assert!(hit && infeasible == 1, "seed {seed}: expected one blocked edge");
        scenarios += 1;

        let cfg = arb.config();
        let out = repair(&t_prev1, &blocked, cfg.repair.as_ref().unwrap(), &cfg.search, 1, 1).unwrap();
        let Some(t_rep) = out.trajectory else {
            failures.push(format!("seed {seed}: repair failed"));
            continue;
        };
        if !t_rep.is_collision_free(&blocked) {
            failures.push(format!("seed {seed}: repaired trajectory collides"));
            continue;
        }
        let fresh = arb.plan_fresh(&t_prev1.start(), goal, &blocked, 2, 1).unwrap();
        if out.expansions < fresh.expansions {
            cheaper += 1;
        }
    }
    let ok = failures.is_empty() && cheaper >= 45;
    report(
        4,
        ok,
        &format!(
            "50 single-blockage scenarios, {} repair failures, repair cheaper in {cheaper}/50",
            failures.len()
        ),
    );
    assert!(ok, "{failures:?} cheaper {cheaper}");
}

struct StabilityRun {
    result: SweepResult,
    colliding: Vec<String>,
    scenarios: Vec<Scenario>,
}

fn stability_run() -> &'static StabilityRun {
    static RUN: OnceLock<StabilityRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let scenarios = solvable_stability_scenarios(7000, 100);
        let mut colliding = Vec::new();
        let result = sweep_scenarios_observed(
            &scenarios,
            &STABILITY_ALPHAS,
            DEFAULT_THRESHOLD,
            |label, out, map| {
                if !out.selected.is_collision_free(map) {
                    colliding.push(format!("{label} cycle {}", out.record.cycle));
                }
            },
        )
        .unwrap();
        StabilityRun {
            result,
            colliding,
            scenarios,
        }
    })
}

#[test]
fn criterion_5_stability_trend() {
    let run = stability_run();
    let summaries = &run.result.summaries;
    let row = |label: &str| summaries.iter().find(|s| s.label == label).unwrap();
    let tuned = row(&alpha_label(0.95));
    let base = row(BASELINE_LABEL);
    let mean_ok = match (tuned.mean_filtered_mhd, base.mean_filtered_mhd) {
        (Some(a), Some(b)) => a < b,
        _ => false,
    };
    let zero_ok = tuned.zero_count >= 3 * base.zero_count;
    let zeros: Vec<usize> = STABILITY_ALPHAS
        .iter()
        .map(|&a| row(&alpha_label(a)).zero_count)
        .collect();
    let inversions = zeros.windows(2).filter(|w| w[1] > w[0]).count();
    let trend_ok = inversions <= 1 && zeros[0] >= zeros[zeros.len() - 1];
    let ok = mean_ok && zero_ok && trend_ok;
    report(
        5,
        ok,
        &format!(
            "{} scenarios; filtered mean {:?} vs baseline {:?}; zeros {} vs {}; zeros by alpha {zeros:?}",
            run.scenarios.len(),
            tuned.mean_filtered_mhd,
            base.mean_filtered_mhd,
            tuned.zero_count,
            base.zero_count
        ),
    );
    assert!(mean_ok, "(a) filtered mean not below baseline");
    assert!(zero_ok, "(b) zero count below three times baseline");
    assert!(trend_ok, "(c) zero counts {zeros:?}");
}

#[test]
fn criterion_6_route_invariants() {
    let run = stability_run();
    let broken: Vec<&CycleRecord> = run
        .result
        .cycles
        .iter()
        .filter(|c| !c.route_invariant_holds())
        .collect();
    let rerun = sweep_scenarios_observed(&run.scenarios, &STABILITY_ALPHAS, DEFAULT_THRESHOLD, |_, _, _| {})
        .unwrap();
    let identical = rerun == run.result;
    let ok = broken.is_empty() && run.colliding.is_empty() && identical;
    report(
        6,
        ok,
        &format!(
            "{} cycles, {} invariant violations, {} colliding selections, rerun identical: {identical}",
            run.result.cycles.len(),
            broken.len(),
            run.colliding.len()
        ),
    );
    assert!(ok, "{:?} {:?}", broken.first(), run.colliding.first());
}

#[test]
fn criterion_7_static_map_hysteresis() {
    let mut failures = Vec::new();
    let mut cycles = 0;
    for seed in 0..10u64 {
        let s = Scenario {
            sensor_radius: 100.0,
            arbiter: ArbiterConfig::default(),
            ..stability_scenario(700 + seed)
        };
        let log = run_scenario(&s, "static").unwrap();
        let Some(first) = log.cycles.first() else {
            continue;
        };
        if first.route != Route::First {
            failures.push(format!("seed {seed}: first route {:?}", first.route));
        }
        for c in &log.cycles[1..] {
            cycles += 1;
            if c.route != Route::Keep || c.mhd != Some(0.0) || c.selected_id != first.selected_id {
                failures.push(format!("seed {seed} cycle {}: {:?} mhd {:?}", c.cycle, c.route, c.mhd));
            }
        }
    }
    let ok = failures.is_empty() && cycles > 0;
    report(
        7,
        ok,
        &format!("10 static maps, {cycles} later cycles, {} not kept {:?}", failures.len(), failures.first()),
    );
    assert!(ok, "{failures:?}");
}
