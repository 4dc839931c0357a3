use super::{run_scenario_observed, HarnessError, Outcome, RunLog, Scenario};
use crate::arbiter::{ArbiterConfig, CycleOutcome, CycleRecord};
use crate::gridmap::CostMap;
use crate::metrics::{summarize, StabilitySummary};

pub const BASELINE_LABEL: &str = "baseline";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// One row per alpha, in input order, then the baseline row.
    pub summaries: Vec<StabilitySummary>,
    /// Every cycle of every run, labelled with its configuration.
    pub cycles: Vec<CycleRecord>,
    /// Per run: label, repetition, outcome.
    pub runs: Vec<(String, u32, Outcome)>,
}

pub fn alpha_label(alpha: f64) -> String {
    format!("alpha={alpha}")
}

/// Runs every alpha and the baseline on `repetitions` reseeded copies of
/// `base` and summarizes each configuration's per-cycle MHDs.
pub fn alpha_sweep(
    base: &Scenario,
    alphas: &[f64],
    repetitions: u32,
    threshold: f64,
) -> Result<SweepResult, HarnessError> {
    if repetitions < 1 {
        return Err(HarnessError::InvalidScenario("repetitions must be at least 1".into()));
    }
    let scenarios: Vec<Scenario> = (0..repetitions).map(|r| base.reseeded(r as u64)).collect();
    sweep_scenarios_observed(&scenarios, alphas, threshold, |_, _, _| {})
}

/// Runs every alpha and the baseline on each scenario, keeping each
/// scenario's map, search and lattice settings. `observe` sees every cycle
/// with its configuration label and the map it was planned on.
pub fn sweep_scenarios_observed<F>(
    scenarios: &[Scenario],
    alphas: &[f64],
    threshold: f64,
    mut observe: F,
) -> Result<SweepResult, HarnessError>
where
    F: FnMut(&str, &CycleOutcome, &CostMap),
{
    if alphas.is_empty() {
        return Err(HarnessError::InvalidScenario("no alpha values given".into()));
    }
    if scenarios.is_empty() {
        return Err(HarnessError::InvalidScenario("no scenarios given".into()));
    }
    let mut labels: Vec<(String, Option<f64>)> =
        alphas.iter().map(|&a| (alpha_label(a), Some(a))).collect();
    labels.push((BASELINE_LABEL.to_string(), None));

    let mut cycles = Vec::new();
    let mut runs = Vec::new();
    let mut per_config: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
    for (rep, scenario) in scenarios.iter().enumerate() {
        for (k, (label, alpha)) in labels.iter().enumerate() {
            let arbiter = match alpha {
                Some(a) => ArbiterConfig {
                    alpha: *a,
                    baseline: false,
                    ..scenario.arbiter.clone()
                },
                None => ArbiterConfig {
                    search: scenario.arbiter.search.clone(),
                    lattice: scenario.arbiter.lattice.clone(),
                    ..ArbiterConfig::baseline()
                },
            };
            let s = Scenario {
                arbiter,
                ..scenario.clone()
            };
            let log: RunLog = run_scenario_observed(&s, label, |o, m| observe(label, o, m))?;
            per_config[k].extend(log.cycles.iter().filter_map(|c| c.mhd));
            runs.push((label.clone(), rep as u32, log.outcome));
            cycles.extend(log.cycles);
        }
    }
    let summaries = labels
        .iter()
        .zip(&per_config)
        .map(|((label, alpha), values)| summarize(values, threshold, label, *alpha))
        .collect();
    Ok(SweepResult {
        summaries,
        cycles,
        runs,
    })
}
