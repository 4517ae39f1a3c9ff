//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use chrono::{DateTime, TimeZone, Utc};
use hpp_core::models::HourVars;
use hpp_core::scenario::ScenarioConfig;
use hpp_core::synth::{synthetic_series, SynthParams};
use hpp_core::{build, segment_set, DispatchModel, ModelKind, PlantScenario};
use hpp_milp::{solve_milp, MilpSolution, SolverSettings};
use hpp_testkit::Fixings;

pub fn start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2019, 1, 1, 0, 0, 0).unwrap()
}

/// Reference plant with the given hourly data and daily demand.
pub fn scenario(prices: &[f64], cf: &[f64], demand_kg_day: f64) -> PlantScenario {
    let mut cfg = ScenarioConfig::reference();
    cfg.hydrogen.minimum_demand_kg_day = demand_kg_day;
    PlantScenario::from_hourly(&cfg, start(), prices, cf).unwrap()
}

/// Seeded synthetic scenario with the reference plant and demand.
pub fn random_scenario(hours: usize, seed: u64) -> PlantScenario {
    let (p, w) = synthetic_series(hours, seed, start(), &SynthParams::default());
    PlantScenario::from_parts(&ScenarioConfig::reference(), &p, &w).unwrap()
}

/// Wind at full capacity every hour, no demand.
pub fn unconstrained(prices: &[f64]) -> PlantScenario {
    scenario(prices, &vec![1.0; prices.len()], 0.0)
}

pub fn model(kind: ModelKind, scn: &PlantScenario, segments: usize) -> DispatchModel {
    let seg = segment_set(&scn.physics, scn.p_min, segments).unwrap();
    build(kind, scn, &seg).unwrap()
}

pub fn solve(model: &DispatchModel) -> MilpSolution {
    solve_milp(&model.instance, &SolverSettings::default()).unwrap()
}

fn hour_alternatives(kind: ModelKind, v: &HourVars) -> Vec<Fixings> {
    let idle_segments = |active: Option<usize>| -> Fixings {
        v.zh.iter()
            .enumerate()
            .map(|(s, &z)| (z, if Some(s) == active { 1.0 } else { 0.0 }))
            .collect()
    };
    let n = v.zh.len();
    let mut out = Vec::new();
    match kind {
        ModelKind::Oos => {
            let (on, off, sb) = (v.zon.unwrap(), v.zoff.unwrap(), v.zsb.unwrap());
            for (a, b, c) in [(0.0, 1.0, 0.0), (0.0, 0.0, 1.0)] {
                let mut f = vec![(on, a), (off, b), (sb, c)];
                f.extend(idle_segments(None));
                out.push(f);
            }
            for s in 0..n {
                let mut f = vec![(on, 1.0), (off, 0.0), (sb, 0.0)];
                f.extend(idle_segments(Some(s)));
                out.push(f);
            }
        }
        ModelKind::Oo | ModelKind::Os => {
            let z = v.zoo.or(v.zos).unwrap();
            let mut f = vec![(z, 0.0)];
            f.extend(idle_segments(None));
            out.push(f);
            for s in 0..n {
                let mut f = vec![(z, 1.0)];
                f.extend(idle_segments(Some(s)));
                out.push(f);
            }
        }
    }
    out
}

/// One group per hour listing every admissible state/segment pattern. The
/// start-up indicator stays relaxed: it only appears in a lower-bounding row
/// with a cost, so the LP sets it to the integral value the pattern implies.
pub fn state_groups(model: &DispatchModel) -> Vec<Vec<Fixings>> {
    model.hours.iter().map(|v| hour_alternatives(model.kind, v)).collect()
}
