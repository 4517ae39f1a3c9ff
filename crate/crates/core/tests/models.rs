mod common;

use common::{model, random_scenario, scenario, solve, state_groups};
use hpp_core::models::{decode_values, DECODE_TOL};
use hpp_core::{decode_solution, CoreError, ModelKind, State};
use hpp_milp::{solve_milp, MilpStatus, SolverSettings};
use hpp_testkit::enumerate_groups;
use proptest::prelude::*;

#[test]
fn variable_counts_follow_the_formulas() {
    let scn = random_scenario(24, 3);
    let check = |kind, s, bin, cont| {
        let m = model(kind, &scn, s);
        assert_eq!(m.instance.num_binaries(), bin, "{kind}-{s} binaries");
        if let Some(cont) = cont {
            assert_eq!(m.instance.num_continuous(), cont, "{kind}-{s} continuous");
        }
    };
    check(ModelKind::Oos, 2, 144, Some(264));
    check(ModelKind::Oo, 1, 72, None);
    check(ModelKind::Os, 12, 312, None);
    for kind in ModelKind::ALL {
        for s in [1, 2, 4, 8, 12] {
            let m = model(kind, &scn, s);
            assert_eq!(m.instance.num_binaries(), 24 * kind.binaries_per_hour(s));
            assert_eq!(m.instance.num_continuous(), 24 * kind.continuous_per_hour(s));
        }
    }
}

#[test]
fn expensive_hour_sells_all_wind() {
    let scn = scenario(&[1000.0], &[1.0], 0.0);
    for kind in ModelKind::ALL {
        let m = model(kind, &scn, 2);
        let sched = decode_solution(&m, &scn, &solve(&m)).unwrap();
        let h = &sched.hours[0];
        assert_ne!(h.state, State::On, "{kind}");
        assert!(h.sold >= scn.c_w - scn.p_sb - 1e-9, "{kind}: sold {}", h.sold);
    }
}

#[test]
fn small_instances_match_state_enumeration() {
    let prices = [55.0, 12.0, 80.0];
    let scn = scenario(&prices, &[0.9, 0.35, 0.6], 3667.0);
    for kind in ModelKind::ALL {
        for s in [1, 2] {
            let m = model(kind, &scn, s);
            let oracle = enumerate_groups(&m.instance, &state_groups(&m));
            let sol = solve(&m);
            let best = oracle.best_objective.expect("toy instance is feasible");
            let obj = sol.objective.unwrap();
            assert!(
                (obj - best).abs() <= 1e-4 * best.abs().max(1.0),
                "{kind}-{s}: solver {obj} vs enumeration {best}"
            );
        }
    }
}

#[test]
fn on_off_is_the_three_state_model_without_standby() {
    let scn = random_scenario(8, 5);
    let oo = solve(&model(ModelKind::Oo, &scn, 2)).objective.unwrap();
    let mut oos = model(ModelKind::Oos, &scn, 2);
    for v in &oos.hours {
        oos.instance.set_bounds(v.zsb.unwrap(), 0.0, 0.0);
        oos.instance.set_bounds(v.pin.unwrap(), 0.0, 0.0);
    }
    let restricted = solve(&oos).objective.unwrap();
    assert!((oo - restricted).abs() <= 2e-4 * oo.abs(), "{oo} vs {restricted}");
}

#[test]
fn restricted_variants_never_beat_three_states() {
    let scn = random_scenario(10, 8);
    let oos = solve(&model(ModelKind::Oos, &scn, 2)).objective.unwrap();
    for kind in [ModelKind::Oo, ModelKind::Os] {
        let obj = solve(&model(kind, &scn, 2)).objective.unwrap();
        assert!(obj <= oos + 1e-4 * oos.abs(), "{kind} {obj} > OOS {oos}");
    }
}

#[test]
fn on_standby_always_draws_standby_power() {
    let scn = random_scenario(24, 12);
    let m = model(ModelKind::Os, &scn, 4);
    let sched = decode_solution(&m, &scn, &solve(&m)).unwrap();
    for h in &sched.hours {
        assert!(h.pe >= scn.p_sb - 1e-9, "hour {}: {}", h.hour, h.pe);
        assert_ne!(h.state, State::Off);
    }
}

#[test]
fn idle_plant_stays_off() {
    let scn = scenario(&[0.0; 4], &[0.0; 4], 0.0);
    for kind in [ModelKind::Oos, ModelKind::Oo] {
        let m = model(kind, &scn, 1);
        let sched = decode_solution(&m, &scn, &solve(&m)).unwrap();
        assert!(sched.hours.iter().all(|h| h.state == State::Off), "{kind}");
        assert!(sched.profit.total.abs() < 1e-9);
    }
}

#[test]
fn impossible_demand_is_reported_infeasible() {
    let scn = scenario(&[40.0; 24], &[0.05; 24], 20_000.0);
    let m = model(ModelKind::Oos, &scn, 2);
    let sol = solve_milp(&m.instance, &SolverSettings::default()).unwrap();
    assert_eq!(sol.status, MilpStatus::Infeasible);
    assert!(matches!(decode_solution(&m, &scn, &sol), Err(CoreError::Integrity(_))));
}

#[test]
fn decoding_rejects_perturbed_values() {
    let scn = random_scenario(6, 2);
    let m = model(ModelKind::Oos, &scn, 2);
    let mut values = solve(&m).values.unwrap();
    values[m.hours[3].s.index()] += 1.0;
    match decode_values(&m, &scn, &values) {
        Err(CoreError::Integrity(msg)) => assert!(msg.contains("storage_"), "{msg}"),
        other => panic!("expected integrity error, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn decoded_schedules_satisfy_balances(seed in 0u64..10_000, hours in 4usize..9, s in 1usize..3, k in 0usize..3) {
        let scn = random_scenario(hours, seed);
        let kind = ModelKind::ALL[k];
        let m = model(kind, &scn, s);
        let sol = solve(&m);
        prop_assume!(sol.values.is_some());
        let sched = decode_solution(&m, &scn, &sol).unwrap();
        let values = sol.values.unwrap();
        let mut level = scn.s_ini;
        for (h, v) in sched.hours.iter().zip(&m.hours) {
            // storage telescopes
            prop_assert!((h.storage - level - h.storage_in + h.storage_out).abs() <= 1e-6);
            level = h.storage;
            // production recomputed from the segment variables
            let recomputed: f64 = m.segments.segments.iter().enumerate()
                .map(|(i, seg)| seg.slope * values[v.pe_hat[i].index()] + seg.intercept * values[v.zh[i].index()])
                .sum();
            prop_assert!((h.hydrogen - recomputed).abs() <= 1e-6);
            // power balance
            let consumed = h.pe + h.compressor + h.sold - h.bought;
            prop_assert!((consumed - h.wind).abs() <= DECODE_TOL * 10.0);
            if h.state == State::On {
                prop_assert!(h.segment.is_some());
                prop_assert!(h.pe_segment >= scn.p_min - 1e-6 && h.pe_segment <= scn.c_e + 1e-6);
            } else {
                prop_assert!(h.hydrogen.abs() <= 1e-6);
            }
        }
        let profit = sched.profit.total;
        prop_assert!((profit - sol.objective.unwrap()).abs() <= 1e-6 * profit.abs().max(1.0));
    }
}
