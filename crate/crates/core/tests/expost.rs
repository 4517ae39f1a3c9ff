mod common;

use common::{model, random_scenario, solve};
use hpp_core::models::{HourRecord, ProfitBreakdown};
use hpp_core::{approximation_gap, decode_solution, evaluate, segment_set, CoreError, DispatchSchedule, ModelKind, PlantScenario, SegmentSet, State};
use proptest::prelude::*;

/// Schedule that is on every hour at the given segment powers, with hydrogen
/// estimated by `seg`.
fn forced(scn: &PlantScenario, seg: &SegmentSet, powers: &[f64]) -> DispatchSchedule {
    let hours = powers
        .iter()
        .enumerate()
        .map(|(t, &p)| HourRecord {
            hour: t,
            timestamp: scn.start + chrono::Duration::hours(t as i64),
            state: State::On,
            startup: false,
            segment: seg.segment_index(p),
            pe: p,
            pe_segment: p,
            hydrogen: seg.production(p).unwrap(),
            delivered: 0.0,
            direct: 0.0,
            storage: 0.0,
            storage_in: 0.0,
            storage_out: 0.0,
            sold: 0.0,
            bought: 0.0,
            compressor: 0.0,
            wind: scn.wind_at(t),
            price: scn.prices[t],
        })
        .collect();
    DispatchSchedule {
        model: ModelKind::Oos,
        segments: seg.len(),
        hours,
        profit: ProfitBreakdown::default(),
    }
}

#[test]
fn breakpoint_operation_has_no_surplus() {
    let scn = random_scenario(24, 1);
    for n in [1, 2, 4, 8, 12] {
        let seg = segment_set(&scn.physics, scn.p_min, n).unwrap();
        let powers: Vec<f64> = seg.breakpoints.iter().cycle().take(24).copied().collect();
        let report = evaluate(&forced(&scn, &seg, &powers), &scn.physics, &scn).unwrap();
        assert!(report.realized_surplus_hydrogen_kg.abs() <= 1e-6, "n={n}: {}", report.realized_surplus_hydrogen_kg);
    }
}

#[test]
fn midpoint_operation_reproduces_segment_gaps() {
    let scn = random_scenario(24, 1);
    for n in [1, 2, 4, 8, 12] {
        let seg = segment_set(&scn.physics, scn.p_min, n).unwrap();
        let mids: Vec<f64> = seg.segments.iter().map(|s| 0.5 * (s.p_lo + s.p_hi)).cycle().take(24).collect();
        let report = evaluate(&forced(&scn, &seg, &mids), &scn.physics, &scn).unwrap();
        let expected: f64 = mids.iter().map(|&p| approximation_gap(&scn.physics, &seg, p).unwrap()).sum();
        assert!((report.realized_surplus_hydrogen_kg - expected).abs() <= 1e-6, "n={n}");
        let per_hour: f64 = report.hours.iter().map(|h| h.delta_kg).sum();
        assert_eq!(per_hour, report.realized_surplus_hydrogen_kg);
        assert!((report.realized_surplus_profit - scn.lambda_h * expected).abs() <= 1e-6);
        assert!((report.surplus_compressor_mwh - scn.k_c * expected).abs() <= 1e-9);
        assert!(report.realized_profit >= report.estimated_profit);
    }
}

#[test]
fn off_window_set_point_is_rejected() {
    let scn = random_scenario(2, 1);
    let seg = segment_set(&scn.physics, scn.p_min, 2).unwrap();
    let mut sched = forced(&scn, &seg, &[10.0, 20.0]);
    sched.hours[1].pe_segment = scn.c_e + 0.1;
    assert!(matches!(evaluate(&sched, &scn.physics, &scn), Err(CoreError::Integrity(_))));
    sched.hours[1].pe_segment = scn.p_min - 0.1;
    assert!(matches!(evaluate(&sched, &scn.physics, &scn), Err(CoreError::Integrity(_))));
    // idle hours carry no surplus whatever their consumption field says
    sched.hours[1].state = State::Standby;
    sched.hours[1].hydrogen = 0.0;
    let report = evaluate(&sched, &scn.physics, &scn).unwrap();
    assert_eq!(report.hours[1].delta_kg, 0.0);
}

#[test]
fn solved_schedule_surplus_is_non_negative() {
    let scn = random_scenario(24, 4);
    let m = model(ModelKind::Oos, &scn, 2);
    let sched = decode_solution(&m, &scn, &solve(&m)).unwrap();
    let report = evaluate(&sched, &scn.physics, &scn).unwrap();
    assert!(report.realized_surplus_hydrogen_kg >= -1e-6 * report.estimated_hydrogen_kg);
    assert!(report.hours.iter().all(|h| h.delta_kg >= -1e-6));
    assert_eq!(report.estimated_profit, sched.profit.total);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("expost.csv");
    report.write_csv(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("hour,timestamp,state,pe_segment,estimated_kg,realized_kg,delta_kg\n"));
    assert_eq!(text.lines().count(), 25);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finer_segments_leave_less_surplus(fracs in prop::collection::vec(0.0f64..=1.0, 1..24)) {
        let scn = random_scenario(fracs.len(), 1);
        let powers: Vec<f64> = fracs.iter().map(|f| scn.p_min + f * (scn.c_e - scn.p_min)).collect();
        let mut last = f64::INFINITY;
        for n in [1, 2, 4, 8, 12] {
            let seg = segment_set(&scn.physics, scn.p_min, n).unwrap();
            let s = evaluate(&forced(&scn, &seg, &powers), &scn.physics, &scn).unwrap().realized_surplus_hydrogen_kg;
            prop_assert!(s >= -1e-6);
            prop_assert!(s <= last + 1e-6, "n={}: {} > {}", n, s, last);
            last = s;
        }
    }
}
