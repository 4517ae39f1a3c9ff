//! Exhaustive enumeration of binary assignments, each leaf solved as an LP
//! with the dense tableau.
//!
//! Callers describe the search space as groups of alternatives: every group
//! contributes exactly one alternative (a set of variable fixings) to each
//! leaf. Binaries left unfixed stay relaxed; the leaf result is only accepted
//! when they come out integral, otherwise the enumeration panics because the
//! caller's relaxation argument does not hold for that instance.

use hpp_milp::{MilpInstance, VarId};

use crate::tableau::{solve_instance, TableauOutcome};

pub type Fixings = Vec<(VarId, f64)>;

#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub best_objective: Option<f64>,
    pub best_values: Option<Vec<f64>>,
    pub leaves: usize,
    pub feasible_leaves: usize,
}

/// Every binary enumerated independently (2^n leaves).
pub fn enumerate_binaries(inst: &MilpInstance) -> EnumerationResult {
    let groups: Vec<Vec<Fixings>> = inst
        .binaries()
        .map(|b| vec![vec![(b, 0.0)], vec![(b, 1.0)]])
        .collect();
    enumerate_groups(inst, &groups)
}

pub fn enumerate_groups(inst: &MilpInstance, groups: &[Vec<Fixings>]) -> EnumerationResult {
    let mut result = EnumerationResult {
        best_objective: None,
        best_values: None,
        leaves: 0,
        feasible_leaves: 0,
    };
    let mut choice = vec![0usize; groups.len()];
    if groups.iter().any(|g| g.is_empty()) {
        return result;
    }
    loop {
        let mut leaf = inst.clone();
        for (g, &k) in groups.iter().zip(&choice) {
            for &(v, val) in &g[k] {
                leaf.set_bounds(v, val, val);
            }
        }
        result.leaves += 1;
        if let TableauOutcome::Optimal { values, objective } = solve_instance(&leaf) {
            for b in leaf.binaries() {
                let x = values[b.0];
                assert!(
                    (x - x.round()).abs() < 1e-6,
                    "relaxed binary {} is fractional ({x}) at an enumeration leaf",
                    leaf.var(b).name
                );
            }
            result.feasible_leaves += 1;
            if result.best_objective.map_or(true, |b| objective > b) {
                result.best_objective = Some(objective);
                result.best_values = Some(values);
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == groups.len() {
                return result;
            }
            choice[i] += 1;
            if choice[i] < groups[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Binaries of `inst` not mentioned in any group.
pub fn unfixed_binaries(inst: &MilpInstance, groups: &[Vec<Fixings>]) -> Vec<VarId> {
    inst.binaries()
        .filter(|b| !groups.iter().flatten().flatten().any(|(v, _)| v == b))
        .collect()
}
