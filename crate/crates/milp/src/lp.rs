//! Linear relaxations.
//!
//! The simplex engine is `microlp` (bounded-variable primal/dual simplex over a
//! sparse LU factorization). Binaries are handed to it as continuous `[0, 1]`
//! columns; integrality is enforced by [`crate::bnb`] through bound fixings,
//! which microlp re-optimizes with warm-started dual simplex.

use std::collections::BTreeMap;
use std::sync::Arc;

use log::debug;
use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};

use crate::error::MilpError;
use crate::instance::{MilpInstance, Sense};

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

/// Solves the continuous relaxation of `inst` (binaries relaxed to `[0, 1]`).
pub fn solve_lp(inst: &MilpInstance) -> Result<LpOutcome, MilpError> {
    inst.validate()?;
    let (problem, vars) = match build_problem(inst)? {
        Some(p) => p,
        None => return Ok(LpOutcome::Infeasible),
    };
    match problem.solve() {
        Ok(outcome) => {
            let sol = into_solution(outcome)?;
            Ok(LpOutcome::Optimal(extract(inst, &sol, &vars)))
        }
        Err(microlp::Error::Infeasible) => Ok(LpOutcome::Infeasible),
        Err(microlp::Error::Unbounded) => Ok(LpOutcome::Unbounded),
        Err(e) => Err(MilpError::Numeric(e.to_string())),
    }
}

/// Returns `None` when an empty row is violated on its own.
fn build_problem(inst: &MilpInstance) -> Result<Option<(Problem, Vec<microlp::Variable>)>, MilpError> {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = inst
        .vars()
        .iter()
        .map(|v| problem.add_var(v.objective, (v.lower, v.upper)))
        .collect();
    for row in inst.constraints() {
        if row.terms.is_empty() {
            let ok = match row.sense {
                Sense::Le => 0.0 <= row.rhs,
                Sense::Ge => 0.0 >= row.rhs,
                Sense::Eq => row.rhs == 0.0,
            };
            if !ok {
                return Ok(None);
            }
            continue;
        }
        let op = match row.sense {
            Sense::Le => ComparisonOp::Le,
            Sense::Eq => ComparisonOp::Eq,
            Sense::Ge => ComparisonOp::Ge,
        };
        let expr: microlp::LinearExpr = row.terms.iter().map(|&(v, c)| (vars[v.0], c)).collect();
        problem.add_constraint(expr, op, row.rhs);
    }
    Ok(Some((problem, vars)))
}

fn into_solution(outcome: SolveOutcome) -> Result<microlp::Solution, MilpError> {
    outcome
        .into_solution()
        .map_err(|i| MilpError::Numeric(format!("LP solve interrupted: {:?}", i.termination_reason())))
}

fn extract(inst: &MilpInstance, sol: &microlp::Solution, vars: &[microlp::Variable]) -> LpSolution {
    let values: Vec<f64> = inst
        .vars()
        .iter()
        .zip(vars)
        .map(|(v, &mv)| sol.var_value_raw(mv).clamp(v.lower, v.upper))
        .collect();
    let objective = inst.objective_value(&values);
    LpSolution { values, objective }
}

/// Result of evaluating one branch-and-bound node.
#[derive(Debug, Clone)]
pub(crate) enum NodeLp {
    Optimal(LpSolution),
    Infeasible,
}

/// A relaxation that moves between sets of fixed variables by re-optimizing
/// from the current basis instead of solving from scratch.
#[derive(Clone)]
pub(crate) struct WarmLp {
    root: Arc<microlp::Solution>,
    current: Option<microlp::Solution>,
    fixed: BTreeMap<usize, f64>,
    vars: Vec<microlp::Variable>,
}

impl std::fmt::Debug for WarmLp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WarmLp").field("fixed", &self.fixed.len()).finish()
    }
}

pub(crate) enum RootLp {
    Ready(WarmLp, LpSolution),
    Infeasible,
    Unbounded,
}

impl WarmLp {
    pub(crate) fn root(inst: &MilpInstance) -> Result<RootLp, MilpError> {
        let (problem, vars) = match build_problem(inst)? {
            Some(p) => p,
            None => return Ok(RootLp::Infeasible),
        };
        let sol = match problem.solve() {
            Ok(outcome) => into_solution(outcome)?,
            Err(microlp::Error::Infeasible) => return Ok(RootLp::Infeasible),
            Err(microlp::Error::Unbounded) => return Ok(RootLp::Unbounded),
            Err(e) => return Err(MilpError::Numeric(e.to_string())),
        };
        let lp = extract(inst, &sol, &vars);
        let warm = WarmLp {
            root: Arc::new(sol.clone()),
            current: Some(sol),
            fixed: BTreeMap::new(),
            vars,
        };
        Ok(RootLp::Ready(warm, lp))
    }

    /// Re-optimizes with exactly `target` fixed. `last` is fixed after all
    /// other entries so that every intermediate state relaxes the parent node.
    pub(crate) fn evaluate(
        &mut self,
        inst: &MilpInstance,
        target: &BTreeMap<usize, f64>,
        last: Option<usize>,
    ) -> Result<NodeLp, MilpError> {
        match self.navigate(target, last) {
            Ok(true) => {}
            Ok(false) => return Ok(NodeLp::Infeasible),
            Err(first) => {
                // numerical trouble deep in a warm-start chain: replay from the root once
                debug!("warm start failed ({first}); replaying {} fixings from the root", target.len());
                self.reset();
                match self.navigate(target, last) {
                    Ok(true) => {}
                    Ok(false) => return Ok(NodeLp::Infeasible),
                    Err(second) => {
                        debug!("replay failed ({second}); solving the node from scratch");
                        self.current = None;
                        return cold_node(inst, target);
                    }
                }
            }
        }
        let sol = self.current.as_ref().expect("navigate leaves a current solution");
        Ok(NodeLp::Optimal(extract(inst, sol, &self.vars)))
    }

    fn reset(&mut self) {
        self.current = Some((*self.root).clone());
        self.fixed.clear();
    }

    fn navigate(&mut self, target: &BTreeMap<usize, f64>, last: Option<usize>) -> Result<bool, MilpError> {
        if self.current.is_none() {
            self.reset();
        }
        let stale: Vec<usize> = self
            .fixed
            .iter()
            .filter(|(v, val)| target.get(v) != Some(val))
            .map(|(&v, _)| v)
            .collect();
        for v in stale {
            let sol = self.current.take().expect("current solution");
            let (outcome, _) = sol.unfix_var(self.vars[v]).map_err(numeric)?;
            self.current = Some(into_solution(outcome)?);
            self.fixed.remove(&v);
        }
        let mut pending: Vec<(usize, f64)> = target
            .iter()
            .filter(|(v, _)| !self.fixed.contains_key(v))
            .map(|(&v, &val)| (v, val))
            .collect();
        if let Some(l) = last {
            if let Some(pos) = pending.iter().position(|&(v, _)| v == l) {
                let item = pending.remove(pos);
                pending.push(item);
            }
        }
        let n = pending.len();
        for (k, (v, val)) in pending.into_iter().enumerate() {
            let is_last = k + 1 == n && last == Some(v);
            let sol = self.current.take().expect("current solution");
            let backup = if is_last { Some(sol.clone()) } else { None };
            match sol.fix_var(self.vars[v], val) {
                Ok(outcome) => {
                    self.current = Some(into_solution(outcome)?);
                    self.fixed.insert(v, val);
                }
                Err(microlp::Error::Infeasible) => {
                    match backup {
                        Some(b) => self.current = Some(b),
                        None => self.reset(),
                    }
                    if !is_last {
                        // an intermediate relaxation of a feasible parent cannot be
                        // infeasible; treat as numerical breakdown
                        return Err(MilpError::Numeric("intermediate relaxation reported infeasible".into()));
                    }
                    return Ok(false);
                }
                Err(e) => {
                    self.reset();
                    return Err(numeric(e));
                }
            }
        }
        Ok(true)
    }
}

/// Node relaxation solved without any warm start.
fn cold_node(inst: &MilpInstance, target: &BTreeMap<usize, f64>) -> Result<NodeLp, MilpError> {
    let mut fixed = inst.clone();
    for (&v, &val) in target {
        fixed.set_bounds(crate::VarId(v), val, val);
    }
    match solve_lp(&fixed)? {
        LpOutcome::Optimal(sol) => Ok(NodeLp::Optimal(sol)),
        LpOutcome::Infeasible => Ok(NodeLp::Infeasible),
        LpOutcome::Unbounded => Err(MilpError::Numeric("node relaxation unbounded below a bounded root".into())),
    }
}

fn numeric(e: microlp::Error) -> MilpError {
    MilpError::Numeric(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_upper_bound_row() {
        let mut m = MilpInstance::new("t");
        let x = m.add_continuous("x", 0.0, 100.0, 1.0);
        m.add_constraint("cap", [(x, 1.0)], Sense::Le, 3.0).unwrap();
        let sol = solve_lp(&m).unwrap().optimal().unwrap();
        assert!((sol.values[0] - 3.0).abs() < 1e-9);
        assert!((sol.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_with_redundant_row_terminates() {
        // vertex (1, 1) is over-determined by three active rows
        let mut m = MilpInstance::new("deg");
        let x = m.add_continuous("x", 0.0, 10.0, 1.0);
        let y = m.add_continuous("y", 0.0, 10.0, 1.0);
        m.add_constraint("a", [(x, 1.0), (y, 1.0)], Sense::Le, 2.0).unwrap();
        m.add_constraint("b", [(x, 2.0), (y, 2.0)], Sense::Le, 4.0).unwrap();
        m.add_constraint("c", [(x, 1.0), (y, -1.0)], Sense::Le, 0.0).unwrap();
        m.add_constraint("d", [(x, -1.0), (y, 1.0)], Sense::Le, 0.0).unwrap();
        let sol = solve_lp(&m).unwrap().optimal().unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_empty_rows() {
        let mut m = MilpInstance::new("inf");
        let x = m.add_continuous("x", 0.0, 1.0, 1.0);
        m.add_constraint("lo", [(x, 1.0)], Sense::Ge, 2.0).unwrap();
        assert_eq!(solve_lp(&m).unwrap(), LpOutcome::Infeasible);

        let mut m = MilpInstance::new("empty");
        m.add_continuous("x", 0.0, 1.0, 1.0);
        m.add_constraint("zero", std::iter::empty(), Sense::Ge, 1.0).unwrap();
        assert_eq!(solve_lp(&m).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn warm_navigation_matches_cold_solves() {
        let mut m = MilpInstance::new("nav");
        let a = m.add_binary("a", 5.0);
        let b = m.add_binary("b", 4.0);
        let c = m.add_binary("c", 3.0);
        m.add_constraint("w", [(a, 2.0), (b, 3.0), (c, 1.0)], Sense::Le, 4.0).unwrap();
        let RootLp::Ready(mut warm, root) = WarmLp::root(&m).unwrap() else {
            panic!("root should solve")
        };
        assert!((root.objective - solve_lp(&m).unwrap().optimal().unwrap().objective).abs() < 1e-9);

        let cases: Vec<BTreeMap<usize, f64>> = vec![
            [(0, 1.0)].into_iter().collect(),
            [(0, 1.0), (1, 1.0)].into_iter().collect(),
            [(1, 0.0)].into_iter().collect(),
            [(1, 1.0), (2, 1.0)].into_iter().collect(),
            BTreeMap::new(),
        ];
        for target in cases {
            let mut cold = m.clone();
            for (&v, &val) in &target {
                cold.set_bounds(crate::VarId(v), val, val);
            }
            let expect = solve_lp(&cold).unwrap();
            let got = warm.evaluate(&m, &target, target.keys().last().copied()).unwrap();
            match (expect, got) {
                (LpOutcome::Optimal(e), NodeLp::Optimal(g)) => {
                    assert!((e.objective - g.objective).abs() < 1e-9, "{target:?}")
                }
                (LpOutcome::Infeasible, NodeLp::Infeasible) => {}
                (e, g) => panic!("mismatch for {target:?}: {e:?} vs {g:?}"),
            }
        }
    }
}
