use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::MilpError;

/// Index of a variable inside a [`MilpInstance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which `values` violates this row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A constraint or bound that a candidate point fails to satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub what: String,
    pub amount: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated by {:.3e}", self.what, self.amount)
    }
}

/// A sparse mixed-integer linear program in maximization form.
///
/// Variables are added first, constraints reference them by [`VarId`]; a
/// constraint mentioning an undeclared variable is rejected at insertion, so
/// every stored row is well formed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MilpInstance {
    pub name: String,
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
    #[serde(skip)]
    by_name: HashMap<String, VarId>,
}

impl MilpInstance {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64, objective: f64) -> VarId {
        self.push_var(Variable {
            name: name.into(),
            kind: VarKind::Continuous,
            lower,
            upper,
            objective,
        })
    }

    pub fn add_binary(&mut self, name: impl Into<String>, objective: f64) -> VarId {
        self.push_var(Variable {
            name: name.into(),
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
            objective,
        })
    }

    fn push_var(&mut self, var: Variable) -> VarId {
        let id = VarId(self.vars.len());
        assert!(
            self.by_name.insert(var.name.clone(), id).is_none(),
            "duplicate variable name {}",
            var.name
        );
        self.vars.push(var);
        id
    }

    /// Adds a row. Terms on the same variable are merged; zero coefficients dropped.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<usize, MilpError> {
        let name = name.into();
        let mut merged: Vec<(VarId, f64)> = Vec::new();
        for (v, c) in terms {
            if v.0 >= self.vars.len() {
                return Err(MilpError::UndeclaredVariable { row: name, index: v.0 });
            }
            if !c.is_finite() {
                return Err(MilpError::NonFinite(format!("coefficient in row {name}")));
            }
            match merged.iter_mut().find(|(u, _)| *u == v) {
                Some((_, acc)) => *acc += c,
                None => merged.push((v, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0.0);
        if !rhs.is_finite() {
            return Err(MilpError::NonFinite(format!("rhs of row {name}")));
        }
        self.constraints.push(Constraint {
            name,
            terms: merged,
            sense,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn num_continuous(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Continuous).count()
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| VarId(i))
    }

    pub fn find(&self, name: &str) -> Option<VarId> {
        if self.by_name.len() == self.vars.len() {
            return self.by_name.get(name).copied();
        }
        // deserialized instances do not carry the lookup table
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    /// Tightens the bounds of an existing variable.
    pub fn set_bounds(&mut self, id: VarId, lower: f64, upper: f64) {
        let v = &mut self.vars[id.0];
        v.lower = lower;
        v.upper = upper;
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.vars.iter().zip(values).map(|(v, x)| v.objective * x).sum()
    }

    /// Checks bounds, integrality and every row at absolute tolerance `tol`.
    /// Returns the largest violation, if any exceeds `tol`.
    pub fn check_feasibility(&self, values: &[f64], tol: f64) -> Result<(), Violation> {
        if values.len() != self.vars.len() {
            return Err(Violation {
                what: format!("value vector length {} (expected {})", values.len(), self.vars.len()),
                amount: f64::INFINITY,
            });
        }
        let mut worst: Option<Violation> = None;
        let mut record = |what: &dyn Fn() -> String, amount: f64| {
            if amount > tol && worst.as_ref().map_or(true, |w| amount > w.amount) {
                worst = Some(Violation { what: what(), amount });
            }
        };
        for (v, &x) in self.vars.iter().zip(values) {
            if !x.is_finite() {
                record(&|| format!("value of {}", v.name), f64::INFINITY);
                continue;
            }
            record(&|| format!("lower bound of {}", v.name), v.lower - x);
            record(&|| format!("upper bound of {}", v.name), x - v.upper);
            if v.kind == VarKind::Binary {
                record(&|| format!("integrality of {}", v.name), (x - x.round()).abs());
            }
        }
        for row in &self.constraints {
            record(&|| format!("constraint {}", row.name), row.violation(values));
        }
        match worst {
            Some(w) => Err(w),
            None => Ok(()),
        }
    }

    /// Rejects variables without finite bounds; the LP engine assumes a bounded box.
    pub fn validate(&self) -> Result<(), MilpError> {
        for v in &self.vars {
            if !(v.lower.is_finite() && v.upper.is_finite()) {
                return Err(MilpError::UnboundedVariable(v.name.clone()));
            }
            if v.lower > v.upper {
                return Err(MilpError::EmptyDomain(v.name.clone()));
            }
            if !v.objective.is_finite() {
                return Err(MilpError::NonFinite(format!("objective of {}", v.name)));
            }
        }
        Ok(())
    }

    /// Rebuilds the name lookup table (needed after deserialization).
    pub fn reindex(&mut self) {
        self.by_name = self
            .vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.clone(), VarId(i)))
            .collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_duplicate_terms_and_drops_zeros() {
        let mut m = MilpInstance::new("t");
        let x = m.add_continuous("x", 0.0, 1.0, 1.0);
        let y = m.add_continuous("y", 0.0, 1.0, 1.0);
        m.add_constraint("r", [(x, 1.0), (y, 2.0), (x, 0.5), (y, -2.0)], Sense::Le, 1.0)
            .unwrap();
        assert_eq!(m.constraints()[0].terms, vec![(x, 1.5)]);
    }

    #[test]
    fn rejects_undeclared_variable() {
        let mut m = MilpInstance::new("t");
        let err = m.add_constraint("bad", [(VarId(3), 1.0)], Sense::Le, 1.0).unwrap_err();
        assert!(matches!(err, MilpError::UndeclaredVariable { index: 3, .. }));
    }

    #[test]
    fn feasibility_reports_worst_row() {
        let mut m = MilpInstance::new("t");
        let x = m.add_continuous("x", 0.0, 10.0, 1.0);
        let z = m.add_binary("z", 0.0);
        m.add_constraint("cap", [(x, 1.0), (z, -5.0)], Sense::Le, 0.0).unwrap();
        m.add_constraint("floor", [(x, 1.0)], Sense::Ge, 1.0).unwrap();
        assert!(m.check_feasibility(&[3.0, 1.0], 1e-9).is_ok());
        let v = m.check_feasibility(&[7.0, 1.0], 1e-9).unwrap_err();
        assert_eq!(v.what, "constraint cap");
        assert!((v.amount - 2.0).abs() < 1e-12);
        let v = m.check_feasibility(&[0.5, 0.5], 1e-9).unwrap_err();
        assert_eq!(v.what, "integrality of z");
    }

    #[test]
    fn counts_by_kind() {
        let mut m = MilpInstance::new("t");
        m.add_continuous("a", 0.0, 1.0, 0.0);
        m.add_binary("b", 0.0);
        m.add_binary("c", 0.0);
        assert_eq!(m.num_binaries(), 2);
        assert_eq!(m.num_continuous(), 1);
        assert_eq!(m.find("c"), Some(VarId(2)));
    }
}
