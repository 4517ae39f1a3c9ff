//! Textbook two-phase tableau simplex on dense matrices.
//!
//! Deliberately shares nothing with the production LP path: variables are
//! shifted to zero lower bounds, finite upper bounds become explicit rows, and
//! every row gets a slack/surplus/artificial column. Pivoting uses Dantzig's
//! rule and switches to Bland's rule after 50 consecutive degenerate pivots.

use hpp_milp::{MilpInstance, Sense};

const EPS: f64 = 1e-9;
const DEGENERATE_STALL: usize = 50;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub enum TableauOutcome {
    Optimal { values: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

impl TableauOutcome {
    pub fn objective(&self) -> Option<f64> {
        match self {
            TableauOutcome::Optimal { objective, .. } => Some(*objective),
            _ => None,
        }
    }
}

/// Dense LP: maximize `c·x` s.t. rows, `0 <= x <= upper`.
#[derive(Debug, Clone)]
pub struct DenseLp {
    pub c: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Sense, f64)>,
    pub upper: Vec<f64>,
}

/// Relaxation of `inst` (binaries continuous in their bounds) solved with the
/// tableau method. Fixed variables (`lower == upper`) are substituted out.
pub fn solve_instance(inst: &MilpInstance) -> TableauOutcome {
    let vars = inst.vars();
    let free: Vec<usize> = (0..vars.len()).filter(|&j| vars[j].lower != vars[j].upper).collect();
    let mut col_of = vec![usize::MAX; vars.len()];
    for (k, &j) in free.iter().enumerate() {
        col_of[j] = k;
    }
    let n = free.len();
    let c: Vec<f64> = free.iter().map(|&j| vars[j].objective).collect();
    let offset: f64 = vars.iter().map(|v| v.objective * v.lower).sum();
    let upper: Vec<f64> = free.iter().map(|&j| vars[j].upper - vars[j].lower).collect();
    let mut rows = Vec::new();
    for row in inst.constraints() {
        let mut a = vec![0.0; n];
        let mut rhs = row.rhs;
        for &(v, coef) in &row.terms {
            rhs -= coef * vars[v.0].lower;
            if col_of[v.0] != usize::MAX {
                a[col_of[v.0]] += coef;
            }
        }
        if a.iter().all(|&x| x == 0.0) {
            let ok = match row.sense {
                Sense::Le => rhs >= -1e-9,
                Sense::Ge => rhs <= 1e-9,
                Sense::Eq => rhs.abs() <= 1e-9,
            };
            if !ok {
                return TableauOutcome::Infeasible;
            }
            continue;
        }
        rows.push((a, row.sense, rhs));
    }
    match solve_dense(&DenseLp { c, rows, upper }) {
        TableauOutcome::Optimal { values, objective } => {
            let mut full: Vec<f64> = vars.iter().map(|v| v.lower).collect();
            for (k, &j) in free.iter().enumerate() {
                full[j] += values[k];
            }
            TableauOutcome::Optimal {
                values: full,
                objective: objective + offset,
            }
        }
        other => other,
    }
}

struct Tableau {
    // row 0 is the objective row: entries are -reduced costs
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.t[r][col];
        for x in self.t[r].iter_mut() {
            *x /= p;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f.abs() > 0.0 {
                for (x, &y) in row.iter_mut().zip(&prow) {
                    *x -= f * y;
                }
            }
        }
        self.basis[r - 1] = col;
    }

    /// Runs simplex iterations on the columns allowed by `allowed`.
    /// Returns false on unboundedness.
    fn run(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<bool, &'static str> {
        let rhs = self.ncols;
        let mut stall = 0;
        for _ in 0..MAX_PIVOTS {
            let bland = stall >= DEGENERATE_STALL;
            let obj = &self.t[0];
            let mut entering = None;
            let mut best = -EPS;
            for j in 0..self.ncols {
                if !allowed(j) {
                    continue;
                }
                let d = obj[j];
                if d < -EPS {
                    if bland {
                        entering = Some(j);
                        break;
                    }
                    if d < best {
                        best = d;
                        entering = Some(j);
                    }
                }
            }
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 1..self.t.len() {
                let a = self.t[i][col];
                if a > EPS {
                    let ratio = self.t[i][rhs] / a;
                    let better = match leave {
                        None => true,
                        Some((r, best_ratio)) => {
                            ratio < best_ratio - EPS
                                || (ratio <= best_ratio + EPS && self.basis[i - 1] < self.basis[r - 1])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(false);
            };
            if ratio.abs() <= EPS {
                stall += 1;
            } else {
                stall = 0;
            }
            self.pivot(r, col);
        }
        Err("pivot limit exhausted")
    }
}

pub fn solve_dense(lp: &DenseLp) -> TableauOutcome {
    let n = lp.c.len();
    // explicit rows: constraints followed by upper bounds
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = lp.rows.clone();
    for j in 0..n {
        let mut a = vec![0.0; n];
        a[j] = 1.0;
        rows.push((a, Sense::Le, lp.upper[j]));
    }
    for r in rows.iter_mut() {
        if r.2 < 0.0 {
            for x in r.0.iter_mut() {
                *x = -*x;
            }
            r.2 = -r.2;
            r.1 = match r.1 {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let ncols = n + n_slack + n_art;
    let art_start = n + n_slack;
    let mut t = vec![vec![0.0; ncols + 1]; m + 1];
    let mut basis = vec![0; m];
    let (mut s, mut a) = (n, art_start);
    for (i, (coef, sense, rhs)) in rows.iter().enumerate() {
        let row = &mut t[i + 1];
        row[..n].copy_from_slice(coef);
        row[ncols] = *rhs;
        match sense {
            Sense::Le => {
                row[s] = 1.0;
                basis[i] = s;
                s += 1;
            }
            Sense::Ge => {
                row[s] = -1.0;
                s += 1;
                row[a] = 1.0;
                basis[i] = a;
                a += 1;
            }
            Sense::Eq => {
                row[a] = 1.0;
                basis[i] = a;
                a += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, ncols };

    // phase 1: maximize -sum(artificials)
    if n_art > 0 {
        let mut obj = vec![0.0; ncols + 1];
        for x in obj[art_start..ncols].iter_mut() {
            *x = 1.0;
        }
        for i in 0..m {
            if tab.basis[i] >= art_start {
                for k in 0..=ncols {
                    obj[k] -= tab.t[i + 1][k];
                }
            }
        }
        tab.t[0] = obj;
        match tab.run(&|_| true) {
            Ok(true) => {}
            Ok(false) | Err(_) => return TableauOutcome::Infeasible,
        }
        if -tab.t[0][ncols] > 1e-7 {
            return TableauOutcome::Infeasible;
        }
        // drive zero-valued artificials out of the basis
        let mut i = 0;
        while i < tab.basis.len() {
            if tab.basis[i] >= art_start {
                let r = i + 1;
                match (0..art_start).find(|&j| tab.t[r][j].abs() > 1e-9) {
                    Some(j) => tab.pivot(r, j),
                    None => {
                        // redundant row
                        tab.t.remove(r);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    // phase 2 objective row: -c, then eliminate basic columns
    let mut obj = vec![0.0; ncols + 1];
    for j in 0..n {
        obj[j] = -lp.c[j];
    }
    for i in 0..tab.basis.len() {
        let b = tab.basis[i];
        let f = obj[b];
        if f != 0.0 {
            for k in 0..=ncols {
                obj[k] -= f * tab.t[i + 1][k];
            }
        }
    }
    tab.t[0] = obj;
    match tab.run(&|j| j < art_start) {
        Ok(true) => {}
        Ok(false) => return TableauOutcome::Unbounded,
        Err(_) => return TableauOutcome::Infeasible,
    }
    let mut x = vec![0.0; n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.t[i + 1][ncols];
        }
    }
    let objective = lp.c.iter().zip(&x).map(|(c, v)| c * v).sum();
    TableauOutcome::Optimal { values: x, objective }
}
