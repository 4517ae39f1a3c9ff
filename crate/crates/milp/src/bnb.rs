//! Best-first branch-and-bound over binary variables.
//!
//! Node selection plunges depth-first (rounding direction first) until the
//! first incumbent is found, then always expands the open node with the best
//! bound. Branching picks the most fractional binary, ties to the smallest
//! index. A node is pruned once its bound cannot beat the incumbent by more
//! than the configured relative gap.
//!
//! An expanded node hands a snapshot of its LP state to its children, so a
//! child costs one bound change instead of a walk from wherever the shared
//! relaxation last was. Snapshots are large, so only a bounded number live at
//! once; children without one fall back to the shared relaxation.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::MilpError;
use crate::instance::{MilpInstance, VarId, VarKind};
use crate::lp::{NodeLp, RootLp, WarmLp};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Relative optimality gap, `|bound - objective| / max(1, |objective|)`.
    pub gap: f64,
    pub node_limit: usize,
    /// Worker threads for node LPs. 1 is the deterministic sequential mode.
    pub threads: usize,
    pub time_limit: Option<Duration>,
    pub integrality_tol: f64,
    pub feasibility_tol: f64,
    /// Keep the global bound after every processed node in the solution.
    pub record_bound_trace: bool,
    /// Maximum number of LP snapshots kept for open nodes; `None` sizes the
    /// pool to roughly 1 GiB for the instance at hand.
    #[serde(default)]
    pub snapshot_limit: Option<usize>,
}

/// Measured footprint of one simplex state, per variable plus row.
const SNAPSHOT_BYTES_PER_DIM: usize = 320;
const SNAPSHOT_BUDGET_BYTES: usize = 1 << 30;

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            gap: 1e-4,
            node_limit: 1_000_000,
            threads: 1,
            time_limit: None,
            integrality_tol: 1e-6,
            feasibility_tol: 1e-7,
            record_bound_trace: false,
            snapshot_limit: None,
        }
    }
}

impl SolverSettings {
    pub fn with_gap(gap: f64) -> Self {
        Self { gap, ..Self::default() }
    }

    fn snapshot_capacity(&self, inst: &MilpInstance) -> usize {
        self.snapshot_limit.unwrap_or_else(|| {
            let dims = inst.num_vars() + inst.constraints().len();
            SNAPSHOT_BUDGET_BYTES / (SNAPSHOT_BYTES_PER_DIM * dims.max(1))
        })
    }

    fn validate(&self) -> Result<(), MilpError> {
        if !(self.gap > 0.0 && self.gap.is_finite()) {
            return Err(MilpError::InvalidSettings(format!("gap must be > 0, got {}", self.gap)));
        }
        if self.node_limit == 0 {
            return Err(MilpError::InvalidSettings("node limit must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(MilpError::InvalidSettings("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MilpStatus {
    OptimalWithinGap,
    Infeasible,
    Unbounded,
    NodeLimit,
    TimeLimit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MilpSolution {
    pub status: MilpStatus,
    /// Incumbent values, absent when no integer-feasible point was found.
    pub values: Option<Vec<f64>>,
    pub objective: Option<f64>,
    /// Best upper bound on the optimum (maximization).
    pub bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub wall_time: Duration,
    pub integrality_tol: f64,
    pub feasibility_tol: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bound_trace: Vec<f64>,
}

impl MilpSolution {
    pub fn has_incumbent(&self) -> bool {
        self.values.is_some()
    }

    fn without_incumbent(status: MilpStatus, bound: f64, nodes: usize, started: Instant, s: &SolverSettings) -> Self {
        Self {
            status,
            values: None,
            objective: None,
            bound,
            gap: f64::INFINITY,
            nodes,
            wall_time: started.elapsed(),
            integrality_tol: s.integrality_tol,
            feasibility_tol: s.feasibility_tol,
            bound_trace: Vec::new(),
        }
    }
}

/// Relative gap between an incumbent objective and a bound.
pub fn relative_gap(objective: f64, bound: f64) -> f64 {
    (bound - objective).abs() / objective.abs().max(1.0)
}

/// Persistent list of branching decisions, shared between siblings.
#[derive(Debug)]
struct Fixing {
    var: usize,
    value: f64,
    parent: Option<Arc<Fixing>>,
}

fn collect_fixings(chain: &Option<Arc<Fixing>>) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    let mut cur = chain.as_ref();
    while let Some(f) = cur {
        out.entry(f.var).or_insert(f.value);
        cur = f.parent.as_ref();
    }
    out
}

/// LP state at an expanded node, shared by its children.
struct Snapshot {
    warm: WarmLp,
    live: Arc<AtomicUsize>,
}

impl Drop for Snapshot {
    fn drop(&mut self) {
        self.live.fetch_sub(1, AtomicOrdering::Relaxed);
    }
}

struct OpenNode {
    bound: f64,
    depth: usize,
    seq: u64,
    chain: Option<Arc<Fixing>>,
    parent: Option<Arc<Snapshot>>,
}

impl OpenNode {
    fn last_var(&self) -> Option<usize> {
        self.chain.as_ref().map(|f| f.var)
    }

    /// Solves this node's relaxation, from the parent snapshot when there is
    /// one (returning the resulting state) and otherwise on `shared`.
    fn evaluate(&self, inst: &MilpInstance, shared: &mut WarmLp) -> Result<(NodeLp, Option<WarmLp>), MilpError> {
        let fixes = collect_fixings(&self.chain);
        match &self.parent {
            Some(snap) => {
                let mut warm = snap.warm.clone();
                let lp = warm.evaluate(inst, &fixes, self.last_var())?;
                Ok((lp, Some(warm)))
            }
            None => Ok((shared.evaluate(inst, &fixes, self.last_var())?, None)),
        }
    }
}

impl PartialEq for OpenNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for OpenNode {}
impl PartialOrd for OpenNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpenNode {
    // max-heap: best bound, then deeper, then oldest
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

struct Incumbent {
    values: Vec<f64>,
    objective: f64,
}

struct Search<'a> {
    inst: &'a MilpInstance,
    settings: &'a SolverSettings,
    binaries: Vec<usize>,
    incumbent: Option<Incumbent>,
    open: BinaryHeap<OpenNode>,
    seq: u64,
    nodes: usize,
    trace: Vec<f64>,
    /// Largest bound among nodes discarded by the gap test; keeps the reported
    /// bound a valid certificate after pruning.
    dropped: f64,
    live_snapshots: Arc<AtomicUsize>,
    snapshot_capacity: usize,
}

enum Expansion {
    Pruned,
    Integral,
    Branched { down: OpenNode, up: OpenNode, prefer_up: bool },
}

impl<'a> Search<'a> {
    fn threshold(&self) -> f64 {
        match &self.incumbent {
            Some(inc) => inc.objective + self.settings.gap * inc.objective.abs().max(1.0),
            None => f64::NEG_INFINITY,
        }
    }

    fn next_seq(&mut self) -> u64 {
        self.seq += 1;
        self.seq
    }

    fn global_bound(&self, extra: Option<f64>) -> f64 {
        let open = self.open.peek().map(|n| n.bound);
        let inc = self.incumbent.as_ref().map(|i| i.objective);
        [open, inc, extra, Some(self.dropped)]
            .into_iter()
            .flatten()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Most fractional binary, ties to the smallest index.
    fn branching_var(&self, values: &[f64]) -> Option<(usize, f64)> {
        let tol = self.settings.integrality_tol;
        let mut best: Option<(usize, f64, f64)> = None;
        for &j in &self.binaries {
            let x = values[j];
            let frac = (x - x.floor()).min(x.ceil() - x);
            if frac > tol && best.map_or(true, |(_, _, f)| frac > f) {
                best = Some((j, x, frac));
            }
        }
        best.map(|(j, x, _)| (j, x))
    }

    /// Accepts an integral LP point as incumbent after rechecking it against
    /// the original instance; falls back to re-solving with all binaries fixed
    /// at their rounded values when round-off breaks the recheck, or always
    /// with `polish`.
    fn offer(&mut self, values: &[f64], warm: &WarmLp, polish: bool) -> Result<(), MilpError> {
        let mut candidate = values.to_vec();
        for &j in &self.binaries {
            candidate[j] = candidate[j].round();
        }
        let check_tol = 1e-6;
        if polish || self.inst.check_feasibility(&candidate, check_tol).is_err() {
            let fixes: BTreeMap<usize, f64> = self.binaries.iter().map(|&j| (j, candidate[j])).collect();
            let mut polish = warm.clone();
            match polish.evaluate(self.inst, &fixes, None) {
                Ok(NodeLp::Optimal(sol)) => {
                    candidate = sol.values;
                    for &j in &self.binaries {
                        candidate[j] = candidate[j].round();
                    }
                }
                _ => return Ok(()),
            }
            if let Err(v) = self.inst.check_feasibility(&candidate, check_tol) {
                debug!("rejecting numerically infeasible incumbent: {v}");
                return Ok(());
            }
        }
        let objective = self.inst.objective_value(&candidate);
        if self.incumbent.as_ref().map_or(true, |inc| objective > inc.objective) {
            debug!("node {}: new incumbent {objective}", self.nodes);
            self.incumbent = Some(Incumbent {
                values: candidate,
                objective,
            });
        }
        Ok(())
    }

    /// `here` is the LP state at `node` if it was solved from a snapshot;
    /// otherwise `shared` sits at `node`.
    fn expand(
        &mut self,
        node: &OpenNode,
        lp: NodeLp,
        here: Option<WarmLp>,
        shared: &WarmLp,
    ) -> Result<Expansion, MilpError> {
        let sol = match lp {
            NodeLp::Infeasible => return Ok(Expansion::Pruned),
            NodeLp::Optimal(sol) => sol,
        };
        // a child relaxation can never exceed its parent's
        let bound = sol.objective.min(node.bound);
        if bound <= self.threshold() {
            self.dropped = self.dropped.max(bound);
            return Ok(Expansion::Pruned);
        }
        match self.branching_var(&sol.values) {
            None => {
                self.offer(&sol.values, here.as_ref().unwrap_or(shared), false)?;
                self.dropped = self.dropped.max(bound);
                Ok(Expansion::Integral)
            }
            Some((j, x)) => {
                let parent = if self.live_snapshots.load(AtomicOrdering::Relaxed) < self.snapshot_capacity {
                    self.live_snapshots.fetch_add(1, AtomicOrdering::Relaxed);
                    Some(Arc::new(Snapshot {
                        warm: here.unwrap_or_else(|| shared.clone()),
                        live: Arc::clone(&self.live_snapshots),
                    }))
                } else {
                    None
                };
                let mk = |search: &mut Self, value: f64| OpenNode {
                    bound,
                    depth: node.depth + 1,
                    seq: search.next_seq(),
                    chain: Some(Arc::new(Fixing {
                        var: j,
                        value,
                        parent: node.chain.clone(),
                    })),
                    parent: parent.clone(),
                };
                let down = mk(self, 0.0);
                let up = mk(self, 1.0);
                Ok(Expansion::Branched {
                    down,
                    up,
                    prefer_up: x >= 0.5,
                })
            }
        }
    }

    fn finish(self, status: MilpStatus, started: Instant, final_bound: f64) -> MilpSolution {
        let (values, objective, bound, gap) = match self.incumbent {
            Some(inc) => {
                let bound = final_bound.max(inc.objective);
                let gap = relative_gap(inc.objective, bound);
                (Some(inc.values), Some(inc.objective), bound, gap)
            }
            None => (None, None, final_bound, f64::INFINITY),
        };
        MilpSolution {
            status,
            values,
            objective,
            bound,
            gap,
            nodes: self.nodes,
            wall_time: started.elapsed(),
            integrality_tol: self.settings.integrality_tol,
            feasibility_tol: self.settings.feasibility_tol,
            bound_trace: self.trace,
        }
    }
}

/// Solves `inst` to the relative gap in `settings`.
pub fn solve_milp(inst: &MilpInstance, settings: &SolverSettings) -> Result<MilpSolution, MilpError> {
    solve(inst, settings, None)
}

/// Like [`solve_milp`], seeded with a known assignment. Only the binaries of
/// `start` matter: they are fixed and the continuous part re-optimized. A
/// start that turns out infeasible is ignored.
pub fn solve_milp_from(inst: &MilpInstance, settings: &SolverSettings, start: &[f64]) -> Result<MilpSolution, MilpError> {
    if start.len() != inst.num_vars() {
        return Err(MilpError::InvalidSettings(format!(
            "start has {} values for {} variables",
            start.len(),
            inst.num_vars()
        )));
    }
    if start.iter().any(|x| !x.is_finite()) {
        return Err(MilpError::NonFinite("start".into()));
    }
    solve(inst, settings, Some(start))
}

fn solve(inst: &MilpInstance, settings: &SolverSettings, start: Option<&[f64]>) -> Result<MilpSolution, MilpError> {
    settings.validate()?;
    inst.validate()?;
    let started = Instant::now();

    let (mut warm, root) = match WarmLp::root(inst)? {
        RootLp::Ready(w, r) => (w, r),
        RootLp::Infeasible => {
            return Ok(MilpSolution::without_incumbent(
                MilpStatus::Infeasible,
                f64::NEG_INFINITY,
                1,
                started,
                settings,
            ))
        }
        RootLp::Unbounded => {
            return Ok(MilpSolution::without_incumbent(
                MilpStatus::Unbounded,
                f64::INFINITY,
                1,
                started,
                settings,
            ))
        }
    };

    let binaries: Vec<usize> = inst
        .vars()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(i, _)| i)
        .collect();
    let mut search = Search {
        inst,
        settings,
        binaries,
        incumbent: None,
        open: BinaryHeap::new(),
        seq: 0,
        nodes: 1,
        trace: Vec::new(),
        dropped: f64::NEG_INFINITY,
        live_snapshots: Arc::new(AtomicUsize::new(0)),
        snapshot_capacity: settings.snapshot_capacity(inst),
    };

    if let Some(start) = start {
        search.offer(start, &warm, true)?;
        if search.incumbent.is_none() {
            debug!("start assignment rejected");
        }
    }

    let root_node = OpenNode {
        bound: f64::INFINITY,
        depth: 0,
        seq: 0,
        chain: None,
        parent: None,
    };
    let root_bound = root.objective;
    let mut dive = match search.expand(&root_node, NodeLp::Optimal(root), None, &warm)? {
        Expansion::Pruned | Expansion::Integral => None,
        Expansion::Branched { down, up, prefer_up } => {
            let (first, second) = if prefer_up { (up, down) } else { (down, up) };
            search.open.push(second);
            Some(first)
        }
    };
    if settings.record_bound_trace {
        let b = search.global_bound(dive.as_ref().map(|n| n.bound));
        search.trace.push(b.min(root_bound));
    }

    // plunge until the first incumbent
    while let Some(node) = dive.take() {
        if search.incumbent.is_some() {
            search.open.push(node);
            break;
        }
        if let Some(status) = limit_hit(&search, started) {
            search.open.push(node);
            let b = search.global_bound(None);
            return Ok(search.finish(status, started, b));
        }
        let (lp, here) = node.evaluate(inst, &mut warm)?;
        search.nodes += 1;
        match search.expand(&node, lp, here, &warm)? {
            Expansion::Pruned | Expansion::Integral => {
                // backtrack to the most promising open node and keep diving
                dive = search.open.pop();
            }
            Expansion::Branched { down, up, prefer_up } => {
                let (first, second) = if prefer_up { (up, down) } else { (down, up) };
                search.open.push(second);
                dive = Some(first);
            }
        }
        record(&mut search, dive.as_ref().map(|n| n.bound));
    }

    if settings.threads <= 1 {
        best_first_sequential(&mut search, &mut warm, started)
    } else {
        best_first_parallel(&mut search, warm, started)
    }
    .map(|status| {
        let b = search.global_bound(None);
        let status = status.unwrap_or(if search.incumbent.is_some() {
            MilpStatus::OptimalWithinGap
        } else {
            MilpStatus::Infeasible
        });
        search.finish(status, started, b)
    })
}

fn record(search: &mut Search<'_>, extra: Option<f64>) {
    if search.settings.record_bound_trace {
        let b = search.global_bound(extra);
        search.trace.push(b);
    }
}

fn limit_hit(search: &Search<'_>, started: Instant) -> Option<MilpStatus> {
    if search.nodes >= search.settings.node_limit {
        return Some(MilpStatus::NodeLimit);
    }
    match search.settings.time_limit {
        Some(t) if started.elapsed() >= t => Some(MilpStatus::TimeLimit),
        _ => None,
    }
}

/// True when no open node can beat the incumbent by more than the gap.
fn drain_if_done(search: &mut Search<'_>) -> bool {
    match search.open.peek() {
        None => true,
        Some(n) if n.bound <= search.threshold() => {
            search.dropped = search.dropped.max(n.bound);
            search.open.clear();
            true
        }
        Some(_) => false,
    }
}

/// Drops open nodes that can no longer improve on the incumbent.
fn pop_live(search: &mut Search<'_>) -> Option<OpenNode> {
    let thr = search.threshold();
    match search.open.pop() {
        Some(n) if n.bound > thr => Some(n),
        // heap is ordered by bound: everything left is dominated too
        Some(n) => {
            search.dropped = search.dropped.max(n.bound);
            search.open.clear();
            None
        }
        None => None,
    }
}

fn best_first_sequential(
    search: &mut Search<'_>,
    warm: &mut WarmLp,
    started: Instant,
) -> Result<Option<MilpStatus>, MilpError> {
    loop {
        if drain_if_done(search) {
            return Ok(None);
        }
        if let Some(status) = limit_hit(search, started) {
            return Ok(Some(status));
        }
        let Some(node) = pop_live(search) else {
            return Ok(None);
        };
        let (lp, here) = node.evaluate(search.inst, warm)?;
        search.nodes += 1;
        if let Expansion::Branched { down, up, .. } = search.expand(&node, lp, here, warm)? {
            search.open.push(down);
            search.open.push(up);
        }
        record(search, None);
    }
}

/// Evaluates up to `threads` open nodes concurrently, then applies their
/// results in pop order so the search is reproducible for a fixed thread count.
fn best_first_parallel(
    search: &mut Search<'_>,
    warm: WarmLp,
    started: Instant,
) -> Result<Option<MilpStatus>, MilpError> {
    use rayon::prelude::*;

    let threads = search.settings.threads;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| MilpError::InvalidSettings(e.to_string()))?;
    let mut workers: Vec<WarmLp> = (0..threads).map(|_| warm.clone()).collect();
    loop {
        if drain_if_done(search) {
            return Ok(None);
        }
        if let Some(status) = limit_hit(search, started) {
            return Ok(Some(status));
        }
        let budget = (search.settings.node_limit - search.nodes).min(threads);
        let mut batch = Vec::with_capacity(budget);
        while batch.len() < budget {
            match pop_live(search) {
                Some(n) => batch.push(n),
                None => break,
            }
        }
        if batch.is_empty() {
            return Ok(None);
        }
        let inst = search.inst;
        let results: Vec<Result<(NodeLp, Option<WarmLp>), MilpError>> = pool.install(|| {
            workers
                .par_iter_mut()
                .zip(batch.par_iter())
                .map(|(w, node)| node.evaluate(inst, w))
                .collect()
        });
        for (k, (node, result)) in batch.iter().zip(results).enumerate() {
            search.nodes += 1;
            let (lp, here) = result?;
            if let Expansion::Branched { down, up, .. } = search.expand(node, lp, here, &workers[k])? {
                search.open.push(down);
                search.open.push(up);
            }
        }
        record(search, None);
    }
}

/// Convenience accessor for reading a binary decision from a solution.
pub fn is_set(values: &[f64], var: VarId) -> bool {
    values[var.0] > 0.5
}
