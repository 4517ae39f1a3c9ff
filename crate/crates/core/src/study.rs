//! Study orchestration: single runs, variant comparisons and sensitivity
//! sweeps, plus the files they leave behind.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

use hpp_milp::{solve_milp, solve_milp_from, MilpSolution, MilpStatus, SolverSettings};

use crate::bounds::{classify_hours, ClassCounts, PriceRange};
use crate::error::{CoreError, Result};
use crate::expost::{self, ExPostReport};
use crate::models::{build, decode_solution, start_from_schedule, DispatchModel, DispatchSchedule, ModelKind, ProfitBreakdown, State};
use crate::scenario::PlantScenario;
use crate::segmentation::{segment_set, RefinementRule, SegmentSet, SEGMENT_COUNTS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub model: ModelKind,
    pub segments: usize,
    pub horizon_start: usize,
    /// `None` runs to the end of the loaded series.
    pub horizon_hours: Option<usize>,
    pub gap: f64,
    pub node_limit: usize,
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit_s: Option<f64>,
    /// Start three-state runs from the on/standby optimum, which is always
    /// feasible for them.
    #[serde(default = "yes")]
    pub seed: bool,
}

fn yes() -> bool {
    true
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            model: ModelKind::Oos,
            segments: 12,
            horizon_start: 0,
            horizon_hours: Some(168),
            gap: 1e-4,
            node_limit: 1_000_000,
            threads: 1,
            time_limit_s: None,
            seed: true,
        }
    }
}

impl RunSpec {
    pub fn new(model: ModelKind, segments: usize) -> Self {
        RunSpec {
            model,
            segments,
            ..RunSpec::default()
        }
    }

    pub fn label(&self) -> String {
        format!("{}-{}", self.model, self.segments)
    }

    /// Parses a label such as `OOS-12` (case-insensitive) on default settings.
    pub fn from_label(label: &str) -> Result<Self> {
        let bad = || CoreError::InvalidArgument(format!("variant `{label}` is not of the form MODEL-SEGMENTS, e.g. OOS-12"));
        let (model, segments) = label.trim().split_once('-').ok_or_else(bad)?;
        let spec = RunSpec::new(model.parse()?, segments.parse().map_err(|_| bad())?);
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !SEGMENT_COUNTS.contains(&self.segments) {
            return Err(CoreError::InvalidArgument(format!(
                "segments must be one of {SEGMENT_COUNTS:?}, got {}",
                self.segments
            )));
        }
        if !(self.gap > 0.0 && self.gap.is_finite()) {
            return Err(CoreError::InvalidArgument(format!("gap must be > 0, got {}", self.gap)));
        }
        if self.node_limit == 0 || self.threads == 0 {
            return Err(CoreError::InvalidArgument("node limit and threads must be at least 1".into()));
        }
        if matches!(self.time_limit_s, Some(t) if !(t > 0.0)) {
            return Err(CoreError::InvalidArgument("time limit must be positive".into()));
        }
        Ok(())
    }

    pub fn solver_settings(&self) -> SolverSettings {
        SolverSettings {
            gap: self.gap,
            node_limit: self.node_limit,
            threads: self.threads,
            time_limit: self.time_limit_s.map(Duration::from_secs_f64),
            ..SolverSettings::default()
        }
    }

    /// The scenario restricted to this spec's horizon window.
    pub fn window(&self, scn: &PlantScenario) -> Result<PlantScenario> {
        let hours = match self.horizon_hours {
            Some(h) => h,
            None => scn.hours().checked_sub(self.horizon_start).ok_or_else(|| {
                CoreError::InvalidArgument(format!(
                    "horizon start {} beyond the {}-hour series",
                    self.horizon_start,
                    scn.hours()
                ))
            })?,
        };
        if self.horizon_start == 0 && hours == scn.hours() {
            return Ok(scn.clone());
        }
        scn.slice_horizon(self.horizon_start, hours)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub status: MilpStatus,
    pub objective: Option<f64>,
    /// Absent when the bound is not finite (infeasible or unbounded).
    pub bound: Option<f64>,
    pub gap: Option<f64>,
    pub configured_gap: f64,
    pub nodes: usize,
    pub binaries: usize,
    pub continuous: usize,
    pub constraints: usize,
    pub wall_time_s: f64,
    /// Time spent producing the start assignment, when one was used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_time_s: Option<f64>,
}

impl SolverStats {
    fn new(sol: &MilpSolution, model: &DispatchModel, configured_gap: f64) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        SolverStats {
            status: sol.status,
            objective: sol.objective,
            bound: finite(sol.bound),
            gap: finite(sol.gap),
            configured_gap,
            nodes: sol.nodes,
            binaries: model.instance.num_binaries(),
            continuous: model.instance.num_continuous(),
            constraints: model.instance.constraints().len(),
            wall_time_s: sol.wall_time.as_secs_f64(),
            seed_time_s: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateCounts {
    pub on: usize,
    pub off: usize,
    pub standby: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSummary {
    pub estimated_profit_eur: f64,
    pub profit: ProfitBreakdown,
    pub realized_surplus_profit_eur: f64,
    pub realized_profit_eur: f64,
    pub estimated_hydrogen_kg: f64,
    pub realized_surplus_hydrogen_kg: f64,
    pub realized_hydrogen_kg: f64,
    /// Surplus hydrogen over the estimate.
    pub surplus_share: f64,
    /// Extra compression energy for the surplus; not charged.
    pub surplus_compressor_mwh: f64,
    pub delivered_kg: f64,
    pub final_storage_kg: f64,
    pub states: StateCounts,
    pub startups: usize,
}

impl ScheduleSummary {
    pub fn new(schedule: &DispatchSchedule, ex: &ExPostReport) -> Self {
        ScheduleSummary {
            estimated_profit_eur: ex.estimated_profit,
            profit: schedule.profit,
            realized_surplus_profit_eur: ex.realized_surplus_profit,
            realized_profit_eur: ex.realized_profit,
            estimated_hydrogen_kg: ex.estimated_hydrogen_kg,
            realized_surplus_hydrogen_kg: ex.realized_surplus_hydrogen_kg,
            realized_hydrogen_kg: ex.estimated_hydrogen_kg + ex.realized_surplus_hydrogen_kg,
            surplus_share: ex.surplus_share(),
            surplus_compressor_mwh: ex.surplus_compressor_mwh,
            delivered_kg: schedule.hours.iter().map(|h| h.delivered).sum(),
            final_storage_kg: schedule.hours.last().map_or(0.0, |h| h.storage),
            states: StateCounts {
                on: schedule.count(State::On),
                off: schedule.count(State::Off),
                standby: schedule.count(State::Standby),
            },
            startups: schedule.startups(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonInfo {
    pub start: DateTime<Utc>,
    pub start_hour: usize,
    pub hours: usize,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchReport {
    pub label: String,
    pub spec: RunSpec,
    pub horizon: HorizonInfo,
    pub segment_rule: RefinementRule,
    pub breakpoints_mw: Vec<f64>,
    pub solver: SolverStats,
    /// Absent when the solver found no schedule.
    pub summary: Option<ScheduleSummary>,
    pub units: String,
}

/// Contents of `bounds.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub hydrogen_price_eur_kg: f64,
    pub standby_load_mw: f64,
    #[serde(flatten)]
    pub range: PriceRange,
    pub hours: ClassCounts,
    pub note: String,
}

impl BoundsReport {
    pub fn new(range: PriceRange, scn: &PlantScenario) -> Self {
        BoundsReport {
            hydrogen_price_eur_kg: scn.lambda_h,
            standby_load_mw: scn.p_sb,
            range,
            hours: classify_hours(&range, &scn.prices).1,
            note: "valid for ample wind and non-binding demand; closed interval".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub spec: RunSpec,
    pub scenario: PlantScenario,
    pub segments: SegmentSet,
    pub solution: MilpSolution,
    pub stats: SolverStats,
    pub schedule: Option<DispatchSchedule>,
    pub expost: Option<ExPostReport>,
    pub range: PriceRange,
}

impl RunOutcome {
    pub fn summary(&self) -> Option<ScheduleSummary> {
        match (&self.schedule, &self.expost) {
            (Some(s), Some(e)) => Some(ScheduleSummary::new(s, e)),
            _ => None,
        }
    }

    pub fn report(&self) -> DispatchReport {
        DispatchReport {
            label: self.spec.label(),
            spec: self.spec.clone(),
            horizon: HorizonInfo {
                start: self.scenario.start,
                start_hour: self.spec.horizon_start,
                hours: self.scenario.hours(),
            },
            segment_rule: self.segments.rule,
            breakpoints_mw: self.segments.breakpoints.clone(),
            solver: self.stats.clone(),
            summary: self.summary(),
            units: "power MW (= MWh per hourly step), hydrogen kg, money EUR".into(),
        }
    }

    pub fn bounds_report(&self) -> BoundsReport {
        BoundsReport::new(self.range, &self.scenario)
    }

    /// Writes `report.json`, `bounds.json` and, when a schedule exists,
    /// `schedule.csv` and `expost.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| CoreError::io(dir, e))?;
        write_json(&dir.join("report.json"), &self.report())?;
        write_json(&dir.join("bounds.json"), &self.bounds_report())?;
        if let Some(schedule) = &self.schedule {
            let path = dir.join("schedule.csv");
            let mut w = csv::Writer::from_path(&path)?;
            for h in &schedule.hours {
                w.serialize(h)?;
            }
            w.flush().map_err(|e| CoreError::io(&path, e))?;
        }
        if let Some(ex) = &self.expost {
            ex.write_csv(&dir.join("expost.csv"))?;
        }
        Ok(())
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| CoreError::io(path, e))
}

/// Solves the on/standby restriction and translates its schedule into a
/// start for `model`.
fn seed_start(
    model: &DispatchModel,
    scn: &PlantScenario,
    segments: &SegmentSet,
    settings: &SolverSettings,
) -> Result<Option<Vec<f64>>> {
    let restricted = build(ModelKind::Os, scn, segments)?;
    let sol = solve_milp(&restricted.instance, settings)?;
    debug!("seed: {:?} objective {:?} in {:.2?}", sol.status, sol.objective, sol.wall_time);
    if !sol.has_incumbent() {
        return Ok(None);
    }
    let schedule = decode_solution(&restricted, scn, &sol)?;
    start_from_schedule(model, &schedule).map(Some)
}

pub fn run_single(spec: &RunSpec, scn: &PlantScenario) -> Result<RunOutcome> {
    spec.validate()?;
    let scn = spec.window(scn)?;
    let segments = segment_set(&scn.physics, scn.p_min, spec.segments)?;
    let model = build(spec.model, &scn, &segments)?;
    let settings = spec.solver_settings();
    let seeding = Instant::now();
    let start = match spec.model {
        ModelKind::Oos if spec.seed => seed_start(&model, &scn, &segments, &settings)?,
        _ => None,
    };
    let seed_time = seeding.elapsed();
    let solution = match &start {
        Some(x) => solve_milp_from(&model.instance, &settings, x)?,
        None => solve_milp(&model.instance, &settings)?,
    };
    info!(
        "{}: {:?} objective {:?} after {} nodes in {:.2?}",
        spec.label(),
        solution.status,
        solution.objective,
        solution.nodes,
        solution.wall_time
    );
    let mut stats = SolverStats::new(&solution, &model, spec.gap);
    if spec.model == ModelKind::Oos && spec.seed {
        stats.seed_time_s = Some(seed_time.as_secs_f64());
    }
    let range = PriceRange::compute(&scn.physics, &scn)?;
    let (schedule, expost) = if solution.has_incumbent() {
        let schedule = decode_solution(&model, &scn, &solution)?;
        let ex = expost::evaluate(&schedule, &scn.physics, &scn)?;
        (Some(schedule), Some(ex))
    } else {
        (None, None)
    };
    Ok(RunOutcome {
        spec: spec.clone(),
        scenario: scn,
        segments,
        solution,
        stats,
        schedule,
        expost,
        range,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub label: String,
    pub status: Option<MilpStatus>,
    pub estimated_profit_eur: Option<f64>,
    pub realized_profit_eur: Option<f64>,
    pub realized_surplus_profit_eur: Option<f64>,
    pub estimated_hydrogen_kg: Option<f64>,
    pub realized_hydrogen_kg: Option<f64>,
    /// Estimated profit relative to the benchmark, percent.
    pub estimated_vs_benchmark_pct: Option<f64>,
    /// Realized profit relative to the benchmark's realized profit, percent.
    pub realized_vs_benchmark_pct: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    /// Label of the variant with the highest estimated profit.
    pub benchmark: Option<String>,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn failures(&self) -> Vec<&CompareRow> {
        self.rows.iter().filter(|r| r.error.is_some()).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| CoreError::io(path, e))
    }
}

fn pct(x: f64, reference: f64) -> f64 {
    100.0 * (x - reference) / reference.abs().max(f64::MIN_POSITIVE)
}

/// Runs every spec on the same scenario. A failing member yields a row with
/// its error; the others are still reported.
pub fn run_compare(specs: &[RunSpec], scn: &PlantScenario) -> Result<(CompareReport, Vec<RunOutcome>)> {
    if specs.len() < 2 {
        return Err(CoreError::InvalidArgument("a comparison needs at least two variants".into()));
    }
    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    for spec in specs {
        let mut row = CompareRow {
            label: spec.label(),
            status: None,
            estimated_profit_eur: None,
            realized_profit_eur: None,
            realized_surplus_profit_eur: None,
            estimated_hydrogen_kg: None,
            realized_hydrogen_kg: None,
            estimated_vs_benchmark_pct: None,
            realized_vs_benchmark_pct: None,
            error: None,
        };
        match run_single(spec, scn) {
            Ok(out) => {
                row.status = Some(out.stats.status);
                match out.summary() {
                    Some(s) => {
                        row.estimated_profit_eur = Some(s.estimated_profit_eur);
                        row.realized_profit_eur = Some(s.realized_profit_eur);
                        row.realized_surplus_profit_eur = Some(s.realized_surplus_profit_eur);
                        row.estimated_hydrogen_kg = Some(s.estimated_hydrogen_kg);
                        row.realized_hydrogen_kg = Some(s.realized_hydrogen_kg);
                    }
                    None => row.error = Some(format!("no schedule ({:?})", out.stats.status)),
                }
                outcomes.push(out);
            }
            Err(e) => {
                warn!("{} failed: {e}", spec.label());
                row.error = Some(e.to_string());
            }
        }
        rows.push(row);
    }
    let benchmark = rows
        .iter()
        .filter_map(|r| Some((r, r.estimated_profit_eur?, r.realized_profit_eur?)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(r, est, real)| (r.label.clone(), est, real));
    if let Some((_, est, real)) = &benchmark {
        for r in rows.iter_mut() {
            r.estimated_vs_benchmark_pct = r.estimated_profit_eur.map(|x| pct(x, *est));
            r.realized_vs_benchmark_pct = r.realized_profit_eur.map(|x| pct(x, *real));
        }
    }
    Ok((
        CompareReport {
            benchmark: benchmark.map(|b| b.0),
            rows,
        },
        outcomes,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Wind capacity as a multiple of electrolyzer capacity.
    WindRatio,
    /// Multiplier on the daily minimum demand.
    Demand,
    /// Hydrogen price, €/kg.
    HydrogenPrice,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::WindRatio => "wind_ratio",
            SweepAxis::Demand => "demand",
            SweepAxis::HydrogenPrice => "hydrogen_price",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "wind_ratio" => Ok(SweepAxis::WindRatio),
            "demand" => Ok(SweepAxis::Demand),
            "hydrogen_price" => Ok(SweepAxis::HydrogenPrice),
            _ => Err(CoreError::InvalidArgument(format!(
                "unknown sweep axis `{s}` (expected wind_ratio, demand or hydrogen_price)"
            ))),
        }
    }
}

/// Re-derives the scenario for one point on a sweep axis.
pub fn apply_axis(scn: &PlantScenario, axis: SweepAxis, value: f64) -> Result<PlantScenario> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(CoreError::InvalidArgument(format!("{axis} value must be positive, got {value}")));
    }
    let mut out = scn.clone();
    match axis {
        SweepAxis::WindRatio => out.c_w = value * scn.c_e,
        SweepAxis::Demand => {
            for b in out.demand.iter_mut() {
                b.minimum_kg *= value;
            }
        }
        SweepAxis::HydrogenPrice => out.lambda_h = value,
    }
    out.validate()?;
    Ok(out)
}

/// Hours in which available wind cannot run the electrolyzer at full load.
pub fn wind_limited_hours(scn: &PlantScenario) -> usize {
    (0..scn.hours()).filter(|&t| scn.wind_at(t) < scn.c_e).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub wind_limited_hours: usize,
    pub range: Option<PriceRange>,
    pub coarse: Option<ScheduleSummary>,
    pub fine: Option<ScheduleSummary>,
    /// Solver outcome of the coarse and fine runs, in that order.
    pub statuses: Vec<MilpStatus>,
    /// Fine minus coarse estimated profit, €.
    pub estimated_profit_delta_eur: Option<f64>,
    /// Fine minus coarse realized profit relative to fine, percent.
    pub realized_profit_gap_pct: Option<f64>,
    /// Fine minus coarse realized hydrogen relative to fine, percent.
    pub realized_hydrogen_gap_pct: Option<f64>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub axis: SweepAxis,
    pub coarse_label: String,
    pub fine_label: String,
    pub points: Vec<SweepPoint>,
}

impl SweepReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            value: f64,
            wind_limited_hours: usize,
            lower_eur_mwh: Option<f64>,
            upper_eur_mwh: Option<f64>,
            coarse_realized_profit_eur: Option<f64>,
            fine_realized_profit_eur: Option<f64>,
            estimated_profit_delta_eur: Option<f64>,
            realized_profit_gap_pct: Option<f64>,
            realized_hydrogen_gap_pct: Option<f64>,
            errors: String,
        }
        let mut w = csv::Writer::from_path(path)?;
        for p in &self.points {
            w.serialize(Row {
                value: p.value,
                wind_limited_hours: p.wind_limited_hours,
                lower_eur_mwh: p.range.map(|r| r.lower),
                upper_eur_mwh: p.range.map(|r| r.upper),
                coarse_realized_profit_eur: p.coarse.as_ref().map(|s| s.realized_profit_eur),
                fine_realized_profit_eur: p.fine.as_ref().map(|s| s.realized_profit_eur),
                estimated_profit_delta_eur: p.estimated_profit_delta_eur,
                realized_profit_gap_pct: p.realized_profit_gap_pct,
                realized_hydrogen_gap_pct: p.realized_hydrogen_gap_pct,
                errors: p.errors.join("; "),
            })?;
        }
        w.flush().map_err(|e| CoreError::io(path, e))
    }
}

/// Solves the coarsest and finest three-state models at every axis value.
/// Failures are recorded per point and the sweep continues.
pub fn run_sweep(axis: SweepAxis, values: &[f64], scn: &PlantScenario, base: &RunSpec) -> Result<SweepReport> {
    if values.is_empty() {
        return Err(CoreError::InvalidArgument("sweep needs at least one value".into()));
    }
    let coarse_spec = RunSpec {
        model: ModelKind::Oos,
        segments: SEGMENT_COUNTS[0],
        ..base.clone()
    };
    let fine_spec = RunSpec {
        segments: SEGMENT_COUNTS[SEGMENT_COUNTS.len() - 1],
        ..coarse_spec.clone()
    };
    let window = base.window(scn)?;
    let mut points = Vec::with_capacity(values.len());
    for &value in values {
        let mut point = SweepPoint {
            value,
            wind_limited_hours: 0,
            range: None,
            coarse: None,
            fine: None,
            statuses: Vec::new(),
            estimated_profit_delta_eur: None,
            realized_profit_gap_pct: None,
            realized_hydrogen_gap_pct: None,
            errors: Vec::new(),
        };
        let derived = match apply_axis(&window, axis, value) {
            Ok(s) => s,
            Err(e) => {
                point.errors.push(e.to_string());
                points.push(point);
                continue;
            }
        };
        point.wind_limited_hours = wind_limited_hours(&derived);
        let mut summaries = Vec::new();
        for segments in [coarse_spec.segments, fine_spec.segments] {
            // the window was applied before deriving the scenario
            let spec = RunSpec {
                segments,
                horizon_start: 0,
                horizon_hours: None,
                ..coarse_spec.clone()
            };
            match run_single(&spec, &derived) {
                Ok(out) => {
                    point.range.get_or_insert(out.range);
                    point.statuses.push(out.stats.status);
                    match out.summary() {
                        Some(s) => summaries.push(Some(s)),
                        None => {
                            point.errors.push(format!("{}: no schedule ({:?})", spec.label(), out.stats.status));
                            summaries.push(None);
                        }
                    }
                }
                Err(e) => {
                    point.errors.push(format!("{}: {e}", spec.label()));
                    summaries.push(None);
                }
            }
        }
        point.fine = summaries.pop().flatten();
        point.coarse = summaries.pop().flatten();
        if let (Some(c), Some(f)) = (&point.coarse, &point.fine) {
            point.estimated_profit_delta_eur = Some(f.estimated_profit_eur - c.estimated_profit_eur);
            point.realized_profit_gap_pct = Some(-pct(c.realized_profit_eur, f.realized_profit_eur));
            point.realized_hydrogen_gap_pct = Some(-pct(c.realized_hydrogen_kg, f.realized_hydrogen_kg));
        }
        points.push(point);
    }
    Ok(SweepReport {
        axis,
        coarse_label: coarse_spec.label(),
        fine_label: fine_spec.label(),
        points,
    })
}
