//! Dispatch MILPs for the three electrolyzer state models.
//!
//! * OOS — on, off and standby, with cold start-up costs;
//! * OO  — on/off only (one state binary per hour);
//! * OS  — on/standby only, no start-ups.
//!
//! Hours are 1 h long, so MW and MWh coincide. Electrolyzer consumption is
//! not a variable of its own: it is substituted as the sum of the segment
//! powers plus the standby draw wherever it appears.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Duration, Utc};
use hpp_milp::{MilpInstance, MilpSolution, Sense, VarId};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scenario::PlantScenario;
use crate::segmentation::SegmentSet;

/// Absolute tolerance used when verifying decoded schedules.
pub const DECODE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Oos,
    Oo,
    Os,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Oos, ModelKind::Oo, ModelKind::Os];

    pub fn binaries_per_hour(self, segments: usize) -> usize {
        segments
            + match self {
                ModelKind::Oos => 4,
                ModelKind::Oo => 2,
                ModelKind::Os => 1,
            }
    }

    pub fn continuous_per_hour(self, segments: usize) -> usize {
        segments
            + match self {
                ModelKind::Oos | ModelKind::Os => 9,
                ModelKind::Oo => 8,
            }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Oos => "OOS",
            ModelKind::Oo => "OO",
            ModelKind::Os => "OS",
        })
    }
}

impl FromStr for ModelKind {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "oos" => Ok(ModelKind::Oos),
            "oo" => Ok(ModelKind::Oo),
            "os" => Ok(ModelKind::Os),
            _ => Err(CoreError::InvalidArgument(format!("unknown model `{s}` (expected oos, oo or os)"))),
        }
    }
}

/// Variable handles for one hour. Absent entries do not exist in the model.
#[derive(Debug, Clone)]
pub struct HourVars {
    pub d: VarId,
    pub h: VarId,
    pub hd: VarId,
    pub p: VarId,
    pub pc: VarId,
    pub pin: Option<VarId>,
    pub pe_hat: Vec<VarId>,
    pub s: VarId,
    pub sin: VarId,
    pub sout: VarId,
    pub zsu: Option<VarId>,
    pub zh: Vec<VarId>,
    pub zon: Option<VarId>,
    pub zoff: Option<VarId>,
    pub zsb: Option<VarId>,
    pub zoo: Option<VarId>,
    pub zos: Option<VarId>,
}

#[derive(Debug, Clone)]
pub struct DispatchModel {
    pub kind: ModelKind,
    pub instance: MilpInstance,
    pub hours: Vec<HourVars>,
    pub segments: SegmentSet,
}

pub fn build(kind: ModelKind, scn: &PlantScenario, seg: &SegmentSet) -> Result<DispatchModel> {
    scn.validate()?;
    seg.validate()?;
    if (seg.p_min() - scn.p_min).abs() > 1e-9 || (seg.p_max() - scn.c_e).abs() > 1e-9 * scn.c_e {
        return Err(CoreError::InvalidArgument(format!(
            "segments span [{}, {}] but the plant load window is [{}, {}]",
            seg.p_min(),
            seg.p_max(),
            scn.p_min,
            scn.c_e
        )));
    }
    Ok(Builder::new(kind, scn, seg).build())
}

pub fn build_oos(scn: &PlantScenario, seg: &SegmentSet) -> Result<DispatchModel> {
    build(ModelKind::Oos, scn, seg)
}

pub fn build_oo(scn: &PlantScenario, seg: &SegmentSet) -> Result<DispatchModel> {
    build(ModelKind::Oo, scn, seg)
}

pub fn build_os(scn: &PlantScenario, seg: &SegmentSet) -> Result<DispatchModel> {
    build(ModelKind::Os, scn, seg)
}

struct Builder<'a> {
    kind: ModelKind,
    scn: &'a PlantScenario,
    seg: &'a SegmentSet,
    m: MilpInstance,
}

impl<'a> Builder<'a> {
    fn new(kind: ModelKind, scn: &'a PlantScenario, seg: &'a SegmentSet) -> Self {
        let name = format!("{}-{}", kind, seg.len());
        Builder {
            kind,
            scn,
            seg,
            m: MilpInstance::new(name),
        }
    }

    fn row(&mut self, name: String, terms: Vec<(VarId, f64)>, sense: Sense, rhs: f64) {
        self.m
            .add_constraint(name, terms, sense, rhs)
            .expect("builder only references declared variables");
    }

    fn declare_hour(&mut self, t: usize) -> HourVars {
        let scn = self.scn;
        let n_seg = self.seg.len();
        let wind = scn.wind_at(t);
        let has_pin = self.kind != ModelKind::Oo;
        // the largest hourly production any segment can deliver
        let h_max = self
            .seg
            .segments
            .iter()
            .map(|s| s.production(s.p_hi).max(s.production(s.p_lo)))
            .fold(0.0, f64::max);
        let price = scn.prices[t];
        let m = &mut self.m;

        let d = m.add_continuous(format!("d_{t}"), 0.0, h_max + scn.s_out_max, scn.lambda_h);
        let h = m.add_continuous(format!("h_{t}"), 0.0, h_max, 0.0);
        let hd = m.add_continuous(format!("hd_{t}"), 0.0, h_max, 0.0);
        let p_cap = wind + if has_pin { scn.p_sb } else { 0.0 };
        let p = m.add_continuous(format!("p_{t}"), 0.0, p_cap, price);
        let pc = m.add_continuous(format!("pc_{t}"), 0.0, scn.k_c * h_max, 0.0);
        let pin = has_pin.then(|| m.add_continuous(format!("pin_{t}"), 0.0, scn.p_sb, -scn.purchase_price(t)));
        let pe_hat = (0..n_seg)
            .map(|s| m.add_continuous(format!("pe_hat_{t}_{s}"), 0.0, self.seg.segments[s].p_hi, 0.0))
            .collect();
        let s = m.add_continuous(format!("s_{t}"), 0.0, scn.c_s, 0.0);
        let sin = m.add_continuous(format!("sin_{t}"), 0.0, h_max, 0.0);
        let sout = m.add_continuous(format!("sout_{t}"), 0.0, scn.s_out_max, 0.0);

        let zsu = (self.kind != ModelKind::Os).then(|| m.add_binary(format!("zsu_{t}"), -scn.lambda_su));
        let zh: Vec<VarId> = (0..n_seg).map(|s| m.add_binary(format!("zh_{t}_{s}"), 0.0)).collect();
        // a segment whose lower end exceeds the available wind can never be
        // active: production runs on wind only (purchases cover standby)
        for (s, &z) in zh.iter().enumerate() {
            if self.seg.segments[s].p_lo > wind {
                m.set_bounds(z, 0.0, 0.0);
            }
        }
        let (zon, zoff, zsb, zoo, zos) = match self.kind {
            ModelKind::Oos => (
                Some(m.add_binary(format!("zon_{t}"), 0.0)),
                Some(m.add_binary(format!("zoff_{t}"), 0.0)),
                Some(m.add_binary(format!("zsb_{t}"), 0.0)),
                None,
                None,
            ),
            ModelKind::Oo => (None, None, None, Some(m.add_binary(format!("zoo_{t}"), 0.0)), None),
            ModelKind::Os => (None, None, None, None, Some(m.add_binary(format!("zos_{t}"), 0.0))),
        };
        HourVars {
            d,
            h,
            hd,
            p,
            pc,
            pin,
            pe_hat,
            s,
            sin,
            sout,
            zsu,
            zh,
            zon,
            zoff,
            zsb,
            zoo,
            zos,
        }
    }

    /// Terms and constant of the electrolyzer consumption `p^e_t`.
    fn consumption(&self, v: &HourVars) -> (Vec<(VarId, f64)>, f64) {
        let mut terms: Vec<(VarId, f64)> = v.pe_hat.iter().map(|&x| (x, 1.0)).collect();
        let p_sb = self.scn.p_sb;
        match self.kind {
            ModelKind::Oos => {
                terms.push((v.zsb.expect("oos standby"), p_sb));
                (terms, 0.0)
            }
            ModelKind::Oo => (terms, 0.0),
            ModelKind::Os => {
                terms.push((v.zos.expect("os state"), -p_sb));
                (terms, p_sb)
            }
        }
    }

    /// The "on" indicator: `z^on`, `z^oo` or `z^os`.
    fn on(&self, v: &HourVars) -> VarId {
        v.zon.or(v.zoo).or(v.zos).expect("every model has an on indicator")
    }

    fn build(mut self) -> DispatchModel {
        let scn = self.scn;
        let horizon = scn.hours();
        let hours: Vec<HourVars> = (0..horizon).map(|t| self.declare_hour(t)).collect();
        for t in 0..horizon {
            self.hour_rows(t, &hours);
        }
        for (n, block) in scn.demand.iter().enumerate() {
            let terms = block.range().map(|t| (hours[t].d, 1.0)).collect();
            self.row(format!("demand_{n}"), terms, Sense::Ge, block.minimum_kg);
        }
        DispatchModel {
            kind: self.kind,
            instance: self.m,
            hours,
            segments: self.seg.clone(),
        }
    }

    fn hour_rows(&mut self, t: usize, hours: &[HourVars]) {
        let scn = self.scn;
        let v = &hours[t];
        let (pe, pe_const) = self.consumption(v);
        let on = self.on(v);
        let p_sb = scn.p_sb;

        // power balance: p = P^w + p^in - p^e - p^c
        let mut terms = vec![(v.p, 1.0), (v.pc, 1.0)];
        terms.extend(pe.iter().copied());
        if let Some(pin) = v.pin {
            terms.push((pin, -1.0));
        }
        self.row(format!("balance_{t}"), terms, Sense::Eq, scn.wind_at(t) - pe_const);

        // grid purchases only cover the standby draw
        match self.kind {
            ModelKind::Oos => {
                let terms = vec![(v.pin.unwrap(), 1.0), (v.zsb.unwrap(), -p_sb)];
                self.row(format!("purchase_cap_{t}"), terms, Sense::Le, 0.0);
            }
            ModelKind::Os => {
                let terms = vec![(v.pin.unwrap(), 1.0), (v.zos.unwrap(), p_sb)];
                self.row(format!("purchase_cap_{t}"), terms, Sense::Le, p_sb);
            }
            ModelKind::Oo => {}
        }

        if self.kind == ModelKind::Oos {
            let terms = vec![(v.zon.unwrap(), 1.0), (v.zoff.unwrap(), 1.0), (v.zsb.unwrap(), 1.0)];
            self.row(format!("state_{t}"), terms, Sense::Eq, 1.0);
        }

        // load window: P^min·on + standby <= p^e <= C^e·on + standby
        let (standby, standby_const): (Vec<(VarId, f64)>, f64) = match self.kind {
            ModelKind::Oos => (vec![(v.zsb.unwrap(), p_sb)], 0.0),
            ModelKind::Oo => (vec![], 0.0),
            ModelKind::Os => (vec![(v.zos.unwrap(), -p_sb)], p_sb),
        };
        let window = |coef: f64| {
            let mut terms = pe.clone();
            terms.push((on, -coef));
            terms.extend(standby.iter().map(|&(x, c)| (x, -c)));
            terms
        };
        let rhs = standby_const - pe_const;
        self.row(format!("load_max_{t}"), window(scn.c_e), Sense::Le, rhs);
        self.row(format!("load_min_{t}"), window(scn.p_min), Sense::Ge, rhs);

        // start-ups; the first hour starts for free
        if let Some(zsu) = v.zsu {
            if t == 0 {
                self.row("startup_first".into(), vec![(zsu, 1.0)], Sense::Eq, 0.0);
            } else {
                let prev = &hours[t - 1];
                let mut terms = vec![(zsu, 1.0), (on, -1.0), (self.on(prev), 1.0)];
                if let Some(sb) = prev.zsb {
                    terms.push((sb, 1.0));
                }
                self.row(format!("startup_{t}"), terms, Sense::Ge, 0.0);
            }
        }
        if self.kind == ModelKind::Oos && t > 0 {
            let terms = vec![(hours[t - 1].zoff.unwrap(), 1.0), (v.zsb.unwrap(), 1.0)];
            self.row(format!("no_off_to_standby_{t}"), terms, Sense::Le, 1.0);
        }

        // piecewise production
        let mut terms = vec![(v.h, 1.0)];
        for (s, seg) in self.seg.segments.iter().enumerate() {
            terms.push((v.pe_hat[s], -seg.slope));
            terms.push((v.zh[s], -seg.intercept));
        }
        self.row(format!("production_{t}"), terms, Sense::Eq, 0.0);
        for (s, seg) in self.seg.segments.iter().enumerate() {
            let (x, z) = (v.pe_hat[s], v.zh[s]);
            self.row(format!("segment_lo_{t}_{s}"), vec![(x, 1.0), (z, -seg.p_lo)], Sense::Ge, 0.0);
            self.row(format!("segment_hi_{t}_{s}"), vec![(x, 1.0), (z, -seg.p_hi)], Sense::Le, 0.0);
        }
        let mut terms = vec![(on, 1.0)];
        terms.extend(v.zh.iter().map(|&z| (z, -1.0)));
        self.row(format!("one_segment_{t}"), terms, Sense::Eq, 0.0);

        // storage
        self.row(format!("storage_split_{t}"), vec![(v.h, 1.0), (v.hd, -1.0), (v.sin, -1.0)], Sense::Eq, 0.0);
        self.row(format!("delivery_{t}"), vec![(v.d, 1.0), (v.hd, -1.0), (v.sout, -1.0)], Sense::Eq, 0.0);
        self.row(format!("compression_{t}"), vec![(v.pc, 1.0), (v.sin, -scn.k_c)], Sense::Eq, 0.0);
        if t == 0 {
            let terms = vec![(v.s, 1.0), (v.sin, -1.0), (v.sout, 1.0)];
            self.row("storage_0".into(), terms, Sense::Eq, scn.s_ini);
        } else {
            let terms = vec![(v.s, 1.0), (hours[t - 1].s, -1.0), (v.sin, -1.0), (v.sout, 1.0)];
            self.row(format!("storage_{t}"), terms, Sense::Eq, 0.0);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum State {
    On,
    Off,
    Standby,
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            State::On => "on",
            State::Off => "off",
            State::Standby => "standby",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourRecord {
    pub hour: usize,
    pub timestamp: DateTime<Utc>,
    pub state: State,
    pub startup: bool,
    /// Active segment index while on.
    pub segment: Option<usize>,
    /// Electrolyzer consumption including standby draw, MW.
    pub pe: f64,
    /// Power feeding production (segment power), MW.
    pub pe_segment: f64,
    pub hydrogen: f64,
    pub delivered: f64,
    pub direct: f64,
    pub storage: f64,
    pub storage_in: f64,
    pub storage_out: f64,
    pub sold: f64,
    pub bought: f64,
    pub compressor: f64,
    pub wind: f64,
    pub price: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ProfitBreakdown {
    pub electricity_revenue: f64,
    pub hydrogen_revenue: f64,
    pub purchase_cost: f64,
    pub startup_cost: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchSchedule {
    pub model: ModelKind,
    pub segments: usize,
    pub hours: Vec<HourRecord>,
    pub profit: ProfitBreakdown,
}

impl DispatchSchedule {
    pub fn count(&self, state: State) -> usize {
        self.hours.iter().filter(|h| h.state == state).count()
    }

    pub fn startups(&self) -> usize {
        self.hours.iter().filter(|h| h.startup).count()
    }

    pub fn total_hydrogen(&self) -> f64 {
        self.hours.iter().map(|h| h.hydrogen).sum()
    }
}

fn binary(values: &[f64], v: Option<VarId>) -> bool {
    v.is_some_and(|v| values[v.0] > 0.5)
}

/// Decodes an incumbent after re-verifying every constraint at
/// [`DECODE_TOL`].
pub fn decode_solution(model: &DispatchModel, scn: &PlantScenario, sol: &MilpSolution) -> Result<DispatchSchedule> {
    let values = sol
        .values
        .as_ref()
        .ok_or_else(|| CoreError::Integrity(format!("solver returned no incumbent (status {:?})", sol.status)))?;
    decode_values(model, scn, values)
}

pub fn decode_values(model: &DispatchModel, scn: &PlantScenario, values: &[f64]) -> Result<DispatchSchedule> {
    model
        .instance
        .check_feasibility(values, DECODE_TOL)
        .map_err(|v| CoreError::Integrity(format!("{} violated by {:.3e}", v.what, v.amount)))?;
    let x = |v: VarId| values[v.0];
    let mut hours = Vec::with_capacity(model.hours.len());
    let mut profit = ProfitBreakdown::default();
    for (t, v) in model.hours.iter().enumerate() {
        let on = match model.kind {
            ModelKind::Oos => binary(values, v.zon),
            ModelKind::Oo => binary(values, v.zoo),
            ModelKind::Os => binary(values, v.zos),
        };
        let state = if on {
            State::On
        } else {
            match model.kind {
                ModelKind::Oos if binary(values, v.zsb) => State::Standby,
                ModelKind::Os => State::Standby,
                _ => State::Off,
            }
        };
        let segment = v.zh.iter().position(|&z| values[z.0] > 0.5);
        let pe_segment: f64 = v.pe_hat.iter().map(|&p| x(p)).sum();
        let pe = pe_segment + if state == State::Standby { scn.p_sb } else { 0.0 };
        let bought = v.pin.map_or(0.0, x);
        let startup = binary(values, v.zsu);
        let rec = HourRecord {
            hour: t,
            timestamp: scn.start + Duration::hours(t as i64),
            state,
            startup,
            segment,
            pe,
            pe_segment,
            hydrogen: x(v.h),
            delivered: x(v.d),
            direct: x(v.hd),
            storage: x(v.s),
            storage_in: x(v.sin),
            storage_out: x(v.sout),
            sold: x(v.p),
            bought,
            compressor: x(v.pc),
            wind: scn.wind_at(t),
            price: scn.prices[t],
        };
        profit.electricity_revenue += rec.sold * rec.price;
        profit.hydrogen_revenue += rec.delivered * scn.lambda_h;
        profit.purchase_cost += bought * scn.purchase_price(t);
        if startup {
            profit.startup_cost += scn.lambda_su;
        }
        hours.push(rec);
    }
    profit.total = profit.electricity_revenue + profit.hydrogen_revenue - profit.purchase_cost - profit.startup_cost;
    Ok(DispatchSchedule {
        model: model.kind,
        segments: model.segments.len(),
        hours,
        profit,
    })
}

/// Translates a schedule, possibly from another model variant or segment
/// count, into a start assignment for `model`. Only the binaries are set;
/// states the target cannot represent map to its idle state (standby for
/// on/standby, off for on/off). The solver re-optimizes the rest.
pub fn start_from_schedule(model: &DispatchModel, schedule: &DispatchSchedule) -> Result<Vec<f64>> {
    if schedule.hours.len() != model.hours.len() {
        return Err(CoreError::InvalidArgument(format!(
            "schedule covers {} hours, model {}",
            schedule.hours.len(),
            model.hours.len()
        )));
    }
    let mut x = vec![0.0; model.instance.num_vars()];
    let mut prev = None;
    for (rec, v) in schedule.hours.iter().zip(&model.hours) {
        let state = match (model.kind, rec.state) {
            (ModelKind::Oo, State::Standby) => State::Off,
            (ModelKind::Os, State::Off) => State::Standby,
            (_, s) => s,
        };
        let mut set = |var: Option<VarId>, on: bool| {
            if let (Some(var), true) = (var, on) {
                x[var.0] = 1.0;
            }
        };
        set(v.zon.or(v.zoo).or(v.zos), state == State::On);
        set(v.zoff, state == State::Off);
        set(v.zsb, state == State::Standby);
        set(v.zsu, state == State::On && prev == Some(State::Off));
        if state == State::On {
            let (p, seg) = (rec.pe_segment, &model.segments);
            let s = (p >= seg.p_min() - DECODE_TOL && p <= seg.p_max() + DECODE_TOL)
                .then(|| seg.segment_index(p.clamp(seg.p_min(), seg.p_max())))
                .flatten()
                .ok_or_else(|| CoreError::InvalidArgument(format!("hour {}: no segment holds {p} MW", rec.hour)))?;
            x[v.zh[s].0] = 1.0;
        }
        prev = Some(state);
    }
    Ok(x)
}
