//! Ex-post evaluation: re-run the optimized power set-points through the
//! nonlinear production curve and price the hydrogen the linearization missed.
//!
//! Surplus hydrogen is assumed sold at the constant hydrogen price; nothing is
//! re-optimized and the extra compressor energy is reported, not charged.

use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::models::{DispatchSchedule, State};
use crate::physics::ElectrolyzerPhysics;
use crate::scenario::PlantScenario;

/// Slack allowed on the operating window before a set-point counts as invalid.
const WINDOW_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourSurplus {
    pub hour: usize,
    pub timestamp: DateTime<Utc>,
    pub state: State,
    pub pe_segment: f64,
    pub estimated_kg: f64,
    pub realized_kg: f64,
    pub delta_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExPostReport {
    pub estimated_profit: f64,
    pub realized_surplus_profit: f64,
    pub realized_profit: f64,
    pub estimated_hydrogen_kg: f64,
    pub realized_surplus_hydrogen_kg: f64,
    /// Energy the compressor would need to store the surplus; informative only.
    pub surplus_compressor_mwh: f64,
    pub hours: Vec<HourSurplus>,
}

impl ExPostReport {
    /// Surplus hydrogen relative to the estimate.
    pub fn surplus_share(&self) -> f64 {
        if self.estimated_hydrogen_kg > 0.0 {
            self.realized_surplus_hydrogen_kg / self.estimated_hydrogen_kg
        } else {
            0.0
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for h in &self.hours {
            w.serialize(h)?;
        }
        w.flush().map_err(|e| CoreError::io(path, e))
    }
}

pub fn evaluate(schedule: &DispatchSchedule, phys: &ElectrolyzerPhysics, scn: &PlantScenario) -> Result<ExPostReport> {
    let mut hours = Vec::with_capacity(schedule.hours.len());
    for rec in &schedule.hours {
        let realized = if rec.state == State::On {
            let p = rec.pe_segment;
            if p < scn.p_min - WINDOW_TOL || p > scn.c_e + WINDOW_TOL {
                return Err(CoreError::Integrity(format!(
                    "hour {}: on at {p} MW outside [{}, {}]",
                    rec.hour, scn.p_min, scn.c_e
                )));
            }
            phys.hydrogen_at_power(p.clamp(scn.p_min, scn.c_e))?
        } else {
            // no production in standby or off
            0.0
        };
        hours.push(HourSurplus {
            hour: rec.hour,
            timestamp: rec.timestamp,
            state: rec.state,
            pe_segment: rec.pe_segment,
            estimated_kg: rec.hydrogen,
            realized_kg: realized,
            delta_kg: realized - rec.hydrogen,
        });
    }
    let surplus: f64 = hours.iter().map(|h| h.delta_kg).sum();
    let surplus_profit = scn.lambda_h * surplus;
    Ok(ExPostReport {
        estimated_profit: schedule.profit.total,
        realized_surplus_profit: surplus_profit,
        realized_profit: schedule.profit.total + surplus_profit,
        estimated_hydrogen_kg: schedule.total_hydrogen(),
        realized_surplus_hydrogen_kg: surplus,
        surplus_compressor_mwh: scn.k_c * surplus,
        hours,
    })
}
