//! Day-ahead price range within which the number of segments can change the
//! dispatch of an unconstrained plant (ample wind, no binding demand).
//!
//! Above the upper price it pays more to sell the power and idle in standby
//! than to run at peak efficiency; below the lower price full load beats any
//! partial load. In between, the location of the efficiency peak matters.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::physics::ElectrolyzerPhysics;
use crate::scenario::PlantScenario;

/// Backward-difference step for the efficiency slope at full load, as a
/// fraction of capacity.
pub const DERIVATIVE_STEP_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceRange {
    pub lower: f64,
    pub upper: f64,
    /// kg/MWh
    pub eta_max: f64,
    /// kg/MWh at full load
    pub eta_fl: f64,
    /// MW
    pub p_eta_max: f64,
    /// (kg/MWh)/MW
    pub derivative_at_full_load: f64,
}

impl PriceRange {
    pub fn compute(phys: &ElectrolyzerPhysics, scn: &PlantScenario) -> Result<Self> {
        let peak = phys.find_peak_efficiency(scn.p_min)?;
        let c_e = phys.capacity();
        let eta = |p: f64| phys.efficiency_at_power(p);
        let eta_fl = eta(c_e)?;
        let slope = backward_difference(eta, c_e, DERIVATIVE_STEP_FRACTION * c_e)?;
        Ok(PriceRange {
            lower: lower_bound_from(scn.lambda_h, eta_fl, c_e, slope),
            upper: upper_bound_from(scn.lambda_h, peak.efficiency, peak.power, scn.p_sb)?,
            eta_max: peak.efficiency,
            eta_fl,
            p_eta_max: peak.power,
            derivative_at_full_load: slope,
        })
    }

    pub fn classify(&self, price: f64) -> PriceClass {
        if price < self.lower {
            PriceClass::Below
        } else if price > self.upper {
            PriceClass::Above
        } else {
            PriceClass::Inside
        }
    }
}

pub fn upper_bound(phys: &ElectrolyzerPhysics, scn: &PlantScenario) -> Result<f64> {
    let peak = phys.find_peak_efficiency(scn.p_min)?;
    upper_bound_from(scn.lambda_h, peak.efficiency, peak.power, scn.p_sb)
}

pub fn lower_bound(phys: &ElectrolyzerPhysics, scn: &PlantScenario) -> Result<f64> {
    lower_bound_with_step(phys, scn, DERIVATIVE_STEP_FRACTION * phys.capacity())
}

pub fn lower_bound_with_step(phys: &ElectrolyzerPhysics, scn: &PlantScenario, step: f64) -> Result<f64> {
    let c_e = phys.capacity();
    let eta = |p: f64| phys.efficiency_at_power(p);
    let slope = backward_difference(eta, c_e, step)?;
    Ok(lower_bound_from(scn.lambda_h, eta(c_e)?, c_e, slope))
}

/// Price at which standby plus selling the peak-efficiency power breaks even
/// with producing at the peak.
pub fn upper_bound_from(lambda_h: f64, eta_max: f64, p_eta_max: f64, p_sb: f64) -> Result<f64> {
    if p_eta_max <= p_sb {
        return Err(CoreError::Domain {
            what: "peak-efficiency power",
            value: p_eta_max,
            lo: p_sb,
            hi: f64::INFINITY,
        });
    }
    Ok(lambda_h * eta_max * p_eta_max / (p_eta_max - p_sb))
}

/// Marginal hydrogen value of the last MW at full load:
/// `λ^h · d(η(p)·p)/dp` at `C^e`.
pub fn lower_bound_from(lambda_h: f64, eta_fl: f64, c_e: f64, slope_at_full_load: f64) -> f64 {
    lambda_h * (eta_fl + c_e * slope_at_full_load)
}

pub fn backward_difference(f: impl Fn(f64) -> Result<f64>, x: f64, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(CoreError::InvalidArgument(format!("difference step must be positive, got {step}")));
    }
    Ok((f(x)? - f(x - step)?) / step)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriceClass {
    Below,
    Inside,
    Above,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub below: usize,
    pub inside: usize,
    pub above: usize,
}

/// Tags every hour against the closed interval `[lower, upper]`.
pub fn classify_hours(range: &PriceRange, prices: &[f64]) -> (Vec<PriceClass>, ClassCounts) {
    let tags: Vec<PriceClass> = prices.iter().map(|&p| range.classify(p)).collect();
    let mut counts = ClassCounts::default();
    for t in &tags {
        match t {
            PriceClass::Below => counts.below += 1,
            PriceClass::Inside => counts.inside += 1,
            PriceClass::Above => counts.above += 1,
        }
    }
    (tags, counts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo_eur_mwh: f64,
    pub hi_eur_mwh: f64,
    pub count: usize,
    /// Hours of this bin that fall inside the price range.
    pub inside: usize,
}

/// Price histogram with bins of `width` aligned to multiples of `width`.
/// Bins are half-open `[lo, hi)`.
pub fn price_histogram(range: &PriceRange, prices: &[f64], width: f64) -> Result<Vec<HistogramBin>> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(CoreError::InvalidArgument(format!("bin width must be positive, got {width}")));
    }
    if prices.is_empty() {
        return Ok(Vec::new());
    }
    let key = |p: f64| (p / width).floor() as i64;
    let lo = prices.iter().copied().map(key).min().unwrap_or(0);
    let hi = prices.iter().copied().map(key).max().unwrap_or(0);
    let mut bins: Vec<HistogramBin> = (lo..=hi)
        .map(|k| HistogramBin {
            lo_eur_mwh: k as f64 * width,
            hi_eur_mwh: (k + 1) as f64 * width,
            count: 0,
            inside: 0,
        })
        .collect();
    for &p in prices {
        let b = &mut bins[(key(p) - lo) as usize];
        b.count += 1;
        if range.classify(p) == PriceClass::Inside {
            b.inside += 1;
        }
    }
    Ok(bins)
}

pub fn write_histogram_csv(path: &Path, bins: &[HistogramBin]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for b in bins {
        w.serialize(b)?;
    }
    w.flush().map_err(|e| CoreError::io(path, e))
}
