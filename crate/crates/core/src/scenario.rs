//! Scenario inputs: plant configuration (JSON), hourly day-ahead prices and
//! wind capacity factors (CSV), and the daily hydrogen demand schedule.

use std::fs;
use std::path::Path;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::physics::{CellCoefficients, ElectrolyzerPhysics, LogBase, FARADAY_CONSTANT, MOLAR_MASS_H2};

pub const HOURS_PER_DAY: usize = 24;
pub const PRICE_HEADER: [&str; 2] = ["timestamp", "price_eur_mwh"];
pub const WIND_HEADER: [&str; 2] = ["timestamp", "capacity_factor"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantConfig {
    pub wind_capacity_mw: f64,
    pub electrolyzer_capacity_mw: f64,
    pub standby_load_mw: f64,
    pub minimum_load_mw: f64,
    pub pressure_bar: f64,
    pub temperature_c: f64,
    pub max_current_density_a_m2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    pub startup_cost_eur: f64,
    pub tso_tariff_eur_mwh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageConfig {
    pub storage_capacity_kg: f64,
    pub storage_max_output_kg_h: f64,
    pub compressor_coefficient_mwh_kg: f64,
    pub initial_storage_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydrogenConfig {
    pub hydrogen_price_eur_kg: f64,
    pub minimum_demand_kg_day: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub coefficients: CellCoefficients,
    #[serde(default)]
    pub log_base: LogBase,
    pub molar_mass_h2_kg_mol: f64,
    pub faraday_constant_c_mol: f64,
    /// Omitted: calibrated so the stack draws its nameplate power at the
    /// maximum current density.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_area_m2: Option<f64>,
}

/// Minimum hydrogen delivery over hours `start .. start + hours`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandBlock {
    pub start: usize,
    pub hours: usize,
    pub minimum_kg: f64,
}

impl DemandBlock {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.hours
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub plant: PlantConfig,
    pub costs: CostConfig,
    pub storage: StorageConfig,
    pub hydrogen: HydrogenConfig,
    pub physics: PhysicsConfig,
    /// Explicit demand schedule; default is one block per 24 hours.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand_blocks: Option<Vec<DemandBlock>>,
}

impl ScenarioConfig {
    /// Reference plant: 104.5 MW wind, 52.25 MW alkaline electrolyzer.
    pub fn reference() -> Self {
        ScenarioConfig {
            plant: PlantConfig {
                wind_capacity_mw: 104.5,
                electrolyzer_capacity_mw: 52.25,
                standby_load_mw: 0.52,
                minimum_load_mw: 7.84,
                pressure_bar: 30.0,
                temperature_c: 90.0,
                max_current_density_a_m2: 5000.0,
            },
            costs: CostConfig {
                startup_cost_eur: 2612.5,
                tso_tariff_eur_mwh: 15.06,
            },
            storage: StorageConfig {
                storage_capacity_kg: 22000.0,
                storage_max_output_kg_h: 912.13,
                compressor_coefficient_mwh_kg: 0.0012,
                initial_storage_kg: 0.0,
            },
            hydrogen: HydrogenConfig {
                hydrogen_price_eur_kg: 2.10,
                minimum_demand_kg_day: 3667.0,
            },
            physics: PhysicsConfig {
                coefficients: CellCoefficients::alkaline_correlation(90.0, 30.0),
                log_base: LogBase::Log10,
                molar_mass_h2_kg_mol: MOLAR_MASS_H2,
                faraday_constant_c_mol: FARADAY_CONSTANT,
                cell_area_m2: None,
            },
            demand_blocks: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn from_json(text: &str, file: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CoreError::Parse {
            file: file.to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn build_physics(&self) -> Result<ElectrolyzerPhysics> {
        let p = &self.plant;
        let mut phys = ElectrolyzerPhysics::calibrated(
            self.physics.coefficients,
            p.max_current_density_a_m2,
            p.electrolyzer_capacity_mw,
            p.temperature_c,
            p.pressure_bar,
            self.physics.log_base,
        )?;
        phys.m_h2 = self.physics.molar_mass_h2_kg_mol;
        phys.f_const = self.physics.faraday_constant_c_mol;
        if let Some(area) = self.physics.cell_area_m2 {
            phys.cell_area_total = area;
        }
        phys.validate()?;
        Ok(phys)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub start: DateTime<Utc>,
    pub values: Vec<f64>,
    pub unit: String,
}

impl TimeSeries {
    pub fn timestamps(&self) -> impl Iterator<Item = DateTime<Utc>> + '_ {
        (0..self.values.len()).map(|k| self.start + Duration::hours(k as i64))
    }
}

/// Reads a two-column hourly CSV with the given header. Timestamps must be
/// RFC 3339 and exactly one hour apart.
pub fn read_series_csv(path: &Path, header: [&str; 2], unit: &str) -> Result<TimeSeries> {
    let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    parse_series_csv(&text, &path.display().to_string(), header, unit)
}

pub fn parse_series_csv(text: &str, file: &str, header: [&str; 2], unit: &str) -> Result<TimeSeries> {
    let err = |line: usize, message: String| CoreError::Parse {
        file: file.to_string(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let got = reader.headers().map_err(|e| err(1, e.to_string()))?.clone();
    if got.iter().collect::<Vec<_>>() != header {
        return Err(err(1, format!("expected header `{}`, got `{}`", header.join(","), got.iter().collect::<Vec<_>>().join(","))));
    }
    let mut start: Option<DateTime<Utc>> = None;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let ts = DateTime::parse_from_rfc3339(&record[0])
            .map_err(|e| err(line, format!("bad timestamp `{}`: {e}", &record[0])))?
            .with_timezone(&Utc);
        let value: f64 = record[1]
            .parse()
            .map_err(|_| err(line, format!("bad number `{}`", &record[1])))?;
        if !value.is_finite() {
            return Err(err(line, format!("non-finite value `{}`", &record[1])));
        }
        match start {
            None => start = Some(ts),
            Some(s) => {
                let expected = s + Duration::hours(values.len() as i64);
                if ts != expected {
                    return Err(err(line, format!("expected timestamp {} (hourly, no gaps), got {ts}", expected.to_rfc3339())));
                }
            }
        }
        values.push(value);
    }
    let start = start.ok_or_else(|| err(1, "series has no rows".into()))?;
    Ok(TimeSeries {
        start,
        values,
        unit: unit.to_string(),
    })
}

pub fn write_series_csv(path: &Path, header: [&str; 2], series: &TimeSeries) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for (ts, v) in series.timestamps().zip(&series.values) {
        w.write_record([ts.to_rfc3339(), v.to_string()])?;
    }
    w.flush().map_err(|e| CoreError::io(path, e))?;
    Ok(())
}

/// Fully assembled model input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantScenario {
    /// MW
    pub c_w: f64,
    pub c_e: f64,
    pub p_min: f64,
    pub p_sb: f64,
    /// €/start
    pub lambda_su: f64,
    /// €/MWh
    pub lambda_tso: f64,
    /// €/kg
    pub lambda_h: f64,
    /// kg
    pub c_s: f64,
    /// kg/h
    pub s_out_max: f64,
    pub s_ini: f64,
    /// MWh/kg
    pub k_c: f64,
    /// €/MWh per hour
    pub prices: Vec<f64>,
    /// Wind capacity factor per hour; wind power is `capacity_factor · c_w`.
    pub capacity_factor: Vec<f64>,
    pub demand: Vec<DemandBlock>,
    pub start: DateTime<Utc>,
    pub physics: ElectrolyzerPhysics,
}

/// One block per 24 hours from hour 0; a trailing partial day gets a
/// pro-rata share of the daily minimum.
pub fn daily_demand(hours: usize, per_day_kg: f64) -> Vec<DemandBlock> {
    (0..hours)
        .step_by(HOURS_PER_DAY)
        .map(|start| {
            let len = HOURS_PER_DAY.min(hours - start);
            DemandBlock {
                start,
                hours: len,
                minimum_kg: per_day_kg * len as f64 / HOURS_PER_DAY as f64,
            }
        })
        .collect()
}

impl PlantScenario {
    pub fn from_parts(config: &ScenarioConfig, prices: &TimeSeries, wind: &TimeSeries) -> Result<Self> {
        if prices.values.len() != wind.values.len() {
            return Err(CoreError::Scenario(format!(
                "price series has {} hours but wind series has {}",
                prices.values.len(),
                wind.values.len()
            )));
        }
        if prices.start != wind.start {
            return Err(CoreError::Scenario(format!(
                "price series starts at {} but wind series at {}",
                prices.start, wind.start
            )));
        }
        let hours = prices.values.len();
        let demand = match &config.demand_blocks {
            Some(blocks) => blocks.clone(),
            None => daily_demand(hours, config.hydrogen.minimum_demand_kg_day),
        };
        let scn = PlantScenario {
            c_w: config.plant.wind_capacity_mw,
            c_e: config.plant.electrolyzer_capacity_mw,
            p_min: config.plant.minimum_load_mw,
            p_sb: config.plant.standby_load_mw,
            lambda_su: config.costs.startup_cost_eur,
            lambda_tso: config.costs.tso_tariff_eur_mwh,
            lambda_h: config.hydrogen.hydrogen_price_eur_kg,
            c_s: config.storage.storage_capacity_kg,
            s_out_max: config.storage.storage_max_output_kg_h,
            s_ini: config.storage.initial_storage_kg,
            k_c: config.storage.compressor_coefficient_mwh_kg,
            prices: prices.values.clone(),
            capacity_factor: wind.values.clone(),
            demand,
            start: prices.start,
            physics: config.build_physics()?,
        };
        scn.validate()?;
        Ok(scn)
    }

    /// Scenario from in-memory hourly prices and capacity factors.
    pub fn from_hourly(config: &ScenarioConfig, start: DateTime<Utc>, prices: &[f64], capacity_factor: &[f64]) -> Result<Self> {
        let series = |values: &[f64], unit: &str| TimeSeries {
            start,
            values: values.to_vec(),
            unit: unit.to_string(),
        };
        Self::from_parts(config, &series(prices, "EUR/MWh"), &series(capacity_factor, "capacity factor"))
    }

    pub fn hours(&self) -> usize {
        self.prices.len()
    }

    /// Available wind power per hour, MW.
    pub fn wind(&self) -> Vec<f64> {
        self.capacity_factor.iter().map(|cf| cf * self.c_w).collect()
    }

    pub fn wind_at(&self, t: usize) -> f64 {
        self.capacity_factor[t] * self.c_w
    }

    /// Grid purchase price `λ^DA + λ^TSO`, €/MWh.
    pub fn purchase_price(&self, t: usize) -> f64 {
        self.prices[t] + self.lambda_tso
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(CoreError::Scenario(m));
        if self.hours() == 0 {
            return fail("horizon is empty".into());
        }
        if self.capacity_factor.len() != self.hours() {
            return fail("price and wind series differ in length".into());
        }
        let scalars = [
            ("c_w", self.c_w),
            ("c_e", self.c_e),
            ("p_min", self.p_min),
            ("p_sb", self.p_sb),
            ("lambda_su", self.lambda_su),
            ("lambda_tso", self.lambda_tso),
            ("lambda_h", self.lambda_h),
            ("c_s", self.c_s),
            ("s_out_max", self.s_out_max),
            ("s_ini", self.s_ini),
            ("k_c", self.k_c),
        ];
        for (name, v) in scalars {
            if !v.is_finite() {
                return fail(format!("{name} is not finite"));
            }
            if v < 0.0 && name != "lambda_tso" {
                return fail(format!("{name} must be non-negative, got {v}"));
            }
        }
        if !(0.0 < self.p_sb && self.p_sb < self.p_min && self.p_min < self.c_e) {
            return fail(format!(
                "need 0 < standby ({}) < minimum load ({}) < capacity ({})",
                self.p_sb, self.p_min, self.c_e
            ));
        }
        if !(self.c_w > 0.0) {
            return fail("wind capacity must be positive".into());
        }
        if (self.physics.capacity() - self.c_e).abs() > 1e-9 * self.c_e {
            return fail(format!(
                "physics nameplate {} MW differs from electrolyzer capacity {} MW",
                self.physics.capacity(),
                self.c_e
            ));
        }
        if self.s_ini > self.c_s {
            return fail(format!("initial storage {} exceeds capacity {}", self.s_ini, self.c_s));
        }
        if let Some(t) = self.prices.iter().position(|p| !p.is_finite()) {
            return fail(format!("price at hour {t} is not finite"));
        }
        if let Some(t) = self.capacity_factor.iter().position(|cf| !(0.0..=1.0).contains(cf)) {
            return fail(format!("capacity factor at hour {t} is {} (outside [0, 1])", self.capacity_factor[t]));
        }
        let mut covered = vec![false; self.hours()];
        for (n, b) in self.demand.iter().enumerate() {
            if b.hours == 0 || b.start + b.hours > self.hours() {
                return fail(format!("demand block {n} ({:?}) lies outside the horizon", b.range()));
            }
            if !(b.minimum_kg >= 0.0 && b.minimum_kg.is_finite()) {
                return fail(format!("demand block {n} has minimum {}", b.minimum_kg));
            }
            for t in b.range() {
                if covered[t] {
                    return fail(format!("demand block {n} overlaps an earlier block at hour {t}"));
                }
                covered[t] = true;
            }
        }
        Ok(())
    }

    /// Sub-horizon `[start, start + hours)`. Demand blocks are clipped and
    /// their minimum scaled by the fraction of the block kept.
    pub fn slice_horizon(&self, start: usize, hours: usize) -> Result<Self> {
        if hours == 0 || start + hours > self.hours() {
            return Err(CoreError::InvalidArgument(format!(
                "window [{start}, {}) outside the {}-hour horizon",
                start + hours,
                self.hours()
            )));
        }
        let end = start + hours;
        let demand = self
            .demand
            .iter()
            .filter_map(|b| {
                let lo = b.start.max(start);
                let hi = (b.start + b.hours).min(end);
                (hi > lo).then(|| DemandBlock {
                    start: lo - start,
                    hours: hi - lo,
                    minimum_kg: if hi - lo == b.hours {
                        b.minimum_kg
                    } else {
                        b.minimum_kg * (hi - lo) as f64 / b.hours as f64
                    },
                })
            })
            .collect();
        Ok(PlantScenario {
            prices: self.prices[start..end].to_vec(),
            capacity_factor: self.capacity_factor[start..end].to_vec(),
            demand,
            start: self.start + Duration::hours(start as i64),
            ..self.clone()
        })
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text).map_err(|e| CoreError::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
        let scn: PlantScenario = serde_json::from_str(&text).map_err(|e| CoreError::Parse {
            file: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        scn.validate()?;
        Ok(scn)
    }
}

/// Loads config JSON plus price and wind CSVs into a validated scenario.
pub fn load_scenario(config: &Path, prices: &Path, wind_path: &Path) -> Result<PlantScenario> {
    let config = ScenarioConfig::load(config)?;
    let prices = read_series_csv(prices, PRICE_HEADER, "EUR/MWh")?;
    let wind = read_series_csv(wind_path, WIND_HEADER, "capacity factor")?;
    if let Some(k) = wind.values.iter().position(|cf| !(0.0..=1.0).contains(cf)) {
        return Err(CoreError::Parse {
            file: wind_path.display().to_string(),
            line: k + 2,
            message: format!("capacity factor {} outside [0, 1]", wind.values[k]),
        });
    }
    PlantScenario::from_parts(&config, &prices, &wind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn daily_demand_pro_rata_tail() {
        let d = daily_demand(36, 3667.0);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0], DemandBlock { start: 0, hours: 24, minimum_kg: 3667.0 });
        assert_eq!(d[1].hours, 12);
        assert_eq!(d[1].minimum_kg, 0.5 * 3667.0);
    }

    #[test]
    fn csv_gap_reports_line() {
        let text = "timestamp,price_eur_mwh\n2019-01-01T00:00:00Z,10\n2019-01-01T02:00:00Z,11\n";
        let err = parse_series_csv(text, "p.csv", PRICE_HEADER, "EUR/MWh").unwrap_err();
        assert!(matches!(err, CoreError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn csv_header_and_numbers_checked() {
        let err = parse_series_csv("time,price\n", "p.csv", PRICE_HEADER, "").unwrap_err();
        assert!(matches!(err, CoreError::Parse { line: 1, .. }));
        let text = "timestamp,price_eur_mwh\n2019-01-01T00:00:00Z,abc\n";
        let err = parse_series_csv(text, "p.csv", PRICE_HEADER, "").unwrap_err();
        assert!(matches!(err, CoreError::Parse { line: 2, .. }), "{err}");
        let err = parse_series_csv("timestamp,price_eur_mwh\n", "p.csv", PRICE_HEADER, "").unwrap_err();
        assert!(matches!(err, CoreError::Parse { .. }));
    }

    #[test]
    fn unknown_config_keys_rejected() {
        let mut v = serde_json::to_value(ScenarioConfig::reference()).unwrap();
        v["plant"]["capacity"] = serde_json::json!(1.0);
        let err = ScenarioConfig::from_json(&v.to_string(), "c.json").unwrap_err();
        assert!(err.to_string().contains("capacity"), "{err}");
    }
}
