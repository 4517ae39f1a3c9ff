//! Alkaline electrolyzer operating curves at a fixed temperature and pressure.
//!
//! Everything is parametrized by the current density `i` (A/m²):
//! cell voltage `U(i) = u_rev + k1·i + k2·log(k3·i + 1)`, stack power
//! `U(i)·i·A`, Faraday efficiency `i²/(f1 + i²)·f2` and hydrogen output from
//! Faraday's law. Power-domain queries invert `p(i)` by bisection.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

pub const MOLAR_MASS_H2: f64 = 2.01588e-3;
pub const FARADAY_CONSTANT: f64 = 96485.3329;
/// Uniform samples in current density used by the peak search.
pub const CURVE_SAMPLES: usize = 10_000;
const INVERSION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Log10,
    Ln,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaradayParams {
    /// A²/m⁴
    pub f1: f64,
    pub f2: f64,
}

/// Polarization and Faraday coefficients at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellCoefficients {
    pub u_rev: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub faraday: FaradayParams,
}

impl CellCoefficients {
    /// Empirical temperature/pressure correlations for a pressurized alkaline
    /// cell. `u_rev` uses the standard reversible-voltage fit in kelvin.
    pub fn alkaline_correlation(temperature_c: f64, pressure_bar: f64) -> Self {
        let (r1, r2, d1, d2) = (4.45153e-5, 6.88874e-9, -3.12996e-6, 4.47137e-7);
        let (s, t1, t2, t3) = (0.33824, -0.01539, 2.00181, 15.24178);
        let (f11, f12, f21, f22) = (478645.74, -2953.15, 1.0396, -0.00104);
        let t = temperature_c;
        let tk = t + 273.15;
        CellCoefficients {
            u_rev: 1.5184 - 1.5421e-3 * tk + 9.523e-5 * tk * tk.ln() + 9.84e-8 * tk * tk,
            k1: r1 + d1 + r2 * t + d2 * pressure_bar,
            k2: s,
            k3: t1 + t2 / t + t3 / (t * t),
            faraday: FaradayParams {
                f1: f11 + f12 * t,
                f2: f21 + f22 * t,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectrolyzerPhysics {
    pub u_rev: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// m²
    pub cell_area_total: f64,
    /// A/m²
    pub i_max: f64,
    pub faraday_params: FaradayParams,
    pub temperature_c: f64,
    pub pressure_bar: f64,
    pub m_h2: f64,
    pub f_const: f64,
    pub log_base: LogBase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub current_density: f64,
    /// MW
    pub power: f64,
    /// kg/h
    pub hydrogen_rate: f64,
    /// kg/MWh
    pub efficiency: f64,
}

impl ElectrolyzerPhysics {
    /// Builds the physics with the total cell area chosen so that the stack
    /// draws exactly `capacity_mw` at `i_max`.
    pub fn calibrated(
        coeffs: CellCoefficients,
        i_max: f64,
        capacity_mw: f64,
        temperature_c: f64,
        pressure_bar: f64,
        log_base: LogBase,
    ) -> Result<Self> {
        let mut phys = ElectrolyzerPhysics {
            u_rev: coeffs.u_rev,
            k1: coeffs.k1,
            k2: coeffs.k2,
            k3: coeffs.k3,
            cell_area_total: 1.0,
            i_max,
            faraday_params: coeffs.faraday,
            temperature_c,
            pressure_bar,
            m_h2: MOLAR_MASS_H2,
            f_const: FARADAY_CONSTANT,
            log_base,
        };
        if !(capacity_mw > 0.0 && capacity_mw.is_finite()) {
            return Err(CoreError::InvalidArgument(format!("capacity must be positive, got {capacity_mw}")));
        }
        phys.validate()?;
        phys.cell_area_total = capacity_mw * 1e6 / (phys.voltage_unchecked(i_max) * i_max);
        phys.validate()?;
        Ok(phys)
    }

    /// Default stack: 90 °C, 30 bar, 5000 A/m², calibrated to `capacity_mw`.
    pub fn reference(capacity_mw: f64) -> Result<Self> {
        Self::calibrated(
            CellCoefficients::alkaline_correlation(90.0, 30.0),
            5000.0,
            capacity_mw,
            90.0,
            30.0,
            LogBase::Log10,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("u_rev", self.u_rev),
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("cell_area_total", self.cell_area_total),
            ("i_max", self.i_max),
            ("faraday f1", self.faraday_params.f1),
            ("faraday f2", self.faraday_params.f2),
            ("m_h2", self.m_h2),
            ("f_const", self.f_const),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CoreError::InvalidArgument(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.faraday_params.f2 > 1.0 {
            return Err(CoreError::InvalidArgument(format!(
                "faraday f2 must be <= 1, got {}",
                self.faraday_params.f2
            )));
        }
        Ok(())
    }

    fn check_current(&self, i: f64) -> Result<()> {
        if (0.0..=self.i_max).contains(&i) {
            Ok(())
        } else {
            Err(CoreError::Domain {
                what: "current density",
                value: i,
                lo: 0.0,
                hi: self.i_max,
            })
        }
    }

    fn voltage_unchecked(&self, i: f64) -> f64 {
        let arg = self.k3 * i + 1.0;
        let log = match self.log_base {
            LogBase::Log10 => arg.log10(),
            LogBase::Ln => arg.ln(),
        };
        self.u_rev + self.k1 * i + self.k2 * log
    }

    fn power_unchecked(&self, i: f64) -> f64 {
        self.voltage_unchecked(i) * i * self.cell_area_total / 1e6
    }

    fn faraday_unchecked(&self, i: f64) -> f64 {
        let FaradayParams { f1, f2 } = self.faraday_params;
        i * i / (f1 + i * i) * f2
    }

    fn hydrogen_unchecked(&self, i: f64) -> f64 {
        3600.0 * self.faraday_unchecked(i) * self.m_h2 * i * self.cell_area_total / (2.0 * self.f_const)
    }

    /// V per cell.
    pub fn cell_voltage(&self, i: f64) -> Result<f64> {
        self.check_current(i)?;
        Ok(self.voltage_unchecked(i))
    }

    /// MW.
    pub fn electrical_power(&self, i: f64) -> Result<f64> {
        self.check_current(i)?;
        Ok(self.power_unchecked(i))
    }

    pub fn faraday_efficiency(&self, i: f64) -> Result<f64> {
        self.check_current(i)?;
        Ok(self.faraday_unchecked(i))
    }

    /// kg/h.
    pub fn hydrogen_rate(&self, i: f64) -> Result<f64> {
        self.check_current(i)?;
        Ok(self.hydrogen_unchecked(i))
    }

    /// Faraday's-law output with unit Faraday efficiency, kg/h.
    pub fn ideal_hydrogen_rate(&self, i: f64) -> Result<f64> {
        self.check_current(i)?;
        Ok(3600.0 * self.m_h2 * i * self.cell_area_total / (2.0 * self.f_const))
    }

    /// Nameplate power at `i_max`, MW.
    pub fn capacity(&self) -> f64 {
        self.power_unchecked(self.i_max)
    }

    /// Current density drawing `p` MW, by bisection.
    pub fn current_at_power(&self, p: f64) -> Result<f64> {
        let cap = self.capacity();
        if !(0.0..=cap).contains(&p) {
            return Err(CoreError::Domain {
                what: "power",
                value: p,
                lo: 0.0,
                hi: cap,
            });
        }
        let (mut lo, mut hi) = (0.0, self.i_max);
        for _ in 0..200 {
            if hi - lo <= INVERSION_TOL {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if self.power_unchecked(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(CoreError::Numeric(format!("power inversion did not converge at p = {p}")))
    }

    /// Hydrogen rate at a stack power, kg/h. Zero power produces nothing.
    pub fn hydrogen_at_power(&self, p: f64) -> Result<f64> {
        if p == 0.0 {
            return Ok(0.0);
        }
        let i = self.current_at_power(p)?;
        Ok(self.hydrogen_unchecked(i))
    }

    /// kg/MWh at stack power `p` in `(0, capacity]`.
    pub fn efficiency_at_power(&self, p: f64) -> Result<f64> {
        let cap = self.capacity();
        if !(p > 0.0 && p <= cap) {
            return Err(CoreError::Domain {
                what: "power",
                value: p,
                lo: 0.0,
                hi: cap,
            });
        }
        Ok(self.hydrogen_at_power(p)? / p)
    }

    pub fn operating_point(&self, i: f64) -> Result<OperatingPoint> {
        let power = self.electrical_power(i)?;
        let hydrogen_rate = self.hydrogen_unchecked(i);
        let efficiency = if power > 0.0 { hydrogen_rate / power } else { 0.0 };
        Ok(OperatingPoint {
            current_density: i,
            power,
            hydrogen_rate,
            efficiency,
        })
    }

    /// Efficiency maximum over loads in `[p_min, capacity]`: argmax on the
    /// sampled curve, then golden-section refinement between its neighbours.
    pub fn find_peak_efficiency(&self, p_min: f64) -> Result<OperatingPoint> {
        let i_lo = if p_min > 0.0 { self.current_at_power(p_min)? } else { 0.0 };
        let eff = |i: f64| {
            let p = self.power_unchecked(i);
            if p > 0.0 {
                self.hydrogen_unchecked(i) / p
            } else {
                0.0
            }
        };
        let step = self.i_max / CURVE_SAMPLES as f64;
        let mut best = (eff(self.i_max), self.i_max);
        for k in 1..=CURVE_SAMPLES {
            let i = (step * k as f64).max(i_lo);
            let e = eff(i);
            if e > best.0 {
                best = (e, i);
            }
        }
        let mut a = (best.1 - step).max(i_lo);
        let mut b = (best.1 + step).min(self.i_max);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let (mut fc, mut fd) = (eff(c), eff(d));
        while b - a > 1e-9 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = eff(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = eff(d);
            }
        }
        let mut i_star = 0.5 * (a + b);
        // keep the sampled point if refinement somehow did worse (flat tops)
        if eff(i_star) < best.0 {
            i_star = best.1;
        }
        self.operating_point(i_star)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn voltage_at_zero_is_open_circuit() {
        let phys = ElectrolyzerPhysics::reference(52.25).unwrap();
        assert_eq!(phys.cell_voltage(0.0).unwrap(), phys.u_rev);
        assert!(phys.cell_voltage(phys.i_max).unwrap() > phys.u_rev);
    }

    #[test]
    fn out_of_range_current_is_rejected() {
        let phys = ElectrolyzerPhysics::reference(52.25).unwrap();
        assert!(matches!(phys.cell_voltage(-1.0), Err(CoreError::Domain { .. })));
        assert!(phys.hydrogen_rate(phys.i_max * 1.01).is_err());
        assert!(phys.efficiency_at_power(0.0).is_err());
        assert!(phys.efficiency_at_power(60.0).is_err());
    }

    #[test]
    fn natural_log_variant_changes_voltage() {
        let mut phys = ElectrolyzerPhysics::reference(52.25).unwrap();
        let v10 = phys.cell_voltage(2000.0).unwrap();
        phys.log_base = LogBase::Ln;
        assert!(phys.cell_voltage(2000.0).unwrap() > v10);
    }

    #[test]
    fn rejects_nonphysical_coefficients() {
        let mut c = CellCoefficients::alkaline_correlation(90.0, 30.0);
        c.faraday.f2 = 1.2;
        assert!(ElectrolyzerPhysics::calibrated(c, 5000.0, 52.25, 90.0, 30.0, LogBase::Log10).is_err());
        let mut c = CellCoefficients::alkaline_correlation(90.0, 30.0);
        c.k1 = 0.0;
        assert!(ElectrolyzerPhysics::calibrated(c, 5000.0, 52.25, 90.0, 30.0, LogBase::Log10).is_err());
    }
}
