//! Piecewise-linear approximation of the hydrogen production curve `h(p)`.
//!
//! Breakpoints follow a nested refinement chain over `[p_min, capacity]`:
//! 1 segment uses the two endpoints, 2 adds the efficiency peak, 4 and 8
//! split every segment at its midpoint, and 12 splits the four segments
//! right of the peak once more. Each segment interpolates `h` at its ends.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::physics::ElectrolyzerPhysics;

pub const SEGMENT_COUNTS: [usize; 5] = [1, 2, 4, 8, 12];
const CONCAVITY_SAMPLES: usize = 64;

/// How the 8 → 12 refinement step picked the segments it split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefinementRule {
    /// Counts up to 8 only use midpoint doubling.
    Doubling,
    /// The four segments right of the peak were split once more.
    RightOfPeak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakpoints {
    pub points: Vec<f64>,
    pub rule: RefinementRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// kg/MWh
    pub slope: f64,
    /// kg/h
    pub intercept: f64,
    pub p_lo: f64,
    pub p_hi: f64,
    /// Whether `h` was found concave across the segment.
    pub concave: bool,
}

impl Segment {
    pub fn production(&self, p: f64) -> f64 {
        self.slope * p + self.intercept
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSet {
    pub breakpoints: Vec<f64>,
    pub segments: Vec<Segment>,
    pub rule: RefinementRule,
}

fn split_at_midpoints(points: &[f64], which: impl Fn(usize) -> bool) -> Vec<f64> {
    let mut out = Vec::with_capacity(points.len() * 2);
    for (s, w) in points.windows(2).enumerate() {
        out.push(w[0]);
        if which(s) {
            out.push(0.5 * (w[0] + w[1]));
        }
    }
    out.push(*points.last().expect("non-empty breakpoints"));
    out
}

/// Breakpoints for `n_segments ∈ {1, 2, 4, 8, 12}`.
pub fn build_breakpoints(phys: &ElectrolyzerPhysics, p_min: f64, n_segments: usize) -> Result<Breakpoints> {
    if !SEGMENT_COUNTS.contains(&n_segments) {
        return Err(CoreError::InvalidArgument(format!(
            "segment count must be one of {SEGMENT_COUNTS:?}, got {n_segments}"
        )));
    }
    let cap = phys.capacity();
    if !(p_min > 0.0 && p_min < cap) {
        return Err(CoreError::InvalidArgument(format!(
            "minimum load {p_min} must lie in (0, {cap})"
        )));
    }
    let mut points = vec![p_min, cap];
    if n_segments == 1 {
        return Ok(Breakpoints { points, rule: RefinementRule::Doubling });
    }
    let peak = phys.find_peak_efficiency(p_min)?.power;
    if !(peak > p_min && peak < cap) {
        return Err(CoreError::InvalidArgument(format!(
            "efficiency peak {peak} MW is not strictly inside ({p_min}, {cap})"
        )));
    }
    points.insert(1, peak);
    let mut count = 2;
    while count < n_segments.min(8) {
        points = split_at_midpoints(&points, |_| true);
        count *= 2;
    }
    if n_segments < 12 {
        return Ok(Breakpoints { points, rule: RefinementRule::Doubling });
    }
    // the peak is a breakpoint and doubling is symmetric, so exactly four
    // segments lie right of it
    let right = (0..points.len() - 1).filter(|&s| points[s] >= peak).count();
    if right != 4 {
        return Err(CoreError::Numeric(format!("expected 4 segments right of the peak, found {right}")));
    }
    let points = split_at_midpoints(&points, |s| points[s] >= peak);
    Ok(Breakpoints { points, rule: RefinementRule::RightOfPeak })
}

/// Interpolating segments between consecutive breakpoints.
pub fn linearize(phys: &ElectrolyzerPhysics, breakpoints: &Breakpoints) -> Result<SegmentSet> {
    let pts = &breakpoints.points;
    if pts.len() < 2 || pts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CoreError::InvalidArgument("breakpoints must be strictly increasing".into()));
    }
    let h: Vec<f64> = pts.iter().map(|&p| phys.hydrogen_at_power(p)).collect::<Result<_>>()?;
    let mut segments = Vec::with_capacity(pts.len() - 1);
    for s in 0..pts.len() - 1 {
        let slope = (h[s + 1] - h[s]) / (pts[s + 1] - pts[s]);
        let intercept = h[s] - slope * pts[s];
        let concave = is_concave_on(phys, pts[s], pts[s + 1])?;
        if !concave {
            warn!(
                "production curve is not concave on [{:.4}, {:.4}] MW; segment may overestimate",
                pts[s],
                pts[s + 1]
            );
        }
        segments.push(Segment {
            slope,
            intercept,
            p_lo: pts[s],
            p_hi: pts[s + 1],
            concave,
        });
    }
    Ok(SegmentSet {
        breakpoints: pts.clone(),
        segments,
        rule: breakpoints.rule,
    })
}

/// Convenience: breakpoints and linearization in one step.
pub fn segment_set(phys: &ElectrolyzerPhysics, p_min: f64, n_segments: usize) -> Result<SegmentSet> {
    linearize(phys, &build_breakpoints(phys, p_min, n_segments)?)
}

fn is_concave_on(phys: &ElectrolyzerPhysics, lo: f64, hi: f64) -> Result<bool> {
    let n = CONCAVITY_SAMPLES;
    let h: Vec<f64> = (0..=n)
        .map(|k| phys.hydrogen_at_power(lo + (hi - lo) * k as f64 / n as f64))
        .collect::<Result<_>>()?;
    let scale = h.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    Ok(h.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] <= 1e-9 * scale))
}

impl SegmentSet {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn p_min(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn p_max(&self) -> f64 {
        *self.breakpoints.last().expect("validated set has breakpoints")
    }

    /// Index of the segment covering `p` (shared breakpoints go left).
    pub fn segment_index(&self, p: f64) -> Option<usize> {
        if !(p >= self.p_min() && p <= self.p_max()) {
            return None;
        }
        self.segments.iter().position(|s| p <= s.p_hi)
    }

    /// Piecewise production at `p`, kg/h.
    pub fn production(&self, p: f64) -> Result<f64> {
        let s = self.segment_index(p).ok_or(CoreError::Domain {
            what: "power",
            value: p,
            lo: self.p_min(),
            hi: self.p_max(),
        })?;
        Ok(self.segments[s].production(p))
    }

    /// Structural checks for sets read from JSON.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CoreError::InvalidArgument(m));
        if self.segments.is_empty() || self.breakpoints.len() != self.segments.len() + 1 {
            return bad("need n segments and n + 1 breakpoints".into());
        }
        if self.breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("breakpoints must be strictly increasing".into());
        }
        for (s, seg) in self.segments.iter().enumerate() {
            if seg.p_lo != self.breakpoints[s] || seg.p_hi != self.breakpoints[s + 1] {
                return bad(format!("segment {s} does not span its breakpoints"));
            }
            if !(seg.slope.is_finite() && seg.intercept.is_finite()) {
                return bad(format!("segment {s} has non-finite coefficients"));
            }
        }
        Ok(())
    }
}

/// `h(p)` minus the piecewise value, kg/h.
pub fn approximation_gap(phys: &ElectrolyzerPhysics, seg: &SegmentSet, p: f64) -> Result<f64> {
    let approx = seg.production(p)?;
    Ok(phys.hydrogen_at_power(p)? - approx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phys() -> ElectrolyzerPhysics {
        ElectrolyzerPhysics::reference(52.25).unwrap()
    }

    #[test]
    fn unsupported_counts_are_rejected() {
        for n in [0, 3, 5, 16] {
            assert!(build_breakpoints(&phys(), 7.84, n).is_err());
        }
    }

    #[test]
    fn twelve_uses_right_of_peak_rule_for_reference_physics() {
        let bp = build_breakpoints(&phys(), 7.84, 12).unwrap();
        assert_eq!(bp.points.len(), 13);
        assert_eq!(bp.rule, RefinementRule::RightOfPeak);
    }

    #[test]
    fn peak_outside_load_window_is_rejected() {
        assert!(build_breakpoints(&phys(), 20.0, 2).is_err());
        assert!(build_breakpoints(&phys(), 20.0, 1).is_ok());
    }

    #[test]
    fn lookup_prefers_left_segment_at_shared_breakpoint() {
        let set = segment_set(&phys(), 7.84, 2).unwrap();
        let mid = set.breakpoints[1];
        assert_eq!(set.segment_index(mid), Some(0));
        assert_eq!(set.segment_index(7.0), None);
    }

    #[test]
    fn json_round_trip_validates() {
        let set = segment_set(&phys(), 7.84, 4).unwrap();
        let text = serde_json::to_string(&set).unwrap();
        let back: SegmentSet = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(back, set);
        let mut broken = back.clone();
        broken.breakpoints.swap(1, 2);
        assert!(broken.validate().is_err());
    }
}
