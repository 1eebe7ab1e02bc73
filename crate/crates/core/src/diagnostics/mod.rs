//! Radial-sweep diagnostics for compactness of Hankel-type operators.
//!
//! Boundary points of the disk stand in for support sets: a quantity such as
//! `‖H_f k_z‖` is sampled along radii `z = r e^{iθ}` and its trend as `r → 1`
//! classifies the angle. Verdicts are evidence with the thresholds recorded, not proofs.

mod dilation;
mod sweep;
mod verdict;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::symbol::Symbol;

pub use dilation::{dilation_first_form, dilation_residual, dilation_sweep, DilationPoint};
pub use sweep::{hankel_kernel_norm, radial_sweep, PointDiagnostic, Quantity, SweepCurve};
pub use verdict::{
    hartman_verdict, product_verdict, sum_product_verdict, zheng_pair_verdict, AngleCase, CaseLabel, SizeEvidence,
    Verdict, VerdictOutcome,
};

/// A value with an absolute error bar: the true quantity lies in `value ± error_bar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub error_bar: f64,
}

impl Measured {
    pub fn exact(value: f64) -> Self {
        Self { value, error_bar: 0.0 }
    }

    pub fn interval(&self) -> (f64, f64) {
        ((self.value - self.error_bar).max(0.0), self.value + self.error_bar)
    }

    pub fn times(&self, other: &Measured) -> Measured {
        Measured {
            value: self.value * other.value,
            error_bar: self.value * other.error_bar + other.value * self.error_bar + self.error_bar * other.error_bar,
        }
    }
}

/// Engineering thresholds; every verdict carries the set it was decided with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Singular values at or below this count as negligible.
    pub tau_compact: f64,
    /// Stabilized singular values must stay above this to witness noncompactness.
    pub tau_noncompact: f64,
    /// Relative change allowed for a singular value to count as stabilized.
    pub stability: f64,
    /// Fixed indices `k` (1-based) whose `σ_k` are tracked across sizes.
    pub probes: Vec<usize>,
    /// Least-squares slope of `log value` against `log(1 - r)` that counts as vanishing.
    pub slope: f64,
    /// Plateau: the last third of the radii varies by at most this factor.
    pub plateau_factor: f64,
    /// Number of trailing radii used for the slope fit.
    pub trend_window: usize,
    /// Values below this are treated as zero.
    pub floor: f64,
    /// Relative variation of `t_z` over the last three radii that flags the estimate unstable.
    pub t_variation: f64,
    /// `|t|` at or below this means `t = 0`.
    pub t_zero: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            tau_compact: 1e-3,
            tau_noncompact: 1e-2,
            stability: 0.10,
            probes: vec![10, 25, 50],
            slope: 0.4,
            plateau_factor: 2.0,
            trend_window: 6,
            floor: 1e-12,
            t_variation: 0.25,
            t_zero: 1e-8,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let pos =
            [self.tau_compact, self.tau_noncompact, self.stability, self.plateau_factor, self.floor, self.t_variation];
        if pos.iter().any(|x| !(x.is_finite() && *x > 0.0)) || !self.slope.is_finite() || !(self.t_zero >= 0.0) {
            return Err(Error::Invalid("thresholds must be finite and positive".into()));
        }
        if self.trend_window < 2 {
            return Err(Error::Invalid("trend_window must be at least 2".into()));
        }
        if self.probes.is_empty() || self.probes.contains(&0) {
            return Err(Error::Invalid("probes must be nonempty 1-based indices".into()));
        }
        Ok(())
    }
}

/// Boundary angles and radii along which points approach the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialNet {
    pub boundary_angles: Vec<f64>,
    pub radii: Vec<f64>,
    /// Kernel truncation tolerance.
    pub kernel_eps: f64,
    /// Hankel outputs are kept to `out_factor × N` degrees, `N` the kernel length;
    /// the rest is accounted for in the error bar.
    pub out_factor: usize,
}

pub const DEFAULT_ANGLES: usize = 64;
pub const DEFAULT_DEPTH: u32 = 12;
pub const DEFAULT_KERNEL_EPS: f64 = 1e-10;
pub const DEFAULT_OUT_FACTOR: usize = 4;

/// `r_j = 1 - 2^{-j}`.
pub fn dyadic_radii(from: u32, to: u32) -> Vec<f64> {
    (from..=to).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect()
}

/// Angle reduced to `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI - 1e-15 {
        0.0
    } else {
        t
    }
}

impl Default for RadialNet {
    fn default() -> Self {
        Self::uniform(DEFAULT_ANGLES, dyadic_radii(1, DEFAULT_DEPTH))
    }
}

impl RadialNet {
    pub fn uniform(angles: usize, radii: Vec<f64>) -> Self {
        let boundary_angles = (0..angles).map(|k| 2.0 * PI * k as f64 / angles as f64).collect();
        Self { boundary_angles, radii, kernel_eps: DEFAULT_KERNEL_EPS, out_factor: DEFAULT_OUT_FACTOR }
    }

    /// Net with explicit angles (normalized, sorted, deduplicated).
    pub fn with_angles(angles: &[f64], radii: Vec<f64>) -> Self {
        let mut net =
            Self { boundary_angles: Vec::new(), radii, kernel_eps: DEFAULT_KERNEL_EPS, out_factor: DEFAULT_OUT_FACTOR };
        net.add_angles(angles);
        net
    }

    /// Adds angles (jump points of arcs, say), keeping the list sorted and free of duplicates.
    pub fn add_angles(&mut self, angles: &[f64]) {
        let mut all: Vec<f64> = self.boundary_angles.iter().chain(angles).map(|t| normalize_angle(*t)).collect();
        all.sort_by(f64::total_cmp);
        all.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        self.boundary_angles = all;
    }

    /// Adds the jump points of every symbol.
    pub fn with_jumps(mut self, symbols: &[&Symbol]) -> Self {
        let jumps: Vec<f64> = symbols.iter().flat_map(|s| s.singular_points()).collect();
        self.add_angles(&jumps);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.boundary_angles.is_empty() || self.radii.is_empty() {
            return Err(Error::Invalid("net needs at least one angle and one radius".into()));
        }
        if self.boundary_angles.iter().any(|t| !t.is_finite()) {
            return Err(Error::Invalid("net angles must be finite".into()));
        }
        if !self.radii.iter().all(|r| r.is_finite() && *r >= 0.0 && *r < 1.0) {
            return Err(Error::Invalid("net radii must lie in [0, 1)".into()));
        }
        if !self.radii.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Invalid("net radii must be strictly increasing".into()));
        }
        if !(self.kernel_eps > 0.0 && self.kernel_eps < 1.0) {
            return Err(Error::Invalid("kernel_eps must lie in (0, 1)".into()));
        }
        if self.out_factor == 0 {
            return Err(Error::Invalid("out_factor must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Vanishing,
    Plateau,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    /// Slope of `log max(value, floor)` against `log(1 - r)` over the trailing window.
    pub slope: f64,
    /// Mean over the last third of the radii.
    pub plateau: f64,
    /// `max / min` over the last third (infinite when the minimum is below the floor).
    pub last_third_ratio: f64,
    /// Smallest value along the net (the `lim inf` side of the equivalence).
    pub minimum: f64,
    pub trend: Trend,
}

/// Classifies a curve sampled at `radii`.
pub fn fit_trend(radii: &[f64], values: &[f64], t: &Thresholds) -> TrendFit {
    assert_eq!(radii.len(), values.len());
    let n = values.len();
    let w = t.trend_window.min(n);
    let xs: Vec<f64> = radii[n - w..].iter().map(|r| (1.0 - r).ln()).collect();
    let ys: Vec<f64> = values[n - w..].iter().map(|v| v.max(t.floor).ln()).collect();
    let slope = if w >= 2 {
        let mx = xs.iter().sum::<f64>() / w as f64;
        let my = ys.iter().sum::<f64>() / w as f64;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    } else {
        0.0
    };
    let third = n.div_ceil(3).max(1);
    let tail = &values[n - third..];
    let max = tail.iter().copied().fold(0.0, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let plateau = tail.iter().sum::<f64>() / third as f64;
    let ratio = if min > t.floor { max / min } else { f64::INFINITY };
    let minimum = values.iter().copied().fold(f64::INFINITY, f64::min);
    let all_small = values[n - w..].iter().all(|v| *v <= t.floor);
    let trend = if all_small || (slope >= t.slope && w >= 2) {
        Trend::Vanishing
    } else if ratio <= t.plateau_factor {
        Trend::Plateau
    } else {
        Trend::Undecided
    };
    TrendFit { slope, plateau, last_third_ratio: ratio, minimum, trend }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_classes() {
        let t = Thresholds::default();
        let radii = dyadic_radii(1, 12);
        let sqrt: Vec<f64> = radii.iter().map(|r| (1.0 - r * r).sqrt()).collect();
        let fit = fit_trend(&radii, &sqrt, &t);
        assert_eq!(fit.trend, Trend::Vanishing);
        assert!((fit.slope - 0.5).abs() < 0.01);
        let flat: Vec<f64> = radii.iter().map(|r| 0.3 + 0.01 * r).collect();
        assert_eq!(fit_trend(&radii, &flat, &t).trend, Trend::Plateau);
        assert_eq!(fit_trend(&radii, &[0.0; 12], &t).trend, Trend::Vanishing);
        let slow: Vec<f64> = radii.iter().map(|r| (1.0 - r).powf(0.35)).collect();
        assert_eq!(fit_trend(&radii, &slow, &t).trend, Trend::Undecided);
    }

    #[test]
    fn net_validation_and_jumps() {
        assert!(RadialNet::default().validate().is_ok());
        let bad = RadialNet { radii: vec![0.5, 0.4], ..RadialNet::default() };
        assert!(bad.validate().is_err());
        let net = RadialNet::uniform(4, vec![0.5]).with_jumps(&[&Symbol::arc(-0.5, 0.5).unwrap()]);
        assert_eq!(net.boundary_angles.len(), 6);
        assert!(net.boundary_angles.iter().any(|t| (t - 0.5).abs() < 1e-15));
        assert!(net.boundary_angles.iter().any(|t| (t - (2.0 * PI - 0.5)).abs() < 1e-12));
    }
}
