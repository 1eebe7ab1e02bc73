//! Indicator functions of circular arcs and their Fourier coefficients.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::C64;

/// Indicator of the counter-clockwise arc `{e^{iθ} : θ ∈ [start, start + length)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleArc {
    start: f64,
    length: f64,
}

/// Arcs shorter than this are treated as empty after intersection.
const MIN_LENGTH: f64 = 1e-14;

impl CircleArc {
    /// Arc running counter-clockwise from angle `alpha` to angle `beta`.
    ///
    /// Returns `None` when the endpoints coincide modulo 2π.
    pub fn new(alpha: f64, beta: f64) -> Option<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return None;
        }
        let length = (beta - alpha).rem_euclid(TAU);
        if length < MIN_LENGTH || TAU - length < MIN_LENGTH {
            return None;
        }
        Some(Self { start: alpha.rem_euclid(TAU), length })
    }

    fn from_parts(start: f64, length: f64) -> Option<Self> {
        (MIN_LENGTH..=TAU - MIN_LENGTH).contains(&length).then(|| Self { start: start.rem_euclid(TAU), length })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        (self.start + self.length).rem_euclid(TAU)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn endpoints(&self) -> [f64; 2] {
        [self.start, self.end()]
    }

    pub fn contains(&self, theta: f64) -> bool {
        (theta - self.start).rem_euclid(TAU) < self.length
    }

    /// Image under `θ ↦ -θ`.
    pub fn reflect(&self) -> Self {
        Self { start: (-self.start - self.length).rem_euclid(TAU), length: self.length }
    }

    /// `ĉ(0) = ℓ/2π`, `ĉ(n) = (e^{-inα} - e^{-inβ}) / (2πin)`.
    pub fn coeff(&self, n: i64) -> C64 {
        if n == 0 {
            return C64::new(self.length / TAU, 0.0);
        }
        let nf = n as f64;
        let a = C64::from_polar(1.0, -nf * self.start);
        let b = C64::from_polar(1.0, -nf * (self.start + self.length));
        (a - b) / C64::new(0.0, TAU * nf)
    }

    /// Coefficients for degrees `lo..lo + len`.
    pub fn coeff_range(&self, lo: i64, len: usize) -> Vec<C64> {
        (0..len as i64).map(|i| self.coeff(lo + i)).collect()
    }

    /// `|ĉ(n)| ≤ 1/(π|n|)` for every `n ≠ 0`.
    pub const ENVELOPE_C: f64 = 1.0 / PI;

    /// Intersection as a set of disjoint arcs (at most two).
    pub fn intersect(&self, other: &CircleArc) -> Vec<CircleArc> {
        let a0 = self.start;
        let a1 = self.start + self.length;
        let mut out = Vec::new();
        // Lift `other` so its start lies in [a0, a0 + 2π), then also try one turn back.
        let b0 = a0 + (other.start - a0).rem_euclid(TAU);
        for shift in [0.0, -TAU] {
            let lo = (b0 + shift).max(a0);
            let hi = (b0 + shift + other.length).min(a1);
            if hi - lo >= MIN_LENGTH {
                if let Some(arc) = CircleArc::from_parts(lo, hi - lo) {
                    out.push(arc);
                } else {
                    // Intersection covers all of `self` up to rounding.
                    return vec![*self];
                }
            }
        }
        out
    }
}
