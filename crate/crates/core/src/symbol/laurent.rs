use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fft;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Finite Laurent polynomial `Σ_{n=lo}^{hi} c_n e^{inθ}` (a trigonometric polynomial).
///
/// Exact zeros at either end are trimmed, so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Laurent {
    lo: i64,
    coeffs: Vec<C64>,
}

impl Laurent {
    pub fn zero() -> Self {
        Self { lo: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(0, vec![c])
    }

    pub fn monomial(degree: i64, c: C64) -> Self {
        Self::new(degree, vec![c])
    }

    pub fn new(lo: i64, coeffs: Vec<C64>) -> Self {
        let mut p = Self { lo, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        let first = self.coeffs.iter().position(|c| *c != ZERO);
        match first {
            None => {
                self.coeffs.clear();
                self.lo = 0;
            }
            Some(start) => {
                let end = self.coeffs.iter().rposition(|c| *c != ZERO).unwrap();
                self.coeffs.truncate(end + 1);
                self.coeffs.drain(..start);
                self.lo += start as i64;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest stored degree (0 for the zero polynomial).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest stored degree (`lo - 1` for the zero polynomial).
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: i64) -> C64 {
        let idx = n - self.lo;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            ZERO
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Nonzero `(degree, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| **c != ZERO).map(move |(i, c)| (self.lo + i as i64, *c))
    }

    /// `max(|lo|, |hi|)`, the trigonometric degree.
    pub fn degree(&self) -> u64 {
        if self.is_zero() {
            0
        } else {
            self.lo.unsigned_abs().max(self.hi().unsigned_abs())
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add_scaled(&self, other: &Self, s: C64) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.scale(s);
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let coeffs = (lo..=hi).map(|n| self.coeff(n) + s * other.coeff(n)).collect();
        Self::new(lo, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::new(self.lo + other.lo, fft::convolve(&self.coeffs, &other.coeffs))
    }

    /// Multiplication by `e^{ikθ}`.
    pub fn shift(&self, k: i64) -> Self {
        Self { lo: self.lo + k, coeffs: self.coeffs.clone() }
    }

    /// `c_n ↦ c_{-n}`.
    pub fn reflect(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self::new(-self.hi(), coeffs)
    }

    /// `c_n ↦ conj(c_n)`.
    pub fn conj_coeffs(&self) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn eval(&self, theta: f64) -> C64 {
        self.terms().map(|(n, c)| c * C64::from_polar(1.0, n as f64 * theta)).sum()
    }

    /// Values on the uniform grid `θ_j = 2πj/size`.
    pub fn eval_grid(&self, size: usize) -> Vec<C64> {
        if self.coeffs.len() <= 32 {
            return (0..size).map(|j| self.eval(2.0 * PI * j as f64 / size as f64)).collect();
        }
        fft::grid_values(self.lo, &self.coeffs, size)
    }

    /// Certified upper bound for `max |p(e^{iθ})|`: the ℓ¹ norm, tightened by a grid
    /// maximum plus the Lipschitz correction `(π/size)·Σ|n c_n|` when that is smaller.
    pub fn sup_bound(&self, grid_size: usize) -> f64 {
        let l1 = self.l1_norm();
        if self.is_zero() || grid_size == 0 || self.coeffs.len() <= 1 {
            return l1;
        }
        let lipschitz: f64 = self.terms().map(|(n, c)| n.unsigned_abs() as f64 * c.norm()).sum();
        let grid_max = self.eval_grid(grid_size).iter().map(|v| v.norm()).fold(0.0, f64::max);
        l1.min(grid_max + PI / grid_size as f64 * lipschitz)
    }

    /// Non-negative-degree part (the Riesz projection).
    pub fn analytic_part(&self) -> Self {
        let coeffs = (0..=self.hi().max(-1)).map(|n| self.coeff(n)).collect();
        Self::new(0, coeffs)
    }
}
