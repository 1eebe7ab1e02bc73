use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::Laurent;
use crate::C64;

/// A point strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint(C64);

impl DiskPoint {
    pub fn new(z: C64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() && z.norm() < 1.0 {
            Ok(Self(z))
        } else {
            Err(Error::OutsideDisk(z))
        }
    }

    pub fn polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(C64::from_polar(r, theta))
    }

    pub fn origin() -> Self {
        Self(C64::new(0.0, 0.0))
    }

    pub fn z(&self) -> C64 {
        self.0
    }

    pub fn modulus(&self) -> f64 {
        self.0.norm()
    }

    /// The reflected point `z̄`.
    pub fn conj(&self) -> Self {
        Self(self.0.conj())
    }
}

/// Truncated element of H²: coefficients at degrees `0..N` plus an ℓ² bound on
/// everything the truncation leaves out (discarded degrees and upstream errors).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffVector {
    pub entries: Vec<C64>,
    pub tail_bound: f64,
}

impl CoeffVector {
    pub fn new(entries: Vec<C64>, tail_bound: f64) -> Self {
        debug_assert!(tail_bound >= 0.0);
        Self { entries, tail_bound }
    }

    pub fn exact(entries: Vec<C64>) -> Self {
        Self { entries, tail_bound: 0.0 }
    }

    /// Unit vector `e_k` in a window of length `n`.
    pub fn basis(k: usize, n: usize) -> Self {
        let mut entries = vec![C64::new(0.0, 0.0); n.max(k + 1)];
        entries[k] = C64::new(1.0, 0.0);
        Self::exact(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        // `+ 0.0` turns the empty sum's -0.0 into 0.0.
        (self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>() + 0.0).sqrt()
    }

    /// `[norm - tail, norm + tail]`, clamped at zero.
    pub fn norm_interval(&self) -> (f64, f64) {
        let n = self.norm();
        ((n - self.tail_bound).max(0.0), n + self.tail_bound)
    }

    /// `⟨self, other⟩ = Σ self_n conj(other_n)`.
    pub fn inner(&self, other: &CoeffVector) -> C64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a * b.conj()).sum()
    }

    /// Entries `0..n`, zero-padded; discarded entries move into the tail bound.
    pub fn window(&self, n: usize) -> CoeffVector {
        let mut entries = self.entries.clone();
        let dropped =
            if entries.len() > n { entries[n..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() } else { 0.0 };
        entries.resize(n, C64::new(0.0, 0.0));
        CoeffVector::new(entries, self.tail_bound + dropped)
    }

    /// `f ↦ f*`, coefficientwise conjugation (`f*(z) = conj f(z̄)`); norms are preserved.
    pub fn star(&self) -> CoeffVector {
        CoeffVector::new(self.entries.iter().map(|c| c.conj()).collect(), self.tail_bound)
    }

    pub fn scale(&self, s: C64) -> CoeffVector {
        CoeffVector::new(self.entries.iter().map(|c| c * s).collect(), self.tail_bound * s.norm())
    }

    pub fn add(&self, other: &CoeffVector) -> CoeffVector {
        let n = self.len().max(other.len());
        let get = |v: &CoeffVector, i: usize| v.entries.get(i).copied().unwrap_or_default();
        CoeffVector::new((0..n).map(|i| get(self, i) + get(other, i)).collect(), self.tail_bound + other.tail_bound)
    }
}

/// Two-sided coefficient data on `L²` of the circle: degrees `lo..=hi` stored,
/// with an ℓ² bound on whatever lies outside the stored range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSided {
    pub data: Laurent,
    pub tail_bound: f64,
}

impl TwoSided {
    pub fn exact(data: Laurent) -> Self {
        Self { data, tail_bound: 0.0 }
    }

    pub fn from_vector(v: &CoeffVector) -> Self {
        Self { data: Laurent::new(0, v.entries.clone()), tail_bound: v.tail_bound }
    }
}

/// Normalized reproducing kernel `k_z(w) = √(1-|z|²)/(1 - z̄w)` truncated at
/// `N = ⌈log eps / log |z|⌉` terms; the discarded tail has ℓ² norm exactly `|z|^N`.
pub fn kernel_vector(z: DiskPoint, eps: f64) -> CoeffVector {
    assert!(eps > 0.0 && eps < 1.0, "kernel tolerance must lie in (0, 1)");
    let r = z.modulus();
    let n = if r == 0.0 { 1 } else { ((eps.ln() / r.ln()).ceil() as usize).max(1) };
    kernel_vector_len(z, n)
}

/// Kernel truncated at exactly `n` entries.
pub fn kernel_vector_len(z: DiskPoint, n: usize) -> CoeffVector {
    let zc = z.z().conj();
    let r = z.modulus();
    let s = (1.0 - r * r).sqrt();
    let mut entries = Vec::with_capacity(n);
    let mut p = C64::new(s, 0.0);
    for k in 0..n {
        // Re-anchor periodically so the running product does not drift.
        if k > 0 && k % 256 == 0 {
            p = s * zc.powi(k as i32);
        }
        entries.push(p);
        p *= zc;
    }
    let tail = if r == 0.0 { 0.0 } else { r.powi(n as i32) };
    CoeffVector::new(entries, tail)
}

/// Riesz projection onto degrees `0..n`.
pub fn riesz_project(h: &TwoSided, n: usize) -> CoeffVector {
    assert!(n >= 1, "projection window must be nonempty");
    let entries: Vec<C64> = (0..n as i64).map(|k| h.data.coeff(k)).collect();
    let dropped: f64 = h.data.terms().filter(|(k, _)| *k >= n as i64).map(|(_, c)| c.norm_sqr()).sum();
    CoeffVector::new(entries, h.tail_bound + dropped.sqrt())
}

/// Flip `Uh(z) = z̄ h̃(z)`: the coefficient at degree `m` becomes the input's at `-m-1`.
pub fn flip_u(h: &TwoSided) -> TwoSided {
    if h.data.is_zero() {
        return h.clone();
    }
    let mut coeffs = h.data.coeffs().to_vec();
    coeffs.reverse();
    TwoSided { data: Laurent::new(-h.data.hi() - 1, coeffs), tail_bound: h.tail_bound }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_at_origin_is_e0() {
        let k = kernel_vector(DiskPoint::origin(), 1e-12);
        assert_eq!(k.entries, vec![C64::new(1.0, 0.0)]);
        assert_eq!(k.tail_bound, 0.0);
    }

    #[test]
    fn kernel_tail_is_exact_geometric_mass() {
        // Oracle: sum the discarded terms of a much longer truncation directly.
        for r in [0.5, 0.9, 0.99] {
            let z = DiskPoint::polar(r, 0.7).unwrap();
            let k = kernel_vector(z, 1e-6);
            let n = k.len();
            let long = kernel_vector_len(z, n + 20_000);
            let discarded = long.entries[n..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!((discarded - r.powi(n as i32)).abs() < 1e-14, "r={r}");
        }
    }

    #[test]
    fn kernel_is_normalized() {
        for r in [0.0, 0.3, 0.9, 0.99] {
            let k = kernel_vector(DiskPoint::polar(r, -1.2).unwrap(), 1e-16);
            let total = k.norm().powi(2) + k.tail_bound.powi(2);
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn riesz_of_cosine_plus_two() {
        let h = TwoSided::exact(Laurent::new(-1, vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(1.0, 0.0)]));
        let p = riesz_project(&h, 2);
        assert_eq!(p.entries, vec![C64::new(2.0, 0.0), C64::new(1.0, 0.0)]);
        assert_eq!(p.tail_bound, 0.0);
    }

    #[test]
    fn flip_of_monomials() {
        for k in 0..5i64 {
            let u = flip_u(&TwoSided::exact(Laurent::monomial(k, C64::new(1.0, 0.0))));
            assert_eq!(u.data, Laurent::monomial(-k - 1, C64::new(1.0, 0.0)));
        }
    }
}
