use serde::{Deserialize, Serialize};

/// One decay profile, bounding `|ĉ(±m)|` as a function of `m ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decay {
    /// `c / m^p`
    Power { c: f64, p: f64 },
    /// `c · rho^m`, `0 < rho < 1`
    Geometric { c: f64, rho: f64 },
}

impl Decay {
    pub fn at(&self, m: u64) -> f64 {
        let m = m as f64;
        match *self {
            Decay::Power { c, p } => c * m.powf(-p),
            Decay::Geometric { c, rho } => c * rho.powf(m),
        }
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            Decay::Power { p, .. } => p,
            Decay::Geometric { .. } => f64::INFINITY,
        }
    }

    /// Upper bound for `Σ_{m ≥ from} at(m)`, `from ≥ 1`.
    pub fn l1_tail(&self, from: u64) -> f64 {
        let f = from.max(1) as f64;
        match *self {
            Decay::Power { c, p } if p > 1.0 => c * (f.powf(-p) + f.powf(1.0 - p) / (p - 1.0)),
            Decay::Power { c: 0.0, .. } => 0.0,
            Decay::Power { .. } => f64::INFINITY,
            Decay::Geometric { c, rho } => c * rho.powf(f) / (1.0 - rho),
        }
    }

    /// Upper bound for `Σ_{m ≥ from} at(m)²`, `from ≥ 1`.
    pub fn l2_tail_sq(&self, from: u64) -> f64 {
        let f = from.max(1) as f64;
        match *self {
            Decay::Power { c, p } if p > 0.5 => c * c * (f.powf(-2.0 * p) + f.powf(1.0 - 2.0 * p) / (2.0 * p - 1.0)),
            Decay::Power { c: 0.0, .. } => 0.0,
            Decay::Power { .. } => f64::INFINITY,
            Decay::Geometric { c, rho } => c * c * rho.powf(2.0 * f) / (1.0 - rho * rho),
        }
    }
}

/// Envelope for one side of the spectrum: `|ĉ(±m)| ≤ Σ terms(m)` for every `m ≥ start`.
/// No terms means the side vanishes from `start` on.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SideEnvelope {
    pub start: u64,
    pub terms: Vec<Decay>,
}

impl SideEnvelope {
    pub fn is_finite(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn bound(&self, m: u64) -> f64 {
        debug_assert!(m >= self.start);
        self.terms.iter().map(|t| t.at(m)).sum()
    }

    pub fn exponent(&self) -> f64 {
        self.terms.iter().map(Decay::exponent).fold(f64::INFINITY, f64::min)
    }

    pub fn l1_tail(&self, from: u64) -> f64 {
        debug_assert!(from >= self.start);
        self.terms.iter().map(|t| t.l1_tail(from)).sum()
    }

    /// ℓ² tail via Minkowski: `(Σ_t √S_t)²`.
    pub fn l2_tail_sq(&self, from: u64) -> f64 {
        debug_assert!(from >= self.start);
        let s: f64 = self.terms.iter().map(|t| t.l2_tail_sq(from).sqrt()).sum();
        s * s
    }

    /// Same-kind terms with equal exponent/ratio are merged by adding constants.
    pub(crate) fn push(&mut self, decay: Decay) {
        for t in self.terms.iter_mut() {
            match (t, decay) {
                (Decay::Power { c, p }, Decay::Power { c: c2, p: p2 }) if *p == p2 => {
                    *c += c2;
                    return;
                }
                (Decay::Geometric { c, rho }, Decay::Geometric { c: c2, rho: r2 }) if *rho == r2 => {
                    *c += c2;
                    return;
                }
                _ => {}
            }
        }
        self.terms.push(decay);
    }
}

/// Coefficient decay certificate beyond the stored band, one side per sign of the degree.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Envelope {
    pub pos: SideEnvelope,
    pub neg: SideEnvelope,
}

impl Envelope {
    /// Worst decay exponent over both sides (`∞` for geometric or finite sides).
    pub fn exponent(&self) -> f64 {
        self.pos.exponent().min(self.neg.exponent())
    }

    /// Summary pair `(C, p)` with `|ĉ(n)| ≤ C/|n|^p` beyond the declared start,
    /// when the envelope is a pure power law on its slowest side.
    pub fn power_pair(&self) -> (f64, f64) {
        let p = self.exponent();
        if p.is_infinite() {
            return (0.0, p);
        }
        let c = [&self.pos, &self.neg]
            .iter()
            .flat_map(|s| s.terms.iter())
            .filter_map(|t| match t {
                Decay::Power { c, p: q } if *q == p => Some(*c),
                _ => None,
            })
            .fold(0.0, f64::max);
        (c, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tails_dominate_direct_sums() {
        let decays =
            [Decay::Power { c: 0.7, p: 2.0 }, Decay::Power { c: 1.0, p: 0.9 }, Decay::Geometric { c: 2.0, rho: 0.8 }];
        for d in decays {
            for from in [1u64, 3, 40] {
                let l2: f64 = (from..200_000).map(|m| d.at(m).powi(2)).sum();
                assert!(d.l2_tail_sq(from) * (1.0 + 1e-12) >= l2);
                if d.exponent() > 1.0 {
                    let l1: f64 = (from..200_000).map(|m| d.at(m)).sum();
                    assert!(d.l1_tail(from) * (1.0 + 1e-12) >= l1);
                }
            }
        }
        assert!(Decay::Power { c: 1.0, p: 1.0 }.l1_tail(5).is_infinite());
        assert!(Decay::Power { c: 1.0, p: 0.5 }.l2_tail_sq(5).is_infinite());
    }
}
