//! Non-polynomial building blocks whose coefficients are known in closed form.

use std::fmt;
use std::sync::Arc;

use super::arc::CircleArc;
use super::envelope::Decay;
use crate::C64;

/// User-supplied coefficient rule with a certified envelope and sup-norm bound.
pub struct SequenceRule {
    pub name: String,
    pub rule: Box<dyn Fn(i64) -> C64 + Send + Sync>,
    /// Envelope for degrees `n ≥ 1`; `None` means the rule vanishes there.
    pub pos: Option<Decay>,
    /// Envelope for degrees `n ≤ -1`; `None` means the rule vanishes there.
    pub neg: Option<Decay>,
    pub sup_bound: f64,
}

/// A shared rule seen through an optional reflection `n ↦ -n` and conjugation.
#[derive(Clone)]
pub struct Sequence {
    base: Arc<SequenceRule>,
    reflected: bool,
    conjugated: bool,
}

impl Sequence {
    pub fn new(rule: SequenceRule) -> Self {
        Self { base: Arc::new(rule), reflected: false, conjugated: false }
    }

    pub fn coeff(&self, n: i64) -> C64 {
        let v = (self.base.rule)(if self.reflected { -n } else { n });
        if self.conjugated {
            v.conj()
        } else {
            v
        }
    }

    fn side(&self, positive: bool) -> Option<Decay> {
        if positive != self.reflected {
            self.base.pos
        } else {
            self.base.neg
        }
    }

    pub fn name(&self) -> String {
        let mut s = self.base.name.clone();
        if self.reflected {
            s = format!("tilde({s})");
        }
        if self.conjugated {
            s = format!("star({s})");
        }
        s
    }
}

impl PartialEq for Sequence {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.base, &other.base) && self.reflected == other.reflected && self.conjugated == other.conjugated
    }
}

#[derive(Clone, PartialEq)]
pub enum Carrier {
    Arc(CircleArc),
    /// `Σ_{n≥0} ratio^n e^{inθ}` when analytic, `Σ_{n≥0} ratio^n e^{-inθ}` otherwise; `|ratio| < 1`.
    Geometric {
        ratio: C64,
        analytic: bool,
    },
    Sequence(Sequence),
}

impl fmt::Debug for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::Arc(a) => write!(f, "arc({}, {})", a.start(), a.end()),
            Carrier::Geometric { ratio, analytic } => {
                write!(f, "geometric({ratio}, {})", if *analytic { "z" } else { "zbar" })
            }
            Carrier::Sequence(s) => write!(f, "sequence({})", s.name()),
        }
    }
}

impl Carrier {
    pub fn coeff(&self, n: i64) -> C64 {
        match self {
            Carrier::Arc(a) => a.coeff(n),
            Carrier::Geometric { ratio, analytic } => {
                let m = if *analytic { n } else { -n };
                if m < 0 {
                    C64::new(0.0, 0.0)
                } else {
                    ratio.powi(m as i32)
                }
            }
            Carrier::Sequence(s) => s.coeff(n),
        }
    }

    /// Coefficients at degrees `lo..lo + len`.
    pub fn coeff_range(&self, lo: i64, len: usize) -> Vec<C64> {
        match self {
            Carrier::Arc(a) => a.coeff_range(lo, len),
            Carrier::Geometric { ratio, analytic } => {
                let mut out = vec![C64::new(0.0, 0.0); len];
                for (i, o) in out.iter_mut().enumerate() {
                    let n = lo + i as i64;
                    let m = if *analytic { n } else { -n };
                    if m >= 0 {
                        *o = ratio.powi(m as i32);
                    }
                }
                out
            }
            Carrier::Sequence(s) => (0..len as i64).map(|i| s.coeff(lo + i)).collect(),
        }
    }

    /// Decay of `|c(±m)|` for `m ≥ 1`; `None` when that side vanishes.
    pub fn side_decay(&self, positive: bool) -> Option<Decay> {
        match self {
            Carrier::Arc(_) => Some(Decay::Power { c: CircleArc::ENVELOPE_C, p: 1.0 }),
            Carrier::Geometric { ratio, analytic } => {
                (*analytic == positive).then_some(Decay::Geometric { c: 1.0, rho: ratio.norm() })
            }
            Carrier::Sequence(s) => s.side(positive),
        }
    }

    pub fn sup_bound(&self) -> f64 {
        match self {
            Carrier::Arc(_) => 1.0,
            Carrier::Geometric { ratio, .. } => 1.0 / (1.0 - ratio.norm()),
            Carrier::Sequence(s) => s.base.sup_bound,
        }
    }

    /// Carrier of `c(-n)`.
    pub fn tilde(&self) -> Carrier {
        match self {
            Carrier::Arc(a) => Carrier::Arc(a.reflect()),
            Carrier::Geometric { ratio, analytic } => Carrier::Geometric { ratio: *ratio, analytic: !analytic },
            Carrier::Sequence(s) => Carrier::Sequence(Sequence { reflected: !s.reflected, ..s.clone() }),
        }
    }

    /// Carrier of `conj(c(n))`.
    pub fn star(&self) -> Carrier {
        match self {
            // Indicators are real, so conjugating coefficients reflects them.
            Carrier::Arc(a) => Carrier::Arc(a.reflect()),
            Carrier::Geometric { ratio, analytic } => Carrier::Geometric { ratio: ratio.conj(), analytic: *analytic },
            Carrier::Sequence(s) => Carrier::Sequence(Sequence { conjugated: !s.conjugated, ..s.clone() }),
        }
    }

    pub fn arc(&self) -> Option<&CircleArc> {
        match self {
            Carrier::Arc(a) => Some(a),
            _ => None,
        }
    }
}
