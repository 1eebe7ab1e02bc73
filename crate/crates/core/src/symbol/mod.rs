//! Bounded symbols on the unit circle, stored as Fourier-coefficient data.
//!
//! A [`Symbol`] is a Laurent polynomial plus finitely many closed-form terms
//! `p(e^{iθ})·c(e^{iθ})` where `c` is an arc indicator, a geometric series or a
//! user-supplied coefficient rule. Coefficients are therefore available at any
//! degree, and every symbol carries a per-side decay envelope, a certified
//! sup-norm bound and an `approx_error` recording any truncation made along
//! the way (an L∞ bound, zero for closed-form symbols).

mod arc;
mod carrier;
mod envelope;
mod laurent;
mod vector;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use arc::CircleArc;
pub use carrier::SequenceRule;
pub use envelope::{Decay, Envelope, SideEnvelope};
pub use laurent::Laurent;
pub use vector::{flip_u, kernel_vector, kernel_vector_len, riesz_project, CoeffVector, DiskPoint, TwoSided};

use carrier::{Carrier, Sequence};

use crate::error::{Error, Result};
use crate::fft;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Degrees materialized eagerly on each infinite side unless asked otherwise.
pub const DEFAULT_BAND: u64 = 64;
/// Grid used to tighten sup-norm bounds of trigonometric polynomials.
pub const DEFAULT_GRID: usize = 4096;
/// Longest truncation used when a product needs one factor cut to a polynomial.
const MAX_TRUNCATION: u64 = 1 << 16;
/// ℓ¹ tail at which that truncation stops early.
const TRUNCATION_TOL: f64 = 1e-17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjMode {
    /// `f ↦ f̄`: `ĉ(n) ↦ conj(ĉ(-n))`
    Conj,
    /// `f ↦ f̃`, `f̃(z) = f(z̄)`: `ĉ(n) ↦ ĉ(-n)`
    Tilde,
    /// `f ↦ f*`, `f*(z) = conj f(z̄)`: `ĉ(n) ↦ conj(ĉ(n))`
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Degrees `n ≥ 0`.
    Pos,
    /// Degrees `n ≤ -1`.
    Neg,
}

/// `poly(e^{iθ}) · carrier(e^{iθ})`
#[derive(Debug, Clone, PartialEq)]
struct Term {
    poly: Laurent,
    carrier: Carrier,
}

impl Term {
    fn coeff(&self, n: i64) -> C64 {
        self.poly.terms().map(|(q, p)| p * self.carrier.coeff(n - q)).sum()
    }

    /// Coefficients at degrees `lo..lo + len`.
    fn add_range(&self, lo: i64, out: &mut [C64]) {
        let len = out.len();
        let (q_lo, q_hi) = (self.poly.lo(), self.poly.hi());
        let spread = (q_hi - q_lo) as usize;
        let carr = self.carrier.coeff_range(lo - q_hi, len + spread);
        let nnz = self.poly.terms().count();
        if nnz <= 32 {
            for (q, p) in self.poly.terms() {
                let off = (q_hi - q) as usize;
                for (i, o) in out.iter_mut().enumerate() {
                    *o += p * carr[i + off];
                }
            }
        } else {
            let conv = fft::convolve(&carr, self.poly.coeffs());
            for (i, o) in out.iter_mut().enumerate() {
                *o += conv[i + spread];
            }
        }
    }

    fn tilde(&self) -> Term {
        Term { poly: self.poly.reflect(), carrier: self.carrier.tilde() }
    }

    fn star(&self) -> Term {
        Term { poly: self.poly.conj_coeffs(), carrier: self.carrier.star() }
    }
}

/// Suffix sums of `|ĉ|` and `|ĉ|²` on one side, exact inside the stored band and
/// continued by the envelope beyond it.
#[derive(Debug, Clone)]
struct TailTable {
    /// Last stored index on this side (index `m` is degree `m`, or `-m` on the negative side).
    edge: u64,
    abs: Vec<f64>,
    sq: Vec<f64>,
    env: SideEnvelope,
}

impl TailTable {
    fn new(values: &[f64], first: u64, env: SideEnvelope) -> Self {
        // `values[i]` is |ĉ| at index first + i.
        let edge = first + values.len() as u64 - 1;
        let n = edge as usize + 2;
        let mut abs = vec![0.0; n];
        let mut sq = vec![0.0; n];
        for m in (0..=edge as usize).rev() {
            let v = if (m as u64) < first { 0.0 } else { values[m - first as usize] };
            abs[m] = abs[m + 1] + v;
            sq[m] = sq[m + 1] + v * v;
        }
        Self { edge, abs, sq, env }
    }

    fn l1_from(&self, m: u64) -> f64 {
        if m > self.edge {
            self.env.l1_tail(m)
        } else {
            self.abs[m as usize] + self.env.l1_tail(self.edge + 1)
        }
    }

    fn l2_sq_from(&self, m: u64) -> f64 {
        if m > self.edge {
            self.env.l2_tail_sq(m)
        } else {
            self.sq[m as usize] + self.env.l2_tail_sq(self.edge + 1)
        }
    }

    /// Smallest `d` with `Σ_{m > d} |ĉ| ≤ tol`, or `None` if no such `d` below 2^50.
    fn extent(&self, tol: f64) -> Option<u64> {
        if self.l1_from(self.edge + 1) <= tol {
            return (0..=self.edge).find(|&d| self.l1_from(d + 1) <= tol);
        }
        let (mut lo, mut hi) = (self.edge + 1, 1u64 << 50);
        if self.env.l1_tail(hi) > tol {
            return None;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.env.l1_tail(mid) <= tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi - 1)
    }
}

struct Inner {
    poly: Laurent,
    terms: Vec<Term>,
    sup_norm_bound: f64,
    approx_error: f64,
    envelope: Envelope,
    band_lo: i64,
    stored: Vec<C64>,
    pos_tail: TailTable,
    neg_tail: TailTable,
}

/// A bounded function on the unit circle. Cheap to clone; immutable.
#[derive(Clone)]
pub struct Symbol(Arc<Inner>);

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("poly", &self.0.poly)
            .field("terms", &self.0.terms)
            .field("sup_norm_bound", &self.0.sup_norm_bound)
            .field("approx_error", &self.0.approx_error)
            .finish()
    }
}

/// Serializable description of a symbol's certificates.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolSummary {
    pub band: (i64, i64),
    pub sup_norm_bound: f64,
    pub approx_error: f64,
    pub exact: bool,
    pub polynomial: bool,
    pub envelope_c: f64,
    pub envelope_p: f64,
}

impl Symbol {
    fn assemble(poly: Laurent, terms: Vec<Term>, sup_norm_bound: f64, approx_error: f64, band_request: u64) -> Symbol {
        let (poly, terms) = normalize(poly, terms);

        let mut pos = SideEnvelope { start: (poly.hi() + 1).max(1) as u64, terms: Vec::new() };
        let mut neg = SideEnvelope { start: (-poly.lo() + 1).max(1) as u64, terms: Vec::new() };
        for t in &terms {
            for (side, positive) in [(&mut pos, true), (&mut neg, false)] {
                // Work in side-local degrees: q ↦ q on the positive side, q ↦ -q on the negative.
                let shifts: Vec<(i64, f64)> =
                    t.poly.terms().map(|(q, p)| (if positive { q } else { -q }, p.norm())).collect();
                let q_hi = shifts.iter().map(|s| s.0).max().unwrap_or(0);
                match t.carrier.side_decay(positive) {
                    None => side.start = side.start.max((q_hi + 1).max(1) as u64),
                    Some(Decay::Power { c, p }) => {
                        let e = (2 * q_hi.max(0) + 1) as u64;
                        side.start = side.start.max(e);
                        let ef = e as f64;
                        let k: f64 = shifts
                            .iter()
                            .map(|&(q, a)| a * if q > 0 { (ef / (ef - q as f64)).powf(p) } else { 1.0 })
                            .sum();
                        side.push(Decay::Power { c: c * k, p });
                    }
                    Some(Decay::Geometric { c, rho }) => {
                        side.start = side.start.max((q_hi + 1).max(1) as u64);
                        let k: f64 = shifts.iter().map(|&(q, a)| a * rho.powi(-q as i32)).sum();
                        side.push(Decay::Geometric { c: c * k, rho });
                    }
                }
            }
        }

        let pos_edge = if pos.is_finite() { pos.start - 1 } else { (pos.start - 1).max(band_request) };
        let neg_edge = if neg.is_finite() { neg.start - 1 } else { (neg.start - 1).max(band_request) };
        let band_lo = -(neg_edge as i64);
        let len = (neg_edge + pos_edge + 1) as usize;
        let stored = eval_range(&poly, &terms, band_lo, len);

        let split = neg_edge as usize;
        let pos_abs: Vec<f64> = stored[split..].iter().map(|c| c.norm()).collect();
        let mut neg_abs: Vec<f64> = stored[..split].iter().map(|c| c.norm()).collect();
        neg_abs.reverse();
        let pos_tail = TailTable::new(&pos_abs, 0, pos.clone());
        let neg_tail = if neg_abs.is_empty() {
            TailTable::new(&[0.0], 0, neg.clone())
        } else {
            TailTable::new(&neg_abs, 1, neg.clone())
        };

        Symbol(Arc::new(Inner {
            poly,
            terms,
            sup_norm_bound,
            approx_error,
            envelope: Envelope { pos, neg },
            band_lo,
            stored,
            pos_tail,
            neg_tail,
        }))
    }

    // ---- constructors -------------------------------------------------------

    pub fn zero() -> Symbol {
        Symbol::polynomial(Laurent::zero())
    }

    pub fn constant(c: C64) -> Symbol {
        Symbol::polynomial(Laurent::constant(c))
    }

    /// `e^{iθ}`
    pub fn z() -> Symbol {
        Symbol::polynomial(Laurent::monomial(1, ONE))
    }

    /// `e^{-iθ}`
    pub fn zbar() -> Symbol {
        Symbol::polynomial(Laurent::monomial(-1, ONE))
    }

    pub fn polynomial(p: Laurent) -> Symbol {
        Symbol::polynomial_with_grid(p, DEFAULT_GRID)
    }

    /// Trigonometric polynomial whose sup-norm bound is tightened on a `grid_size` grid.
    pub fn polynomial_with_grid(p: Laurent, grid_size: usize) -> Symbol {
        let sup = p.sup_bound(grid_size);
        Symbol::assemble(p, Vec::new(), sup, 0.0, DEFAULT_BAND)
    }

    /// Indicator of the counter-clockwise arc from `alpha` to `beta`.
    pub fn arc(alpha: f64, beta: f64) -> Result<Symbol> {
        let arc = CircleArc::new(alpha, beta)
            .ok_or_else(|| Error::Invalid(format!("arc endpoints {alpha} and {beta} coincide modulo 2π")))?;
        Ok(Symbol::assemble(
            Laurent::zero(),
            vec![Term { poly: Laurent::constant(ONE), carrier: Carrier::Arc(arc) }],
            1.0,
            0.0,
            DEFAULT_BAND,
        ))
    }

    /// `1/(1 - ratio·e^{iθ})` (analytic) or `1/(1 - ratio·e^{-iθ})`.
    pub fn geometric(ratio: C64, analytic: bool) -> Result<Symbol> {
        let r = ratio.norm();
        if !(r < 1.0) {
            return Err(Error::Invalid(format!("geometric ratio {ratio} must lie inside the unit disk")));
        }
        Ok(Symbol::assemble(
            Laurent::zero(),
            vec![Term { poly: Laurent::constant(ONE), carrier: Carrier::Geometric { ratio, analytic } }],
            1.0 / (1.0 - r),
            0.0,
            DEFAULT_BAND,
        ))
    }

    /// Möbius transform `φ_a(w) = (a - w)/(1 - āw)`: `ĉ(0) = a`, `ĉ(n) = -(1-|a|²) ā^{n-1}`.
    pub fn mobius(a: DiskPoint) -> Symbol {
        let z = a.z();
        let poly = Laurent::constant(z);
        let w = Laurent::monomial(1, C64::new(-(1.0 - z.norm_sqr()), 0.0));
        Symbol::assemble(
            poly,
            vec![Term { poly: w, carrier: Carrier::Geometric { ratio: z.conj(), analytic: true } }],
            1.0,
            0.0,
            DEFAULT_BAND,
        )
    }

    /// Symbol from a coefficient rule with its own envelope and sup-norm certificate.
    pub fn from_rule(rule: SequenceRule) -> Result<Symbol> {
        for d in [rule.pos, rule.neg].into_iter().flatten() {
            let ok = match d {
                Decay::Power { c, p } => c >= 0.0 && p > 0.0,
                Decay::Geometric { c, rho } => c >= 0.0 && rho > 0.0 && rho < 1.0,
            };
            if !ok {
                return Err(Error::Invalid(format!("invalid envelope {d:?} for rule {}", rule.name)));
            }
        }
        if !(rule.sup_bound >= 0.0) {
            return Err(Error::Invalid(format!("rule {} needs a nonnegative sup bound", rule.name)));
        }
        let sup = rule.sup_bound;
        Ok(Symbol::assemble(
            Laurent::zero(),
            vec![Term { poly: Laurent::constant(ONE), carrier: Carrier::Sequence(Sequence::new(rule)) }],
            sup,
            0.0,
            DEFAULT_BAND,
        ))
    }

    /// Smooth co-analytic family `Σ_{n≥1} n^{-p} e^{-inθ}`, `p > 1`; continuous, so its Hankel is compact.
    pub fn power_decay(p: f64) -> Result<Symbol> {
        if !(p > 1.0) {
            return Err(Error::Invalid(format!("power_decay needs p > 1, got {p}")));
        }
        Symbol::from_rule(SequenceRule {
            name: format!("decay({p})"),
            rule: Box::new(move |n| if n < 0 { C64::new((-n as f64).powf(-p), 0.0) } else { ZERO }),
            pos: None,
            neg: Some(Decay::Power { c: 1.0, p }),
            sup_bound: zeta_upper(p),
        })
    }

    /// Same symbol with at least `band` degrees stored on each infinite side.
    pub fn with_band(&self, band: u64) -> Symbol {
        Symbol::assemble(self.0.poly.clone(), self.0.terms.clone(), self.0.sup_norm_bound, self.0.approx_error, band)
    }

    /// Same symbol with its sup-norm bound replaced by a tighter certified value.
    pub(crate) fn with_sup_bound(&self, sup: f64) -> Symbol {
        let mut inner = clone_inner(&self.0);
        inner.sup_norm_bound = sup;
        Symbol(Arc::new(inner))
    }

    // ---- accessors ----------------------------------------------------------

    pub fn coeff(&self, n: i64) -> C64 {
        let idx = n - self.0.band_lo;
        if idx >= 0 && (idx as usize) < self.0.stored.len() {
            return self.0.stored[idx as usize];
        }
        self.0.poly.coeff(n) + self.0.terms.iter().map(|t| t.coeff(n)).sum::<C64>()
    }

    /// Coefficients at degrees `lo..lo + len`.
    pub fn coeff_range(&self, lo: i64, len: usize) -> Vec<C64> {
        let (b_lo, b_hi) = self.band();
        if lo >= b_lo && lo + len as i64 - 1 <= b_hi {
            let s = (lo - b_lo) as usize;
            return self.0.stored[s..s + len].to_vec();
        }
        eval_range(&self.0.poly, &self.0.terms, lo, len)
    }

    /// Stored degree range `(lo, hi)`.
    pub fn band(&self) -> (i64, i64) {
        (self.0.band_lo, self.0.band_lo + self.0.stored.len() as i64 - 1)
    }

    pub fn sup_norm_bound(&self) -> f64 {
        self.0.sup_norm_bound
    }

    /// L∞ distance between the represented coefficients and the intended symbol.
    pub fn approx_error(&self) -> f64 {
        self.0.approx_error
    }

    /// Coefficients are closed-form (no truncation was needed).
    pub fn is_exact(&self) -> bool {
        self.0.approx_error == 0.0
    }

    pub fn envelope(&self) -> &Envelope {
        &self.0.envelope
    }

    pub fn is_zero(&self) -> bool {
        self.0.poly.is_zero() && self.0.terms.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.terms.is_empty()
    }

    pub fn as_polynomial(&self) -> Option<&Laurent> {
        self.is_polynomial().then_some(&self.0.poly)
    }

    /// Every negative coefficient vanishes, so `H_f = 0`.
    pub fn is_analytic(&self) -> bool {
        self.0.neg_tail.env.is_finite() && self.0.neg_tail.l1_from(1) == 0.0
    }

    /// Every positive coefficient vanishes.
    pub fn is_coanalytic(&self) -> bool {
        self.0.pos_tail.env.is_finite() && self.0.pos_tail.l1_from(1) == 0.0
    }

    /// Jump locations of the arc indicators this symbol is built from.
    pub fn singular_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> =
            self.0.terms.iter().filter_map(|t| t.carrier.arc()).flat_map(|a| a.endpoints()).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        pts
    }

    /// Upper bound on `Σ_{n ≥ m} |ĉ(n)|²` (`side = Pos`, `m ≥ 0`) or `Σ_{n ≤ -m} |ĉ(n)|²` (`side = Neg`, `m ≥ 1`).
    pub fn l2_tail_sq(&self, side: Side, m: u64) -> f64 {
        match side {
            Side::Pos => self.0.pos_tail.l2_sq_from(m),
            Side::Neg => self.0.neg_tail.l2_sq_from(m.max(1)),
        }
    }

    /// Upper bound on the ℓ¹ tail, indexed as in [`Symbol::l2_tail_sq`].
    pub fn l1_tail(&self, side: Side, m: u64) -> f64 {
        match side {
            Side::Pos => self.0.pos_tail.l1_from(m),
            Side::Neg => self.0.neg_tail.l1_from(m.max(1)),
        }
    }

    /// Effective degree on one side: the smallest `d` whose ℓ¹ tail beyond `d` is at most `tol`.
    /// `None` when the side is not summable (arc indicators, for instance).
    pub fn effective_extent(&self, side: Side, tol: f64) -> Option<u64> {
        match side {
            Side::Pos => self.0.pos_tail.extent(tol),
            Side::Neg => self.0.neg_tail.extent(tol),
        }
    }

    /// Decay exponent of the slowest side (`∞` for polynomials and geometric terms).
    pub fn decay_exponent(&self) -> f64 {
        self.0.envelope.exponent()
    }

    /// Hankel and Toeplitz tails need square-summable envelopes: `p > 1/2`.
    pub fn require_certifiable(&self) -> Result<()> {
        let p = self.decay_exponent();
        if p > 0.5 {
            Ok(())
        } else {
            Err(Error::UncertifiableEnvelope { exponent: p })
        }
    }

    pub fn summary(&self) -> SymbolSummary {
        let (c, p) = self.0.envelope.power_pair();
        SymbolSummary {
            band: self.band(),
            sup_norm_bound: self.0.sup_norm_bound,
            approx_error: self.0.approx_error,
            exact: self.is_exact(),
            polynomial: self.is_polynomial(),
            envelope_c: c,
            envelope_p: p,
        }
    }

    /// Values on the grid `θ_j = 2πj/size` of the partial sum over `|n| ≤ radius`,
    /// optionally with Fejér weights `1 - |n|/(radius + 1)`.
    pub fn grid_values(&self, size: usize, radius: u64, fejer: bool) -> Vec<C64> {
        let r = radius as i64;
        let mut c = self.coeff_range(-r, (2 * r + 1) as usize);
        if fejer {
            for (i, v) in c.iter_mut().enumerate() {
                let n = (i as i64 - r).unsigned_abs() as f64;
                *v *= 1.0 - n / (radius as f64 + 1.0);
            }
        }
        fft::grid_values(-r, &c, size)
    }

    // ---- algebra ------------------------------------------------------------

    pub fn scale(&self, s: C64) -> Symbol {
        linear_combine(&[(s, self)]).expect("nonempty")
    }

    pub fn add(&self, other: &Symbol) -> Symbol {
        linear_combine(&[(ONE, self), (ONE, other)]).expect("nonempty")
    }

    pub fn sub(&self, other: &Symbol) -> Symbol {
        linear_combine(&[(ONE, self), (-ONE, other)]).expect("nonempty")
    }

    pub fn mul(&self, other: &Symbol) -> Result<Symbol> {
        multiply(self, other)
    }

    pub fn conj_family(&self, mode: ConjMode) -> Symbol {
        conj_family(self, mode)
    }

    pub fn conj(&self) -> Symbol {
        conj_family(self, ConjMode::Conj)
    }

    pub fn tilde(&self) -> Symbol {
        conj_family(self, ConjMode::Tilde)
    }

    pub fn star(&self) -> Symbol {
        conj_family(self, ConjMode::Star)
    }

    /// Nonnegative-degree part `P f` as a symbol, when `f` is a polynomial.
    pub fn analytic_polynomial_part(&self) -> Option<Symbol> {
        self.as_polynomial().map(|p| Symbol::polynomial(p.analytic_part()))
    }
}

fn clone_inner(i: &Inner) -> Inner {
    Inner {
        poly: i.poly.clone(),
        terms: i.terms.clone(),
        sup_norm_bound: i.sup_norm_bound,
        approx_error: i.approx_error,
        envelope: i.envelope.clone(),
        band_lo: i.band_lo,
        stored: i.stored.clone(),
        pos_tail: i.pos_tail.clone(),
        neg_tail: i.neg_tail.clone(),
    }
}

fn eval_range(poly: &Laurent, terms: &[Term], lo: i64, len: usize) -> Vec<C64> {
    let mut out: Vec<C64> = (0..len as i64).map(|i| poly.coeff(lo + i)).collect();
    for t in terms {
        t.add_range(lo, &mut out);
    }
    out
}

/// Folds trivial geometric carriers into the polynomial, drops empty terms and
/// merges terms that share a carrier.
fn normalize(mut poly: Laurent, terms: Vec<Term>) -> (Laurent, Vec<Term>) {
    let mut out: Vec<Term> = Vec::new();
    for t in terms {
        if t.poly.is_zero() {
            continue;
        }
        if let Carrier::Geometric { ratio, .. } = t.carrier {
            if ratio == ZERO {
                poly = poly.add_scaled(&t.poly, ONE);
                continue;
            }
        }
        match out.iter_mut().find(|o| o.carrier == t.carrier) {
            Some(o) => o.poly = o.poly.add_scaled(&t.poly, ONE),
            None => out.push(t),
        }
    }
    out.retain(|t| !t.poly.is_zero());
    (poly, out)
}

/// Upper bound on `ζ(p) = Σ_{n≥1} n^{-p}`, `p > 1`.
fn zeta_upper(p: f64) -> f64 {
    let m = 1000u32;
    let head: f64 = (1..m).map(|n| (n as f64).powf(-p)).sum();
    let mf = m as f64;
    head + mf.powf(-p) + mf.powf(1.0 - p) / (p - 1.0)
}

/// Coefficientwise linear combination. Errors only on an empty list.
pub fn linear_combine(terms: &[(C64, &Symbol)]) -> Result<Symbol> {
    if terms.is_empty() {
        return Err(Error::Invalid("linear_combine needs at least one term".into()));
    }
    let mut poly = Laurent::zero();
    let mut out_terms = Vec::new();
    let (mut sup, mut err) = (0.0, 0.0);
    let mut band = DEFAULT_BAND;
    for (s, f) in terms {
        poly = poly.add_scaled(&f.0.poly, *s);
        for t in &f.0.terms {
            out_terms.push(Term { poly: t.poly.scale(*s), carrier: t.carrier.clone() });
        }
        sup += s.norm() * f.0.sup_norm_bound;
        err += s.norm() * f.0.approx_error;
        band = band.max(stored_request(f));
    }
    let all_poly = out_terms.is_empty();
    let mut result = Symbol::assemble(poly, out_terms, sup, err, band);
    if all_poly && result.0.poly.coeffs().len() > 1 {
        // A cancellation can leave a much smaller polynomial than the summed bounds suggest.
        let tight = result.0.poly.sup_bound(DEFAULT_GRID);
        if tight < sup {
            result = result.with_sup_bound(tight);
        }
    }
    if result.is_zero() {
        result = result.with_sup_bound(0.0);
    }
    Ok(result)
}

fn stored_request(f: &Symbol) -> u64 {
    let (lo, hi) = f.band();
    let mut r = 0;
    if !f.0.envelope.pos.is_finite() {
        r = r.max(hi.max(0) as u64);
    }
    if !f.0.envelope.neg.is_finite() {
        r = r.max((-lo).max(0) as u64);
    }
    r.max(DEFAULT_BAND)
}

/// Pointwise product on the circle.
///
/// Exact for polynomial factors, for pairs of arc indicators (intersection) and for
/// pairs of geometric series. Any other pair of closed-form terms is handled by
/// cutting the summable factor to a polynomial, with the ℓ¹ tail added to
/// `approx_error`. Fails when neither factor of such a pair has a summable tail.
pub fn multiply(f: &Symbol, g: &Symbol) -> Result<Symbol> {
    if f.is_zero() || g.is_zero() {
        return Ok(Symbol::zero());
    }
    let (fi, gi) = (&f.0, &g.0);
    let mut poly = fi.poly.mul(&gi.poly);
    let mut terms = Vec::new();
    let mut extra_err = 0.0;
    for t in &gi.terms {
        terms.push(Term { poly: t.poly.mul(&fi.poly), carrier: t.carrier.clone() });
    }
    for t in &fi.terms {
        terms.push(Term { poly: t.poly.mul(&gi.poly), carrier: t.carrier.clone() });
    }
    for a in &fi.terms {
        for b in &gi.terms {
            let (p, ts, e) = term_product(a, b)?;
            poly = poly.add_scaled(&p, ONE);
            terms.extend(ts);
            extra_err += e;
        }
    }
    let err = fi.approx_error * gi.sup_norm_bound
        + gi.approx_error * fi.sup_norm_bound
        + fi.approx_error * gi.approx_error
        + extra_err;
    let mut sup = fi.sup_norm_bound * gi.sup_norm_bound + extra_err;
    if terms.is_empty() && poly.coeffs().len() > 1 {
        sup = sup.min(poly.sup_bound(DEFAULT_GRID));
    }
    let band = stored_request(f).max(stored_request(g));
    Ok(Symbol::assemble(poly, terms, sup, err, band))
}

/// Product of two closed-form terms: `(polynomial part, terms, added L∞ error)`.
fn term_product(a: &Term, b: &Term) -> Result<(Laurent, Vec<Term>, f64)> {
    let pq = a.poly.mul(&b.poly);
    match (&a.carrier, &b.carrier) {
        (Carrier::Arc(x), Carrier::Arc(y)) => {
            let terms =
                x.intersect(y).into_iter().map(|arc| Term { poly: pq.clone(), carrier: Carrier::Arc(arc) }).collect();
            Ok((Laurent::zero(), terms, 0.0))
        }
        (Carrier::Geometric { ratio: r, analytic: an_r }, Carrier::Geometric { ratio: s, analytic: an_s })
            if an_r != an_s || r != s =>
        {
            if an_r == an_s {
                // 1/((1-rw)(1-sw)) = (r/(1-rw) - s/(1-sw)) / (r - s)
                let d = r - s;
                let terms = vec![
                    Term { poly: pq.scale(r / d), carrier: a.carrier.clone() },
                    Term { poly: pq.scale(-s / d), carrier: b.carrier.clone() },
                ];
                Ok((Laurent::zero(), terms, 0.0))
            } else {
                // 1/((1-rw)(1-s w̄)) = (1/(1-rw) + 1/(1-s w̄) - 1) / (1 - rs)
                let k = ONE / (ONE - r * s);
                let terms = vec![
                    Term { poly: pq.scale(k), carrier: a.carrier.clone() },
                    Term { poly: pq.scale(k), carrier: b.carrier.clone() },
                ];
                Ok((pq.scale(-k), terms, 0.0))
            }
        }
        _ => {
            let summable = |t: &Term| {
                [true, false].iter().all(|&s| t.carrier.side_decay(s).is_none_or(|d| d.l1_tail(1).is_finite()))
            };
            let (cut, keep) = if summable(b) {
                (b, a)
            } else if summable(a) {
                (a, b)
            } else {
                return Err(Error::ProductNotCertifiable);
            };
            let (trunc, tail) = truncate_carrier(&cut.carrier);
            let poly = cut.poly.mul(&trunc);
            let err = tail * cut.poly.l1_norm() * keep.poly.l1_norm() * keep.carrier.sup_bound();
            Ok((Laurent::zero(), vec![Term { poly: poly.mul(&keep.poly), carrier: keep.carrier.clone() }], err))
        }
    }
}

/// Cuts a summable carrier to a Laurent polynomial; returns it with its ℓ¹ tail bound.
fn truncate_carrier(c: &Carrier) -> (Laurent, f64) {
    let mut widths = [0u64; 2];
    let mut tail = 0.0;
    for (k, positive) in [true, false].into_iter().enumerate() {
        if let Some(d) = c.side_decay(positive) {
            let mut w = 1u64;
            while w < MAX_TRUNCATION && d.l1_tail(w + 1) > TRUNCATION_TOL {
                w *= 2;
            }
            widths[k] = w.min(MAX_TRUNCATION);
            tail += d.l1_tail(widths[k] + 1);
        }
    }
    let lo = -(widths[1] as i64);
    let len = (widths[0] + widths[1] + 1) as usize;
    (Laurent::new(lo, c.coeff_range(lo, len)), tail)
}

/// `conj`: `ĉ(n) ↦ conj(ĉ(-n))`; `tilde`: `ĉ(n) ↦ ĉ(-n)`; `star`: `ĉ(n) ↦ conj(ĉ(n))`.
pub fn conj_family(f: &Symbol, mode: ConjMode) -> Symbol {
    let i = &f.0;
    let (poly, terms): (Laurent, Vec<Term>) = match mode {
        ConjMode::Tilde => (i.poly.reflect(), i.terms.iter().map(Term::tilde).collect()),
        ConjMode::Star => (i.poly.conj_coeffs(), i.terms.iter().map(Term::star).collect()),
        ConjMode::Conj => (i.poly.reflect().conj_coeffs(), i.terms.iter().map(|t| t.tilde().star()).collect()),
    };
    Symbol::assemble(poly, terms, i.sup_norm_bound, i.approx_error, stored_request(f))
}

/// `φ_z(w) = (z - w)/(1 - z̄w)`.
pub fn mobius_symbol(z: DiskPoint) -> Symbol {
    Symbol::mobius(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn mobius_coefficients() {
        let phi = Symbol::mobius(DiskPoint::new(c(0.5, 0.0)).unwrap());
        assert!((phi.coeff(0) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((phi.coeff(1) - c(-0.75, 0.0)).norm() < 1e-15);
        assert!((phi.coeff(2) - c(-0.375, 0.0)).norm() < 1e-15);
        assert!(phi.coeff(-1).norm() == 0.0);
        let phi0 = Symbol::mobius(DiskPoint::origin());
        assert!(phi0.is_polynomial());
        assert_eq!(phi0.as_polynomial().unwrap(), &Laurent::monomial(1, c(-1.0, 0.0)));
    }

    #[test]
    fn cancellation_gives_exact_zero() {
        let f = Symbol::arc(0.0, 1.0).unwrap().add(&Symbol::z());
        let d = f.sub(&f);
        assert!(d.is_zero());
        assert_eq!(d.sup_norm_bound(), 0.0);
    }

    #[test]
    fn envelope_dominates_coefficients_beyond_start() {
        let f = Symbol::arc(0.3, 2.0)
            .unwrap()
            .mul(&Symbol::polynomial(Laurent::new(-2, vec![c(1.0, 0.5), ZERO, c(0.0, 0.0), c(2.0, 0.0), c(-1.0, 1.0)])))
            .unwrap()
            .add(&Symbol::mobius(DiskPoint::new(c(0.3, -0.6)).unwrap()).scale(c(0.0, 2.0)));
        let env = f.envelope();
        for m in env.pos.start..env.pos.start + 500 {
            assert!(f.coeff(m as i64).norm() <= env.pos.bound(m) * (1.0 + 1e-12), "m={m}");
        }
        for m in env.neg.start..env.neg.start + 500 {
            assert!(f.coeff(-(m as i64)).norm() <= env.neg.bound(m) * (1.0 + 1e-12), "m=-{m}");
        }
    }

    #[test]
    fn arc_products_are_intersections() {
        let a = Symbol::arc(-0.5, 0.5).unwrap();
        let b = Symbol::arc(PI - 0.5, PI + 0.5).unwrap();
        assert!(a.mul(&b).unwrap().is_zero());
        let aa = a.mul(&a).unwrap();
        for n in -20..20 {
            assert!((aa.coeff(n) - a.coeff(n)).norm() < 1e-15);
        }
        assert!(aa.is_exact());
    }

    #[test]
    fn geometric_products_match_convolution() {
        let za = DiskPoint::new(c(0.4, 0.2)).unwrap();
        let zb = DiskPoint::new(c(-0.3, 0.5)).unwrap();
        let f = Symbol::mobius(za);
        let g = Symbol::mobius(zb).conj();
        let h = Symbol::mobius(zb);
        for (x, y) in [(&f, &g), (&f, &h), (&f, &f)] {
            let p = x.mul(y).unwrap();
            for n in -12i64..12 {
                let direct: C64 = (-400i64..400).map(|k| x.coeff(k) * y.coeff(n - k)).sum();
                assert!((p.coeff(n) - direct).norm() < 1e-12, "n={n}");
            }
        }
        // Equal ratios fall back to truncation with a tiny recorded error.
        let ff = f.mul(&f).unwrap();
        assert!(ff.approx_error() < 1e-14);
    }

    #[test]
    fn conj_family_relations() {
        let f = Symbol::arc(0.2, 1.1).unwrap().add(&Symbol::mobius(DiskPoint::new(c(0.1, 0.7)).unwrap()));
        let (cf, tf, sf) = (f.conj(), f.tilde(), f.star());
        for n in -15..15 {
            assert!((cf.coeff(n) - f.coeff(-n).conj()).norm() < 1e-15);
            assert!((tf.coeff(n) - f.coeff(-n)).norm() < 1e-15);
            assert!((sf.coeff(n) - f.coeff(n).conj()).norm() < 1e-15);
            assert!((sf.conj().coeff(n) - tf.coeff(n)).norm() < 1e-15);
        }
    }

    #[test]
    fn extent_of_polynomial_and_arc() {
        let p = Symbol::polynomial(Laurent::new(-3, vec![ONE, ZERO, ZERO, ONE, ZERO, ONE]));
        assert_eq!(p.effective_extent(Side::Neg, 1e-15), Some(3));
        assert_eq!(p.effective_extent(Side::Pos, 1e-15), Some(2));
        let a = Symbol::arc(0.0, 1.0).unwrap();
        assert_eq!(a.effective_extent(Side::Neg, 1e-15), None);
        let phi = Symbol::mobius(DiskPoint::new(c(0.5, 0.0)).unwrap());
        let d = phi.effective_extent(Side::Pos, 1e-15).unwrap();
        assert!((45..60).contains(&d), "{d}");
        assert_eq!(phi.effective_extent(Side::Neg, 1e-15), Some(0));
    }

    #[test]
    fn power_decay_family() {
        let f = Symbol::power_decay(2.0).unwrap();
        assert!((f.coeff(-3).re - 1.0 / 9.0).abs() < 1e-16);
        assert_eq!(f.coeff(2), ZERO);
        assert!(f.sup_norm_bound() >= PI * PI / 6.0);
        assert!(f.sup_norm_bound() < PI * PI / 6.0 + 1e-5);
        assert!(!f.is_analytic() && f.is_coanalytic());
    }
}
