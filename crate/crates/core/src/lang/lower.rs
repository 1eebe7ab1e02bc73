use super::ast::{Func, SymbolExpr};
use crate::error::{Error, Result};
use crate::symbol::{conj_family, multiply, ConjMode, DiskPoint, Laurent, Symbol, DEFAULT_BAND, DEFAULT_GRID};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoweringOptions {
    /// Degrees stored eagerly on each infinite side.
    pub band_request: u64,
    /// Grid on which polynomial sup-norm bounds are tightened; a power of two.
    pub grid_size: usize,
}

impl Default for LoweringOptions {
    fn default() -> Self {
        Self { band_request: DEFAULT_BAND, grid_size: DEFAULT_GRID }
    }
}

impl LoweringOptions {
    pub fn validate(&self) -> Result<()> {
        if !self.grid_size.is_power_of_two() {
            return Err(Error::Invalid(format!("grid_size {} is not a power of two", self.grid_size)));
        }
        if (self.grid_size as u64) < 4 * self.band_request {
            return Err(Error::Invalid(format!(
                "grid_size {} is below 4 × band_request ({})",
                self.grid_size, self.band_request
            )));
        }
        Ok(())
    }
}

/// Lowers an expression to a [`Symbol`].
///
/// Polynomial subtrees stay exact; arcs, Blaschke factors and `decay` keep their
/// closed forms, and products go through [`multiply`].
pub fn lower(expr: &SymbolExpr, opts: &LoweringOptions) -> Result<Symbol> {
    opts.validate()?;
    let s = lower_rec(expr, opts)?;
    if !s.is_polynomial() && opts.band_request > DEFAULT_BAND {
        return Ok(s.with_band(opts.band_request));
    }
    Ok(s)
}

fn lower_rec(e: &SymbolExpr, opts: &LoweringOptions) -> Result<Symbol> {
    use SymbolExpr::*;
    if let Some(c) = e.const_value() {
        return Ok(Symbol::constant(c));
    }
    let poly = |p: Laurent| Symbol::polynomial_with_grid(p, opts.grid_size);
    Ok(match e {
        Z => poly(Laurent::monomial(1, C64::new(1.0, 0.0))),
        Zbar => poly(Laurent::monomial(-1, C64::new(1.0, 0.0))),
        Neg(a) => lower_rec(a, opts)?.scale(C64::new(-1.0, 0.0)),
        Add(a, b) => lower_rec(a, opts)?.add(&lower_rec(b, opts)?),
        Sub(a, b) => lower_rec(a, opts)?.sub(&lower_rec(b, opts)?),
        Mul(a, b) => multiply(&lower_rec(a, opts)?, &lower_rec(b, opts)?)?,
        Pow(a, k) => {
            let base = lower_rec(a, opts)?;
            let mut acc = Symbol::constant(C64::new(1.0, 0.0));
            let mut sq = base;
            let mut k = *k;
            while k > 0 {
                if k & 1 == 1 {
                    acc = multiply(&acc, &sq)?;
                }
                k >>= 1;
                if k > 0 {
                    sq = multiply(&sq, &sq)?;
                }
            }
            acc
        }
        Call(func, args) => {
            let constant = |i: usize| args[i].const_value().expect("checked by the parser");
            match func {
                Func::Conj => conj_family(&lower_rec(&args[0], opts)?, ConjMode::Conj),
                Func::Tilde => conj_family(&lower_rec(&args[0], opts)?, ConjMode::Tilde),
                Func::Star => conj_family(&lower_rec(&args[0], opts)?, ConjMode::Star),
                Func::Blaschke => Symbol::mobius(DiskPoint::new(constant(0))?),
                Func::Arc => Symbol::arc(constant(0).re, constant(1).re)?,
                Func::Decay => Symbol::power_decay(constant(0).re)?,
                Func::Trigpoly => {
                    let lo = constant(0).re as i64;
                    poly(Laurent::new(lo, (1..args.len()).map(constant).collect()))
                }
            }
        }
        Num(_) | I | Pi => unreachable!("constants handled above"),
    })
}
