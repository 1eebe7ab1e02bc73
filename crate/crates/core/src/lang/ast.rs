use std::fmt;

use crate::C64;

/// Built-in functions. Everything except the three conjugations takes constant arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Conj,
    Tilde,
    Star,
    /// `blaschke(a)`: the Möbius transform `φ_a(w) = (a - w)/(1 - āw)`, `|a| < 1`.
    Blaschke,
    /// `arc(alpha, beta)`: indicator of the counter-clockwise arc from `alpha` to `beta`.
    Arc,
    /// `trigpoly(lo, c_lo, c_lo+1, ...)`: `Σ c_n e^{inθ}` starting at integer degree `lo`.
    Trigpoly,
    /// `decay(p)`: the smooth co-analytic symbol `Σ_{n≥1} n^{-p} e^{-inθ}`, `p > 1`.
    Decay,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Conj => "conj",
            Func::Tilde => "tilde",
            Func::Star => "star",
            Func::Blaschke => "blaschke",
            Func::Arc => "arc",
            Func::Trigpoly => "trigpoly",
            Func::Decay => "decay",
        }
    }

    pub fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "conj" => Func::Conj,
            "tilde" => Func::Tilde,
            "star" => Func::Star,
            "blaschke" => Func::Blaschke,
            "arc" => Func::Arc,
            "trigpoly" => Func::Trigpoly,
            "decay" => Func::Decay,
            _ => return None,
        })
    }

    /// `(min, max)` argument count.
    pub fn arity(self) -> (usize, usize) {
        match self {
            Func::Arc => (2, 2),
            Func::Trigpoly => (2, usize::MAX),
            _ => (1, 1),
        }
    }

    pub fn constant_args(self) -> bool {
        !matches!(self, Func::Conj | Func::Tilde | Func::Star)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolExpr {
    Num(f64),
    /// Imaginary unit.
    I,
    Pi,
    Z,
    Zbar,
    Neg(Box<SymbolExpr>),
    Add(Box<SymbolExpr>, Box<SymbolExpr>),
    Sub(Box<SymbolExpr>, Box<SymbolExpr>),
    Mul(Box<SymbolExpr>, Box<SymbolExpr>),
    Pow(Box<SymbolExpr>, u32),
    Call(Func, Vec<SymbolExpr>),
}

impl SymbolExpr {
    /// Value of a constant expression; `None` if it mentions `z` or a non-constant built-in.
    pub fn const_value(&self) -> Option<C64> {
        use SymbolExpr::*;
        Some(match self {
            Num(x) => C64::new(*x, 0.0),
            I => C64::new(0.0, 1.0),
            Pi => C64::new(std::f64::consts::PI, 0.0),
            Z | Zbar => return None,
            Neg(a) => -a.const_value()?,
            Add(a, b) => a.const_value()? + b.const_value()?,
            Sub(a, b) => a.const_value()? - b.const_value()?,
            Mul(a, b) => a.const_value()? * b.const_value()?,
            Pow(a, k) => a.const_value()?.powu(*k),
            Call(Func::Conj | Func::Star, args) => args[0].const_value()?.conj(),
            Call(Func::Tilde, args) => args[0].const_value()?,
            Call(..) => return None,
        })
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    // `{:?}` prints the shortest string that parses back to the same f64.
    write!(f, "{x:?}")
}

/// Prints a form that parses back to the same tree: binary operations and
/// negations are always parenthesized.
impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SymbolExpr::*;
        match self {
            Num(x) => write_num(f, *x),
            I => write!(f, "i"),
            Pi => write!(f, "pi"),
            Z => write!(f, "z"),
            Zbar => write!(f, "zbar"),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Pow(a, k) => match **a {
                Pow(..) => write!(f, "({a})^{k}"),
                _ => write!(f, "{a}^{k}"),
            },
            Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
