use super::ast::{Func, SymbolExpr};
use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, ParseErrorKind};
use crate::symbol::CircleArc;

/// Largest exponent accepted by `^`.
pub const MAX_POWER: u32 = 64;
/// Largest `|lo|` accepted by `trigpoly`.
const MAX_TRIG_DEGREE: f64 = 1e6;
/// Nesting depth guard so hostile input cannot overflow the stack.
const MAX_DEPTH: usize = 256;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
}

/// Parses a symbol expression.
///
/// Grammar (usual precedence, `^` binds tightest and takes a nonnegative integer literal):
///
/// ```text
/// expr    := term (("+" | "-") term)*
/// term    := unary ("*" unary)*
/// unary   := "-" unary | power
/// power   := primary ("^" INTEGER)?
/// primary := NUMBER | "z" | "zbar" | "i" | "pi" | NAME "(" expr ("," expr)* ")" | "(" expr ")"
/// ```
pub fn parse(text: &str) -> Result<SymbolExpr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, depth: 0 };
    let e = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        let msg = format!("unexpected {}", describe(&t.tok));
        return Err(p.err_at(t, ParseErrorKind::Syntax, msg));
    }
    Ok(e)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(x) => format!("number {x}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> Token {
        self.toks[self.pos].clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, t: Token, kind: ParseErrorKind, msg: String) -> ParseError {
        ParseError::new(kind, t.line, t.column, msg)
    }

    fn expect(&mut self, want: Tok) -> Result<Token, ParseError> {
        let t = self.peek();
        if t.tok == want {
            Ok(self.bump())
        } else {
            Err(self.err_at(
                t.clone(),
                ParseErrorKind::Syntax,
                format!("expected {}, found {}", describe(&want), describe(&t.tok)),
            ))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let t = self.peek();
            return Err(self.err_at(t, ParseErrorKind::Syntax, "expression nested too deeply".into()));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<SymbolExpr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = SymbolExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = SymbolExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<SymbolExpr, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek().tok == Tok::Star {
            self.bump();
            lhs = SymbolExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<SymbolExpr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(SymbolExpr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<SymbolExpr, ParseError> {
        let base = self.primary()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let t = self.bump();
        match t.tok {
            Tok::Num(x) if x.fract() == 0.0 && x >= 0.0 && x <= MAX_POWER as f64 => {
                Ok(SymbolExpr::Pow(Box::new(base), x as u32))
            }
            _ => Err(self.err_at(
                t,
                ParseErrorKind::Syntax,
                format!("exponent must be an integer literal between 0 and {MAX_POWER}"),
            )),
        }
    }

    fn primary(&mut self) -> Result<SymbolExpr, ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::Num(x) => Ok(SymbolExpr::Num(*x)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "z" => Ok(SymbolExpr::Z),
                "zbar" => Ok(SymbolExpr::Zbar),
                "i" => Ok(SymbolExpr::I),
                "pi" => Ok(SymbolExpr::Pi),
                _ => match Func::lookup(name) {
                    Some(func) => self.call(func, t.clone()),
                    None => Err(self.err_at(
                        t.clone(),
                        ParseErrorKind::UnknownIdentifier,
                        format!("unknown identifier `{name}`"),
                    )),
                },
            },
            other => Err(self.err_at(t.clone(), ParseErrorKind::Syntax, format!("unexpected {}", describe(other)))),
        }
    }

    fn call(&mut self, func: Func, at: Token) -> Result<SymbolExpr, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.expr()?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen)?;
        let (lo, hi) = func.arity();
        if args.len() < lo || args.len() > hi {
            let want = if lo == hi { format!("{lo}") } else { format!("at least {lo}") };
            return Err(self.err_at(
                at,
                ParseErrorKind::Arity,
                format!("`{}` takes {want} argument(s), got {}", func.name(), args.len()),
            ));
        }
        if func.constant_args() {
            self.check_constant_args(func, &args, at)?;
        }
        Ok(SymbolExpr::Call(func, args))
    }

    fn check_constant_args(&self, func: Func, args: &[SymbolExpr], at: Token) -> Result<(), ParseError> {
        let bad = |msg: String| Err(self.err_at(at.clone(), ParseErrorKind::InvalidArgument, msg));
        let mut values = Vec::with_capacity(args.len());
        for a in args {
            match a.const_value() {
                Some(v) if v.re.is_finite() && v.im.is_finite() => values.push(v),
                _ => return bad(format!("arguments of `{}` must be finite constants", func.name())),
            }
        }
        let real = |v: &crate::C64| v.im.abs() <= 1e-12;
        match func {
            Func::Blaschke if values[0].norm() >= 1.0 => {
                bad(format!("blaschke parameter {} must lie strictly inside the unit disk", values[0]))
            }
            Func::Arc if !values.iter().all(real) => bad("arc endpoints must be real angles".into()),
            Func::Arc if CircleArc::new(values[0].re, values[1].re).is_none() => {
                bad("arc endpoints must be distinct modulo 2π".into())
            }
            Func::Trigpoly
                if !real(&values[0]) || values[0].re.fract() != 0.0 || values[0].re.abs() > MAX_TRIG_DEGREE =>
            {
                bad("first argument of trigpoly must be an integer degree".into())
            }
            Func::Decay if !real(&values[0]) || !(values[0].re > 1.0) => {
                bad("decay exponent must be a real number above 1".into())
            }
            _ => Ok(()),
        }
    }
}
