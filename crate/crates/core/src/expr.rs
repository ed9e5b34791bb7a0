//! A small arithmetic expression language for user-supplied profiles.
//!
//! Grammar (usual precedence, `^` is right-associative and binds tighter
//! than unary minus):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers: variables `x1`, `x2`, `x3`, `r`, `zeta` and the functions
//! `abs`, `sqrt`, `exp`, `cos`, `sin`, `cosh`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X1,
    X2,
    X3,
    R,
    Zeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sqrt,
    Exp,
    Cos,
    Sin,
    Cosh,
}

impl Func {
    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Abs => v.abs(),
            Func::Sqrt => v.sqrt(),
            Func::Exp => v.exp(),
            Func::Cos => v.cos(),
            Func::Sin => v.sin(),
            Func::Cosh => v.cosh(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Variable values for evaluation; `r` is the cylindrical radius and `zeta`
/// the scalar level value, depending on where the expression is used.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bindings {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub r: f64,
    pub zeta: f64,
}

impl Bindings {
    pub fn point(x: [f64; 3]) -> Self {
        Bindings {
            x1: x[0],
            x2: x[1],
            x3: x[2],
            r: (x[0] * x[0] + x[1] * x[1]).sqrt(),
            zeta: 0.0,
        }
    }

    pub fn zeta(z: f64) -> Self {
        Bindings { zeta: z, ..Default::default() }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        p.skip_ws();
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Expr(format!(
                "unexpected input at byte {}: {:?}",
                p.pos,
                &src[p.pos..]
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, b: &Bindings) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X1) => b.x1,
            Expr::Var(Var::X2) => b.x2,
            Expr::Var(Var::X3) => b.x3,
            Expr::Var(Var::R) => b.r,
            Expr::Var(Var::Zeta) => b.zeta,
            Expr::Neg(e) => -e.eval(b),
            Expr::Add(l, r) => l.eval(b) + r.eval(b),
            Expr::Sub(l, r) => l.eval(b) - r.eval(b),
            Expr::Mul(l, r) => l.eval(b) * r.eval(b),
            Expr::Div(l, r) => l.eval(b) / r.eval(b),
            Expr::Pow(l, r) => l.eval(b).powf(r.eval(b)),
            Expr::Call(f, e) => f.apply(e.eval(b)),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, ch: u8) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            // Right-associative; the exponent may itself be negated.
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(Error::Expr(format!("missing ')' at byte {}", self.pos)));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(Error::Expr(format!(
                "expected a value at byte {}",
                self.pos
            ))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E') && self.pos > start {
                // Exponent part: e, optional sign, digits.
                let mut ahead = self.pos + 1;
                if matches!(self.src.get(ahead), Some(b'+') | Some(b'-')) {
                    ahead += 1;
                }
                if matches!(self.src.get(ahead), Some(d) if d.is_ascii_digit()) {
                    self.pos = ahead + 1;
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: f64 = text
            .parse()
            .map_err(|_| Error::Expr(format!("bad number {text:?} at byte {start}")))?;
        self.skip_ws();
        Ok(Expr::Num(v))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        self.skip_ws();
        let var = match name.as_str() {
            "x1" => Some(Var::X1),
            "x2" => Some(Var::X2),
            "x3" => Some(Var::X3),
            "r" => Some(Var::R),
            "zeta" => Some(Var::Zeta),
            _ => None,
        };
        if let Some(v) = var {
            return Ok(Expr::Var(v));
        }
        let func = match name.as_str() {
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "cos" => Func::Cos,
            "sin" => Func::Sin,
            "cosh" => Func::Cosh,
            _ => {
                return Err(Error::Expr(format!(
                    "unknown identifier {name:?} at byte {start}"
                )))
            }
        };
        if !self.eat(b'(') {
            return Err(Error::Expr(format!(
                "function {name:?} requires parentheses at byte {}",
                self.pos
            )));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(Error::Expr(format!("missing ')' at byte {}", self.pos)));
        }
        Ok(Expr::Call(func, Box::new(arg)))
    }
}
