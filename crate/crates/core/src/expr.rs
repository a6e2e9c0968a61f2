//! Expression language for coordinate functions of `(x1..xn, y1..ym)`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?            right-associative, integer exponent
//! atom    := number | "x"k | "y"k | func "(" sum ")" | "(" sum ")"
//! func    := sin | cos | tan | exp | log | sqrt | sinh | cosh
//! ```
//!
//! Exponents must reduce to an integer constant; general powers are written
//! `exp(b*log(a))`. The printer emits a fully parenthesized canonical form
//! that parses back to the same tree.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// Base coordinate `x^{i+1}`.
    X(usize),
    /// Fiber coordinate `y^{a+1}`.
    Y(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("variable `{name}` out of range (declared {bound})")]
    IndexOutOfRange { name: String, bound: usize },
    #[error("exponent must be an integer constant")]
    NonIntegerExponent,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{func} outside its domain at argument {arg}")]
    Domain { func: &'static str, arg: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite result")]
    NonFinite,
}

/// Parse `text` against `n` base and `m` fiber coordinates.
pub fn parse(text: &str, n: usize, m: usize) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        n,
        m,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(ParseError {
            kind: ParseErrorKind::Empty,
            offset: 0,
        });
    }
    let e = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err(ParseErrorKind::Syntax(format!(
            "unexpected `{}`",
            p.src[p.pos] as char
        ))));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
    m: usize,
}

impl Parser<'_> {
    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            offset: self.pos,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        let exponent = self.unary()?;
        let value = exponent.eval_constant().ok_or(ParseError {
            kind: ParseErrorKind::NonIntegerExponent,
            offset: at,
        })?;
        if value.fract() != 0.0 || value.abs() > i32::MAX as f64 {
            return Err(ParseError {
                kind: ParseErrorKind::NonIntegerExponent,
                offset: at,
            });
        }
        Ok(Expr::Pow(Box::new(base), value as i32))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.err(ParseErrorKind::Syntax("unexpected end of input".into()))),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.err(ParseErrorKind::Syntax("expected `)`".into())));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(c) => Err(self.err(ParseErrorKind::Syntax(format!("unexpected `{}`", c as char)))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).expect("ascii");
        let value: f64 = text.parse().map_err(|_| ParseError {
            kind: ParseErrorKind::Syntax(format!("malformed number `{text}`")),
            offset: start,
        })?;
        self.pos = i;
        Ok(Expr::Num(value))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && (s[i].is_ascii_alphanumeric() || s[i] == b'_') {
            i += 1;
        }
        let name = std::str::from_utf8(&s[start..i]).expect("ascii").to_string();
        self.pos = i;

        if let Some(func) = Func::from_name(&name) {
            if !self.eat(b'(') {
                return Err(self.err(ParseErrorKind::Syntax(format!("expected `(` after `{name}`"))));
            }
            let arg = self.sum()?;
            if !self.eat(b')') {
                return Err(self.err(ParseErrorKind::Syntax("expected `)`".into())));
            }
            return Ok(Expr::Call(func, Box::new(arg)));
        }

        let unknown = || ParseError {
            kind: ParseErrorKind::UnknownIdentifier(name.clone()),
            offset: start,
        };
        let (head, digits) = name.split_at(1);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(unknown());
        }
        let k: usize = digits.parse().map_err(|_| unknown())?;
        let (var, bound) = match head {
            "x" => (Var::X(k - 1), self.n),
            "y" => (Var::Y(k - 1), self.m),
            _ => return Err(unknown()),
        };
        if k > bound {
            return Err(ParseError {
                kind: ParseErrorKind::IndexOutOfRange { name, bound },
                offset: start,
            });
        }
        Ok(Expr::Var(var))
    }
}

impl Expr {
    /// Value of a variable-free expression.
    fn eval_constant(&self) -> Option<f64> {
        self.eval_with(&mut |_| None).ok().flatten()
    }

    fn eval_with(&self, lookup: &mut dyn FnMut(Var) -> Option<f64>) -> Result<Option<f64>, EvalError> {
        let v = match self {
            Expr::Num(c) => *c,
            Expr::Var(var) => match lookup(*var) {
                Some(v) => v,
                None => return Ok(None),
            },
            Expr::Neg(e) => match e.eval_with(lookup)? {
                Some(v) => -v,
                None => return Ok(None),
            },
            Expr::Bin(op, a, b) => {
                let (Some(a), Some(b)) = (a.eval_with(lookup)?, b.eval_with(lookup)?) else {
                    return Ok(None);
                };
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(a, k) => {
                let Some(a) = a.eval_with(lookup)? else {
                    return Ok(None);
                };
                if a == 0.0 && *k < 0 {
                    return Err(EvalError::DivisionByZero);
                }
                a.powi(*k)
            }
            Expr::Call(f, a) => {
                let Some(a) = a.eval_with(lookup)? else {
                    return Ok(None);
                };
                apply_func(*f, a)?
            }
        };
        if !v.is_finite() {
            return Err(EvalError::NonFinite);
        }
        Ok(Some(v))
    }

    /// Plain `f64` evaluation; this interpreter shares no code with the jet
    /// engine and serves as its value oracle.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
        let mut lookup = |v: Var| match v {
            Var::X(i) => x.get(i).copied(),
            Var::Y(a) => y.get(a).copied(),
        };
        self.eval_with(&mut lookup)
            .map(|v| v.expect("variable indices validated at parse time"))
    }

    /// Fully parenthesized canonical form.
    pub fn to_canonical(&self) -> String {
        self.to_string()
    }

    /// Visit every variable occurring in the tree.
    pub fn for_each_var(&self, f: &mut dyn FnMut(Var)) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => f(*v),
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.for_each_var(f),
            Expr::Bin(_, a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
        }
    }

    pub fn depends_on_fiber(&self) -> bool {
        let mut any = false;
        self.for_each_var(&mut |v| any |= matches!(v, Var::Y(_)));
        any
    }
}

pub(crate) fn apply_func(f: Func, a: f64) -> Result<f64, EvalError> {
    Ok(match f {
        Func::Sin => a.sin(),
        Func::Cos => a.cos(),
        Func::Tan => {
            if a.cos() == 0.0 {
                return Err(EvalError::Domain { func: "tan", arg: a });
            }
            a.tan()
        }
        Func::Exp => a.exp(),
        Func::Log => {
            if a <= 0.0 {
                return Err(EvalError::Domain { func: "log", arg: a });
            }
            a.ln()
        }
        Func::Sqrt => {
            if a < 0.0 {
                return Err(EvalError::Domain { func: "sqrt", arg: a });
            }
            a.sqrt()
        }
        Func::Sinh => a.sinh(),
        Func::Cosh => a.cosh(),
    })
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => {
                if *c < 0.0 {
                    write!(f, "(-{:?})", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            Expr::Var(Var::X(i)) => write!(f, "x{}", i + 1),
            Expr::Var(Var::Y(a)) => write!(f, "y{}", a + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(a, k) => {
                if *k < 0 {
                    write!(f, "({a} ^ (-{}))", -(*k as i64))
                } else {
                    write!(f, "({a} ^ {k})")
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(text: &str, n: usize, m: usize, x: &[f64], y: &[f64]) -> f64 {
        parse(text, n, m).unwrap().eval(x, y).unwrap()
    }

    #[test]
    fn simple_arithmetic() {
        assert_eq!(eval("y1^2 + x2", 2, 2, &[0.0, 3.0], &[2.0, 0.0]), 7.0);
        assert_eq!(eval("sin(x1)*y2", 1, 2, &[0.0], &[5.0, 4.0]), 0.0);
    }

    #[test]
    fn index_out_of_range() {
        let err = parse("y3", 1, 2).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::IndexOutOfRange { .. }));
        assert_eq!(err.offset, 0);
        assert!(matches!(
            parse("x1", 0, 3).unwrap_err().kind,
            ParseErrorKind::IndexOutOfRange { .. }
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        // ^ binds tighter than unary minus
        assert_eq!(eval("-y1^2", 0, 1, &[], &[3.0]), -9.0);
        // left associative - and /
        assert_eq!(eval("8 - 3 - 2", 0, 1, &[], &[0.0]), 3.0);
        assert_eq!(eval("8 / 4 / 2", 0, 1, &[], &[0.0]), 1.0);
        // right associative ^
        assert_eq!(eval("2^3^2", 0, 1, &[], &[0.0]), 512.0);
        assert_eq!(eval("2 + 3 * 4", 0, 1, &[], &[0.0]), 14.0);
        assert_eq!(eval("y1^-1", 0, 1, &[], &[4.0]), 0.25);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let err = parse("x1 + * 2", 1, 1).unwrap_err();
        assert_eq!(err.offset, 5);
        let err = parse("foo(x1)", 1, 1).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("foo".into()));
        assert!(matches!(parse("(x1", 1, 1).unwrap_err().kind, ParseErrorKind::Syntax(_)));
        assert_eq!(parse("   ", 1, 1).unwrap_err().kind, ParseErrorKind::Empty);
        assert_eq!(
            parse("x1^y1", 1, 1).unwrap_err().kind,
            ParseErrorKind::NonIntegerExponent
        );
        assert_eq!(
            parse("x1^0.5", 1, 1).unwrap_err().kind,
            ParseErrorKind::NonIntegerExponent
        );
        assert!(matches!(
            parse("x0", 1, 1).unwrap_err().kind,
            ParseErrorKind::UnknownIdentifier(_)
        ));
    }

    #[test]
    fn canonical_printer_round_trips() {
        let e = parse("-x1^2*sin(y2) - 3/(y1 + 1e-3) + y1^-2", 1, 2).unwrap();
        let printed = e.to_canonical();
        let back = parse(&printed, 1, 2).unwrap();
        assert_eq!(back, e);
        assert_eq!(back.to_canonical(), printed);
    }

    #[test]
    fn domain_errors() {
        let e = parse("log(y1)", 0, 1).unwrap();
        assert!(matches!(e.eval(&[], &[-1.0]), Err(EvalError::Domain { func: "log", .. })));
        let e = parse("1/y1", 0, 1).unwrap();
        assert_eq!(e.eval(&[], &[0.0]), Err(EvalError::DivisionByZero));
    }
}
