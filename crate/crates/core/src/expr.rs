//! Chart expressions: a small arithmetic language over the parameters
//! `u1..un`, evaluated generically so the same tree yields values, first
//! derivatives or second derivatives.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' integer)*
//! atom    := number | 'pi' | uN | name '(' sum (',' sum)* ')' | '(' sum ')'
//! ```
//!
//! `-u1^2` therefore reads as `-(u1^2)`. Exponents are integer literals,
//! optionally signed or parenthesized: `u1^-1`, `u1^(-2)`.

use std::fmt;

use thiserror::Error;

use crate::autodiff::Scalar;

const MAX_DEPTH: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    fn by_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based parameter index: `u1` is `Param(0)`.
    Param(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedEnd,
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnknownIdentifier(String),
    Arity { name: String, expected: usize, found: usize },
    BadNumber(String),
    BadExponent,
    TooDeep,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected '{t}'"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier '{s}'"),
            ParseErrorKind::Arity { name, expected, found } => {
                write!(f, "{name} takes {expected} argument(s), got {found}")
            }
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number '{s}'"),
            ParseErrorKind::BadExponent => write!(f, "exponent must be an integer literal"),
            ParseErrorKind::TooDeep => write!(f, "expression nested too deeply"),
        }
    }
}

/// Parse failure with the character offset where it was detected.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<f64>().map_err(|_| ParseError {
                kind: ParseErrorKind::BadNumber(s.clone()),
                offset: start,
            })?;
            out.push((Tok::Num(v), start));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(c), offset: i });
        }
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { kind, offset: self.offset() })
    }

    fn unexpected<T>(&self) -> Result<T, ParseError> {
        match self.peek() {
            Tok::End => self.err(ParseErrorKind::UnexpectedEnd),
            Tok::Num(v) => self.err(ParseErrorKind::UnexpectedToken(v.to_string())),
            Tok::Ident(s) => self.err(ParseErrorKind::UnexpectedToken(s.clone())),
            Tok::Sym(c) => self.err(ParseErrorKind::UnexpectedToken(c.to_string())),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.unexpected()
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err(ParseErrorKind::TooDeep);
        }
        Ok(())
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while *self.peek() == Tok::Sym('^') {
            self.bump();
            let n = self.exponent()?;
            base = Expr::Pow(Box::new(base), n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = *self.peek() == Tok::Sym('(');
        if paren {
            self.bump();
        }
        let neg = *self.peek() == Tok::Sym('-');
        if neg {
            self.bump();
        }
        let at = self.offset();
        let n = match self.peek() {
            Tok::Num(v) if v.fract() == 0.0 && *v <= i32::MAX as f64 => *v as i32,
            Tok::End => return self.err(ParseErrorKind::UnexpectedEnd),
            _ => return Err(ParseError { kind: ParseErrorKind::BadExponent, offset: at }),
        };
        self.bump();
        if paren {
            self.expect(')')?;
        }
        Ok(if neg { -n } else { n })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::Sym('(') {
                    self.bump();
                    let mut args = vec![self.sum()?];
                    while *self.peek() == Tok::Sym(',') {
                        self.bump();
                        args.push(self.sum()?);
                    }
                    self.expect(')')?;
                    let func = Func::by_name(&name).ok_or(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name.clone()),
                        offset: at,
                    })?;
                    if args.len() != 1 {
                        return Err(ParseError {
                            kind: ParseErrorKind::Arity { name, expected: 1, found: args.len() },
                            offset: at,
                        });
                    }
                    return Ok(Expr::Call(func, Box::new(args.pop().expect("one argument"))));
                }
                if name == "pi" {
                    return Ok(Expr::Const(std::f64::consts::PI));
                }
                if Func::by_name(&name).is_some() {
                    return Err(ParseError {
                        kind: ParseErrorKind::Arity { name, expected: 1, found: 0 },
                        offset: at,
                    });
                }
                match param_index(&name) {
                    Some(i) => Ok(Expr::Param(i)),
                    None => Err(ParseError { kind: ParseErrorKind::UnknownIdentifier(name), offset: at }),
                }
            }
            _ => self.unexpected(),
        }
    }
}

fn param_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('u')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let k: usize = digits.parse().ok()?;
    Some(k - 1)
}

/// Parses an expression over `u1..un`.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, depth: 0 };
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return p.unexpected();
    }
    Ok(e)
}

impl Expr {
    /// Number of parameters the expression needs: one more than the
    /// largest parameter index, or zero.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Param(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.arity().max(b.arity()),
        }
    }

    /// Evaluates at `u`. Panics if `u` is shorter than [`Expr::arity`].
    pub fn eval<S: Scalar>(&self, u: &[S]) -> S {
        match self {
            Expr::Const(c) => S::from_f64(*c),
            Expr::Param(i) => u[*i].clone(),
            Expr::Neg(a) => -a.eval(u),
            Expr::Add(a, b) => a.eval(u) + b.eval(u),
            Expr::Sub(a, b) => a.eval(u) - b.eval(u),
            Expr::Mul(a, b) => a.eval(u) * b.eval(u),
            Expr::Div(a, b) => a.eval(u) / b.eval(u),
            Expr::Pow(a, n) => a.eval(u).powi(*n),
            Expr::Call(f, a) => {
                let v = a.eval(u);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }

    /// Replaces each parameter `u(i+1)` with `repl[i]`.
    pub fn substitute(&self, repl: &[Expr]) -> Expr {
        let s = |e: &Expr| Box::new(e.substitute(repl));
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Param(i) => repl[*i].clone(),
            Expr::Neg(a) => Expr::Neg(s(a)),
            Expr::Add(a, b) => Expr::Add(s(a), s(b)),
            Expr::Sub(a, b) => Expr::Sub(s(a), s(b)),
            Expr::Mul(a, b) => Expr::Mul(s(a), s(b)),
            Expr::Div(a, b) => Expr::Div(s(a), s(b)),
            Expr::Pow(a, n) => Expr::Pow(s(a), *n),
            Expr::Call(f, a) => Expr::Call(*f, s(a)),
        }
    }
}

impl fmt::Display for Expr {
    // Fully parenthesized so the output parses back to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Param(i) => write!(f, "u{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, n) => write!(f, "({a}^({n}))"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
