//! Recursive-descent parser for basis-function expressions.
//!
//! ```text
//! list    := expr (',' expr)*
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' ['-' | '+'] integer)?
//! primary := number | variable | func '(' expr ')' | '(' expr ')'
//! func    := exp | cos | sin
//! ```

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Cos,
    Sin,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Cos => "cos",
            Func::Sin => "sin",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Cos => v.cos(),
            Func::Sin => v.sin(),
        }
    }
}

/// Expression tree over variables `x1..xp` (stored zero-based).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalFault {
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite result")]
    NonFinite,
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalFault> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x)?,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => {
                let den = b.eval(x)?;
                if den == 0.0 {
                    return Err(EvalFault::DivisionByZero);
                }
                a.eval(x)? / den
            }
            Expr::Pow(a, k) => {
                let base = a.eval(x)?;
                if base == 0.0 && *k < 0 {
                    return Err(EvalFault::DivisionByZero);
                }
                base.powi(*k)
            }
            Expr::Call(f, a) => f.apply(a.eval(x)?),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalFault::NonFinite)
        }
    }

    /// Largest zero-based variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Prints in the grammar accepted by [`parse_list`], with canonical
/// variable names `x1..xp`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.is_sign_negative() => write!(f, "(-{:?})", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_child(f, 3)
            }
            Expr::Add(a, b) => {
                a.fmt_child(f, 1)?;
                write!(f, " + ")?;
                b.fmt_child(f, 2)
            }
            Expr::Sub(a, b) => {
                a.fmt_child(f, 1)?;
                write!(f, " - ")?;
                b.fmt_child(f, 2)
            }
            Expr::Mul(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, "*")?;
                b.fmt_child(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, "/")?;
                b.fmt_child(f, 3)
            }
            Expr::Pow(a, k) => {
                a.fmt_child(f, 5)?;
                write!(f, "^{k}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at position {position}: found {found}, expected one of {}", expected.join(", "))]
pub struct ParseError {
    /// Zero-based byte offset into the input.
    pub position: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Sym(c) => write!(f, "'{c}'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| ParseError {
                position: start,
                found: format!("malformed number '{lit}'"),
                expected: vec!["number"],
            })?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or(c);
            return Err(ParseError {
                position: i,
                found: format!("'{ch}'"),
                expected: OPERAND.to_vec(),
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

const OPERAND: &[&str] = &["number", "variable", "function", "'('", "'-'"];

/// What an identifier resolved to.
enum Name {
    Var(usize),
    Func(Func),
}

/// Resolves a variable name for dimension `p`: `x1..`, or `x`, `y`, `z`
/// when `p ≤ 3`. Indices beyond `p` are returned as-is for the caller to
/// reject.
fn resolve(name: &str, p: usize) -> Option<Name> {
    match name {
        "exp" => return Some(Name::Func(Func::Exp)),
        "cos" => return Some(Name::Func(Func::Cos)),
        "sin" => return Some(Name::Func(Func::Sin)),
        _ => {}
    }
    if p <= 3 {
        match name {
            "x" => return Some(Name::Var(0)),
            "y" => return Some(Name::Var(1)),
            "z" => return Some(Name::Var(2)),
            _ => {}
        }
    }
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse::<usize>().ok().map(|k| Name::Var(k - 1))
}

/// A parsed list item: the expression plus the source slice it came from.
pub struct Item {
    pub expr: Expr,
    pub source: String,
    /// Offset of the first variable beyond the dimension, with its index.
    pub out_of_range: Option<(usize, usize)>,
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dimension: usize,
    out_of_range: Option<(usize, usize)>,
}

impl Parser<'_> {
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

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            position: self.offset(),
            found: self.peek().to_string(),
            expected: expected.to_vec(),
        }
    }

    fn expect(&mut self, sym: char, label: &'static str) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(sym) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[label]))
        }
    }

    fn list(&mut self) -> Result<Vec<Item>, ParseError> {
        let mut items = Vec::new();
        loop {
            let start = self.offset();
            self.out_of_range = None;
            let expr = self.expr()?;
            let end = self.offset();
            items.push(Item {
                expr,
                source: self.text[start..end].trim().to_string(),
                out_of_range: self.out_of_range.take(),
            });
            match self.peek() {
                Tok::Sym(',') => {
                    self.bump();
                }
                Tok::End => return Ok(items),
                _ => {
                    return Err(self.error(&[
                        "'+'",
                        "'-'",
                        "'*'",
                        "'/'",
                        "'^'",
                        "','",
                        "end of input",
                    ]))
                }
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
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
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let negative = match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                true
            }
            Tok::Sym('+') => {
                self.bump();
                false
            }
            _ => false,
        };
        match *self.peek() {
            Tok::Num(v) if v.fract() == 0.0 && v <= i32::MAX as f64 => {
                self.bump();
                let k = v as i32;
                Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
            }
            _ => Err(self.error(&["integer exponent"])),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')', "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => match resolve(&name, self.dimension) {
                Some(Name::Func(func)) => {
                    self.bump();
                    self.expect('(', "'('")?;
                    let arg = self.expr()?;
                    self.expect(')', "')'")?;
                    Ok(Expr::Call(func, Box::new(arg)))
                }
                Some(Name::Var(k)) => {
                    self.bump();
                    if k >= self.dimension && self.out_of_range.is_none() {
                        self.out_of_range = Some((at, k));
                    }
                    Ok(Expr::Var(k))
                }
                None => Err(self.error(OPERAND)),
            },
            _ => Err(self.error(OPERAND)),
        }
    }
}

/// Parses a comma-separated expression list for points of dimension `p`.
pub fn parse_list(text: &str, dimension: usize) -> Result<Vec<Item>, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser {
        text,
        toks,
        pos: 0,
        dimension,
        out_of_range: None,
    };
    parser.list()
}
