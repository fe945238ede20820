//! Expressions in one variable `x`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := exp | sin | cos | ln | sqrt
//! ```
//!
//! Numeric literals are kept as exact rationals so that constant folding
//! during differentiation introduces no rounding.

use std::fmt;
use std::sync::Arc;

use rug::ops::Pow;
use rug::{Integer, Rational};
use thiserror::Error;

use crate::numctx::{NumError, NumericContext, Real, Transcendental};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: expected {}, found {}", expected.join(" | "), found.as_deref().unwrap_or("end of input"))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Func(Transcendental),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Rational),
    Var,
    Pi,
    Unary(UnaryOp, Expr),
    Binary(BinaryOp, Expr, Expr),
}

/// Immutable, cheaply clonable expression tree.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

// Largest |exponent| folded for a rational base raised to an integer power.
const MAX_FOLDED_EXPONENT: u32 = 64;

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn constant(value: impl Into<Rational>) -> Expr {
        Expr::from_node(Node::Const(value.into()))
    }

    pub fn var() -> Expr {
        Expr::from_node(Node::Var)
    }

    pub fn pi() -> Expr {
        Expr::from_node(Node::Pi)
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    fn is_const(&self, value: i32) -> bool {
        self.as_const().is_some_and(|c| *c == value)
    }

    // Raw constructors: no simplification, used by the parser so that
    // printing and re-parsing preserve the tree shape.

    pub fn unary(op: UnaryOp, arg: Expr) -> Expr {
        Expr::from_node(Node::Unary(op, arg))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::from_node(Node::Binary(op, lhs, rhs))
    }

    // Simplifying constructors: constant folding and 0/1 identities only.
    // Named after the operations they build, not the std::ops traits.

    #[allow(clippy::should_implement_trait)]
    pub fn neg(arg: Expr) -> Expr {
        match arg.as_const() {
            Some(c) => Expr::constant(Rational::from(-c)),
            None => Expr::unary(UnaryOp::Neg, arg),
        }
    }

    pub fn func(func: Transcendental, arg: Expr) -> Expr {
        Expr::unary(UnaryOp::Func(func), arg)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(lhs: Expr, rhs: Expr) -> Expr {
        match (lhs.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(Rational::from(a + b)),
            _ if lhs.is_const(0) => rhs,
            _ if rhs.is_const(0) => lhs,
            _ => Expr::binary(BinaryOp::Add, lhs, rhs),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(lhs: Expr, rhs: Expr) -> Expr {
        match (lhs.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(Rational::from(a - b)),
            _ if rhs.is_const(0) => lhs,
            _ if lhs.is_const(0) => Expr::neg(rhs),
            _ => Expr::binary(BinaryOp::Sub, lhs, rhs),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(lhs: Expr, rhs: Expr) -> Expr {
        match (lhs.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(Rational::from(a * b)),
            _ if lhs.is_const(0) || rhs.is_const(0) => Expr::constant(0),
            _ if lhs.is_const(1) => rhs,
            _ if rhs.is_const(1) => lhs,
            _ => Expr::binary(BinaryOp::Mul, lhs, rhs),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(lhs: Expr, rhs: Expr) -> Expr {
        match (lhs.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if *b != 0 => Expr::constant(Rational::from(a / b)),
            _ if rhs.is_const(1) => lhs,
            _ if lhs.is_const(0) && !rhs.is_const(0) => lhs,
            _ => Expr::binary(BinaryOp::Div, lhs, rhs),
        }
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        if exponent.is_const(1) {
            return base;
        }
        if exponent.is_const(0) {
            return Expr::constant(1);
        }
        if let (Some(b), Some(e)) = (base.as_const(), exponent.as_const()) {
            if let Some(folded) = fold_pow(b, e) {
                return Expr::constant(folded);
            }
        }
        Expr::binary(BinaryOp::Pow, base, exponent)
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var | Node::Pi => 1,
            Node::Unary(_, a) => 1 + a.size(),
            Node::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn evaluate(&self, x: &Real, ctx: &NumericContext) -> Result<Real, NumError> {
        match self.node() {
            Node::Const(c) => Ok(ctx.rational(c)),
            Node::Var => Ok(ctx.round(x)),
            Node::Pi => Ok(ctx.pi()),
            Node::Unary(UnaryOp::Neg, a) => Ok(-a.evaluate(x, ctx)?),
            Node::Unary(UnaryOp::Func(func), a) => a.evaluate(x, ctx)?.apply(*func),
            Node::Binary(op, a, b) => {
                let lhs = a.evaluate(x, ctx)?;
                if let (BinaryOp::Pow, Some(c)) = (op, b.as_const()) {
                    if c.denom() == &1 {
                        return lhs.powi(c.numer());
                    }
                }
                let rhs = b.evaluate(x, ctx)?;
                match op {
                    BinaryOp::Add => Ok(lhs + rhs),
                    BinaryOp::Sub => Ok(lhs - rhs),
                    BinaryOp::Mul => Ok(lhs * rhs),
                    BinaryOp::Div => lhs.checked_div(&rhs),
                    BinaryOp::Pow => lhs.pow(&rhs),
                }
            }
        }
    }

    /// Symbolic derivative of the given order.
    pub fn differentiate(&self, order: usize) -> Expr {
        (0..order).fold(self.clone(), |e, _| e.derivative())
    }

    /// First derivative with respect to `x`.
    pub fn derivative(&self) -> Expr {
        match self.node() {
            Node::Const(_) | Node::Pi => Expr::constant(0),
            Node::Var => Expr::constant(1),
            Node::Unary(UnaryOp::Neg, a) => Expr::neg(a.derivative()),
            Node::Unary(UnaryOp::Func(func), a) => {
                let da = a.derivative();
                let outer = match func {
                    Transcendental::Exp => self.clone(),
                    Transcendental::Sin => Expr::func(Transcendental::Cos, a.clone()),
                    Transcendental::Cos => Expr::neg(Expr::func(Transcendental::Sin, a.clone())),
                    Transcendental::Ln => return Expr::div(da, a.clone()),
                    Transcendental::Sqrt => {
                        return Expr::div(da, Expr::mul(Expr::constant(2), self.clone()))
                    }
                };
                Expr::mul(outer, da)
            }
            Node::Binary(op, a, b) => match op {
                BinaryOp::Add => Expr::add(a.derivative(), b.derivative()),
                BinaryOp::Sub => Expr::sub(a.derivative(), b.derivative()),
                BinaryOp::Mul => Expr::add(
                    Expr::mul(a.derivative(), b.clone()),
                    Expr::mul(a.clone(), b.derivative()),
                ),
                BinaryOp::Div => Expr::div(
                    Expr::sub(
                        Expr::mul(a.derivative(), b.clone()),
                        Expr::mul(a.clone(), b.derivative()),
                    ),
                    Expr::pow(b.clone(), Expr::constant(2)),
                ),
                BinaryOp::Pow => match b.as_const() {
                    Some(c) => {
                        let lowered = Expr::constant(Rational::from(c - 1u32));
                        Expr::mul(
                            Expr::mul(b.clone(), Expr::pow(a.clone(), lowered)),
                            a.derivative(),
                        )
                    }
                    // a^b = exp(b ln a)
                    None => Expr::func(
                        Transcendental::Exp,
                        Expr::mul(b.clone(), Expr::func(Transcendental::Ln, a.clone())),
                    )
                    .derivative(),
                },
            },
        }
    }
}

fn fold_pow(base: &Rational, exponent: &Rational) -> Option<Rational> {
    if exponent.denom() != &1 {
        return None;
    }
    let e = exponent.numer().to_i32()?;
    if e.unsigned_abs() > MAX_FOLDED_EXPONENT || (*base == 0 && e < 0) {
        return None;
    }
    let magnitude = Rational::from((
        base.numer().clone().pow(e.unsigned_abs()),
        base.denom().clone().pow(e.unsigned_abs()),
    ));
    Some(if e < 0 { magnitude.recip() } else { magnitude })
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// ---------------------------------------------------------------------------
// printing

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        // constants print either as plain literals or parenthesized
        Node::Const(_) | Node::Var | Node::Pi => PREC_ATOM,
        Node::Unary(UnaryOp::Neg, _) => PREC_NEG,
        Node::Unary(UnaryOp::Func(_), _) => PREC_ATOM,
        Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => PREC_ADD,
        Node::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => PREC_MUL,
        Node::Binary(BinaryOp::Pow, ..) => PREC_POW,
    }
}

fn is_terminating(c: &Rational) -> bool {
    let mut d = c.denom().clone();
    for p in [2u32, 5] {
        while d.is_divisible_u(p) {
            d /= p;
        }
    }
    d == 1
}

fn write_const(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if *c < 0 {
        f.write_str("(-")?;
        write_const(f, &Rational::from(-c))?;
        return f.write_str(")");
    }
    if c.denom() == &1 {
        return write!(f, "{}", c.numer());
    }
    if !is_terminating(c) {
        return write!(f, "({}/{})", c.numer(), c.denom());
    }
    // exact decimal expansion
    let mut places = 0u32;
    let mut scaled = c.clone();
    while scaled.denom() != &1 {
        scaled *= 10u32;
        places += 1;
    }
    let mut digits = scaled.numer().to_string();
    while digits.len() <= places as usize {
        digits.insert(0, '0');
    }
    let split = digits.len() - places as usize;
    write!(f, "{}.{}", &digits[..split], &digits[split..])
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write_const(f, c),
            Node::Var => f.write_str("x"),
            Node::Pi => f.write_str("pi"),
            Node::Unary(UnaryOp::Neg, a) => {
                f.write_str("-")?;
                write_child(f, a, PREC_NEG)
            }
            Node::Unary(UnaryOp::Func(func), a) => write!(f, "{}({a})", func.name()),
            Node::Binary(op, a, b) => {
                let (symbol, prec) = match op {
                    BinaryOp::Add => (" + ", PREC_ADD),
                    BinaryOp::Sub => (" - ", PREC_ADD),
                    BinaryOp::Mul => ("*", PREC_MUL),
                    BinaryOp::Div => ("/", PREC_MUL),
                    BinaryOp::Pow => ("^", PREC_POW),
                };
                if *op == BinaryOp::Pow {
                    write_child(f, a, PREC_ATOM)?;
                    f.write_str(symbol)?;
                    write_child(f, b, PREC_NEG)
                } else {
                    write_child(f, a, prec)?;
                    f.write_str(symbol)?;
                    write_child(f, b, prec + 1)
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self, source: &str, span: (usize, usize)) -> String {
        match self {
            Token::Number(_) | Token::Ident(_) => source[span.0..span.1].to_string(),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
        }
    }
}

const EXPECT_OPERAND: &[&str] = &["number", "x", "pi", "function", "'('", "'-'"];

type Span = (usize, usize);

fn lex(source: &str) -> Result<Vec<(Token, Span)>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            tokens.push((tok, (start, i)));
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // optional exponent: e[+-]digits
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
            let text = &source[start..i];
            let value = parse_decimal(text).ok_or_else(|| ParseError {
                offset: start,
                expected: vec!["number"],
                found: Some(text.to_string()),
            })?;
            tokens.push((Token::Number(value), (start, i)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push((Token::Ident(source[start..i].to_string()), (start, i)));
            continue;
        }
        let ch = source[start..].chars().next().unwrap_or('?');
        return Err(ParseError {
            offset: start,
            expected: EXPECT_OPERAND.to_vec(),
            found: Some(ch.to_string()),
        });
    }
    Ok(tokens)
}

/// Exact value of a decimal literal such as `1.5`, `.25` or `3e-2`.
fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() || frac_part.contains('.') {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: Integer = digits.parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = Integer::from(10);
    let factor = ten.pow(scale.unsigned_abs());
    Some(if scale >= 0 {
        Rational::from(numer * factor)
    } else {
        Rational::from((numer, factor))
    })
}

struct Parser<'a> {
    source: &'a str,
    tokens: Vec<(Token, (usize, usize))>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.source.len(), |(_, span)| span.0)
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self
                .tokens
                .get(self.pos)
                .map(|(t, span)| t.describe(self.source, *span)),
        }
    }

    fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinaryOp::Add,
                Some(Token::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinaryOp::Mul,
                Some(Token::Slash) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::binary(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Token::Minus) {
            let arg = self.unary()?;
            // a negated literal is a negative constant, as the printer writes it
            if let Node::Const(c) = arg.node() {
                return Ok(Expr::constant(Rational::from(-c)));
            }
            return Ok(Expr::unary(UnaryOp::Neg, arg));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat(&Token::Caret) {
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let tok = self.peek().cloned();
        match tok {
            Some(Token::Number(value)) => {
                self.pos += 1;
                Ok(Expr::constant(value))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(&Token::RParen) {
                    return Err(self.error(&["')'", "operator"]));
                }
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                let func = match name.as_str() {
                    "x" => {
                        self.pos += 1;
                        return Ok(Expr::var());
                    }
                    "pi" => {
                        self.pos += 1;
                        return Ok(Expr::pi());
                    }
                    "exp" => Transcendental::Exp,
                    "sin" => Transcendental::Sin,
                    "cos" => Transcendental::Cos,
                    "ln" => Transcendental::Ln,
                    "sqrt" => Transcendental::Sqrt,
                    _ => return Err(self.error(EXPECT_OPERAND)),
                };
                self.pos += 1;
                if !self.eat(&Token::LParen) {
                    return Err(self.error(&["'('"]));
                }
                let arg = self.expr()?;
                if !self.eat(&Token::RParen) {
                    return Err(self.error(&["')'", "operator"]));
                }
                Ok(Expr::func(func, arg))
            }
            _ => Err(self.error(EXPECT_OPERAND)),
        }
    }
}

/// Parses the textual form of `f(x)`.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let tokens = lex(source)?;
    let mut parser = Parser {
        source,
        tokens,
        pos: 0,
    };
    let e = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.error(&["operator", "end of input"]));
    }
    Ok(e)
}
