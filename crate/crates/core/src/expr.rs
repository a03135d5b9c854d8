//! Factorable expression trees over the variables `A..J`.
//!
//! The node set is deliberately minimal: variables, constants, n-ary sums
//! and products, negation, division, integer powers and integer roots. That
//! covers every bound function, ratio and constraint in the case analysis.
//! Expressions are immutable; the hot paths (interval evaluation, gradients,
//! forward-backward contraction) run on a compiled [`Tape`].
//!
//! Plain-text serialization is a prefix notation, e.g.
//! `(- (* 4 A) (/ (* 2 (^ A 2)) B))` for `4A - 2A^2/B`.

use std::fmt;

use thiserror::Error;

use crate::interval::{Box10, Interval, IntervalError, Var, DIM};

/// Point in variable space; all ten coordinates.
pub type Point = [f64; DIM];

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum DomainError {
    #[error("zero denominator in point evaluation")]
    ZeroDenominator,
    #[error("negative radicand in point evaluation")]
    NegativeRadicand,
}

// ---------------------------------------------------------------------------
// scalars
// ---------------------------------------------------------------------------

/// Numeric literal: an exact rational or a decimal literal kept as text.
/// Decimal literals are widened by one ulp on both sides when converted to
/// an interval, mirroring how the source constants are printed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Ratio { num: i64, den: i64 },
    Decimal { lit: String },
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl Scalar {
    pub fn int(n: i64) -> Scalar {
        Scalar::Ratio { num: n, den: 1 }
    }

    pub fn ratio(num: i64, den: i64) -> Scalar {
        assert!(den != 0);
        let s = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den);
        Scalar::Ratio {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn decimal(lit: &str) -> Scalar {
        debug_assert!(lit.parse::<f64>().is_ok(), "bad decimal literal {lit}");
        Scalar::Decimal { lit: lit.to_string() }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Ratio { num, den } => *num as f64 / *den as f64,
            Scalar::Decimal { lit } => lit.parse().unwrap(),
        }
    }

    pub fn interval(&self) -> Interval {
        match self {
            Scalar::Ratio { num, den } => Interval::from_ratio(*num, *den),
            Scalar::Decimal { lit } => Interval::from_decimal(lit.parse().unwrap()),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Ratio { num, den } => Scalar::Ratio { num: -num, den: *den },
            Scalar::Decimal { lit } => {
                if let Some(rest) = lit.strip_prefix('-') {
                    Scalar::Decimal { lit: rest.to_string() }
                } else {
                    Scalar::Decimal { lit: format!("-{lit}") }
                }
            }
        }
    }

    fn is_one(&self) -> bool {
        matches!(self, Scalar::Ratio { num: 1, den: 1 })
    }

    fn is_zero(&self) -> bool {
        matches!(self, Scalar::Ratio { num: 0, .. })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Ratio { num, den: 1 } => write!(f, "{num}"),
            Scalar::Ratio { num, den } => write!(f, "{num}/{den}"),
            Scalar::Decimal { lit } => f.write_str(lit),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// expression tree
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(Var),
    Const(Scalar),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Neg(Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    PowInt(Box<Expr>, u32),
    Root(Box<Expr>, u32),
}

impl Expr {
    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Scalar::int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::Const(Scalar::ratio(num, den))
    }

    pub fn decimal(lit: &str) -> Expr {
        Expr::Const(Scalar::decimal(lit))
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        Expr::Sum(terms)
    }

    pub fn prod(factors: Vec<Expr>) -> Expr {
        Expr::Prod(factors)
    }

    pub fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }

    pub fn add(self, rhs: Expr) -> Expr {
        match self {
            Expr::Sum(mut v) => {
                v.push(rhs);
                Expr::Sum(v)
            }
            other => Expr::Sum(vec![other, rhs]),
        }
    }

    pub fn sub(self, rhs: Expr) -> Expr {
        self.add(rhs.neg())
    }

    pub fn mul(self, rhs: Expr) -> Expr {
        match self {
            Expr::Prod(mut v) => {
                v.push(rhs);
                Expr::Prod(v)
            }
            other => Expr::Prod(vec![other, rhs]),
        }
    }

    pub fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }

    pub fn pow(self, k: u32) -> Expr {
        Expr::PowInt(Box::new(self), k)
    }

    pub fn root(self, k: u32) -> Expr {
        Expr::Root(Box::new(self), k)
    }

    /// Bitmask of variables occurring in the expression.
    pub fn support(&self) -> u16 {
        match self {
            Expr::Var(v) => 1 << v.index(),
            Expr::Const(_) => 0,
            Expr::Sum(v) | Expr::Prod(v) => v.iter().fold(0, |m, e| m | e.support()),
            Expr::Neg(e) => e.support(),
            Expr::Div(a, b) => a.support() | b.support(),
            Expr::PowInt(e, _) | Expr::Root(e, _) => e.support(),
        }
    }

    /// Canonical form for structural comparison: flattens nested sums and
    /// products, folds products of constants, removes neutral elements and
    /// double negations. Term order is preserved.
    pub fn normalized(&self) -> Expr {
        match self {
            Expr::Var(_) | Expr::Const(_) => self.clone(),
            Expr::Neg(e) => match e.normalized() {
                Expr::Neg(inner) => *inner,
                Expr::Const(s) => Expr::Const(s.neg()),
                other => other.neg(),
            },
            Expr::Sum(terms) => {
                let mut out = Vec::new();
                for t in terms {
                    match t.normalized() {
                        Expr::Sum(inner) => out.extend(inner),
                        Expr::Const(s) if s.is_zero() => {}
                        other => out.push(other),
                    }
                }
                match out.len() {
                    0 => Expr::int(0),
                    1 => out.pop().unwrap(),
                    _ => Expr::Sum(out),
                }
            }
            Expr::Prod(factors) => {
                let mut coef = Scalar::int(1);
                let mut out = Vec::new();
                for fct in factors {
                    match fct.normalized() {
                        Expr::Prod(inner) => {
                            for e in inner {
                                match e {
                                    Expr::Const(Scalar::Ratio { num, den }) => {
                                        coef = mul_ratio(&coef, num, den);
                                    }
                                    other => out.push(other),
                                }
                            }
                        }
                        Expr::Const(Scalar::Ratio { num, den }) => {
                            coef = mul_ratio(&coef, num, den);
                        }
                        other => out.push(other),
                    }
                }
                if coef.is_zero() {
                    return Expr::int(0);
                }
                if !coef.is_one() {
                    out.insert(0, Expr::Const(coef));
                }
                match out.len() {
                    0 => Expr::int(1),
                    1 => out.pop().unwrap(),
                    _ => Expr::Prod(out),
                }
            }
            Expr::Div(a, b) => Expr::Div(Box::new(a.normalized()), Box::new(b.normalized())),
            Expr::PowInt(e, 1) => e.normalized(),
            Expr::PowInt(e, k) => Expr::PowInt(Box::new(e.normalized()), *k),
            Expr::Root(e, 1) => e.normalized(),
            Expr::Root(e, k) => Expr::Root(Box::new(e.normalized()), *k),
        }
    }

    pub fn struct_eq(&self, other: &Expr) -> bool {
        self.normalized() == other.normalized()
    }
}

fn mul_ratio(s: &Scalar, num: i64, den: i64) -> Scalar {
    match s {
        Scalar::Ratio { num: a, den: b } => Scalar::ratio(a * num, b * den),
        _ => unreachable!("decimal coefficients are never folded"),
    }
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Const(s) => write!(f, "{s}"),
            Expr::Sum(terms) => {
                // two-term sums with a negated tail print as binary minus
                if terms.len() == 2 {
                    if let Expr::Neg(n) = &terms[1] {
                        return write!(f, "(- {} {})", terms[0], n);
                    }
                }
                write!(f, "(+")?;
                for t in terms {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            Expr::Prod(factors) => {
                write!(f, "(*")?;
                for x in factors {
                    write!(f, " {x}")?;
                }
                write!(f, ")")
            }
            Expr::Neg(e) => write!(f, "(- {e})"),
            Expr::Div(a, b) => write!(f, "(/ {a} {b})"),
            Expr::PowInt(e, k) => write!(f, "(^ {e} {k})"),
            Expr::Root(e, k) => write!(f, "(root {e} {k})"),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at offset {at}: {msg}")]
pub struct ParseError {
    pub at: usize,
    pub msg: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            at: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.as_bytes().get(self.pos).copied()
    }

    fn token(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src.as_bytes()[self.pos];
            if c.is_ascii_whitespace() || c == b'(' || c == b')' {
                break;
            }
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn atom(&mut self, tok: &str) -> Result<Expr, ParseError> {
        if let Some(v) = Var::from_name(tok) {
            return Ok(Expr::Var(v));
        }
        if let Some((n, d)) = tok.split_once('/') {
            if let (Ok(n), Ok(d)) = (n.parse::<i64>(), d.parse::<i64>()) {
                return Ok(Expr::ratio(n, d));
            }
        }
        if let Ok(n) = tok.parse::<i64>() {
            return Ok(Expr::int(n));
        }
        if tok.parse::<f64>().is_ok() && tok.contains('.') {
            return Ok(Expr::decimal(tok));
        }
        self.err(format!("unknown atom '{tok}'"))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let op = self.token().to_string();
                let mut args = Vec::new();
                while self.peek() != Some(b')') {
                    if self.peek().is_none() {
                        return self.err("unterminated list");
                    }
                    args.push(self.expr()?);
                }
                self.pos += 1; // consume ')'
                self.combine(&op, args)
            }
            Some(b')') => self.err("unexpected ')'"),
            Some(_) => {
                let tok = self.token();
                if tok.is_empty() {
                    return self.err("empty token");
                }
                self.atom(tok)
            }
        }
    }

    fn combine(&self, op: &str, mut args: Vec<Expr>) -> Result<Expr, ParseError> {
        match op {
            "+" => {
                if args.is_empty() {
                    return Err(ParseError {
                        at: self.pos,
                        msg: "empty sum".into(),
                    });
                }
                Ok(Expr::Sum(args))
            }
            "-" => match args.len() {
                0 => Err(ParseError {
                    at: self.pos,
                    msg: "empty minus".into(),
                }),
                1 => Ok(args.pop().unwrap().neg()),
                _ => {
                    let head = args.remove(0);
                    let mut terms = vec![head];
                    terms.extend(args.into_iter().map(Expr::neg));
                    Ok(Expr::Sum(terms))
                }
            },
            "*" => {
                if args.len() < 2 {
                    return Err(ParseError {
                        at: self.pos,
                        msg: "product needs at least two factors".into(),
                    });
                }
                Ok(Expr::Prod(args))
            }
            "/" => {
                if args.len() != 2 {
                    return Err(ParseError {
                        at: self.pos,
                        msg: "division is binary".into(),
                    });
                }
                let b = args.pop().unwrap();
                let a = args.pop().unwrap();
                Ok(a.div(b))
            }
            "^" | "root" => {
                if args.len() != 2 {
                    return Err(ParseError {
                        at: self.pos,
                        msg: format!("{op} needs base and exponent"),
                    });
                }
                let k = match args.pop().unwrap() {
                    Expr::Const(Scalar::Ratio { num, den: 1 }) if num >= 1 => num as u32,
                    _ => {
                        return Err(ParseError {
                            at: self.pos,
                            msg: format!("{op} exponent must be a positive integer"),
                        })
                    }
                };
                let base = args.pop().unwrap();
                Ok(if op == "^" { base.pow(k) } else { base.root(k) })
            }
            _ => Err(ParseError {
                at: self.pos,
                msg: format!("unknown operator '{op}'"),
            }),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Expr, ParseError> {
        let mut p = Parser { src: s, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != s.len() {
            return p.err("trailing input");
        }
        Ok(e)
    }
}

// ---------------------------------------------------------------------------
// constraints
// ---------------------------------------------------------------------------

/// Relation of a normal-form constraint: `expr >= 0`, `expr <= 0`, `expr = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Ge,
    Le,
    Eq,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Ge => ">=",
            Rel::Le => "<=",
            Rel::Eq => "=",
        }
    }

    /// Interval of admissible constraint-expression values.
    pub fn admissible(self) -> Interval {
        match self {
            Rel::Ge => Interval::new(0.0, f64::INFINITY),
            Rel::Le => Interval::new(f64::NEG_INFINITY, 0.0),
            Rel::Eq => Interval::point(0.0),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub expr: Expr,
    pub rel: Rel,
}

impl Constraint {
    pub fn ge0(expr: Expr) -> Constraint {
        Constraint { expr, rel: Rel::Ge }
    }

    pub fn le0(expr: Expr) -> Constraint {
        Constraint { expr, rel: Rel::Le }
    }

    pub fn eq0(expr: Expr) -> Constraint {
        Constraint { expr, rel: Rel::Eq }
    }

    /// Closed complement: `e >= 0` negates to `e <= 0` and vice versa. The
    /// overlap on `e = 0` is deliberate; both closed sides cover the split
    /// plane, which is sound for upper-bound claims. Equalities have no
    /// closed complement and panic.
    pub fn closed_negation(&self) -> Constraint {
        let rel = match self.rel {
            Rel::Ge => Rel::Le,
            Rel::Le => Rel::Ge,
            Rel::Eq => panic!("equality constraints have no closed complement"),
        };
        Constraint {
            expr: self.expr.clone(),
            rel,
        }
    }

    pub fn satisfied_at(&self, p: &Point, tol: f64) -> Result<bool, DomainError> {
        let v = eval_real(&self.expr, p)?;
        Ok(match self.rel {
            Rel::Ge => v >= -tol,
            Rel::Le => v <= tol,
            Rel::Eq => v.abs() <= tol,
        })
    }

    /// Signed violation: positive means the constraint is violated by that much.
    pub fn violation_at(&self, p: &Point) -> Result<f64, DomainError> {
        let v = eval_real(&self.expr, p)?;
        Ok(match self.rel {
            Rel::Ge => (-v).max(0.0),
            Rel::Le => v.max(0.0),
            Rel::Eq => v.abs(),
        })
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} 0)", self.rel.symbol(), self.expr)
    }
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Constraint {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Constraint, ParseError> {
        let s = s.trim();
        let inner = s
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or(ParseError {
                at: 0,
                msg: "constraint must be parenthesized".into(),
            })?;
        let (op, rest) = inner.trim_start().split_once(char::is_whitespace).ok_or(ParseError {
            at: 0,
            msg: "missing relation".into(),
        })?;
        let rel = match op {
            ">=" => Rel::Ge,
            "<=" => Rel::Le,
            "=" => Rel::Eq,
            _ => {
                return Err(ParseError {
                    at: 0,
                    msg: format!("unknown relation '{op}'"),
                })
            }
        };
        let rest = rest.trim_end();
        let rest = rest.strip_suffix('0').ok_or(ParseError {
            at: 0,
            msg: "constraint right-hand side must be 0".into(),
        })?;
        let expr: Expr = rest.trim().parse()?;
        Ok(Constraint { expr, rel })
    }
}

// ---------------------------------------------------------------------------
// point evaluation and gradients (tree-walking reference implementations)
// ---------------------------------------------------------------------------

/// Exact recursive evaluation in `f64`.
pub fn eval_real(e: &Expr, p: &Point) -> Result<f64, DomainError> {
    Ok(match e {
        Expr::Var(v) => p[v.index()],
        Expr::Const(s) => s.to_f64(),
        Expr::Sum(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += eval_real(t, p)?;
            }
            acc
        }
        Expr::Prod(fs) => {
            let mut acc = 1.0;
            for x in fs {
                acc *= eval_real(x, p)?;
            }
            acc
        }
        Expr::Neg(x) => -eval_real(x, p)?,
        Expr::Div(a, b) => {
            let d = eval_real(b, p)?;
            if d == 0.0 {
                return Err(DomainError::ZeroDenominator);
            }
            eval_real(a, p)? / d
        }
        Expr::PowInt(x, k) => eval_real(x, p)?.powi(*k as i32),
        Expr::Root(x, k) => {
            let v = eval_real(x, p)?;
            if v < 0.0 {
                return Err(DomainError::NegativeRadicand);
            }
            v.powf(1.0 / *k as f64)
        }
    })
}

/// Natural interval extension (strict: domain violations are errors).
pub fn eval_interval(e: &Expr, b: &Box10) -> Result<Interval, IntervalError> {
    Ok(match e {
        Expr::Var(v) => b.get(*v),
        Expr::Const(s) => s.interval(),
        Expr::Sum(ts) => {
            let mut acc = Interval::point(0.0);
            for t in ts {
                acc = acc.add(eval_interval(t, b)?);
            }
            acc
        }
        Expr::Prod(fs) => {
            let mut acc = Interval::point(1.0);
            for x in fs {
                acc = acc.mul(eval_interval(x, b)?);
            }
            acc
        }
        Expr::Neg(x) => eval_interval(x, b)?.neg(),
        Expr::Div(a, bb) => eval_interval(a, b)?.div(eval_interval(bb, b)?)?,
        Expr::PowInt(x, k) => eval_interval(x, b)?.pow_int(*k),
        Expr::Root(x, k) => eval_interval(x, b)?.root(*k)?,
    })
}

// ---------------------------------------------------------------------------
// compiled tape
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum Node {
    Var(u8),
    Const(u32),
    Sum { a0: u32, n: u32 },
    Prod { a0: u32, n: u32 },
    Neg(u32),
    Div(u32, u32),
    Pow(u32, u32),
    Root(u32, u32),
}

/// Maximum arity of n-ary nodes; the ten-variable domain never exceeds it.
const MAX_ARITY: usize = 16;

/// Linearized expression: node `i` only references nodes `< i`; the last
/// node is the root. Evaluation walks forward once, gradients walk backward
/// once. All scratch is caller-provided so tapes are shareable across
/// threads. N-ary nodes are limited to [`MAX_ARITY`] children, enforced at
/// compile time, which keeps the backward passes allocation-free.
pub struct Tape {
    nodes: Vec<Node>,
    args: Vec<u32>,
    consts: Vec<(Interval, f64)>,
    support: u16,
}

/// Scratch buffers for tape passes; reuse across calls to avoid allocation.
#[derive(Default)]
pub struct Workspace {
    val: Vec<Interval>,
    adj: Vec<Interval>,
    rval: Vec<f64>,
    radj: Vec<f64>,
    inc: Vec<Interval>,
}

impl Tape {
    pub fn compile(e: &Expr) -> Tape {
        let mut t = Tape {
            nodes: Vec::new(),
            args: Vec::new(),
            consts: Vec::new(),
            support: e.support(),
        };
        t.push(e);
        t
    }

    fn push(&mut self, e: &Expr) -> u32 {
        let node = match e {
            Expr::Var(v) => Node::Var(v.0),
            Expr::Const(s) => {
                self.consts.push((s.interval(), s.to_f64()));
                Node::Const(self.consts.len() as u32 - 1)
            }
            Expr::Sum(ts) => {
                assert!(ts.len() <= MAX_ARITY, "sum arity above tape limit");
                let ids: Vec<u32> = ts.iter().map(|t| self.push(t)).collect();
                let a0 = self.args.len() as u32;
                self.args.extend(ids);
                Node::Sum {
                    a0,
                    n: ts.len() as u32,
                }
            }
            Expr::Prod(fs) => {
                assert!(fs.len() <= MAX_ARITY, "product arity above tape limit");
                let ids: Vec<u32> = fs.iter().map(|t| self.push(t)).collect();
                let a0 = self.args.len() as u32;
                self.args.extend(ids);
                Node::Prod {
                    a0,
                    n: fs.len() as u32,
                }
            }
            Expr::Neg(x) => Node::Neg(self.push(x)),
            Expr::Div(a, b) => {
                let ia = self.push(a);
                let ib = self.push(b);
                Node::Div(ia, ib)
            }
            Expr::PowInt(x, k) => {
                let ix = self.push(x);
                Node::Pow(ix, *k)
            }
            Expr::Root(x, k) => {
                let ix = self.push(x);
                Node::Root(ix, *k)
            }
        };
        self.nodes.push(node);
        self.nodes.len() as u32 - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn support(&self) -> u16 {
        self.support
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.support & (1 << v.index()) != 0
    }

    pub fn eval_real(&self, p: &Point, ws: &mut Workspace) -> Result<f64, DomainError> {
        let vals = &mut ws.rval;
        vals.clear();
        vals.reserve(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::Var(i) => p[i as usize],
                Node::Const(c) => self.consts[c as usize].1,
                Node::Sum { a0, n } => {
                    let mut acc = 0.0;
                    for k in a0..a0 + n {
                        acc += vals[self.args[k as usize] as usize];
                    }
                    acc
                }
                Node::Prod { a0, n } => {
                    let mut acc = 1.0;
                    for k in a0..a0 + n {
                        acc *= vals[self.args[k as usize] as usize];
                    }
                    acc
                }
                Node::Neg(x) => -vals[x as usize],
                Node::Div(a, b) => {
                    let d = vals[b as usize];
                    if d == 0.0 {
                        return Err(DomainError::ZeroDenominator);
                    }
                    vals[a as usize] / d
                }
                Node::Pow(x, k) => vals[x as usize].powi(k as i32),
                Node::Root(x, k) => {
                    let v = vals[x as usize];
                    if v < 0.0 {
                        return Err(DomainError::NegativeRadicand);
                    }
                    v.powf(1.0 / k as f64)
                }
            };
            vals.push(v);
        }
        Ok(*vals.last().unwrap())
    }

    /// Reverse-mode gradient at a point. Exact partial derivatives of the
    /// tree, accumulated backward.
    pub fn gradient(&self, p: &Point, ws: &mut Workspace) -> Result<(f64, [f64; DIM]), DomainError> {
        let value = self.eval_real(p, ws)?;
        let n = self.nodes.len();
        ws.radj.clear();
        ws.radj.resize(n, 0.0);
        ws.radj[n - 1] = 1.0;
        let mut grad = [0.0; DIM];
        for i in (0..n).rev() {
            let a = ws.radj[i];
            if a == 0.0 {
                continue;
            }
            match self.nodes[i] {
                Node::Var(v) => grad[v as usize] += a,
                Node::Const(_) => {}
                Node::Sum { a0, n } => {
                    for k in a0..a0 + n {
                        ws.radj[self.args[k as usize] as usize] += a;
                    }
                }
                Node::Prod { a0, n } => {
                    // d/dx_j = a * prod_{k != j} x_k, via prefix/suffix products
                    let ids = &self.args[a0 as usize..(a0 + n) as usize];
                    let m = ids.len();
                    let mut suffix = [1.0f64; MAX_ARITY + 1];
                    for j in (0..m).rev() {
                        suffix[j] = suffix[j + 1] * ws.rval[ids[j] as usize];
                    }
                    let mut prefix = 1.0;
                    for j in 0..m {
                        ws.radj[ids[j] as usize] += a * prefix * suffix[j + 1];
                        prefix *= ws.rval[ids[j] as usize];
                    }
                }
                Node::Neg(x) => ws.radj[x as usize] -= a,
                Node::Div(x, y) => {
                    let xv = ws.rval[x as usize];
                    let yv = ws.rval[y as usize];
                    ws.radj[x as usize] += a / yv;
                    ws.radj[y as usize] -= a * xv / (yv * yv);
                }
                Node::Pow(x, k) => {
                    let xv = ws.rval[x as usize];
                    ws.radj[x as usize] += a * k as f64 * xv.powi(k as i32 - 1);
                }
                Node::Root(x, k) => {
                    let xv = ws.rval[x as usize];
                    let kr = 1.0 / k as f64;
                    // derivative of x^(1/k); undefined at zero radicand
                    if xv == 0.0 {
                        return Err(DomainError::NegativeRadicand);
                    }
                    ws.radj[x as usize] += a * kr * xv.powf(kr - 1.0);
                }
            }
        }
        Ok((value, grad))
    }

    /// Total (never-failing) forward interval sweep: division by a
    /// zero-straddling interval yields the entire line, roots clamp the
    /// radicand at zero. Sound for contraction and pruning; use
    /// [`Tape::eval_interval`] when domain violations must surface.
    fn forward_total(&self, b: &Box10, vals: &mut Vec<Interval>) {
        vals.clear();
        vals.reserve(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::Var(i) => b.bounds()[i as usize],
                Node::Const(c) => self.consts[c as usize].0,
                Node::Sum { a0, n } => {
                    let mut acc = Interval::point(0.0);
                    for k in a0..a0 + n {
                        acc = acc.add(vals[self.args[k as usize] as usize]);
                    }
                    acc
                }
                Node::Prod { a0, n } => {
                    let mut acc = Interval::point(1.0);
                    for k in a0..a0 + n {
                        acc = acc.mul(vals[self.args[k as usize] as usize]);
                    }
                    acc
                }
                Node::Neg(x) => vals[x as usize].neg(),
                Node::Div(a, b) => vals[a as usize]
                    .div(vals[b as usize])
                    .unwrap_or(Interval::ENTIRE),
                Node::Pow(x, k) => vals[x as usize].pow_int(k),
                Node::Root(x, k) => {
                    let v = vals[x as usize];
                    let clamped = v
                        .intersect(Interval::new(0.0, f64::INFINITY))
                        .unwrap_or(Interval::point(0.0));
                    clamped.root(k).unwrap()
                }
            };
            vals.push(v);
        }
    }

    /// Natural interval extension on the box (strict errors).
    pub fn eval_interval(&self, b: &Box10, ws: &mut Workspace) -> Result<Interval, IntervalError> {
        let vals = &mut ws.val;
        vals.clear();
        vals.reserve(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::Var(i) => b.bounds()[i as usize],
                Node::Const(c) => self.consts[c as usize].0,
                Node::Sum { a0, n } => {
                    let mut acc = Interval::point(0.0);
                    for k in a0..a0 + n {
                        acc = acc.add(vals[self.args[k as usize] as usize]);
                    }
                    acc
                }
                Node::Prod { a0, n } => {
                    let mut acc = Interval::point(1.0);
                    for k in a0..a0 + n {
                        acc = acc.mul(vals[self.args[k as usize] as usize]);
                    }
                    acc
                }
                Node::Neg(x) => vals[x as usize].neg(),
                Node::Div(a, b) => vals[a as usize].div(vals[b as usize])?,
                Node::Pow(x, k) => vals[x as usize].pow_int(k),
                Node::Root(x, k) => vals[x as usize].root(k)?,
            };
            vals.push(v);
        }
        Ok(*vals.last().unwrap())
    }

    /// Interval gradient over the box (reverse mode with interval adjoints),
    /// used for mean-value forms. Returns enclosures of each partial
    /// derivative over the whole box. Total semantics: unbounded adjoints
    /// appear where the natural extension would fail.
    pub fn interval_gradient(&self, b: &Box10, ws: &mut Workspace) -> (Interval, [Interval; DIM]) {
        self.forward_total(b, &mut ws.val);
        let n = self.nodes.len();
        ws.adj.clear();
        ws.adj.resize(n, Interval::point(0.0));
        ws.adj[n - 1] = Interval::point(1.0);
        let mut grad = [Interval::point(0.0); DIM];
        for i in (0..n).rev() {
            let a = ws.adj[i];
            if a == Interval::point(0.0) {
                continue;
            }
            match self.nodes[i] {
                Node::Var(v) => grad[v as usize] = grad[v as usize].add(a),
                Node::Const(_) => {}
                Node::Sum { a0, n } => {
                    for k in a0..a0 + n {
                        let id = self.args[k as usize] as usize;
                        ws.adj[id] = ws.adj[id].add(a);
                    }
                }
                Node::Prod { a0, n } => {
                    let ids = &self.args[a0 as usize..(a0 + n) as usize];
                    let m = ids.len();
                    let mut suffix = [Interval::point(1.0); MAX_ARITY + 1];
                    for j in (0..m).rev() {
                        suffix[j] = suffix[j + 1].mul(ws.val[ids[j] as usize]);
                    }
                    let mut prefix = Interval::point(1.0);
                    for j in 0..m {
                        let id = ids[j] as usize;
                        ws.adj[id] = ws.adj[id].add(a.mul(prefix).mul(suffix[j + 1]));
                        prefix = prefix.mul(ws.val[id]);
                    }
                }
                Node::Neg(x) => {
                    let id = x as usize;
                    ws.adj[id] = ws.adj[id].add(a.neg());
                }
                Node::Div(x, y) => {
                    let xv = ws.val[x as usize];
                    let yv = ws.val[y as usize];
                    let dx = a.div(yv).unwrap_or(Interval::ENTIRE);
                    let dy = a
                        .mul(xv)
                        .div(yv.pow_int(2))
                        .unwrap_or(Interval::ENTIRE)
                        .neg();
                    ws.adj[x as usize] = ws.adj[x as usize].add(dx);
                    ws.adj[y as usize] = ws.adj[y as usize].add(dy);
                }
                Node::Pow(x, k) => {
                    let xv = ws.val[x as usize];
                    let d = Interval::point(k as f64).mul(xv.pow_int(k - 1));
                    ws.adj[x as usize] = ws.adj[x as usize].add(a.mul(d));
                }
                Node::Root(x, k) => {
                    let xv = ws.val[x as usize]
                        .intersect(Interval::new(0.0, f64::INFINITY))
                        .unwrap_or(Interval::point(0.0));
                    // d/dx x^(1/k) = (1/k) / (x^(1/k))^(k-1)
                    let rk = xv.root(k).unwrap();
                    let denom = Interval::point(k as f64).mul(rk.pow_int(k - 1));
                    let d = a.div(denom).unwrap_or(Interval::ENTIRE);
                    ws.adj[x as usize] = ws.adj[x as usize].add(d);
                }
            }
        }
        (*ws.val.last().unwrap(), grad)
    }

    /// Forward-backward contraction (HC4 revise) of `box` under the
    /// constraint `expr rel 0`. Returns `false` when the box is proven to
    /// contain no satisfying point; otherwise narrows `b` in place. Never
    /// removes a satisfying point.
    pub fn contract(&self, rel: Rel, b: &mut Box10, ws: &mut Workspace) -> bool {
        self.forward_total(b, &mut ws.val);
        let n = self.nodes.len();
        ws.inc.clear();
        ws.inc.extend_from_slice(&ws.val);
        let root = n - 1;
        match ws.inc[root].intersect(rel.admissible()) {
            Some(iv) => ws.inc[root] = iv,
            None => return false,
        }
        for i in (0..n).rev() {
            let out = ws.inc[i];
            match self.nodes[i] {
                Node::Var(v) => {
                    match b.get(Var(v)).intersect(out) {
                        Some(iv) => b.set(Var(v), iv),
                        None => return false,
                    };
                }
                Node::Const(_) => {
                    // out already intersected with the constant's interval
                    // during the narrowing step of the parent; verify here
                    if ws.val[i].intersect(out).is_none() {
                        return false;
                    }
                }
                Node::Sum { a0, n: cnt } => {
                    let ids = &self.args[a0 as usize..(a0 + cnt) as usize];
                    let m = ids.len();
                    // prefix[j] = sum of vals of ids[0..j], suffix[j] = sum of ids[j..]
                    let mut suffix = [Interval::point(0.0); MAX_ARITY + 1];
                    for j in (0..m).rev() {
                        suffix[j] = suffix[j + 1].add(ws.val[ids[j] as usize]);
                    }
                    let mut prefix = Interval::point(0.0);
                    for j in 0..m {
                        let id = ids[j] as usize;
                        let others = prefix.add(suffix[j + 1]);
                        match ws.inc[id].intersect(out.sub(others)) {
                            Some(iv) => ws.inc[id] = iv,
                            None => return false,
                        }
                        prefix = prefix.add(ws.val[id]);
                    }
                }
                Node::Prod { a0, n: cnt } => {
                    let ids = &self.args[a0 as usize..(a0 + cnt) as usize];
                    let m = ids.len();
                    let mut suffix = [Interval::point(1.0); MAX_ARITY + 1];
                    for j in (0..m).rev() {
                        suffix[j] = suffix[j + 1].mul(ws.val[ids[j] as usize]);
                    }
                    let mut prefix = Interval::point(1.0);
                    for j in 0..m {
                        let id = ids[j] as usize;
                        let others = prefix.mul(suffix[j + 1]);
                        if let Ok(q) = out.div(others) {
                            match ws.inc[id].intersect(q) {
                                Some(iv) => ws.inc[id] = iv,
                                None => return false,
                            }
                        }
                        prefix = prefix.mul(ws.val[id]);
                    }
                }
                Node::Neg(x) => {
                    let id = x as usize;
                    match ws.inc[id].intersect(out.neg()) {
                        Some(iv) => ws.inc[id] = iv,
                        None => return false,
                    }
                }
                Node::Div(x, y) => {
                    let xi = x as usize;
                    let yi = y as usize;
                    // x = out * y
                    match ws.inc[xi].intersect(out.mul(ws.val[yi])) {
                        Some(iv) => ws.inc[xi] = iv,
                        None => return false,
                    }
                    // y = x / out when 0 not in out
                    if let Ok(q) = ws.inc[xi].div(out) {
                        match ws.inc[yi].intersect(q) {
                            Some(iv) => ws.inc[yi] = iv,
                            None => return false,
                        }
                    }
                }
                Node::Pow(x, k) => {
                    let id = x as usize;
                    match out.pow_int_preimage(k, ws.inc[id]) {
                        Some(iv) => ws.inc[id] = iv,
                        None => return false,
                    }
                }
                Node::Root(x, k) => {
                    let id = x as usize;
                    let nonneg = out
                        .intersect(Interval::new(0.0, f64::INFINITY))
                        .unwrap_or(Interval::point(0.0));
                    match ws.inc[id].intersect(nonneg.pow_int(k)) {
                        Some(iv) => ws.inc[id] = iv,
                        None => return false,
                    }
                }
            }
        }
        true
    }
}

/// Iterate HC4 over a family of constraints until a sweep narrows no
/// dimension by more than `rel_tol` of its width (or `max_passes` sweeps).
/// Returns `None` when some constraint proves the box empty.
pub fn contract_fixpoint(
    tapes: &[(Tape, Rel)],
    b: &mut Box10,
    ws: &mut Workspace,
    rel_tol: f64,
    max_passes: usize,
) -> Option<()> {
    for _ in 0..max_passes {
        let before = b.clone();
        for (tape, rel) in tapes {
            if !tape.contract(*rel, b, ws) {
                return None;
            }
        }
        let mut progressed = false;
        for i in 0..DIM {
            let w0 = before.bounds()[i].width();
            let w1 = b.bounds()[i].width();
            if w0.is_finite() {
                if w0 - w1 > rel_tol * w0.max(1e-300) {
                    progressed = true;
                }
            } else if w1.is_finite() {
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(vals: [f64; DIM]) -> Point {
        vals
    }

    fn strong2(x: Var, y: Var) -> Expr {
        Expr::int(4)
            .mul(Expr::var(x))
            .sub(Expr::int(2).mul(Expr::var(x).pow(2)).div(Expr::var(y)))
    }

    #[test]
    fn display_matches_prefix_form() {
        let e = strong2(Var(0), Var(1));
        assert_eq!(e.to_string(), "(- (* 4 A) (/ (* 2 (^ A 2)) B))");
    }

    #[test]
    fn parse_round_trip() {
        let texts = [
            "(- (* 4 A) (/ (* 2 (^ A 2)) B))",
            "(+ A B (- (/ (^ C 3) (* D E F))) 1/2)",
            "(* 6 (root (* A B C D E F) 6))",
            "(- 0.46873)",
            "(>= (- (* 2 I) J) 0)",
        ];
        for t in &texts[..4] {
            let e: Expr = t.parse().unwrap();
            assert_eq!(&e.to_string(), t);
        }
        let c: Constraint = texts[4].parse().unwrap();
        assert_eq!(c.to_string(), texts[4]);
    }

    #[test]
    fn eval_real_strong_term() {
        let ones = pt([1.0; DIM]);
        let e = strong2(Var(8), Var(9));
        assert_eq!(eval_real(&e, &ones).unwrap(), 2.0);
        let psi1 = Expr::var(Var(0)).pow(3).div(Expr::prod(vec![
            Expr::var(Var(1)),
            Expr::var(Var(2)),
            Expr::var(Var(3)),
        ]));
        assert_eq!(eval_real(&psi1, &ones).unwrap(), 1.0);
    }

    #[test]
    fn eval_real_domain_errors() {
        let mut p = pt([1.0; DIM]);
        p[1] = 0.0;
        let e = Expr::var(Var(0)).div(Expr::var(Var(1)));
        assert_eq!(eval_real(&e, &p), Err(DomainError::ZeroDenominator));
        let mut q = pt([1.0; DIM]);
        q[0] = -1.0;
        let r = Expr::var(Var(0)).root(2);
        assert_eq!(eval_real(&r, &q), Err(DomainError::NegativeRadicand));
    }

    #[test]
    fn interval_extension_basics() {
        let mut b = Box10::uniform(Interval::point(1.0));
        b.set(Var(0), Interval::new(1.0, 2.0));
        let e = Expr::var(Var(0));
        assert_eq!(eval_interval(&e, &b).unwrap(), Interval::new(1.0, 2.0));

        let b1 = Box10::uniform(Interval::point(1.0));
        let t = strong2(Var(0), Var(1));
        assert_eq!(eval_interval(&t, &b1).unwrap(), Interval::point(2.0));
    }

    #[test]
    fn tape_matches_tree_eval() {
        let e = Expr::sum(vec![
            strong2(Var(0), Var(1)),
            Expr::var(Var(2)),
            Expr::int(3)
                .mul(Expr::var(Var(4)))
                .div(Expr::var(Var(5)).pow(2)),
            Expr::int(2).mul(Expr::prod(vec![Expr::var(Var(6)), Expr::var(Var(7))]).root(2)),
        ]);
        let tape = Tape::compile(&e);
        let mut ws = Workspace::default();
        let p = pt([1.3, 1.1, 0.9, 1.0, 1.7, 1.2, 0.8, 0.95, 1.0, 1.0]);
        let tree = eval_real(&e, &p).unwrap();
        let taped = tape.eval_real(&p, &mut ws).unwrap();
        assert!((tree - taped).abs() < 1e-14);

        let mut b = Box10::uniform(Interval::new(0.8, 1.4));
        b.set(Var(5), Interval::new(1.0, 1.2));
        let ti = tape.eval_interval(&b, &mut ws).unwrap();
        let ei = eval_interval(&e, &b).unwrap();
        assert_eq!(ti, ei);
    }

    #[test]
    fn gradient_linear_bound() {
        // A+B+...+I+2J has gradient (1,...,1,2)
        let mut terms: Vec<Expr> = Var::all().take(9).map(Expr::var).collect();
        terms.push(Expr::int(2).mul(Expr::var(Var(9))));
        let tape = Tape::compile(&Expr::sum(terms));
        let mut ws = Workspace::default();
        let (_, g) = tape.gradient(&pt([1.0; DIM]), &mut ws).unwrap();
        assert_eq!(&g[..9], &[1.0; 9]);
        assert_eq!(g[9], 2.0);
    }

    #[test]
    fn gradient_stationary_strong_term() {
        // d/dI of 4I - 2I^2/J at I=J=1 is 0
        let tape = Tape::compile(&strong2(Var(8), Var(9)));
        let mut ws = Workspace::default();
        let (_, g) = tape.gradient(&pt([1.0; DIM]), &mut ws).unwrap();
        assert_eq!(g[8], 0.0);
        assert_eq!(g[9], 2.0);
    }

    #[test]
    fn contract_product_equality() {
        // A*B = 1 with A in [2,4], B in [0.1,10] narrows B to [1/4, 1/2]
        let e = Expr::prod(vec![Expr::var(Var(0)), Expr::var(Var(1))]).sub(Expr::int(1));
        let tape = Tape::compile(&e);
        let mut ws = Workspace::default();
        let mut b = Box10::uniform(Interval::point(1.0));
        b.set(Var(0), Interval::new(2.0, 4.0));
        b.set(Var(1), Interval::new(0.1, 10.0));
        assert!(tape.contract(Rel::Eq, &mut b, &mut ws));
        let bi = b.get(Var(1));
        assert!(bi.lo() <= 0.25 && bi.lo() >= 0.25 - 1e-12);
        assert!(bi.hi() >= 0.5 && bi.hi() <= 0.5 + 1e-12);
    }

    #[test]
    fn contract_detects_empty() {
        // A >= 1 on A in [0, 0.5] is infeasible
        let e = Expr::var(Var(0)).sub(Expr::int(1));
        let tape = Tape::compile(&e);
        let mut ws = Workspace::default();
        let mut b = Box10::uniform(Interval::point(1.0));
        b.set(Var(0), Interval::new(0.0, 0.5));
        assert!(!tape.contract(Rel::Ge, &mut b, &mut ws));
    }

    #[test]
    fn normalization_and_struct_eq() {
        let a = Expr::sum(vec![
            Expr::sum(vec![Expr::var(Var(0)), Expr::var(Var(1))]),
            Expr::int(0),
            Expr::var(Var(2)),
        ]);
        let b = Expr::sum(vec![Expr::var(Var(0)), Expr::var(Var(1)), Expr::var(Var(2))]);
        assert!(a.struct_eq(&b));

        let c = Expr::prod(vec![Expr::int(2), Expr::prod(vec![Expr::ratio(1, 2), Expr::var(Var(0))])]);
        assert!(c.struct_eq(&Expr::var(Var(0))));
        assert!(!c.struct_eq(&Expr::var(Var(1))));
    }

    #[test]
    fn support_mask() {
        let e = strong2(Var(2), Var(3));
        assert_eq!(e.support(), 0b1100);
        let t = Tape::compile(&e);
        assert!(t.depends_on(Var(2)) && t.depends_on(Var(3)));
        assert!(!t.depends_on(Var(0)));
    }
}
