//! Interval arithmetic with outward rounding, plus the 10-dimensional box.
//!
//! Endpoints are plain `f64`. Instead of toggling the FPU rounding mode we
//! widen with `next_up`/`next_down` after any endpoint operation that may
//! have rounded; exactness is detected with error-free transformations
//! (two-sum and fma residuals) so that exact arithmetic keeps exact
//! endpoints. Every operation guarantees the containment invariant: the
//! result interval contains the exact real result for every point selection
//! from the operands.

use std::fmt;

use thiserror::Error;

/// Number of box dimensions: the squared successive minima `A..J`.
pub const DIM: usize = 10;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum IntervalError {
    #[error("divisor interval contains zero")]
    DivisorContainsZero,
    #[error("radicand interval has negative lower bound")]
    NegativeRadicand,
    #[error("split point outside the open interior of the interval")]
    SplitOutOfRange,
}

/// Variable index into a [`Box10`], named `A..J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u8);

pub const VAR_NAMES: [&str; DIM] = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"];

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        VAR_NAMES[self.index()]
    }

    pub fn from_name(name: &str) -> Option<Var> {
        VAR_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| Var(i as u8))
    }

    pub fn all() -> impl Iterator<Item = Var> {
        (0..DIM as u8).map(Var)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// ---------------------------------------------------------------------------
// directed endpoint arithmetic
// ---------------------------------------------------------------------------

#[inline]
fn add_residual(a: f64, b: f64, s: f64) -> f64 {
    // two-sum: a + b = s + err exactly (no overflow)
    let bp = s - a;
    (a - (s - bp)) + (b - bp)
}

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_infinite() {
        return if s > 0.0 { f64::INFINITY } else { -f64::MAX };
    }
    if add_residual(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_infinite() {
        return if s > 0.0 { f64::MAX } else { f64::NEG_INFINITY };
    }
    if add_residual(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

#[inline]
fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

// fma residuals are exact in the normal range; near the subnormal boundary
// the residual itself may underflow, so widen unconditionally there.
#[inline]
fn mul_exactness_unreliable(p: f64) -> bool {
    p != 0.0 && p.abs() < 1e-290
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p.is_infinite() {
        return if p > 0.0 { f64::INFINITY } else { -f64::MAX };
    }
    if p == 0.0 {
        return if a != 0.0 && b != 0.0 && (a > 0.0) != (b > 0.0) {
            0.0
        } else if a == 0.0 || b == 0.0 {
            0.0
        } else {
            // true product positive but underflowed
            f64::MIN_POSITIVE
        };
    }
    if mul_exactness_unreliable(p) {
        return p.next_up();
    }
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

#[inline]
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p.is_infinite() {
        return if p > 0.0 { f64::MAX } else { f64::NEG_INFINITY };
    }
    if p == 0.0 {
        return if a != 0.0 && b != 0.0 && (a > 0.0) != (b > 0.0) {
            -f64::MIN_POSITIVE
        } else {
            0.0
        };
    }
    if mul_exactness_unreliable(p) {
        return p.next_down();
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

#[inline]
fn div_up(a: f64, b: f64) -> f64 {
    debug_assert!(b != 0.0);
    let q = a / b;
    if q.is_infinite() {
        return if q > 0.0 { f64::INFINITY } else { -f64::MAX };
    }
    if q == 0.0 {
        return if a != 0.0 && (a > 0.0) == (b > 0.0) {
            f64::MIN_POSITIVE
        } else {
            0.0
        };
    }
    if mul_exactness_unreliable(q) || mul_exactness_unreliable(a) {
        return q.next_up();
    }
    // a = q*b + r; true quotient = q + r/b
    let r = q.mul_add(b, -a);
    // true - q = -r/b
    if (r != 0.0) && ((r < 0.0) == (b > 0.0)) {
        q.next_up()
    } else {
        q
    }
}

#[inline]
fn div_down(a: f64, b: f64) -> f64 {
    debug_assert!(b != 0.0);
    let q = a / b;
    if q.is_infinite() {
        return if q > 0.0 { f64::MAX } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if a != 0.0 && (a > 0.0) != (b > 0.0) {
            -f64::MIN_POSITIVE
        } else {
            0.0
        };
    }
    if mul_exactness_unreliable(q) || mul_exactness_unreliable(a) {
        return q.next_down();
    }
    let r = q.mul_add(b, -a);
    if (r != 0.0) && ((r > 0.0) == (b > 0.0)) {
        q.next_down()
    } else {
        q
    }
}

/// x^k rounded up, for x >= 0, k >= 1.
fn pow_up_nonneg(x: f64, k: u32) -> f64 {
    let mut acc = x;
    for _ in 1..k {
        acc = mul_up(acc, x);
    }
    acc
}

/// x^k rounded down, for x >= 0, k >= 1.
fn pow_down_nonneg(x: f64, k: u32) -> f64 {
    let mut acc = x;
    for _ in 1..k {
        acc = mul_down(acc, x);
    }
    acc
}

/// Upper bound on x^(1/k) for x >= 0: verified by bracketing, independent of
/// libm accuracy.
fn root_up(x: f64, k: u32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    let mut u = x.powf(1.0 / k as f64);
    if !u.is_finite() || u <= 0.0 {
        u = f64::MIN_POSITIVE;
    }
    // ensure u^k >= x using a downward-rounded power
    let mut guard = 0;
    while pow_down_nonneg(u, k) < x {
        u = u.next_up();
        guard += 1;
        if guard > 64 {
            u *= 1.0 + 1e-12;
            guard = 0;
        }
    }
    u
}

/// Lower bound on x^(1/k) for x >= 0.
fn root_down(x: f64, k: u32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::MAX;
    }
    let mut l = x.powf(1.0 / k as f64);
    if !l.is_finite() {
        l = f64::MAX;
    }
    if l < 0.0 {
        return 0.0;
    }
    let mut guard = 0;
    while pow_up_nonneg(l, k) > x {
        l = l.next_down();
        if l < 0.0 {
            return 0.0;
        }
        guard += 1;
        if guard > 64 {
            l *= 1.0 - 1e-12;
            guard = 0;
        }
    }
    l
}

// ---------------------------------------------------------------------------
// Interval
// ---------------------------------------------------------------------------

/// A closed real interval `[lo, hi]`, possibly unbounded on either side.
/// Invariant: `lo <= hi` and neither endpoint is NaN.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Interval {
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    #[inline]
    pub fn new(lo: f64, hi: f64) -> Interval {
        debug_assert!(!lo.is_nan() && !hi.is_nan());
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// Degenerate interval holding one exact `f64`.
    #[inline]
    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    /// Interval for a decimal literal from the source text: the parsed `f64`
    /// widened by one ulp on both sides, since the literal is in general not
    /// representable.
    pub fn from_decimal(x: f64) -> Interval {
        Interval::new(x.next_down(), x.next_up())
    }

    /// Exact rational constant; widened only if the division rounds.
    pub fn from_ratio(num: i64, den: i64) -> Interval {
        assert!(den != 0);
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        Interval::new(div_down(num as f64, den as f64), div_up(num as f64, den as f64))
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn mid(self) -> f64 {
        if self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY {
            return 0.0;
        }
        if self.lo == f64::NEG_INFINITY {
            return self.hi - 1.0;
        }
        if self.hi == f64::INFINITY {
            return self.lo + 1.0;
        }
        let m = 0.5 * (self.lo + self.hi);
        if m.is_finite() {
            m.clamp(self.lo, self.hi)
        } else {
            0.5 * self.lo + 0.5 * self.hi
        }
    }

    #[inline]
    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_interval(self, other: Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    #[inline]
    pub fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Some(Interval::new(lo, hi))
        } else {
            None
        }
    }

    #[inline]
    pub fn hull(self, other: Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    #[inline]
    pub fn add(self, o: Interval) -> Interval {
        Interval::new(add_down(self.lo, o.lo), add_up(self.hi, o.hi))
    }

    #[inline]
    pub fn sub(self, o: Interval) -> Interval {
        Interval::new(sub_down(self.lo, o.hi), sub_up(self.hi, o.lo))
    }

    #[inline]
    pub fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }

    pub fn mul(self, o: Interval) -> Interval {
        let (a, b) = (self.lo, self.hi);
        let (c, d) = (o.lo, o.hi);
        // zero absorbs infinities: [0,0] * anything = [0,0]
        if (a == 0.0 && b == 0.0) || (c == 0.0 && d == 0.0) {
            return Interval::point(0.0);
        }
        let lo;
        let hi;
        if a >= 0.0 {
            if c >= 0.0 {
                lo = mul_down(a, c);
                hi = mul_up(b, d);
            } else if d <= 0.0 {
                lo = mul_down(b, c);
                hi = mul_up(a, d);
            } else {
                lo = mul_down(b, c);
                hi = mul_up(b, d);
            }
        } else if b <= 0.0 {
            if c >= 0.0 {
                lo = mul_down(a, d);
                hi = mul_up(b, c);
            } else if d <= 0.0 {
                lo = mul_down(b, d);
                hi = mul_up(a, c);
            } else {
                lo = mul_down(a, d);
                hi = mul_up(a, c);
            }
        } else if c >= 0.0 {
            lo = mul_down(a, d);
            hi = mul_up(b, d);
        } else if d <= 0.0 {
            lo = mul_down(b, c);
            hi = mul_up(a, c);
        } else {
            lo = mul_down(a, d).min(mul_down(b, c));
            hi = mul_up(a, c).max(mul_up(b, d));
        }
        Interval::new(lo, hi)
    }

    pub fn div(self, o: Interval) -> Result<Interval, IntervalError> {
        if o.contains(0.0) {
            return Err(IntervalError::DivisorContainsZero);
        }
        let (a, b) = (self.lo, self.hi);
        let (c, d) = (o.lo, o.hi);
        let (lo, hi) = if c > 0.0 {
            if a >= 0.0 {
                (div_down(a, d), div_up(b, c))
            } else if b <= 0.0 {
                (div_down(a, c), div_up(b, d))
            } else {
                (div_down(a, c), div_up(b, c))
            }
        } else {
            // d < 0
            if a >= 0.0 {
                (div_down(b, d), div_up(a, c))
            } else if b <= 0.0 {
                (div_down(b, c), div_up(a, d))
            } else {
                (div_down(b, d), div_up(a, d))
            }
        };
        Ok(Interval::new(lo, hi))
    }

    /// Integer power, k >= 1. Even powers of sign-straddling intervals are
    /// tightened to a zero lower bound.
    pub fn pow_int(self, k: u32) -> Interval {
        assert!(k >= 1);
        if k == 1 {
            return self;
        }
        let (a, b) = (self.lo, self.hi);
        if k % 2 == 1 {
            let lo = if a >= 0.0 {
                pow_down_nonneg(a, k)
            } else {
                -pow_up_nonneg(-a, k)
            };
            let hi = if b >= 0.0 {
                pow_up_nonneg(b, k)
            } else {
                -pow_down_nonneg(-b, k)
            };
            Interval::new(lo, hi)
        } else if a >= 0.0 {
            Interval::new(pow_down_nonneg(a, k), pow_up_nonneg(b, k))
        } else if b <= 0.0 {
            Interval::new(pow_down_nonneg(b.abs(), k), pow_up_nonneg(a.abs(), k))
        } else {
            Interval::new(0.0, pow_up_nonneg(a.abs().max(b.abs()), k))
        }
    }

    /// k-th root, k >= 1, requires a nonnegative lower endpoint.
    pub fn root(self, k: u32) -> Result<Interval, IntervalError> {
        assert!(k >= 1);
        if self.lo < 0.0 {
            return Err(IntervalError::NegativeRadicand);
        }
        if k == 1 {
            return Ok(self);
        }
        Ok(Interval::new(root_down(self.lo, k), root_up(self.hi, k)))
    }

    /// Preimage hull of `self` under x^k intersected with `domain`
    /// (backward projection used by the contractor).
    pub fn pow_int_preimage(self, k: u32, domain: Interval) -> Option<Interval> {
        if k == 1 {
            return domain.intersect(self);
        }
        let img = self.intersect(if k % 2 == 0 {
            Interval::new(0.0, f64::INFINITY)
        } else {
            Interval::ENTIRE
        })?;
        if k % 2 == 1 {
            let lo = if img.lo >= 0.0 {
                root_down(img.lo, k)
            } else {
                -root_up(-img.lo, k)
            };
            let hi = if img.hi >= 0.0 {
                root_up(img.hi, k)
            } else {
                -root_down(-img.hi, k)
            };
            domain.intersect(Interval::new(lo, hi))
        } else {
            let r = Interval::new(root_down(img.lo.max(0.0), k), root_up(img.hi, k));
            // positive and negative branches; hull those that meet the domain
            let pos = domain.intersect(r);
            let negr = r.neg();
            let neg = domain.intersect(negr);
            match (pos, neg) {
                (Some(p), Some(n)) => Some(p.hull(n)),
                (Some(p), None) => Some(p),
                (None, Some(n)) => Some(n),
                (None, None) => None,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Box10
// ---------------------------------------------------------------------------

/// Axis-aligned box over the ten variables `A..J`.
#[derive(Clone, PartialEq)]
pub struct Box10 {
    bounds: [Interval; DIM],
}

impl fmt::Debug for Box10 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_map();
        for v in Var::all() {
            d.entry(&v.name(), &self.bounds[v.index()]);
        }
        d.finish()
    }
}

impl Box10 {
    pub fn new(bounds: [Interval; DIM]) -> Box10 {
        Box10 { bounds }
    }

    pub fn uniform(iv: Interval) -> Box10 {
        Box10 { bounds: [iv; DIM] }
    }

    #[inline]
    pub fn get(&self, v: Var) -> Interval {
        self.bounds[v.index()]
    }

    #[inline]
    pub fn set(&mut self, v: Var, iv: Interval) {
        self.bounds[v.index()] = iv;
    }

    pub fn bounds(&self) -> &[Interval; DIM] {
        &self.bounds
    }

    pub fn midpoint(&self) -> [f64; DIM] {
        std::array::from_fn(|i| self.bounds[i].mid())
    }

    pub fn contains_point(&self, p: &[f64; DIM]) -> bool {
        (0..DIM).all(|i| self.bounds[i].contains(p[i]))
    }

    pub fn contains_box(&self, other: &Box10) -> bool {
        (0..DIM).all(|i| self.bounds[i].contains_interval(other.bounds[i]))
    }

    pub fn max_width(&self) -> f64 {
        self.bounds.iter().map(|b| b.width()).fold(0.0, f64::max)
    }

    /// Split at `at` in dimension `dim`; children cover the parent exactly
    /// and overlap only on the split plane.
    pub fn split(&self, dim: Var, at: f64) -> Result<(Box10, Box10), IntervalError> {
        let iv = self.get(dim);
        if !(iv.lo() < at && at < iv.hi()) {
            return Err(IntervalError::SplitOutOfRange);
        }
        let mut left = self.clone();
        let mut right = self.clone();
        left.set(dim, Interval::new(iv.lo(), at));
        right.set(dim, Interval::new(at, iv.hi()));
        Ok((left, right))
    }
}
