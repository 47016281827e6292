//! Outward-rounded interval arithmetic on MPFR floats.
//!
//! Every operation here preserves the containment invariant: if the true
//! real value of an expression lies in the input intervals, it lies in the
//! output interval. Lower endpoints are always rounded toward -inf and
//! upper endpoints toward +inf, so a `lo` may be quoted as a certified
//! lower bound and a `hi` as a certified upper bound.

use rug::float::{Constant, Round};
use rug::ops::{AssignRound, Pow};
use rug::{Float, Integer, Rational};
use std::fmt;

use crate::error::{Error, Result};

/// Endpoint precision below which MPFR results stop being useful here.
pub const MIN_PRECISION: u32 = 32;
/// Hard ceiling for automatic precision escalation.
pub const MAX_PRECISION: u32 = 4096;
/// Working precision when nothing else is requested.
pub const DEFAULT_PRECISION: u32 = 128;

/// A closed interval `[lo, hi]` with finite MPFR endpoints of equal precision.
#[derive(Clone, Debug)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

/// Outcome of an interval comparison `a ? b`.
///
/// `CertainlyLt` means every point of `a` is below every point of `b`;
/// `CertainlyGe` means every point of `a` is at or above every point of `b`;
/// overlapping intervals are `Undecided`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CertainlyLt,
    CertainlyGe,
    Undecided,
}

fn fmin(a: Float, b: Float) -> Float {
    if b < a {
        b
    } else {
        a
    }
}

fn fmax(a: Float, b: Float) -> Float {
    if b > a {
        b
    } else {
        a
    }
}

impl Interval {
    fn new_raw(lo: Float, hi: Float) -> Interval {
        assert!(lo.is_finite() && hi.is_finite(), "non-finite endpoint");
        assert!(lo <= hi, "inverted interval [{:?}, {:?}]", lo, hi);
        assert_eq!(lo.prec(), hi.prec(), "mixed endpoint precision");
        Interval { lo, hi }
    }

    /// Builds an interval from endpoints, widening to the larger precision.
    pub fn from_endpoints(lo: &Float, hi: &Float) -> Result<Interval> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain("interval endpoints must be finite".into()));
        }
        if lo > hi {
            return Err(Error::Domain(format!(
                "interval endpoints out of order: lo {} > hi {}",
                lo.to_f64(),
                hi.to_f64()
            )));
        }
        let prec = lo.prec().max(hi.prec());
        let (l, _) = Float::with_val_round(prec, lo, Round::Down);
        let (h, _) = Float::with_val_round(prec, hi, Round::Up);
        Ok(Interval::new_raw(l, h))
    }

    /// Degenerate interval containing exactly the given float.
    pub fn point(f: &Float) -> Interval {
        Interval::new_raw(f.clone(), f.clone())
    }

    /// Degenerate interval at this interval's lower endpoint.
    pub fn lower_point(&self) -> Interval {
        Interval::point(&self.lo)
    }

    /// Degenerate interval at this interval's upper endpoint.
    pub fn upper_point(&self) -> Interval {
        Interval::point(&self.hi)
    }

    pub fn from_u64(n: u64, prec: u32) -> Interval {
        let (lo, _) = Float::with_val_round(prec, n, Round::Down);
        let (hi, _) = Float::with_val_round(prec, n, Round::Up);
        Interval::new_raw(lo, hi)
    }

    pub fn from_i64(n: i64, prec: u32) -> Interval {
        let (lo, _) = Float::with_val_round(prec, n, Round::Down);
        let (hi, _) = Float::with_val_round(prec, n, Round::Up);
        Interval::new_raw(lo, hi)
    }

    pub fn from_integer(n: &Integer, prec: u32) -> Interval {
        let (lo, _) = Float::with_val_round(prec, n, Round::Down);
        let (hi, _) = Float::with_val_round(prec, n, Round::Up);
        Interval::new_raw(lo, hi)
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Interval {
        let (lo, _) = Float::with_val_round(prec, q, Round::Down);
        let (hi, _) = Float::with_val_round(prec, q, Round::Up);
        Interval::new_raw(lo, hi)
    }

    /// Exact rational `num/den` rounded outward. `den` must be nonzero.
    pub fn from_ratio(num: i64, den: u64, prec: u32) -> Interval {
        assert!(den != 0, "zero denominator");
        let q = Rational::from((Integer::from(num), Integer::from(den)));
        Interval::from_rational(&q, prec)
    }

    /// Parses a decimal literal (optionally in e-notation) into the
    /// tightest enclosing interval at the given precision.
    pub fn from_decimal(text: &str, prec: u32) -> Result<Interval> {
        let t = text.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty decimal literal".into()));
        }
        let inc = Float::parse(t).map_err(|e| Error::Parse(format!("`{t}`: {e}")))?;
        let (lo, _) = Float::with_val_round(prec, inc, Round::Down);
        let inc = Float::parse(t).expect("parsed once already");
        let (hi, _) = Float::with_val_round(prec, inc, Round::Up);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Parse(format!("`{t}` is not a finite decimal")));
        }
        Ok(Interval::new_raw(lo, hi))
    }

    /// Enclosure of pi.
    pub fn pi(prec: u32) -> Interval {
        let (lo, _) = Float::with_val_round(prec, Constant::Pi, Round::Down);
        let (hi, _) = Float::with_val_round(prec, Constant::Pi, Round::Up);
        Interval::new_raw(lo, hi)
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec()
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> Float {
        let mut w = Float::new(self.prec());
        w.assign_round(&self.hi - &self.lo, Round::Up);
        w
    }

    pub fn contains(&self, f: &Float) -> bool {
        self.lo <= *f && *f <= self.hi
    }

    pub fn is_certainly_positive(&self) -> bool {
        self.lo.is_sign_positive() && !self.lo.is_zero()
    }

    fn out_prec(&self, rhs: &Interval) -> u32 {
        self.prec().max(rhs.prec())
    }

    pub fn neg(&self) -> Interval {
        Interval::new_raw(-self.hi.clone(), -self.lo.clone())
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        let prec = self.out_prec(rhs);
        let mut lo = Float::new(prec);
        lo.assign_round(&self.lo + &rhs.lo, Round::Down);
        let mut hi = Float::new(prec);
        hi.assign_round(&self.hi + &rhs.hi, Round::Up);
        Interval::new_raw(lo, hi)
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        let prec = self.out_prec(rhs);
        let mut lo = Float::new(prec);
        lo.assign_round(&self.lo - &rhs.hi, Round::Down);
        let mut hi = Float::new(prec);
        hi.assign_round(&self.hi - &rhs.lo, Round::Up);
        Interval::new_raw(lo, hi)
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        let prec = self.out_prec(rhs);
        let dir = |a: &Float, b: &Float, round: Round| -> Float {
            let mut out = Float::new(prec);
            out.assign_round(a * b, round);
            out
        };
        let pairs = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo = dir(pairs[0].0, pairs[0].1, Round::Down);
        let mut hi = dir(pairs[0].0, pairs[0].1, Round::Up);
        for (a, b) in &pairs[1..] {
            lo = fmin(lo, dir(a, b, Round::Down));
            hi = fmax(hi, dir(a, b, Round::Up));
        }
        Interval::new_raw(lo, hi)
    }

    /// Division; the divisor interval must not contain zero.
    pub fn div(&self, rhs: &Interval) -> Result<Interval> {
        let pos = rhs.lo.is_sign_positive() && !rhs.lo.is_zero();
        let neg = rhs.hi.is_sign_negative() && !rhs.hi.is_zero();
        if !pos && !neg {
            return Err(Error::Domain("division by an interval containing zero".into()));
        }
        let prec = self.out_prec(rhs);
        let dir = |a: &Float, b: &Float, round: Round| -> Float {
            let mut out = Float::new(prec);
            out.assign_round(a / b, round);
            out
        };
        let pairs = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo = dir(pairs[0].0, pairs[0].1, Round::Down);
        let mut hi = dir(pairs[0].0, pairs[0].1, Round::Up);
        for (a, b) in &pairs[1..] {
            lo = fmin(lo, dir(a, b, Round::Down));
            hi = fmax(hi, dir(a, b, Round::Up));
        }
        Ok(Interval::new_raw(lo, hi))
    }

    /// Scales by a nonnegative integer.
    pub fn mul_u64(&self, n: u64) -> Interval {
        let prec = self.prec();
        let mut lo = Float::new(prec);
        lo.assign_round(&self.lo * n, Round::Down);
        let mut hi = Float::new(prec);
        hi.assign_round(&self.hi * n, Round::Up);
        Interval::new_raw(lo, hi)
    }

    /// Divides by a positive integer.
    pub fn div_u64(&self, n: u64) -> Interval {
        assert!(n != 0, "division by zero");
        let prec = self.prec();
        let mut lo = Float::new(prec);
        lo.assign_round(&self.lo / n, Round::Down);
        let mut hi = Float::new(prec);
        hi.assign_round(&self.hi / n, Round::Up);
        Interval::new_raw(lo, hi)
    }

    /// Elementwise minimum: encloses `min(x, y)` for `x` in self, `y` in rhs.
    pub fn min_elementwise(&self, rhs: &Interval) -> Interval {
        let prec = self.out_prec(rhs);
        let down = |f: &Float| Float::with_val_round(prec, f, Round::Down).0;
        let up = |f: &Float| Float::with_val_round(prec, f, Round::Up).0;
        let lo = if self.lo <= rhs.lo { down(&self.lo) } else { down(&rhs.lo) };
        let hi = if self.hi <= rhs.hi { up(&self.hi) } else { up(&rhs.hi) };
        Interval::new_raw(lo, hi)
    }

    fn unary(&self, f: fn(&mut Float, Round) -> std::cmp::Ordering) -> Interval {
        // Sound for monotonically increasing functions: the endpoint is first
        // moved toward the rounding direction (exactly, when precisions
        // match), then the function value is rounded the same way.
        let prec = self.prec();
        let (mut lo, _) = Float::with_val_round(prec, &self.lo, Round::Down);
        f(&mut lo, Round::Down);
        let (mut hi, _) = Float::with_val_round(prec, &self.hi, Round::Up);
        f(&mut hi, Round::Up);
        Interval::new_raw(lo, hi)
    }

    pub fn sinh(&self) -> Interval {
        self.unary(|f, r| f.sinh_round(r))
    }

    pub fn asinh(&self) -> Interval {
        self.unary(|f, r| f.asinh_round(r))
    }

    pub fn exp(&self) -> Interval {
        self.unary(|f, r| f.exp_round(r))
    }

    /// Natural logarithm; requires the interval to be strictly positive.
    pub fn ln(&self) -> Result<Interval> {
        if !self.is_certainly_positive() {
            return Err(Error::Domain(
                "log of an interval not strictly positive".into(),
            ));
        }
        Ok(self.unary(|f, r| f.ln_round(r)))
    }

    /// Square root; requires a nonnegative lower endpoint.
    pub fn sqrt(&self) -> Result<Interval> {
        if self.lo.is_sign_negative() && !self.lo.is_zero() {
            return Err(Error::Domain("sqrt of a negative interval".into()));
        }
        Ok(self.unary(|f, r| f.sqrt_round(r)))
    }

    /// Rational power `self^(num/den)` for strictly positive bases,
    /// computed as `exp((num/den) * ln self)`.
    pub fn pow_ratio(&self, num: i64, den: u64) -> Result<Interval> {
        if !self.is_certainly_positive() {
            return Err(Error::Domain(
                "rational power of an interval not strictly positive".into(),
            ));
        }
        let q = Interval::from_ratio(num, den, self.prec());
        Ok(q.mul(&self.ln()?).exp())
    }

    pub fn compare(&self, rhs: &Interval) -> Verdict {
        if self.hi < rhs.lo {
            Verdict::CertainlyLt
        } else if self.lo >= rhs.hi {
            Verdict::CertainlyGe
        } else {
            Verdict::Undecided
        }
    }

    /// True when every point of self is strictly below every point of rhs.
    pub fn certainly_lt(&self, rhs: &Interval) -> bool {
        self.hi < rhs.lo
    }

    /// True when every point of self is at most every point of rhs.
    pub fn certainly_le(&self, rhs: &Interval) -> bool {
        self.hi <= rhs.lo
    }

    pub fn certainly_ge(&self, rhs: &Interval) -> bool {
        self.lo >= rhs.hi
    }

    pub fn certainly_gt(&self, rhs: &Interval) -> bool {
        self.lo > rhs.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            decimal_directed(&self.lo, 17, Round::Down),
            decimal_directed(&self.hi, 17, Round::Up)
        )
    }
}

/// Runs a comparison at doubling precision until it is decided or the
/// precision ceiling is reached; returns the last verdict either way.
pub fn decide<F>(start_prec: u32, mut eval: F) -> Verdict
where
    F: FnMut(u32) -> Verdict,
{
    let mut prec = start_prec.clamp(MIN_PRECISION, MAX_PRECISION);
    loop {
        let v = eval(prec);
        if v != Verdict::Undecided || prec >= MAX_PRECISION {
            return v;
        }
        prec = prec.saturating_mul(2).min(MAX_PRECISION);
    }
}

/// Exact decimal representation of a finite float.
///
/// Every binary float `m * 2^e` has a terminating decimal expansion; this
/// renders it in full, so parsing the string back at the same precision
/// reproduces the float bit for bit.
pub fn exact_decimal(f: &Float) -> String {
    assert!(f.is_finite(), "cannot render a non-finite float");
    if f.is_zero() {
        return "0".to_string();
    }
    let (mant, exp) = f.to_integer_exp().expect("finite float");
    let neg = mant < 0;
    let mant = mant.abs();
    let body = if exp >= 0 {
        let v: Integer = mant << (exp as u32);
        v.to_string()
    } else {
        let k = (-exp) as u32;
        let digits = (mant * Integer::from(5).pow(k)).to_string();
        let k = k as usize;
        let mut s = if digits.len() > k {
            let split = digits.len() - k;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat(k - digits.len()), digits)
        };
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
        s
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Decimal rendering with a fixed number of significant digits, rounded in
/// the given direction. Used for report columns where a printed lower
/// bound must never overstate and an upper bound never understate.
pub fn decimal_directed(f: &Float, digits: usize, round: Round) -> String {
    assert!(f.is_finite(), "cannot render a non-finite float");
    assert!(digits >= 1);
    if f.is_zero() {
        return "0".to_string();
    }
    let (neg, ds, exp) = f.to_sign_string_exp_round(10, Some(digits), round);
    let exp = exp.expect("finite nonzero float") as i64;
    // Value is +/- 0.<ds> * 10^exp.
    let mut body = if exp >= 1 && exp <= 15 {
        let e = exp as usize;
        if ds.len() <= e {
            format!("{}{}", ds, "0".repeat(e - ds.len()))
        } else {
            format!("{}.{}", &ds[..e], &ds[e..])
        }
    } else if exp <= 0 && exp > -4 {
        format!("0.{}{}", "0".repeat((-exp) as usize), ds)
    } else {
        let mut m = ds.to_string();
        if m.len() > 1 {
            m.insert(1, '.');
            while m.ends_with('0') {
                m.pop();
            }
            if m.ends_with('.') {
                m.pop();
            }
        }
        format!("{}e{}", m, exp - 1)
    };
    if body.contains('.') && !body.contains('e') {
        while body.ends_with('0') {
            body.pop();
        }
        if body.ends_with('.') {
            body.pop();
        }
    }
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(prec: u32, s: &str) -> Float {
        Float::with_val(prec, Float::parse(s).unwrap())
    }

    #[test]
    fn endpoints_widen_and_validate() {
        let iv = Interval::from_endpoints(&f(64, "1.5"), &f(128, "2.5")).unwrap();
        assert_eq!(iv.prec(), 128);
        assert!(Interval::from_endpoints(&f(64, "3"), &f(64, "2")).is_err());
        let inf = Float::with_val(64, rug::float::Special::Infinity);
        assert!(Interval::from_endpoints(&f(64, "1"), &inf).is_err());
    }

    #[test]
    fn from_decimal_encloses_tightly() {
        let iv = Interval::from_decimal("0.1", 64).unwrap();
        assert!(iv.lo() < iv.hi());
        let w = iv.width();
        // One ulp at 64 bits around 0.1.
        assert!(w.to_f64() < 1e-19);
        assert!(iv.contains(&f(128, "0.1")) || {
            // 0.1 at 128 bits is not exactly representable either; check via
            // rationals instead: lo < 1/10 < hi.
            let tenth = Rational::from((1, 10));
            let lo_q = iv.lo().to_rational().unwrap();
            let hi_q = iv.hi().to_rational().unwrap();
            lo_q < tenth && tenth < hi_q
        });
        // Exact dyadic values collapse to points.
        let exact = Interval::from_decimal("0.25", 64).unwrap();
        assert_eq!(exact.lo(), exact.hi());
        assert!(Interval::from_decimal("", 64).is_err());
        assert!(Interval::from_decimal("zz", 64).is_err());
        assert!(Interval::from_decimal("inf", 64).is_err());
        assert!(Interval::from_decimal("nan", 64).is_err());
    }

    #[test]
    fn arithmetic_signs() {
        let a = Interval::from_decimal("-2", 64).unwrap();
        let b = Interval::from_decimal("3", 64).unwrap();
        let m = a.mul(&b);
        assert_eq!(m.lo().to_f64(), -6.0);
        assert_eq!(m.hi().to_f64(), -6.0);
        // Interval crossing zero times a negative interval.
        let c = Interval::from_endpoints(&f(64, "-1"), &f(64, "2")).unwrap();
        let d = Interval::from_endpoints(&f(64, "-3"), &f(64, "-2")).unwrap();
        let m = c.mul(&d);
        assert_eq!(m.lo().to_f64(), -6.0);
        assert_eq!(m.hi().to_f64(), 3.0);
        let s = c.sub(&d);
        assert_eq!(s.lo().to_f64(), 1.0);
        assert_eq!(s.hi().to_f64(), 5.0);
        assert!(c.div(&c).is_err());
        let q = b.div(&d).unwrap();
        assert_eq!(q.lo().to_f64(), -1.5);
        assert_eq!(q.hi().to_f64(), -1.0);
    }

    #[test]
    fn comparison_semantics() {
        let a = Interval::from_decimal("1", 64).unwrap();
        let b = Interval::from_decimal("2", 64).unwrap();
        assert_eq!(a.compare(&b), Verdict::CertainlyLt);
        assert_eq!(b.compare(&a), Verdict::CertainlyGe);
        assert_eq!(a.compare(&a), Verdict::CertainlyGe);
        let c = Interval::from_endpoints(&f(64, "0.5"), &f(64, "1.5")).unwrap();
        assert_eq!(a.compare(&c), Verdict::Undecided);
        assert!(a.certainly_le(&a));
        assert!(!a.certainly_lt(&a));
    }

    #[test]
    fn decide_escalates_to_ceiling() {
        let mut seen = Vec::new();
        let v = decide(64, |p| {
            seen.push(p);
            Verdict::Undecided
        });
        assert_eq!(v, Verdict::Undecided);
        assert_eq!(seen.first(), Some(&64));
        assert_eq!(seen.last(), Some(&MAX_PRECISION));
        let v = decide(64, |p| {
            if p >= 256 {
                Verdict::CertainlyLt
            } else {
                Verdict::Undecided
            }
        });
        assert_eq!(v, Verdict::CertainlyLt);
    }

    #[test]
    fn exact_decimal_round_trips() {
        for (prec, text) in [
            (64, "0.1"),
            (64, "-3.75"),
            (128, "6.43775164973640149840303733290475"),
            (96, "123456789123456789"),
            (64, "0"),
            (64, "1e-30"),
            (64, "-2.5e17"),
        ] {
            let x = f(prec, text);
            let s = exact_decimal(&x);
            let back = f(prec, &s);
            assert_eq!(x, back, "round trip failed for {text}: {s}");
        }
        assert_eq!(exact_decimal(&f(64, "2.5")), "2.5");
        assert_eq!(exact_decimal(&f(64, "-8")), "-8");
        assert_eq!(exact_decimal(&f(64, "0")), "0");
        assert_eq!(exact_decimal(&f(64, "0.25")), "0.25");
    }

    #[test]
    fn directed_decimal_direction() {
        let x = f(64, "2.7182818284590452");
        let down = decimal_directed(&x, 5, Round::Down);
        let up = decimal_directed(&x, 5, Round::Up);
        assert_eq!(down, "2.7182");
        assert_eq!(up, "2.7183");
        assert_eq!(decimal_directed(&f(64, "0"), 5, Round::Down), "0");
        assert_eq!(decimal_directed(&f(64, "-12.5"), 3, Round::Down), "-12.5");
        // 1e-7 is not dyadic, so the two directions disagree in the last digit.
        assert_eq!(decimal_directed(&f(64, "1e-7"), 3, Round::Down), "9.99e-8");
        assert_eq!(decimal_directed(&f(64, "1e-7"), 3, Round::Up), "1e-7");
        assert_eq!(decimal_directed(&f(64, "31400000"), 3, Round::Down), "31400000");
        assert_eq!(decimal_directed(&f(64, "1e20"), 3, Round::Down), "1e20");
    }

    #[test]
    fn min_elementwise_encloses() {
        let a = Interval::from_endpoints(&f(64, "1"), &f(64, "4")).unwrap();
        let b = Interval::from_endpoints(&f(64, "2"), &f(64, "3")).unwrap();
        let m = a.min_elementwise(&b);
        assert_eq!(m.lo().to_f64(), 1.0);
        assert_eq!(m.hi().to_f64(), 3.0);
    }

    #[test]
    fn domain_errors() {
        let neg = Interval::from_decimal("-1", 64).unwrap();
        assert!(neg.ln().is_err());
        assert!(neg.sqrt().is_err());
        assert!(neg.pow_ratio(1, 2).is_err());
        let zero = Interval::from_decimal("0", 64).unwrap();
        assert!(zero.ln().is_err());
        assert!(zero.sqrt().is_ok());
    }
}
