//! Test-only numerical references for the sysw workspace.
//!
//! Nothing in this crate touches MPFR or the production interval types. The
//! oracle evaluates the transcendental functions in scaled-decimal integer
//! arithmetic with explicit error accounting, so test expectations come from
//! a computation path that shares no code (and no rounding machinery) with
//! the implementation it judges. The grid optimizer is plain f64.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

/// Decimal digits after the point in the fixed-point representation.
/// 130 digits leaves >= 100 trustworthy digits after series and folding slop.
pub const SCALE_DIGITS: u32 = 130;

fn scale() -> &'static BigInt {
    static S: OnceLock<BigInt> = OnceLock::new();
    S.get_or_init(|| pow10(SCALE_DIGITS))
}

fn pow10(n: u32) -> BigInt {
    let mut x = BigInt::from(1u32);
    let ten = BigInt::from(10u32);
    for _ in 0..n {
        x *= &ten;
    }
    x
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    // both nonnegative
    (a + b - 1u32) / b
}

/// A real enclosed in [(mant - err) / 10^SCALE_DIGITS, (mant + err) / 10^SCALE_DIGITS].
///
/// `err` counts ulps at the fixed scale and is always nonnegative. Every
/// operation widens `err` by a bound derived in-line; the bounds are allowed
/// to be loose by small factors, never tight in the wrong direction.
#[derive(Clone, Debug)]
pub struct Dec {
    mant: BigInt,
    err: BigInt,
}

impl Dec {
    pub fn zero() -> Self {
        Dec { mant: BigInt::zero(), err: BigInt::zero() }
    }

    pub fn one() -> Self {
        Dec { mant: scale().clone(), err: BigInt::zero() }
    }

    pub fn from_u64(n: u64) -> Self {
        Dec { mant: BigInt::from(n) * scale(), err: BigInt::zero() }
    }

    pub fn from_i64(n: i64) -> Self {
        Dec { mant: BigInt::from(n) * scale(), err: BigInt::zero() }
    }

    /// num/den with one ulp of truncation slop (exact when den divides 10^scale).
    pub fn from_ratio(num: i64, den: u64) -> Self {
        assert!(den > 0);
        let num = BigInt::from(num) * scale();
        let den = BigInt::from(den);
        let q = &num / &den;
        let exact = &q * &den == num;
        Dec { mant: q, err: if exact { BigInt::zero() } else { BigInt::from(1u32) } }
    }

    /// Parse a plain decimal string (optional sign, optional fraction).
    pub fn from_decimal(s: &str) -> Self {
        let (sign, rest) = match s.strip_prefix('-') {
            Some(r) => (-1, r),
            None => (1, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match rest.split_once('.') {
            Some((i, f)) => (i, f),
            None => (rest, ""),
        };
        assert!(
            !int_part.is_empty() || !frac_part.is_empty(),
            "empty decimal literal"
        );
        let digits = |t: &str| -> BigInt {
            if t.is_empty() {
                BigInt::zero()
            } else {
                t.parse::<BigInt>().unwrap_or_else(|_| panic!("bad decimal: {s}"))
            }
        };
        let mut mant = digits(int_part) * scale();
        let mut err = BigInt::zero();
        let nf = frac_part.len() as u32;
        if nf <= SCALE_DIGITS {
            mant += digits(frac_part) * pow10(SCALE_DIGITS - nf);
        } else {
            let keep = &frac_part[..SCALE_DIGITS as usize];
            mant += digits(keep);
            err = BigInt::from(1u32);
        }
        Dec { mant: mant * sign, err }
    }

    pub fn neg(&self) -> Self {
        Dec { mant: -&self.mant, err: self.err.clone() }
    }

    pub fn abs(&self) -> Self {
        Dec { mant: self.mant.abs(), err: self.err.clone() }
    }

    pub fn add(&self, o: &Dec) -> Self {
        Dec { mant: &self.mant + &o.mant, err: &self.err + &o.err }
    }

    pub fn sub(&self, o: &Dec) -> Self {
        Dec { mant: &self.mant - &o.mant, err: &self.err + &o.err }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        let n = BigInt::from(n);
        Dec { mant: &self.mant * &n, err: &self.err * n.abs() }
    }

    pub fn div_int(&self, n: u64) -> Self {
        let n = BigInt::from(n);
        Dec {
            mant: &self.mant / &n,
            err: ceil_div(&self.err, &n) + 1u32,
        }
    }

    /// (a ± ea)(b ± eb) = ab ± (|a| eb + |b| ea + ea eb); plus one trunc ulp.
    pub fn mul(&self, o: &Dec) -> Self {
        let s = scale();
        let mant = (&self.mant * &o.mant) / s;
        let spread =
            self.mant.abs() * &o.err + o.mant.abs() * &self.err + &self.err * &o.err;
        Dec { mant, err: ceil_div(&spread, s) + 1u32 }
    }

    /// Requires the divisor interval to exclude zero.
    pub fn div(&self, o: &Dec) -> Self {
        let ob = o.mant.abs();
        assert!(ob > o.err, "oracle division by interval containing zero");
        let s = scale();
        let mant = (&self.mant * s) / &o.mant;
        // |a/b - ma/mb| <= (ea |mb| + |ma| eb) / (|mb| (|mb| - eb))
        let num = (&self.err * &ob + self.mant.abs() * &o.err) * s;
        let den = &ob * (&ob - &o.err);
        Dec { mant, err: ceil_div(&num, &den) + 1u32 }
    }

    pub fn half(&self) -> Self {
        Dec {
            mant: &self.mant / 2,
            err: ceil_div(&self.err, &BigInt::from(2u32)) + 1u32,
        }
    }

    /// Floor square root of the enclosed value; requires mant >= err >= 0.
    pub fn sqrt(&self) -> Self {
        assert!(self.mant >= self.err, "oracle sqrt of possibly-negative value");
        let s = scale();
        let mant = (&self.mant * s).sqrt();
        // Input slop of d in value moves sqrt by <= d/2 when x >= 1, and by
        // <= sqrt(d) in general (concavity), measured in value units.
        let err_in = if &self.mant - &self.err >= *s {
            ceil_div(&self.err, &BigInt::from(2u32))
        } else {
            (&self.err * s).sqrt() + 1u32
        };
        Dec { mant, err: err_in + 2u32 }
    }

    /// exp by halving reduction, Taylor series, and repeated squaring.
    pub fn exp(&self) -> Self {
        let s = scale();
        assert!(
            self.mant.abs() < s * 1200u32,
            "oracle exp argument out of supported range"
        );
        // Reduce to |y| <= 1/2 by j halvings; one truncation ulp total.
        let mut j = 0u32;
        let half_s = s.clone() / BigInt::from(2u32);
        let mut shifted = self.mant.clone();
        while shifted.abs() > half_s {
            shifted /= 2;
            j += 1;
        }
        let y = Dec { mant: shifted, err: BigInt::from(if j > 0 { 1u32 } else { 0u32 }) };

        // exp(y) = sum y^n / n!; tail after a <= 2-ulp term is < 4 ulps for |y| <= 1/2.
        let mut acc = Dec::one();
        let mut term = Dec::one();
        let mut n = 0u64;
        loop {
            n += 1;
            term = term.mul(&y).div_int(n);
            acc = acc.add(&term);
            if term.mant.abs() + &term.err <= BigInt::from(2u32) {
                acc.err += 4u32;
                break;
            }
            assert!(n < 1000, "oracle exp series failed to converge");
        }
        for _ in 0..j {
            acc = acc.mul(&acc);
        }
        // Fold the input uncertainty: exp(x +- d) within exp(x) (1 +- 2d) for d <= 1.
        if !self.err.is_zero() {
            let extra = (acc.mant.abs() + &acc.err) * 2u32 * &self.err;
            acc.err += ceil_div(&extra, s) + 1u32;
        }
        acc
    }

    /// Natural log via range reduction to [3/4, 3/2] and the atanh series.
    pub fn ln(&self) -> Self {
        let s = scale();
        assert!(
            &self.mant - &self.err > BigInt::zero(),
            "oracle ln of possibly-nonpositive value"
        );
        let mut y = self.clone();
        let mut k = 0i64;
        let upper = (s * 3u32) / BigInt::from(2u32);
        let lower = (s * 3u32) / BigInt::from(4u32);
        while y.mant > upper {
            y = y.half();
            k += 1;
        }
        while y.mant < lower {
            y = Dec { mant: &y.mant * 2, err: &y.err * 2u32 };
            k -= 1;
        }
        let one = Dec::one();
        let t = y.sub(&one).div(&y.add(&one)); // |t| <= 1/5
        let ln_y = atanh_small(&t).mul_int(2);
        let mut out = ln_y.add(&ln2().mul_int(k));
        out.err += 2u32;
        out
    }

    /// Odd-symmetric sinh; computed from exp on the nonnegative side.
    pub fn sinh(&self) -> Self {
        if self.mant.is_negative() {
            return self.neg().sinh().neg();
        }
        let e = self.exp();
        let r = Dec::one().div(&e);
        e.sub(&r).half()
    }

    /// asinh x = ln(x + sqrt(x^2 + 1)); odd-symmetric.
    pub fn asinh(&self) -> Self {
        if self.mant.is_negative() {
            return self.neg().asinh().neg();
        }
        let sq = self.mul(self).add(&Dec::one()).sqrt();
        self.add(&sq).ln()
    }

    /// x^(num/den) for x > 0, via exp((num/den) ln x).
    pub fn pow_ratio(&self, num: i64, den: u64) -> Self {
        self.ln().mul(&Dec::from_ratio(num, den)).exp()
    }

    pub fn lo_rat(&self) -> BigRational {
        BigRational::new(&self.mant - &self.err, scale().clone())
    }

    pub fn hi_rat(&self) -> BigRational {
        BigRational::new(&self.mant + &self.err, scale().clone())
    }

    pub fn width_rat(&self) -> BigRational {
        BigRational::new(&self.err * 2u32, scale().clone())
    }

    pub fn to_f64(&self) -> f64 {
        // Good to ~15 digits; debugging and coarse comparisons only.
        let r = BigRational::new(self.mant.clone(), scale().clone());
        r.to_f64().unwrap_or(f64::NAN)
    }

    /// Does the enclosure contain the exact rational x?
    pub fn contains_rat(&self, x: &BigRational) -> bool {
        self.lo_rat() <= *x && *x <= self.hi_rat()
    }

    /// Is the enclosure narrower than 10^-digits?
    pub fn narrower_than(&self, digits: u32) -> bool {
        assert!(digits <= SCALE_DIGITS);
        &self.err * 2u32 < pow10(SCALE_DIGITS - digits)
    }

    /// Decimal rendering with `frac_digits` digits after the point, or None
    /// if the enclosure is too wide for all of them to be trustworthy.
    pub fn decimal(&self, frac_digits: u32) -> Option<String> {
        assert!(frac_digits <= SCALE_DIGITS);
        let shift = pow10(SCALE_DIGITS - frac_digits);
        let lo = (&self.mant - &self.err).div_floor(&shift);
        let hi = (&self.mant + &self.err).div_floor(&shift);
        if lo != hi {
            return None;
        }
        let neg = lo.is_negative();
        let digits = lo.abs().to_string();
        let digits = if digits.len() <= frac_digits as usize {
            format!("{}{}", "0".repeat(frac_digits as usize + 1 - digits.len()), digits)
        } else {
            digits
        };
        let split = digits.len() - frac_digits as usize;
        Some(format!(
            "{}{}.{}",
            if neg { "-" } else { "" },
            &digits[..split],
            &digits[split..]
        ))
    }
}

/// atanh by series; requires |t| <= 1/3 plus slop.
fn atanh_small(t: &Dec) -> Dec {
    assert!(t.mant.abs() * 2u32 <= *scale(), "oracle atanh argument too large");
    let t2 = t.mul(t);
    let mut acc = t.clone();
    let mut term = t.clone();
    let mut i = 0u64;
    loop {
        i += 1;
        term = term.mul(&t2);
        let contrib = term.div_int(2 * i + 1);
        acc = acc.add(&contrib);
        if contrib.mant.abs() + &contrib.err <= BigInt::from(2u32) {
            acc.err += 4u32;
            break;
        }
        assert!(i < 2000, "oracle atanh series failed to converge");
    }
    acc
}

/// arctan(1/k) by the alternating series; k >= 2.
fn atan_inv(k: u64) -> Dec {
    let t = Dec::from_ratio(1, k);
    let t2 = t.mul(&t);
    let mut acc = t.clone();
    let mut term = t;
    let mut i = 0u64;
    loop {
        i += 1;
        term = term.mul(&t2);
        let contrib = term.div_int(2 * i + 1);
        acc = if i % 2 == 1 { acc.sub(&contrib) } else { acc.add(&contrib) };
        if contrib.mant.abs() + &contrib.err <= BigInt::from(2u32) {
            acc.err += 3u32; // alternating tail is below the last term
            break;
        }
        assert!(i < 2000, "oracle atan series failed to converge");
    }
    acc
}

/// ln 2 = 2 atanh(1/3), cached.
pub fn ln2() -> Dec {
    static V: OnceLock<Dec> = OnceLock::new();
    V.get_or_init(|| atanh_small(&Dec::from_ratio(1, 3)).mul_int(2)).clone()
}

/// pi by Machin's formula, cached.
pub fn pi() -> Dec {
    static V: OnceLock<Dec> = OnceLock::new();
    V.get_or_init(|| atan_inv(5).mul_int(16).sub(&atan_inv(239).mul_int(4))).clone()
}

/// mantissa * 2^exp2 as an exact rational; how tests read binary endpoints.
pub fn rat_pow2(mantissa: BigInt, exp2: i64) -> BigRational {
    let one = BigInt::from(1u32);
    if exp2 >= 0 {
        BigRational::from_integer(mantissa << exp2 as usize)
    } else {
        BigRational::new(mantissa, one << (-exp2) as usize)
    }
}

/// Exact rational value of a plain decimal string.
pub fn rat_from_decimal(s: &str) -> BigRational {
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1, r),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match rest.split_once('.') {
        Some((i, f)) => (i, f),
        None => (rest, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap() };
    BigRational::new(num * sign, pow10(frac_part.len() as u32))
}

/// Check that an implementation interval [ilo, ihi] encloses the oracle value,
/// with tolerance equal to the oracle's own width on each side (so exact hits
/// at zero-width never false-alarm, while any violation beyond what the
/// oracle can resolve is reported).
pub fn check_encloses(ilo: &BigRational, ihi: &BigRational, oracle: &Dec) -> Result<(), String> {
    if ilo > ihi {
        return Err("implementation interval has lo > hi".into());
    }
    let w = oracle.width_rat();
    let olo = oracle.lo_rat();
    let ohi = oracle.hi_rat();
    if ilo > &(&olo + &w) {
        return Err(format!(
            "interval lo {} exceeds oracle lo {} (+ oracle width)",
            ilo.to_f64().unwrap_or(f64::NAN),
            olo.to_f64().unwrap_or(f64::NAN)
        ));
    }
    if &(&ohi - &w) > ihi {
        return Err(format!(
            "interval hi {} is below oracle hi {} (- oracle width)",
            ihi.to_f64().unwrap_or(f64::NAN),
            ohi.to_f64().unwrap_or(f64::NAN)
        ));
    }
    Ok(())
}

/// SplitMix64: tiny, seedable, good enough for fuzz-point generation.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}

/// Result of the f64 reference optimizer.
#[derive(Clone, Copy, Debug)]
pub struct GridPlan {
    pub s_max: f64,
    pub r: f64,
    pub d: f64,
    pub bound: f64,
}

fn genus_f64(p: u64, nu: u64) -> f64 {
    let p = p as f64;
    (p * p * p - p) * nu as f64 + 1.0
}

fn objective(lp4: f64, s_max: f64, r: f64) -> f64 {
    let d = s_max - r;
    lp4.min(2.0 * std::f64::consts::PI * r.sinh()).min(2.0 * d)
}

/// Reference maximizer of min{4 log p, 2 pi sinh r, 2d} over r + d <= s_max.
/// For fixed r the objective is maximized by spending all of s_max, so the
/// 1-D sweep over r with d = s_max - r covers the whole feasible set; a
/// two-stage local refinement sharpens the coarse grid answer.
pub fn grid_optimize(p: u64, nu: u64, k: u64) -> GridPlan {
    assert!(k >= 1);
    let gp = genus_f64(p, nu);
    let lp = (p as f64).ln();
    let cap = ((gp - 1.0) / (2.0 * k as f64)).sqrt().asinh();
    let s_max = (lp - 1e-9).min(cap);
    let lp4 = 4.0 * lp;

    let mut best_r = s_max / 2.0;
    let mut best = f64::MIN;
    let mut step = 1e-3;
    let mut lo = step;
    let mut hi = s_max - step;
    for _ in 0..3 {
        let n = ((hi - lo) / step).ceil() as u64;
        for i in 0..=n {
            let r = (lo + i as f64 * step).min(s_max);
            let v = objective(lp4, s_max, r);
            if v > best {
                best = v;
                best_r = r;
            }
        }
        lo = (best_r - step).max(step / 1000.0);
        hi = (best_r + step).min(s_max);
        step /= 100.0;
    }
    GridPlan { s_max, r: best_r, d: s_max - best_r, bound: best }
}

/// Literal 2-D grid over (r, d) with from-scratch feasibility per point:
/// r, d > 0, r + d < log p - margin, and 2k <= (g_p - 1)/sinh^2(r + d).
/// Returns the best objective value found (f64::MIN if none feasible).
pub fn grid_search_2d(p: u64, nu: u64, k: u64, step: f64) -> f64 {
    let gp = genus_f64(p, nu);
    let lp = (p as f64).ln();
    let lp4 = 4.0 * lp;
    let mut best = f64::MIN;
    let mut r = step;
    while r < lp {
        let mut d = step;
        while r + d < lp - 1e-9 {
            let s = r + d;
            let sh = s.sinh();
            if (gp - 1.0) / (sh * sh) >= (2 * k) as f64 {
                let v = lp4.min(2.0 * std::f64::consts::PI * r.sinh()).min(2.0 * d);
                if v > best {
                    best = v;
                }
            } else {
                break; // packing only tightens as d grows
            }
            d += step;
        }
        r += step;
    }
    best
}
