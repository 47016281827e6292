//! Handle-surgery planning: disk packings, the surgered-systole floor,
//! the closed-form parameter choice, and a per-instance optimizer.
//!
//! Grafting `k` handles onto a base surface removes `2k` disjoint disks of
//! radius `r` centered at points of an `s`-separated set (`s = r + d`) and
//! glues the boundaries pairwise. The systole of the result is at least
//! `min{4 log p, 2 pi sinh r, 2d}` provided `s < log p` and the packing
//! supplies at least `2k` disks. Everything here certifies those facts as
//! interval statements.

use rug::{Float, Integer};

use crate::config::Theta;
use crate::congruence::{base_genus, validate_odd_prime, BaseSurface};
use crate::error::{Error, Result};
use crate::hyperbolic::{disk_perimeter, Radius};
use crate::interval::{decide, Interval, Verdict, MAX_PRECISION, MIN_PRECISION};

/// A certified plan for reaching genus `base.genus + k`.
///
/// For `k = 0` the base surface is used as is and the optional fields are
/// absent; for `k >= 1` they hold the surgery radii `r`, `d`, their sum
/// `s`, and a certified lower bound on the number of packing disks.
#[derive(Clone, Debug)]
pub struct SurgeryPlan {
    pub base: BaseSurface,
    pub k: u64,
    pub r: Option<Radius>,
    pub d: Option<Radius>,
    pub s: Option<Radius>,
    pub packing_n: Option<Integer>,
    pub bound: Interval,
}

impl SurgeryPlan {
    pub fn resulting_genus(&self) -> u64 {
        self.base
            .genus
            .checked_add(self.k)
            .expect("resulting genus fits u64")
    }
}

/// The `k = 0` plan: the base surface itself, bounded by its own floor.
pub fn trivial_plan(base: &BaseSurface) -> SurgeryPlan {
    SurgeryPlan {
        base: base.clone(),
        k: 0,
        r: None,
        d: None,
        s: None,
        packing_n: None,
        bound: base.sys_floor.clone(),
    }
}

/// Certified lower bound on the size of a maximal `s`-separated disk
/// packing of a genus-`g` surface: `floor` of a lower enclosure of
/// `(g - 1) / sinh^2(s)`.
///
/// Evaluates at twice the radius precision so that a radius given as an
/// exact dyadic point strictly below an equality configuration still
/// certifies the full count.
pub fn packing_lower_bound(genus: u64, s: &Radius) -> Result<Integer> {
    if genus < 2 {
        return Err(Error::Domain(format!(
            "packing bound needs genus >= 2, got {genus}"
        )));
    }
    if !s.interval().is_certainly_positive() {
        return Err(Error::Domain(
            "separation radius must be strictly positive".into(),
        ));
    }
    let prec = s.prec().saturating_mul(2).clamp(MIN_PRECISION, MAX_PRECISION);
    let lo = Float::with_val(prec, s.interval().lo());
    let hi = Float::with_val(prec, s.interval().hi());
    let s_iv = Interval::from_endpoints(&lo, &hi)?;
    let sh = s_iv.sinh();
    let v = Interval::from_u64(genus - 1, prec).div(&sh.mul(&sh))?;
    let n = v
        .lo()
        .clone()
        .floor()
        .to_integer()
        .expect("floor of a finite float");
    Ok(if n < 0 { Integer::new() } else { n })
}

/// Certified enclosure of `min{sys_base, 2 pi sinh r, 2d}`, the systole
/// floor of the surgered surface; its lower endpoint is the quotable bound.
pub fn surgery_systole_floor(sys_base: &Interval, r: &Radius, d: &Radius) -> Interval {
    sys_base
        .min_elementwise(&disk_perimeter(r))
        .min_elementwise(&d.interval().mul_u64(2))
}

/// The closed-form parameter choice: `r` solving `2 pi sinh r = 4 log p`
/// and `d = (1 - theta)/2 * log p - r - C(lambda)`, with
/// `C(lambda) = 1/2 log(2 (8 nu lambda^3 + 3^(-2-theta)) / ((1 - 3^-2) nu))`.
/// Feasible only once `d` is positive, which requires large `p`.
#[derive(Clone, Debug)]
pub struct ClosedFormParams {
    pub r: Interval,
    pub d: Interval,
    pub c_lambda: Interval,
    /// False when `d.hi <= 0`, i.e. the choice is unusable at this `p`.
    pub feasible: bool,
}

pub fn closed_form_parameters(
    p: u64,
    nu: u64,
    lambda: &Interval,
    theta: Theta,
    prec: u32,
) -> Result<ClosedFormParams> {
    validate_odd_prime(p)?;
    if nu < 1 {
        return Err(Error::Domain(format!("nu must be at least 1, got {nu}")));
    }
    if lambda.lo().is_sign_negative() && !lambda.lo().is_zero() {
        return Err(Error::Domain("lambda must be nonnegative".into()));
    }
    let lp = Interval::from_u64(p, prec).ln()?;
    let r = Interval::from_u64(2, prec)
        .div(&Interval::pi(prec))?
        .mul(&lp)
        .asinh();
    let nu8 = nu
        .checked_mul(8)
        .ok_or_else(|| Error::Overflow("nu too large".into()))?;
    let lam3 = lambda.mul(lambda).mul(lambda);
    let neg_exp = -(2 * theta.den() as i64 + theta.num() as i64);
    let three_pow = Interval::from_u64(3, prec).pow_ratio(neg_exp, theta.den() as u64)?;
    let numerator = lam3.mul_u64(nu8).add(&three_pow).mul_u64(2);
    let denominator = Interval::from_ratio(nu8 as i64, 9, prec);
    let c_lambda = numerator.div(&denominator)?.ln()?.div_u64(2);
    let half_coeff = Interval::from_ratio(
        (theta.den() - theta.num()) as i64,
        2 * theta.den() as u64,
        prec,
    );
    let d = half_coeff.mul(&lp).sub(&r).sub(&c_lambda);
    let feasible = !(d.hi().is_sign_negative() || d.hi().is_zero());
    Ok(ClosedFormParams {
        r,
        d,
        c_lambda,
        feasible,
    })
}

/// Systole floor obtained by plugging the closed-form `(r, d)` into the
/// surgered-surface bound. Errors when `d` is not certainly positive.
pub fn closed_form_bound(base: &BaseSurface, params: &ClosedFormParams) -> Result<Interval> {
    closed_form_floor_from(&base.sys_floor, params)
}

/// Same floor computed from `4 log p` alone, for primes so large that
/// the base genus overflows the supported genus range.
pub fn closed_form_floor(p: u64, params: &ClosedFormParams, prec: u32) -> Result<Interval> {
    validate_odd_prime(p)?;
    let sys_floor = Interval::from_u64(p, prec).ln()?.mul_u64(4);
    closed_form_floor_from(&sys_floor, params)
}

fn closed_form_floor_from(sys_floor: &Interval, params: &ClosedFormParams) -> Result<Interval> {
    if !params.d.is_certainly_positive() {
        return Err(Error::Infeasible(
            "closed-form d is not certainly positive".into(),
        ));
    }
    let r = Radius::new(params.r.clone())?;
    let d = Radius::new(params.d.clone())?;
    Ok(surgery_systole_floor(sys_floor, &r, &d))
}

enum Sign {
    Positive,
    Negative,
    Unknown,
}

/// Certified sign of `pi sinh r + r - s_max` at the exact dyadic point `r`.
fn balance_sign(r_pt: &Float, s_max: &Float, prec: u32) -> Sign {
    let verdict = decide(prec, |p| {
        let r = Interval::point(&Float::with_val(p, r_pt));
        let s = Interval::point(&Float::with_val(p, s_max));
        let f = Interval::pi(p).mul(&r.sinh()).add(&r).sub(&s);
        let zero = Interval::from_u64(0, p);
        if f.certainly_gt(&zero) {
            Verdict::CertainlyGe
        } else if f.certainly_lt(&zero) {
            Verdict::CertainlyLt
        } else {
            Verdict::Undecided
        }
    });
    match verdict {
        Verdict::CertainlyGe => Sign::Positive,
        Verdict::CertainlyLt => Sign::Negative,
        Verdict::Undecided => Sign::Unknown,
    }
}

/// Brackets the root of `pi sinh r = s_max - r` to width `1e-9` (or to the
/// ulp floor) by bisection with certified sign tests. Returns the final
/// bracket; the root lies inside it.
fn balanced_radius(s_max: &Float, prec: u32) -> Result<(Float, Float)> {
    assert!(s_max.is_sign_positive() && !s_max.is_zero());
    let zero = Float::new(prec);
    // f(0) = -s_max < 0 needs no evaluation. For the upper end, 251/1024
    // exceeds 1/(pi + 1), so f(s_max * 251/1024) > 0 with ~1.5% of s_max
    // to spare; fall back to doubling if the certified test balks.
    let mut lo = zero;
    let mut hi = {
        use rug::float::Round;
        use rug::ops::AssignRound;
        let mut h = Float::new(prec);
        h.assign_round(s_max * 251u32, Round::Up);
        h / 1024u32
    };
    let mut guard = 0;
    while !matches!(balance_sign(&hi, s_max, prec), Sign::Positive) {
        hi = Float::with_val(prec, &hi * 2u32);
        guard += 1;
        if guard > 8 || hi > *s_max {
            return Err(Error::Infeasible(format!(
                "could not bracket the balance radius below s_max = {}",
                s_max.to_f64()
            )));
        }
    }
    let tol = {
        let t = Float::with_val(prec, Float::parse("1e-9").unwrap());
        let floor_t = Float::with_val(prec, s_max / 8u32);
        if floor_t < t {
            floor_t
        } else {
            t
        }
    };
    loop {
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        if mid <= lo || mid >= hi {
            break;
        }
        match balance_sign(&mid, s_max, prec) {
            Sign::Positive => hi = mid,
            Sign::Negative => lo = mid,
            // Only reachable when f(mid) vanishes beyond the precision
            // ceiling; the bracket is still valid, so stop refining.
            Sign::Unknown => break,
        }
        let width = Float::with_val(prec, &hi - &lo);
        if width <= tol {
            break;
        }
    }
    Ok((lo, hi))
}

/// Plans `k >= 1` grafted handles on the given base surface, maximizing
/// the certified systole floor.
///
/// The separation is fixed at the largest admissible value
/// `s_max = min(log p - 1e-9, arcsinh(sqrt((g_p - 1)/(2k))))` — the floor
/// is monotone in `s` — and `r` is chosen to balance the two surgery terms
/// `2 pi sinh r = 2d` by certified bisection. The returned bound is
/// clamped by `4 log p` through the elementwise minimum.
pub fn optimize_parameters(base: &BaseSurface, k: u64) -> Result<SurgeryPlan> {
    if k < 1 {
        return Err(Error::Domain(
            "optimization needs k >= 1; a genus hit exactly uses the base surface".into(),
        ));
    }
    let prec = base.sys_floor.prec();
    let g = base.genus;
    let two_k = k
        .checked_mul(2)
        .ok_or_else(|| Error::Overflow("handle count too large".into()))?;
    let log_p = base.sys_floor.div_u64(4);
    let sep_cap = log_p.sub(&Interval::from_decimal("1e-9", prec)?);
    let pack_cap = Interval::from_u64(g - 1, prec)
        .div_u64(two_k)
        .sqrt()?
        .asinh();
    let mut s_pt = if sep_cap.lo() <= pack_cap.lo() {
        sep_cap.lo().clone()
    } else {
        pack_cap.lo().clone()
    };
    if s_pt.is_sign_negative() || s_pt.is_zero() {
        return Err(Error::Infeasible(format!(
            "margin exhausted: no positive separation for p={}, nu={}, k={k}",
            base.p, base.nu
        )));
    }
    // The packing count at the truncated point is generically at least 2k
    // with the truncation gap to spare; shave ulps if rounding ate it.
    let need = Integer::from(two_k);
    let mut packing_n;
    let mut shaves = 0;
    loop {
        let s = Radius::new(Interval::point(&s_pt))?;
        packing_n = packing_lower_bound(g, &s)?;
        if packing_n >= need {
            break;
        }
        shaves += 1;
        if shaves > 8 {
            return Err(Error::Infeasible(format!(
                "cannot certify a 2k = {two_k} disk packing at s = {} (certified {packing_n})",
                s_pt.to_f64()
            )));
        }
        for _ in 0..(1u32 << shaves) {
            s_pt.next_down();
        }
    }
    let (r_lo, r_hi) = balanced_radius(&s_pt, prec)?;
    let r_iv = Interval::from_endpoints(&r_lo, &r_hi)?;
    let s_iv = Interval::point(&s_pt);
    let d_iv = s_iv.sub(&r_iv);
    if !r_iv.is_certainly_positive() || !d_iv.is_certainly_positive() {
        return Err(Error::Infeasible(format!(
            "balance bisection degenerated for p={}, k={k}",
            base.p
        )));
    }
    debug_assert!(s_pt < *log_p.lo(), "separation must stay below log p");
    let r = Radius::new(r_iv)?;
    let d = Radius::new(d_iv)?;
    let bound = surgery_systole_floor(&base.sys_floor, &r, &d);
    Ok(SurgeryPlan {
        base: base.clone(),
        k,
        r: Some(r),
        d: Some(d),
        s: Some(Radius::new(s_iv)?),
        packing_n: Some(packing_n),
        bound,
    })
}

/// Certified verdict of the coverage inequality
/// `(g_p - 1) / (2 sinh^2 s) >= g_next - g_p + 1`: with this margin a
/// single separation radius serves every genus between consecutive base
/// surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverageVerdict {
    Holds,
    Fails,
    Undecided,
}

pub fn coverage_inequality(p: u64, p_next: u64, nu: u64, s: &Radius) -> Result<CoverageVerdict> {
    validate_odd_prime(p)?;
    if nu < 1 {
        return Err(Error::Domain(format!("nu must be at least 1, got {nu}")));
    }
    if p_next != p {
        validate_odd_prime(p_next)?;
        if p_next < p {
            return Err(Error::Domain(format!(
                "expected p <= p_next, got {p} > {p_next}"
            )));
        }
        for n in p + 1..p_next {
            if crate::primes::is_prime(n) {
                return Err(Error::Domain(format!(
                    "{p} and {p_next} are not consecutive primes ({n} lies between)"
                )));
            }
        }
    }
    if !s.interval().is_certainly_positive() {
        return Err(Error::Domain(
            "separation radius must be strictly positive".into(),
        ));
    }
    let gp = base_genus(p, nu)?;
    let gq = base_genus(p_next, nu)?;
    let need = (gq - gp)
        .checked_add(1)
        .ok_or_else(|| Error::Overflow("genus gap too large".into()))?;
    let verdict = decide(s.prec(), |prec| {
        let lo = Float::with_val(prec, s.interval().lo());
        let hi = Float::with_val(prec, s.interval().hi());
        let s_iv = Interval::from_endpoints(&lo, &hi).expect("validated radius");
        let sh = s_iv.sinh();
        let lhs = Interval::from_u64(gp - 1, prec)
            .div(&sh.mul(&sh).mul_u64(2))
            .expect("sinh of a positive radius is positive");
        let rhs = Interval::from_u64(need, prec);
        if lhs.certainly_ge(&rhs) {
            Verdict::CertainlyGe
        } else if lhs.certainly_lt(&rhs) {
            Verdict::CertainlyLt
        } else {
            Verdict::Undecided
        }
    });
    Ok(match verdict {
        Verdict::CertainlyGe => CoverageVerdict::Holds,
        Verdict::CertainlyLt => CoverageVerdict::Fails,
        Verdict::Undecided => CoverageVerdict::Undecided,
    })
}
