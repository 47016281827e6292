//! The congruence-cover family of base surfaces.
//!
//! For an odd prime `p` and a multiplicity `nu >= 1` the family provides a
//! closed hyperbolic surface of genus `(p^3 - p) nu + 1` whose systole is
//! at least `4 log p`. These are the starting points onto which handles
//! are grafted.

use crate::config::Theta;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::primes::is_prime;

/// A base surface: odd prime `p` and multiplicity `nu` determine the exact
/// genus and the certified systole floor `4 log p`.
#[derive(Clone, Debug)]
pub struct BaseSurface {
    pub p: u64,
    pub nu: u64,
    pub genus: u64,
    pub sys_floor: Interval,
}

pub fn validate_odd_prime(p: u64) -> Result<()> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(Error::Domain(format!("expected an odd prime, got {p}")));
    }
    Ok(())
}

/// Exact genus `(p^3 - p) nu + 1`, or an overflow error when it leaves u64.
pub fn base_genus(p: u64, nu: u64) -> Result<u64> {
    let p = p as u128;
    let cube = p
        .checked_mul(p)
        .and_then(|s| s.checked_mul(p))
        .ok_or_else(|| Error::Overflow("p^3 exceeds the supported range".into()))?;
    (cube - p)
        .checked_mul(nu as u128)
        .and_then(|v| v.checked_add(1))
        .filter(|&v| v <= u64::MAX as u128)
        .map(|v| v as u64)
        .ok_or_else(|| Error::Overflow("base genus exceeds the supported range".into()))
}

pub fn base_surface(p: u64, nu: u64, prec: u32) -> Result<BaseSurface> {
    validate_odd_prime(p)?;
    if nu < 1 {
        return Err(Error::Domain(format!("nu must be at least 1, got {nu}")));
    }
    let genus = base_genus(p, nu)?;
    let sys_floor = Interval::from_u64(p, prec).ln()?.mul_u64(4);
    Ok(BaseSurface {
        p,
        nu,
        genus,
        sys_floor,
    })
}

/// The logarithmic comparison value `(4/3) log(genus)` for a base surface;
/// its systole floor `4 log p` approaches this from above as `p` grows.
pub fn four_thirds_floor(b: &BaseSurface) -> Interval {
    Interval::from_u64(b.genus, b.sys_floor.prec())
        .ln()
        .expect("base genus is at least 25")
        .mul_u64(4)
        .div_u64(3)
}

/// Enclosure of `8 nu lambda^3 p^(2 + theta) + 1`, an upper bound on the
/// genus jump `g_next - g_p + 1` to the next base surface, valid whenever
/// the prime gap after `p` is at most `lambda p^theta`. Controls how many
/// grafted handles a genus window can require before the next base
/// surface takes over.
pub fn genus_gap_bound(
    p: u64,
    nu: u64,
    lambda: &Interval,
    theta: Theta,
    prec: u32,
) -> Result<Interval> {
    validate_odd_prime(p)?;
    if nu < 1 {
        return Err(Error::Domain(format!("nu must be at least 1, got {nu}")));
    }
    if lambda.lo().is_sign_negative() && !lambda.lo().is_zero() {
        return Err(Error::Domain("lambda must be nonnegative".into()));
    }
    let nu8 = nu
        .checked_mul(8)
        .ok_or_else(|| Error::Overflow("nu too large".into()))?;
    let lam3 = lambda.mul(lambda).mul(lambda);
    let exp_num = 2 * theta.den() as i64 + theta.num() as i64;
    let pexp = Interval::from_u64(p, prec).pow_ratio(exp_num, theta.den() as u64)?;
    Ok(lam3
        .mul(&pexp)
        .mul_u64(nu8)
        .add(&Interval::from_u64(1, prec)))
}
