//! Hyperbolic-geometry quantities: disk area and perimeter, surface area,
//! and the universal upper bound on the systole of a closed surface.

use crate::error::{Error, Result};
use crate::interval::Interval;

/// A nonnegative length in the hyperbolic metric.
#[derive(Clone, Debug)]
pub struct Radius {
    value: Interval,
}

impl Radius {
    pub fn new(value: Interval) -> Result<Radius> {
        if value.lo().is_sign_negative() && !value.lo().is_zero() {
            return Err(Error::Domain(
                "a hyperbolic radius cannot be negative".into(),
            ));
        }
        Ok(Radius { value })
    }

    pub fn from_decimal(text: &str, prec: u32) -> Result<Radius> {
        Radius::new(Interval::from_decimal(text, prec)?)
    }

    pub fn interval(&self) -> &Interval {
        &self.value
    }

    pub fn prec(&self) -> u32 {
        self.value.prec()
    }
}

/// Area of a hyperbolic disk of radius `r`: `4 pi sinh^2(r/2)`.
pub fn disk_area(r: &Radius) -> Interval {
    let sh = r.interval().div_u64(2).sinh();
    sh.mul(&sh).mul(&Interval::pi(r.prec())).mul_u64(4)
}

/// Perimeter of a hyperbolic disk of radius `r`: `2 pi sinh r`.
pub fn disk_perimeter(r: &Radius) -> Interval {
    r.interval().sinh().mul(&Interval::pi(r.prec())).mul_u64(2)
}

/// Area of a closed hyperbolic surface of genus `g`: `4 pi (g - 1)`.
pub fn surface_area(genus: u64, prec: u32) -> Result<Interval> {
    if genus < 1 {
        return Err(Error::Domain(format!(
            "surface area needs genus >= 1, got {genus}"
        )));
    }
    let scale = (genus - 1)
        .checked_mul(4)
        .ok_or_else(|| Error::Overflow(format!("genus {genus} too large")))?;
    Ok(Interval::pi(prec).mul_u64(scale))
}

/// Universal systole upper bound for genus `g >= 2`: `2 log(4g - 2)`.
pub fn systole_upper_bound(genus: u64, prec: u32) -> Result<Interval> {
    if genus < 2 {
        return Err(Error::Domain(format!(
            "systole bound needs genus >= 2, got {genus}"
        )));
    }
    let arg = genus
        .checked_mul(4)
        .and_then(|v| v.checked_sub(2))
        .ok_or_else(|| Error::Overflow(format!("genus {genus} too large")))?;
    Ok(Interval::from_u64(arg, prec).ln()?.mul_u64(2))
}
