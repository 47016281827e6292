use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::interval::{Interval, MAX_PRECISION, MIN_PRECISION};

/// Shared knobs for the pipeline.
///
/// `precision_bits` is the working precision of every interval endpoint;
/// comparisons that stay undecided at this precision escalate on their own,
/// so raising it is an efficiency matter, not a soundness one.
#[derive(Clone, Debug)]
pub struct Config {
    pub precision_bits: u32,
    /// How many of the largest admissible base primes to try per genus.
    pub candidate_window: usize,
    /// Worker threads for range audits.
    pub jobs: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            precision_bits: 128,
            candidate_window: 5,
            jobs: std::thread::available_parallelism()
                .map(NonZeroUsize::get)
                .unwrap_or(1),
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.precision_bits < MIN_PRECISION || self.precision_bits > MAX_PRECISION {
            return Err(Error::Domain(format!(
                "precision_bits must lie in [{MIN_PRECISION}, {MAX_PRECISION}], got {}",
                self.precision_bits
            )));
        }
        if self.candidate_window == 0 {
            return Err(Error::Domain("candidate_window must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Domain("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// The gap exponent theta, kept as an exact rational in (0, 1).
///
/// It enters the arithmetic only through rational powers p^theta, so an
/// exact numerator/denominator pair is both sufficient and lossless.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Theta {
    num: u32,
    den: u32,
}

impl Theta {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num == 0 || num >= den {
            return Err(Error::Domain(format!(
                "theta must be a rational strictly between 0 and 1, got {num}/{den}"
            )));
        }
        let g = gcd(num, den);
        Ok(Theta {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn to_interval(&self, prec: u32) -> Interval {
        Interval::from_ratio(self.num as i64, self.den as u64, prec)
    }
}

impl Default for Theta {
    /// The exponent used throughout: 21/40.
    fn default() -> Self {
        Theta { num: 21, den: 40 }
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Theta {
    type Err = Error;

    /// Accepts `num/den` (e.g. `21/40`) or a terminating decimal (`0.525`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("cannot read `{s}` as a rational in (0, 1)"));
        if let Some((a, b)) = s.split_once('/') {
            let num: u32 = a.trim().parse().map_err(|_| bad())?;
            let den: u32 = b.trim().parse().map_err(|_| bad())?;
            return Theta::new(num, den);
        }
        let t = s.trim();
        let (int_part, frac_part) = match t.split_once('.') {
            Some((i, f)) => (i, f),
            None => (t, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || frac_part.len() > 9
        {
            return Err(bad());
        }
        let int_val: u32 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let den = 10u32.pow(frac_part.len() as u32);
        let frac_val: u32 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad())?
        };
        let num = int_val
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(bad)?;
        Theta::new(num, den)
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Where the gap constant lambda comes from.
///
/// `Empirical` takes the maximum of gap(p)/p^theta over an enumerated prime
/// range; `Assumed` takes a user-supplied value and records it as an
/// assumption in any emitted certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaMode {
    Empirical,
    Assumed,
}

impl fmt::Display for LambdaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaMode::Empirical => f.write_str("empirical"),
            LambdaMode::Assumed => f.write_str("assumed"),
        }
    }
}

impl FromStr for LambdaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "empirical" => Ok(LambdaMode::Empirical),
            "assumed" => Ok(LambdaMode::Assumed),
            other => Err(Error::Parse(format!(
                "unknown lambda mode `{other}` (expected `empirical` or `assumed`)"
            ))),
        }
    }
}
