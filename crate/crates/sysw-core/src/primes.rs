//! Prime enumeration and normalized prime-gap statistics.
//!
//! Primes come from a segmented sieve; a deterministic Miller-Rabin test
//! over an independent algorithm provides cross-checks. The gap table
//! records, for every prime `p` up to a cap, the next prime and the
//! normalized gap `(p_next - p) / p^theta`, whose running maximum is the
//! empirical gap constant lambda.

use std::io::{self, Write};

use rug::float::Round;

use crate::config::Theta;
use crate::error::{Error, Result};
use crate::interval::{decimal_directed, Interval};

const SEGMENT: usize = 1_000_000;

/// Deterministic Miller-Rabin for `u64`. The witness set 2..=37 is known
/// to be exact for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in WITNESSES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    a %= m;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while (r as u128) * (r as u128) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128) * ((r + 1) as u128) <= n as u128 {
        r += 1;
    }
    r
}

/// All primes `<= n` in increasing order, by segmented sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let root = isqrt(n);
    let mut is_comp = vec![false; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if !is_comp[i] {
            base.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                is_comp[j] = true;
                j += i;
            }
        }
    }
    let est = if n > 16 {
        (n as f64 / (n as f64).ln() * 1.2) as usize
    } else {
        8
    };
    let mut primes = Vec::with_capacity(est);
    let mut seg = vec![true; SEGMENT];
    let mut low = 2u64;
    while low <= n {
        let high = n.min(low + SEGMENT as u64 - 1);
        let len = (high - low + 1) as usize;
        for v in seg[..len].iter_mut() {
            *v = true;
        }
        for &p in &base {
            if p.checked_mul(p).map(|s| s > high).unwrap_or(true) {
                break;
            }
            let mut j = (p * p).max(low.div_ceil(p) * p);
            while j <= high {
                seg[(j - low) as usize] = false;
                j += p;
            }
        }
        for (i, &alive) in seg[..len].iter().enumerate() {
            if alive {
                primes.push(low + i as u64);
            }
        }
        low = high + 1;
    }
    primes
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_after(n: u64) -> u64 {
    let mut m = n + 1;
    if m <= 2 {
        return 2;
    }
    if m % 2 == 0 {
        m += 1;
    }
    while !is_prime(m) {
        m += 2;
    }
    m
}

/// One row of the gap table: `ratio` encloses `gap / p^theta`.
#[derive(Clone, Debug)]
pub struct GapEntry {
    pub p: u64,
    pub next: u64,
    pub gap: u64,
    pub ratio: Interval,
}

/// Normalized prime gaps for all primes up to `p_max`, together with an
/// enclosure of their maximum (the empirical lambda) and the prime whose
/// certified lower ratio attains it.
#[derive(Clone, Debug)]
pub struct GapTable {
    pub p_max: u64,
    pub theta: Theta,
    pub entries: Vec<GapEntry>,
    pub lambda_emp: Interval,
    pub argmax_p: u64,
}

pub fn build_gap_table(p_max: u64, theta: Theta, prec: u32) -> Result<GapTable> {
    if p_max < 3 {
        return Err(Error::Domain(format!(
            "gap table needs p_max >= 3, got {p_max}"
        )));
    }
    let primes = primes_up_to(p_max);
    let num = theta.num() as i64;
    let den = theta.den() as u64;
    let mut entries = Vec::with_capacity(primes.len());
    let mut lambda: Option<Interval> = None;
    let mut argmax_p = 0u64;
    for (i, &p) in primes.iter().enumerate() {
        let next = match primes.get(i + 1) {
            Some(&q) => q,
            None => next_prime_after(p),
        };
        let gap = next - p;
        let power = Interval::from_u64(p, prec).pow_ratio(num, den)?;
        let ratio = Interval::from_u64(gap, prec).div(&power)?;
        match &mut lambda {
            None => {
                lambda = Some(ratio.clone());
                argmax_p = p;
            }
            Some(best) => {
                if ratio.lo() > best.lo() {
                    argmax_p = p;
                }
                // Enclose the running maximum endpoint by endpoint.
                let lo = if ratio.lo() > best.lo() { ratio.lo() } else { best.lo() };
                let hi = if ratio.hi() > best.hi() { ratio.hi() } else { best.hi() };
                *best = Interval::from_endpoints(lo, hi)?;
            }
        }
        entries.push(GapEntry { p, next, gap, ratio });
    }
    Ok(GapTable {
        p_max,
        theta,
        entries,
        lambda_emp: lambda.expect("at least one prime below any p_max >= 3"),
        argmax_p,
    })
}

impl GapTable {
    /// Re-validates the table with the independent primality test: every
    /// listed `p` and `next` is prime, everything strictly between them is
    /// composite, and rows chain without holes.
    pub fn cross_check(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Domain(msg));
        if self.entries.is_empty() {
            return fail("empty gap table".into());
        }
        if self.entries[0].p != 2 {
            return fail("gap table must start at p=2".into());
        }
        for (i, e) in self.entries.iter().enumerate() {
            if !is_prime(e.p) {
                return fail(format!("{} listed as prime", e.p));
            }
            if !is_prime(e.next) {
                return fail(format!("{} listed as next prime", e.next));
            }
            if e.gap != e.next - e.p {
                return fail(format!("bad gap at p={}", e.p));
            }
            for n in e.p + 1..e.next {
                if is_prime(n) {
                    return fail(format!("missed prime {n} between {} and {}", e.p, e.next));
                }
            }
            if let Some(f) = self.entries.get(i + 1) {
                if f.p != e.next {
                    return fail(format!("rows do not chain at p={}", e.p));
                }
            }
        }
        let last = self.entries.last().expect("nonempty");
        if last.p > self.p_max || last.next <= self.p_max {
            return fail("table does not end at the last prime <= p_max".into());
        }
        Ok(())
    }

    /// CSV rows `p,p_next,gap,ratio_lo,ratio_hi` with directed 12-digit
    /// decimal endpoints.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "p,p_next,gap,ratio_lo,ratio_hi")?;
        for e in &self.entries {
            writeln!(
                w,
                "{},{},{},{},{}",
                e.p,
                e.next,
                e.gap,
                decimal_directed(e.ratio.lo(), 12, Round::Down),
                decimal_directed(e.ratio.hi(), 12, Round::Up)
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(
            primes_up_to(30),
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        );
    }

    #[test]
    fn miller_rabin_edges() {
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(!is_prime(561)); // Carmichael
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime((1 << 61) - 1)); // Mersenne prime
        assert!(!is_prime(u64::MAX));
        assert!(is_prime(18_446_744_073_709_551_557)); // largest u64 prime
        assert!(!is_prime(18_446_744_073_709_551_556));
    }

    #[test]
    fn next_prime_steps() {
        assert_eq!(next_prime_after(0), 2);
        assert_eq!(next_prime_after(2), 3);
        assert_eq!(next_prime_after(7), 11);
        assert_eq!(next_prime_after(89), 97);
        assert_eq!(next_prime_after(113), 127);
    }

    #[test]
    fn gap_table_rejects_tiny_cap() {
        assert!(build_gap_table(2, Theta::default(), 64).is_err());
        assert!(build_gap_table(3, Theta::default(), 64).is_ok());
    }
}
