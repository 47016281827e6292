//! Witness search per genus and range audits of the certified bound.
//!
//! For a genus `g` at or above the construction threshold `24 nu + 1`, the
//! search considers the few largest base surfaces with genus at most `g`,
//! plans the surgery for each decomposition `g = g_p + k`, and keeps the
//! candidate whose certified bound has the largest lower endpoint. Range
//! audits run the search over a whole genus interval, in parallel but with
//! deterministic output, and track the worst `bound / log g` ratio seen.

use std::io::{self, Write};

use rug::float::Round;
use rug::Rational;

use crate::config::{Config, Theta};
use crate::congruence::{base_genus, base_surface};
use crate::error::{Error, Result};
use crate::hyperbolic::systole_upper_bound;
use crate::interval::{decimal_directed, Interval};
use crate::primes::next_prime_after;
use crate::surgery::{optimize_parameters, trivial_plan, SurgeryPlan};

/// Smallest genus the construction can reach: the base surface at `p = 3`.
pub fn genus_threshold(nu: u64) -> Result<u64> {
    24u64
        .checked_mul(nu)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| Error::Overflow(format!("genus threshold for nu={nu}")))
}

/// A certified systolic lower bound for one genus.
#[derive(Debug, Clone)]
pub struct Witness {
    pub genus: u64,
    pub plan: SurgeryPlan,
    /// `plan.bound / log genus`, certified from interval endpoints.
    pub ratio: Interval,
    /// Base primes examined, in increasing order; the plan's prime is one
    /// of them.
    pub candidates_considered: Vec<u64>,
}

/// The largest `window` odd primes whose base genus stays at or below `g`.
fn admissible_primes(g: u64, nu: u64, window: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 3u64;
    while let Ok(gp) = base_genus(p, nu) {
        if gp > g {
            break;
        }
        out.push(p);
        p = next_prime_after(p);
    }
    if out.len() > window {
        out.drain(..out.len() - window);
    }
    out
}

/// Finds the best certified witness for `genus`: among the admissible
/// decompositions `genus = g_p + k`, the plan maximizing the lower bound
/// endpoint (later ties replace earlier ones, preferring larger `p`).
pub fn find_witness(genus: u64, nu: u64, cfg: &Config) -> Result<Witness> {
    cfg.validate()?;
    if nu == 0 {
        return Err(Error::Domain("nu must be at least 1".into()));
    }
    let threshold = genus_threshold(nu)?;
    if genus < threshold {
        return Err(Error::NoWitness { genus, threshold });
    }
    let candidates = admissible_primes(genus, nu, cfg.candidate_window);
    let mut best: Option<SurgeryPlan> = None;
    for &p in &candidates {
        let base = base_surface(p, nu, cfg.precision_bits)?;
        let k = genus - base.genus;
        let plan = if k == 0 {
            trivial_plan(&base)
        } else {
            match optimize_parameters(&base, k) {
                Ok(plan) => plan,
                Err(Error::Infeasible(_)) => continue,
                Err(e) => return Err(e),
            }
        };
        let better = match &best {
            None => true,
            Some(b) => plan.bound.lo() >= b.bound.lo(),
        };
        if better {
            best = Some(plan);
        }
    }
    let plan = best.ok_or_else(|| {
        Error::Infeasible(format!("no feasible surgery branch for genus {genus}"))
    })?;
    debug_assert_eq!(plan.resulting_genus(), genus);
    let log_g = Interval::from_u64(genus, cfg.precision_bits).ln()?;
    let ratio = plan.bound.div(&log_g)?;
    // A certified lower bound above the universal upper bound would mean
    // an unsound inequality somewhere in the chain.
    debug_assert!(
        plan.bound.lo() <= systole_upper_bound(genus, cfg.precision_bits)?.hi(),
        "certified bound exceeds the universal systole bound at genus {genus}"
    );
    Ok(Witness {
        genus,
        plan,
        ratio,
        candidates_considered: candidates,
    })
}

/// One audited genus, trimmed to what reports need.
#[derive(Debug, Clone)]
pub struct AuditRow {
    pub genus: u64,
    pub p: u64,
    pub k: u64,
    pub r: Option<Interval>,
    pub d: Option<Interval>,
    pub bound: Interval,
    pub log_genus: Interval,
    pub ratio: Interval,
}

impl AuditRow {
    fn from_witness(w: &Witness, prec: u32) -> Result<Self> {
        Ok(AuditRow {
            genus: w.genus,
            p: w.plan.base.p,
            k: w.plan.k,
            r: w.plan.r.as_ref().map(|r| r.interval().clone()),
            d: w.plan.d.as_ref().map(|d| d.interval().clone()),
            bound: w.plan.bound.clone(),
            log_genus: Interval::from_u64(w.genus, prec).ln()?,
            ratio: w.ratio.clone(),
        })
    }
}

/// Worst certified ratio in an audited range and where it occurred.
#[derive(Debug, Clone)]
pub struct MinRatio {
    pub ratio: Interval,
    pub genus: u64,
}

/// Result of auditing every genus in `[g_min, g_max]`.
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub g_min: u64,
    pub g_max: u64,
    pub nu: u64,
    pub rows: Vec<AuditRow>,
    /// Genera with no feasible witness (always the ones below threshold).
    pub failures: Vec<u64>,
    pub min_ratio: Option<MinRatio>,
}

/// Audits every genus in `[g_min, g_max]`: one row per witnessed genus,
/// failures listed separately. Rows are in genus order and the report is
/// identical for any worker count.
pub fn audit_range(g_min: u64, g_max: u64, nu: u64, cfg: &Config) -> Result<AuditReport> {
    cfg.validate()?;
    if g_min > g_max {
        return Err(Error::Domain(format!(
            "empty genus range [{g_min}, {g_max}]"
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Domain(format!("worker pool: {e}")))?;
    enum Outcome {
        Row(Box<AuditRow>),
        Failure(u64),
    }
    let outcomes: Vec<Result<Outcome>> = pool.install(|| {
        use rayon::prelude::*;
        (g_min..=g_max)
            .into_par_iter()
            .map(|g| match find_witness(g, nu, cfg) {
                Ok(w) => Ok(Outcome::Row(Box::new(AuditRow::from_witness(
                    &w,
                    cfg.precision_bits,
                )?))),
                Err(Error::NoWitness { .. }) | Err(Error::Infeasible(_)) => {
                    Ok(Outcome::Failure(g))
                }
                Err(e) => Err(e),
            })
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome? {
            Outcome::Row(row) => rows.push(*row),
            Outcome::Failure(g) => failures.push(g),
        }
    }
    let mut min_ratio: Option<MinRatio> = None;
    for row in &rows {
        let worse = match &min_ratio {
            None => true,
            Some(m) => row.ratio.lo() < m.ratio.lo(),
        };
        if worse {
            min_ratio = Some(MinRatio {
                ratio: row.ratio.clone(),
                genus: row.genus,
            });
        }
    }
    Ok(AuditReport {
        g_min,
        g_max,
        nu,
        rows,
        failures,
        min_ratio,
    })
}

/// The exact asymptotic ratio constant `(1 - theta) / 3`.
pub fn asymptotic_constant(theta: Theta) -> Rational {
    let num = u64::from(theta.den() - theta.num());
    let den = 3 * u64::from(theta.den());
    Rational::from((num, den))
}

/// Plot-ready rows, lower endpoints rounded down and `log g` rounded up.
pub fn write_audit_csv<W: Write>(report: &AuditReport, mut w: W) -> io::Result<()> {
    writeln!(w, "genus,p,k,r_lo,d_lo,bound_lo,log_g_hi,ratio_lo")?;
    for row in &report.rows {
        let lo12 = |iv: &Interval| decimal_directed(iv.lo(), 12, Round::Down);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            row.genus,
            row.p,
            row.k,
            row.r.as_ref().map(&lo12).unwrap_or_default(),
            row.d.as_ref().map(&lo12).unwrap_or_default(),
            lo12(&row.bound),
            decimal_directed(row.log_genus.hi(), 12, Round::Up),
            lo12(&row.ratio)
        )?;
    }
    Ok(())
}

/// Machine-readable summary: range, failures, and the worst ratio.
pub fn write_audit_json<W: Write>(report: &AuditReport, mut w: W) -> io::Result<()> {
    #[derive(serde::Serialize)]
    struct MinRatioOut {
        lo: String,
        hi: String,
        genus: u64,
    }
    #[derive(serde::Serialize)]
    struct Summary<'a> {
        range: [u64; 2],
        nu: u64,
        witnessed: usize,
        failures: &'a [u64],
        min_ratio: Option<MinRatioOut>,
    }
    let summary = Summary {
        range: [report.g_min, report.g_max],
        nu: report.nu,
        witnessed: report.rows.len(),
        failures: &report.failures,
        min_ratio: report.min_ratio.as_ref().map(|m| MinRatioOut {
            lo: decimal_directed(m.ratio.lo(), 17, Round::Down),
            hi: decimal_directed(m.ratio.hi(), 17, Round::Up),
            genus: m.genus,
        }),
    };
    serde_json::to_writer_pretty(&mut w, &summary)?;
    writeln!(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_values() {
        assert_eq!(genus_threshold(1).unwrap(), 25);
        assert_eq!(genus_threshold(2).unwrap(), 49);
        assert!(genus_threshold(u64::MAX / 2).is_err());
    }

    #[test]
    fn admissible_primes_window() {
        assert_eq!(admissible_primes(121, 1, 5), vec![3, 5]);
        assert_eq!(admissible_primes(120, 1, 5), vec![3]);
        assert_eq!(admissible_primes(10_000, 1, 2), vec![17, 19]);
        assert!(admissible_primes(24, 1, 5).is_empty());
    }

    #[test]
    fn witness_below_threshold_is_an_error() {
        let cfg = Config::default();
        match find_witness(24, 1, &cfg) {
            Err(Error::NoWitness { genus, threshold }) => {
                assert_eq!((genus, threshold), (24, 25));
            }
            other => panic!("expected NoWitness, got {other:?}"),
        }
    }

    #[test]
    fn base_genus_witness_is_trivial() {
        let cfg = Config::default();
        let w = find_witness(121, 1, &cfg).unwrap();
        assert_eq!(w.plan.base.p, 5);
        assert_eq!(w.plan.k, 0);
        assert!(w.plan.r.is_none());
        assert!((w.plan.bound.lo().to_f64() - 6.437751649736401).abs() < 1e-12);
        assert_eq!(w.candidates_considered, vec![3, 5]);
    }

    #[test]
    fn exact_constant() {
        assert_eq!(asymptotic_constant(Theta::default()), Rational::from((19, 120)));
        assert_eq!(
            asymptotic_constant(Theta::new(1, 2).unwrap()),
            Rational::from((1, 6))
        );
        assert_eq!(
            asymptotic_constant(Theta::new(1, 1_000_000).unwrap()),
            Rational::from((999_999u64, 3_000_000u64))
        );
    }
}
