//! Self-contained witness documents and their independent verifier.
//!
//! A certificate records one genus witness — the base prime, the handle
//! count, the surgery radii, and every inequality the bound rests on —
//! with interval endpoints written as exact decimal representations of
//! the underlying binary values, so emission and parsing round-trip
//! bit for bit.
//!
//! Verification trusts none of the producer's numbers. It re-derives the
//! whole chain from `(p, nu, k)` and the exact points `r = r.lo`,
//! `d = d.lo` at twice the stated precision: the genus decomposition, the
//! separation `r + d < (1/4) * sys_base`, the packing capacity for `2k`
//! handles, the three-term minimum behind the bound, and the universal
//! upper-bound sanity check. Any inequality that fails to certify rejects
//! the document, naming the failed check; a certificate produced at too
//! low a precision to certify is rejected rather than accepted on trust.

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::audit::Witness;
use crate::config::{LambdaMode, Theta};
use crate::congruence::base_surface;
use crate::error::{Error, Result};
use crate::hyperbolic::{disk_perimeter, systole_upper_bound, Radius};
use crate::interval::{exact_decimal, Interval, MAX_PRECISION, MIN_PRECISION};
use crate::surgery::packing_lower_bound;

pub const CERTIFICATE_VERSION: u32 = 1;

/// Largest magnitude accepted for any decimal endpoint in a document.
/// Radii, separations and bounds in this construction are all below
/// `2 log(4g - 2) < 360` for any `u64` genus; anything bigger is noise.
const MAGNITUDE_CAP: f64 = 1e6;

/// An interval endpoint pair as exact decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecimalInterval {
    pub lo: String,
    pub hi: String,
}

impl DecimalInterval {
    fn exact(iv: &Interval) -> DecimalInterval {
        DecimalInterval {
            lo: exact_decimal(iv.lo()),
            hi: exact_decimal(iv.hi()),
        }
    }

    fn parse(&self, prec: u32, what: &str) -> Result<Interval> {
        let iv = Interval::from_decimal(&self.lo, prec)
            .and_then(|lo| Ok((lo, Interval::from_decimal(&self.hi, prec)?)))
            .and_then(|(lo, hi)| Interval::from_endpoints(lo.lo(), hi.hi()))
            .map_err(|e| Error::Parse(format!("{what}: {e}")))?;
        let cap = &MAGNITUDE_CAP;
        if iv.lo().to_f64().abs() > *cap || iv.hi().to_f64().abs() > *cap {
            return Err(Error::Parse(format!("{what}: endpoint magnitude out of range")));
        }
        Ok(iv)
    }
}

/// One recorded inequality: `lhs relation rhs` with its certified verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub lhs: DecimalInterval,
    pub rhs: DecimalInterval,
    pub relation: String,
    pub verdict: String,
}

/// A serialized genus witness. Field order is fixed; decimal endpoints
/// are exact, so `parse(emit(w))` reproduces every field verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub version: u32,
    pub genus: u64,
    pub p: u64,
    pub nu: u64,
    pub k: u64,
    pub theta: String,
    pub lambda_mode: String,
    pub lambda: DecimalInterval,
    pub precision_bits: u32,
    pub sys_base_floor: DecimalInterval,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<DecimalInterval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<DecimalInterval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<DecimalInterval>,
    #[serde(rename = "packing_N", default, skip_serializing_if = "Option::is_none")]
    pub packing_n: Option<u128>,
    pub bound: DecimalInterval,
    pub checks: Vec<Check>,
    pub assumptions: Vec<String>,
}

/// Analysis context recorded alongside the witness. These values do not
/// enter the verified inequalities; they document the run that produced
/// the document.
#[derive(Debug, Clone)]
pub struct CertificateContext {
    pub theta: Theta,
    pub lambda_mode: LambdaMode,
    pub lambda: Interval,
}

impl Default for CertificateContext {
    fn default() -> Self {
        CertificateContext {
            theta: Theta::default(),
            lambda_mode: LambdaMode::Assumed,
            lambda: Interval::from_u64(1, MIN_PRECISION),
        }
    }
}

/// Verification result: accepted, or rejected naming the first failed
/// check in the fixed order genus-decomposition, radius-sum, separation,
/// handle-count, lemma-min, sanity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    Accept,
    Reject { check: String, detail: String },
}

fn reject(check: &str, detail: impl Into<String>) -> VerifyOutcome {
    VerifyOutcome::Reject {
        check: check.into(),
        detail: detail.into(),
    }
}

fn assumptions() -> Vec<String> {
    vec![
        "Base family: for every odd prime p there is a closed hyperbolic surface of genus \
         (p^3 - p) * nu + 1 whose systole is at least 4 log p."
            .into(),
        "Transfer: the maximum of the systole over genus-g metrics of curvature at most -1 \
         is attained by a hyperbolic metric, so a bound certified for the surgered metric \
         bounds the hyperbolic maximizer as well."
            .into(),
    ]
}

/// Serializes a witness. The recorded checks all carry `certain`
/// verdicts; a witness whose inequalities cannot be certified at its own
/// precision is refused instead of being written down optimistically.
pub fn emit_certificate(w: &Witness, ctx: &CertificateContext) -> Result<Certificate> {
    let plan = &w.plan;
    let prec = plan.bound.prec();
    let le = |name: &str, lhs: &Interval, rhs: &Interval, ok: bool| -> Result<Check> {
        if !ok {
            return Err(Error::Domain(format!(
                "witness for genus {} fails its own {name} check",
                w.genus
            )));
        }
        Ok(Check {
            name: name.into(),
            lhs: DecimalInterval::exact(lhs),
            rhs: DecimalInterval::exact(rhs),
            relation: if name == "separation" { "<" } else { "<=" }.into(),
            verdict: "certain".into(),
        })
    };
    let mut checks = Vec::new();
    let mut r_out = None;
    let mut d_out = None;
    let mut s_out = None;
    let mut n_out = None;
    if plan.k > 0 {
        let r = plan.r.as_ref().expect("surgery plan has r");
        let d = plan.d.as_ref().expect("surgery plan has d");
        let n = plan.packing_n.as_ref().expect("surgery plan has packing_n");
        // The witness points are the lower endpoints; their sum is exact
        // at doubled precision.
        let wide = (2 * prec).min(MAX_PRECISION);
        let s_hat = Float::with_val(wide, r.interval().lo() + d.interval().lo());
        let s_point = Interval::point(&s_hat);
        let log_p = plan.base.sys_floor.div_u64(4);
        checks.push(le(
            "separation",
            &s_point,
            &log_p,
            s_hat < *log_p.lo(),
        )?);
        let two_k = Interval::from_integer(&Integer::from(2 * plan.k), prec);
        let n_iv = Interval::from_integer(n, prec);
        checks.push(le("handle-count", &two_k, &n_iv, Integer::from(2 * plan.k) <= *n)?);
        let perim = disk_perimeter(&Radius::new(r.interval().lower_point())?);
        let two_d = d.interval().lower_point().mul_u64(2);
        let lemma = plan
            .base
            .sys_floor
            .min_elementwise(&perim)
            .min_elementwise(&two_d);
        checks.push(le("lemma-min", &plan.bound, &lemma, plan.bound.lo() <= lemma.lo())?);
        r_out = Some(DecimalInterval::exact(r.interval()));
        d_out = Some(DecimalInterval::exact(d.interval()));
        s_out = Some(DecimalInterval::exact(&s_point));
        n_out = Some(n.to_u128().ok_or_else(|| {
            Error::Overflow("packing count exceeds the certificate integer range".into())
        })?);
    }
    let upper = systole_upper_bound(w.genus, prec)?;
    checks.push(le("sanity", &plan.bound, &upper, plan.bound.lo() <= upper.hi())?);
    Ok(Certificate {
        version: CERTIFICATE_VERSION,
        genus: w.genus,
        p: plan.base.p,
        nu: plan.base.nu,
        k: plan.k,
        theta: ctx.theta.to_string(),
        lambda_mode: ctx.lambda_mode.to_string(),
        lambda: DecimalInterval::exact(&ctx.lambda),
        precision_bits: prec,
        sys_base_floor: DecimalInterval::exact(&plan.base.sys_floor),
        r: r_out,
        d: d_out,
        s: s_out,
        packing_n: n_out,
        bound: DecimalInterval::exact(&plan.bound),
        checks,
        assumptions: assumptions(),
    })
}

/// Renders a certificate as pretty JSON with a trailing newline.
pub fn certificate_to_json(cert: &Certificate) -> String {
    let mut text = serde_json::to_string_pretty(cert).expect("certificate serializes");
    text.push('\n');
    text
}

/// Parses a document; structural problems (unknown fields, missing
/// fields, bad numbers, wrong version) are parse errors, not rejections.
pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let cert: Certificate =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("certificate: {e}")))?;
    if cert.version != CERTIFICATE_VERSION {
        return Err(Error::Parse(format!(
            "unsupported certificate version {}",
            cert.version
        )));
    }
    let has = |o: &Option<DecimalInterval>| o.is_some();
    let surgical = [has(&cert.r), has(&cert.d), has(&cert.s), cert.packing_n.is_some()];
    if cert.k == 0 && surgical.iter().any(|&b| b) {
        return Err(Error::Parse(
            "surgery fields present on a k = 0 certificate".into(),
        ));
    }
    if cert.k > 0 && !surgical.iter().all(|&b| b) {
        return Err(Error::Parse(
            "surgery fields missing on a k > 0 certificate".into(),
        ));
    }
    cert.theta
        .parse::<Theta>()
        .map_err(|e| Error::Parse(format!("theta: {e}")))?;
    cert.lambda_mode
        .parse::<LambdaMode>()
        .map_err(|e| Error::Parse(format!("lambda_mode: {e}")))?;
    if !(MIN_PRECISION..=MAX_PRECISION).contains(&cert.precision_bits) {
        return Err(Error::Parse(format!(
            "precision_bits {} outside [{MIN_PRECISION}, {MAX_PRECISION}]",
            cert.precision_bits
        )));
    }
    Ok(cert)
}

/// Names required in `checks` for a given handle count.
fn required_checks(k: u64) -> &'static [&'static str] {
    if k == 0 {
        &["sanity"]
    } else {
        &["separation", "handle-count", "lemma-min", "sanity"]
    }
}

/// Re-derives every inequality behind a parsed certificate at twice its
/// stated precision. Accepts only if the whole chain certifies.
pub fn verify_certificate(cert: &Certificate) -> Result<VerifyOutcome> {
    let prec = (2 * cert.precision_bits).min(MAX_PRECISION);
    for name in required_checks(cert.k) {
        match cert.checks.iter().find(|c| c.name == *name) {
            None => {
                return Ok(reject(name, "required check missing from the document"));
            }
            Some(c) if c.verdict != "certain" => {
                return Ok(reject(name, format!("producer verdict is '{}'", c.verdict)));
            }
            Some(_) => {}
        }
    }
    for c in &cert.checks {
        c.lhs.parse(prec, &format!("check {} lhs", c.name))?;
        c.rhs.parse(prec, &format!("check {} rhs", c.name))?;
    }
    cert.lambda.parse(prec, "lambda")?;

    // Genus decomposition: the stated genus must be g_p + k for the
    // stated family member.
    let base = match base_surface(cert.p, cert.nu, prec) {
        Ok(b) => b,
        Err(e) => return Ok(reject("genus-decomposition", e.to_string())),
    };
    match base.genus.checked_add(cert.k) {
        Some(g) if g == cert.genus => {}
        _ => {
            return Ok(reject(
                "genus-decomposition",
                format!("genus {} is not {} + {}", cert.genus, base.genus, cert.k),
            ));
        }
    }
    let bound = cert.bound.parse(prec, "bound")?;
    let sys_floor_claim = cert.sys_base_floor.parse(prec, "sys_base_floor")?;
    // The stated floor must not overstate the recomputed one.
    if !(sys_floor_claim.lo() <= base.sys_floor.hi()) {
        return Ok(reject("lemma-min", "stated base systole floor too large"));
    }

    let lemma_rhs;
    if cert.k == 0 {
        lemma_rhs = base.sys_floor.clone();
    } else {
        let r_iv = cert.r.as_ref().unwrap().parse(prec, "r")?;
        let d_iv = cert.d.as_ref().unwrap().parse(prec, "d")?;
        let s_iv = cert.s.as_ref().unwrap().parse(prec, "s")?;
        let r_hat = r_iv.lo().clone();
        let d_hat = d_iv.lo().clone();
        if !(r_hat > 0u32) || !(d_hat > 0u32) {
            return Ok(reject("radius-sum", "witness radii must be positive"));
        }
        // Exact at doubled precision relative to the producer.
        let s_hat = Float::with_val(prec, &r_hat + &d_hat);
        if !(*s_iv.lo() <= s_hat && s_hat <= *s_iv.hi()) {
            return Ok(reject(
                "radius-sum",
                "stated separation does not contain r.lo + d.lo",
            ));
        }
        let log_p = base.sys_floor.div_u64(4);
        if !(s_hat < *log_p.lo()) {
            return Ok(reject(
                "separation",
                "r + d is not certifiably below (1/4) * sys_base",
            ));
        }
        let s_rad = Radius::new(Interval::point(&s_hat))?;
        let n_ver = packing_lower_bound(base.genus, &s_rad)?;
        let two_k = match cert.k.checked_mul(2) {
            Some(t) => Integer::from(t),
            None => return Ok(reject("handle-count", "handle count overflows")),
        };
        if two_k > n_ver {
            return Ok(reject(
                "handle-count",
                format!("embedded-disk capacity {n_ver} cannot host {two_k} disks"),
            ));
        }
        let n_claim = Integer::from(cert.packing_n.unwrap());
        if n_claim > n_ver {
            return Ok(reject(
                "handle-count",
                "claimed packing count exceeds the certified capacity",
            ));
        }
        let perim = disk_perimeter(&Radius::new(Interval::point(&r_hat))?);
        let two_d = Interval::point(&d_hat).mul_u64(2);
        lemma_rhs = base
            .sys_floor
            .min_elementwise(&perim)
            .min_elementwise(&two_d);
    }
    if !(bound.lo() <= lemma_rhs.lo()) {
        return Ok(reject(
            "lemma-min",
            "stated bound is not certifiably below the three-term minimum",
        ));
    }
    let upper = systole_upper_bound(cert.genus, prec)?;
    if !(bound.lo() <= upper.hi()) {
        return Ok(reject(
            "sanity",
            "stated bound exceeds the universal systole upper bound",
        ));
    }
    Ok(VerifyOutcome::Accept)
}
