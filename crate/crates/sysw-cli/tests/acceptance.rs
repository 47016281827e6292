//! Acceptance gate: ten criteria covering the exact constant, the base
//! family, full-range coverage, the gap chain, the closed-form regime,
//! optimizer quality, the interval kernel, the derivative identity,
//! certificate soundness, and determinism. Each test prints one PASS
//! line; tolerances are pinned next to the assertions they govern.

use std::process::Command;

use num_bigint::BigInt;
use num_rational::BigRational;
use rug::Float;
use sysw_core::audit::{asymptotic_constant, audit_range, find_witness, write_audit_csv};
use sysw_core::certificate::{
    certificate_to_json, emit_certificate, parse_certificate, verify_certificate, Certificate,
    CertificateContext, DecimalInterval, VerifyOutcome,
};
use sysw_core::congruence::{base_surface, four_thirds_floor, genus_gap_bound};
use sysw_core::hyperbolic::{disk_area, disk_perimeter, systole_upper_bound};
use sysw_core::primes::{build_gap_table, next_prime_after, primes_up_to};
use sysw_core::surgery::{closed_form_parameters, optimize_parameters};
use sysw_core::{Config, Interval, Radius, Theta};
use sysw_testkit::{check_encloses, grid_optimize, pi, rat_pow2, Dec, Rng};

/// Tolerances fixed by the acceptance contract.
const WIDTH_BASE_BOUND: f64 = 1e-9; // criterion 2
const GRID_SLACK: f64 = 1e-2; // criterion 6
const BALANCE_TOL: f64 = 1e-6; // criterion 6
const KERNEL_WIDTH: f64 = 1e-25; // criterion 7, relative beyond unit scale
const DERIVATIVE_REL: f64 = 1e-5; // criterion 8
const CLOSED_FORM_D_TOL: f64 = 1e-6; // criterion 5

fn rat(f: &Float) -> BigRational {
    if f.is_zero() {
        return BigRational::from_integer(BigInt::from(0));
    }
    let (m, e) = f.to_integer_exp().expect("finite");
    rat_pow2(m.to_string().parse::<BigInt>().unwrap(), e as i64)
}

fn check_iv(iv: &Interval, oracle: &Dec, label: &str) {
    check_encloses(&rat(iv.lo()), &rat(iv.hi()), oracle)
        .unwrap_or_else(|e| panic!("{label}: {e}"));
}

#[test]
fn criterion_01_exact_constant() {
    let out = Command::new(env!("CARGO_BIN_EXE_sysw"))
        .args(["constant"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "19/120\n");
    // Zero-tolerance rational identity, independent of the CLI path.
    assert_eq!(
        asymptotic_constant(Theta::default()),
        rug::Rational::from((19, 120))
    );
    println!("PASS criterion 1: constant prints the exact rational 19/120");
}

#[test]
fn criterion_02_base_family_consistency() {
    let cfg = Config::default();
    let mut checked = 0usize;
    for p in primes_up_to(200).into_iter().skip(1) {
        let base = base_surface(p, 1, cfg.precision_bits).unwrap();
        let w = find_witness(base.genus, 1, &cfg).unwrap();
        assert_eq!((w.plan.base.p, w.plan.k), (p, 0), "base witness at p={p}");
        assert!(
            w.plan.bound.width().to_f64() <= WIDTH_BASE_BOUND,
            "bound too wide at p={p}"
        );
        check_iv(
            &w.plan.bound,
            &Dec::from_u64(p).ln().mul_int(4),
            &format!("4 log {p}"),
        );
        assert!(
            w.plan.bound.certainly_ge(&four_thirds_floor(&base)),
            "4 log p < (4/3) log g_p at p={p}"
        );
        checked += 1;
    }
    assert_eq!(checked, 45);
    println!("PASS criterion 2: {checked} base witnesses enclose 4 log p (width <= 1e-9) and dominate (4/3) log g_p");
}

#[test]
fn criterion_03_full_coverage() {
    let cfg = Config::default();
    let report = audit_range(25, 50_000, 1, &cfg).unwrap();
    assert!(
        report.failures.is_empty(),
        "unwitnessed genera: {:?}",
        &report.failures[..report.failures.len().min(5)]
    );
    assert_eq!(report.rows.len(), 49_976);
    for row in &report.rows {
        assert!(
            row.bound.is_certainly_positive(),
            "nonpositive bound at genus {}",
            row.genus
        );
        let upper = systole_upper_bound(row.genus, cfg.precision_bits).unwrap();
        assert!(
            row.bound.lo() <= upper.hi(),
            "bound beats 2 log(4g - 2) at genus {}",
            row.genus
        );
    }
    println!("PASS criterion 3: all 49976 genera in [25, 50000] witnessed; bounds positive and below 2 log(4g - 2)");
}

#[test]
fn criterion_04_genus_gap_chain() {
    let theta = Theta::default();
    let table = build_gap_table(10_000, theta, 128).unwrap();
    table.cross_check().unwrap();
    let mut pairs = 0usize;
    for nu in [1u64, 2, 5] {
        for e in table.entries.iter().filter(|e| e.p >= 3) {
            let g_p = base_surface(e.p, nu, 64).unwrap().genus;
            let g_q = base_surface(e.next, nu, 64).unwrap().genus;
            let jump = g_q - g_p + 1; // exact integers
            let bound = genus_gap_bound(e.p, nu, &table.lambda_emp, theta, 128).unwrap();
            assert!(
                *bound.hi() >= jump,
                "jump {jump} escapes the certified bound at p={}, nu={nu}",
                e.p
            );
            pairs += 1;
        }
    }
    println!("PASS criterion 4: {pairs} consecutive-prime genus jumps within 8 nu lambda^3 p^(2+theta) + 1 (zero tolerance)");
}

#[test]
fn criterion_05_closed_form_regime() {
    let one = Interval::from_u64(1, 128);
    let theta = Theta::default();
    // 100-digit oracle evaluations of r, C(lambda), d.
    let c_oracle = Dec::from_u64(8)
        .add(&Dec::from_u64(3).pow_ratio(-101, 40))
        .mul_int(2)
        .div(&Dec::from_ratio(8, 9))
        .ln()
        .half();
    let small = closed_form_parameters(101, 1, &one, theta, 128).unwrap();
    assert!(!small.feasible, "p=101 should be infeasible at lambda=1");
    let lp = Dec::from_u64(101).ln();
    let r_oracle = lp.mul_int(2).div(&pi()).asinh();
    let d_oracle = lp.mul(&Dec::from_ratio(19, 80)).sub(&r_oracle).sub(&c_oracle);
    check_iv(&small.r, &r_oracle, "r at p=101");
    check_iv(&small.c_lambda, &c_oracle, "C(1)");
    check_iv(&small.d, &d_oracle, "d at p=101");
    assert!((small.d.hi().to_f64() - d_oracle.to_f64()).abs() <= CLOSED_FORM_D_TOL);
    assert!(d_oracle.to_f64() < 0.0);

    let big = closed_form_parameters(1_000_000_007, 1, &one, theta, 128).unwrap();
    assert!(big.feasible, "p=10^9+7 should be feasible at lambda=1");
    assert!(big.d.is_certainly_positive());
    let lp = Dec::from_u64(1_000_000_007).ln();
    let r_oracle = lp.mul_int(2).div(&pi()).asinh();
    let d_oracle = lp.mul(&Dec::from_ratio(19, 80)).sub(&r_oracle).sub(&c_oracle);
    check_iv(&big.d, &d_oracle, "d at p=10^9+7");
    assert!((big.d.lo().to_f64() - d_oracle.to_f64()).abs() <= CLOSED_FORM_D_TOL);
    println!("PASS criterion 5: closed form infeasible at p=101, feasible at p=10^9+7; r, C, d match the 100-digit oracle");
}

#[test]
fn criterion_06_optimizer_vs_oracle() {
    let primes: Vec<u64> = primes_up_to(200).into_iter().filter(|&p| p >= 3).collect();
    let mut rng = Rng::new(0x5ca1ab1e);
    let mut balanced = 0usize;
    for trial in 0..100 {
        let p = primes[rng.below(primes.len() as u64) as usize];
        let nu = 1 + rng.below(2);
        let base = base_surface(p, nu, 128).unwrap();
        let k = 1 + rng.below(2 * base.genus as u64);
        let plan = optimize_parameters(&base, k).unwrap();
        let grid = grid_optimize(p, nu, k);
        assert!(
            grid.bound <= plan.bound.lo().to_f64() + GRID_SLACK,
            "trial {trial}: grid {} beats certified {} at (p={p}, nu={nu}, k={k})",
            grid.bound,
            plan.bound.lo().to_f64()
        );
        if plan.bound.certainly_lt(&base.sys_floor) {
            let perim = disk_perimeter(plan.r.as_ref().unwrap());
            let two_d = plan.d.as_ref().unwrap().interval().mul_u64(2);
            let gap = (perim.lo().to_f64() - two_d.lo().to_f64()).abs();
            assert!(gap <= BALANCE_TOL, "imbalance {gap} at (p={p}, nu={nu}, k={k})");
            balanced += 1;
        }
    }
    println!("PASS criterion 6: 100 random instances within 1e-2 of grid search; balance within 1e-6 on {balanced} capped instances");
}

#[test]
fn criterion_07_interval_kernel_containment() {
    let mut rng = Rng::new(0x5eed_cafe);
    let mut widths_checked = 0usize;
    for trial in 0..10_000usize {
        // Log-uniform argument in [1e-3, 1e3], snapped to an exact dyadic.
        let exp10 = rng.uniform(-3.0, 3.0);
        let x_f64 = 10f64.powf(exp10);
        let x = Interval::point(&Float::with_val(128, x_f64));
        let x_dec = Dec::from_decimal(&sysw_core::interval::exact_decimal(x.lo()));
        let label = format!("trial {trial}, x = {x_f64}");

        let cases: Vec<(Interval, Dec, f64)> = vec![
            (x.sinh(), x_dec.sinh(), x_f64.sinh()),
            (x.asinh(), x_dec.asinh(), x_f64.asinh()),
            (x.ln().unwrap(), x_dec.ln(), x_f64.ln()),
            (x.exp(), x_dec.exp(), x_f64.exp()),
            (
                x.pow_ratio(101, 40).unwrap(),
                x_dec.pow_ratio(101, 40),
                x_f64.powf(101.0 / 40.0),
            ),
        ];
        for (iv, oracle, approx) in &cases {
            check_iv(iv, oracle, &label);
            let scale = approx.abs().max(1.0);
            assert!(
                iv.width().to_f64() <= KERNEL_WIDTH * scale,
                "{label}: width {} above tolerance",
                iv.width().to_f64()
            );
            widths_checked += 1;
        }
    }
    assert_eq!(widths_checked, 50_000);
    println!("PASS criterion 7: 10000 containment checks per function (sinh, arcsinh, log, exp, pow), zero failures, widths within 1e-25");
}

#[test]
fn criterion_08_derivative_identity() {
    // Central difference of the disk area with h = 1e-6 against the
    // perimeter, relative error at most 1e-5.
    let h = Interval::from_decimal("1e-6", 128).unwrap();
    for r_txt in ["0.5", "1", "2"] {
        let r = Radius::from_decimal(r_txt, 128).unwrap();
        let plus = Radius::new(r.interval().add(&h)).unwrap();
        let minus = Radius::new(r.interval().sub(&h)).unwrap();
        let diff = disk_area(&plus)
            .sub(&disk_area(&minus))
            .div(&h.mul_u64(2))
            .unwrap();
        let perim = disk_perimeter(&r);
        let rel = (diff.lo().to_f64() - perim.lo().to_f64()).abs() / perim.lo().to_f64();
        assert!(rel <= DERIVATIVE_REL, "relative error {rel} at r = {r_txt}");
    }
    println!("PASS criterion 8: d/dr area = perimeter within 1e-5 at r in {{0.5, 1, 2}}");
}

fn scale_interval(iv: &DecimalInterval, factor: f64) -> DecimalInterval {
    let lo: f64 = iv.lo.parse().unwrap();
    let hi: f64 = iv.hi.parse().unwrap();
    DecimalInterval {
        lo: format!("{:e}", lo * factor),
        hi: format!("{:e}", hi * factor),
    }
}

/// Applies one inequality-violating single-field tamper, returning the
/// check the verifier must name.
fn tamper(cert: &mut Certificate, choice: u64, rng: &mut Rng) -> &'static str {
    let up = 1.02 + 0.4 * rng.uniform(0.0, 1.0);
    let down = 0.5 + 0.4 * rng.uniform(0.0, 1.0);
    match choice {
        0 => {
            cert.genus += 1 + rng.below(5);
            "genus-decomposition"
        }
        1 => {
            cert.p = next_prime_after(cert.p);
            "genus-decomposition"
        }
        2 => {
            cert.nu += 1;
            "genus-decomposition"
        }
        3 => {
            let r = cert.r.as_ref().unwrap();
            cert.r = Some(scale_interval(r, up));
            "radius-sum"
        }
        4 => {
            let d = cert.d.as_ref().unwrap();
            cert.d = Some(scale_interval(d, down));
            "radius-sum"
        }
        5 => {
            let s = cert.s.as_ref().unwrap();
            cert.s = Some(scale_interval(s, up));
            "radius-sum"
        }
        6 => {
            let n = cert.packing_n.unwrap();
            cert.packing_n = Some(n + n / 2 + 2);
            "handle-count"
        }
        7 => {
            cert.bound = scale_interval(&cert.bound, up);
            "lemma-min"
        }
        _ => {
            cert.sys_base_floor = scale_interval(&cert.sys_base_floor, up);
            "lemma-min"
        }
    }
}

#[test]
fn criterion_09_certificate_soundness() {
    let cfg = Config::default();
    let ctx = CertificateContext::default();
    for genus in 25..=5000u64 {
        let w = find_witness(genus, 1, &cfg).unwrap();
        let cert = emit_certificate(&w, &ctx).unwrap();
        assert_eq!(
            verify_certificate(&cert).unwrap(),
            VerifyOutcome::Accept,
            "fresh certificate rejected at genus {genus}"
        );
    }
    let mut rng = Rng::new(0x7a3b_9c1d);
    for trial in 0..100 {
        let genus = 25 + rng.below(4976);
        let w = find_witness(genus, 1, &cfg).unwrap();
        let mut cert = emit_certificate(&w, &ctx).unwrap();
        // Trivial certificates carry no surgical fields to perturb.
        let choice = if cert.k == 0 {
            [0u64, 1, 2, 7, 8][rng.below(5) as usize]
        } else {
            rng.below(9)
        };
        let expected = tamper(&mut cert, choice, &mut rng);
        // Round-trip through the document format, as a reviewer would.
        let parsed = parse_certificate(&certificate_to_json(&cert)).unwrap();
        match verify_certificate(&parsed).unwrap() {
            VerifyOutcome::Reject { check, .. } => {
                assert_eq!(
                    check, expected,
                    "trial {trial}: tamper {choice} at genus {genus} misdiagnosed"
                );
            }
            VerifyOutcome::Accept => {
                panic!("trial {trial}: tampered certificate accepted (choice {choice}, genus {genus})")
            }
        }
    }
    println!("PASS criterion 9: all certificates over [25, 5000] verify; 100 random tampers rejected with the correct check named");
}

#[test]
fn criterion_10_deterministic_audit() {
    let mut serial = Config::default();
    serial.jobs = 1;
    let mut parallel = Config::default();
    parallel.jobs = 4;
    let a = audit_range(25, 10_000, 1, &serial).unwrap();
    let b = audit_range(25, 10_000, 1, &parallel).unwrap();
    let mut csv_a = Vec::new();
    write_audit_csv(&a, &mut csv_a).unwrap();
    let mut csv_b = Vec::new();
    write_audit_csv(&b, &mut csv_b).unwrap();
    assert_eq!(csv_a, csv_b, "CSV differs between 1 and 4 workers");
    assert!(!csv_a.is_empty());
    println!("PASS criterion 10: audit of [25, 10000] is byte-identical across worker counts");
}
