//! Command-line front end for the certified systole-bound calculator.

use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use sysw_core::audit::{
    asymptotic_constant, audit_range, find_witness, write_audit_csv, write_audit_json,
};
use sysw_core::certificate::{
    certificate_to_json, emit_certificate, parse_certificate, verify_certificate,
    CertificateContext, VerifyOutcome,
};
use sysw_core::interval::decimal_directed;
use sysw_core::primes::build_gap_table;
use sysw_core::rug::float::Round;
use sysw_core::surgery::{closed_form_floor, closed_form_parameters};
use sysw_core::{Config, Error, Interval, LambdaMode, Theta};

/// Prime cap for the empirical gap constant when a subcommand needs a
/// lambda value but no table was requested explicitly.
const LAMBDA_PMAX: u64 = 10_000;

const CHECKS_HELP: &str = "\
Certified checks (every inequality is established in outward-rounded
interval arithmetic; g_p = (p^3 - p) * nu + 1 is the base genus):
  separation    r + d < (1/4) * sys_base, where sys_base = 4 log p
  handle-count  2k <= N, where N = floor((g_p - 1) / sinh^2(r + d))
  lemma-min     bound <= min{ 4 log p, 2 pi sinh r, 2 d }
  sanity        bound <= 2 log(4 g - 2)

Exit codes: 0 success; 1 no witness found or certificate rejected;
2 usage error or malformed input.";

#[derive(Parser)]
#[command(
    name = "sysw",
    version,
    about = "Certified lower bounds for systoles of closed hyperbolic surfaces",
    after_long_help = CHECKS_HELP
)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Covering degree of the base family; base genus is (p^3 - p) * nu + 1
    #[arg(long, global = true, default_value_t = 1)]
    nu: u64,

    /// Prime-gap exponent, a fraction or decimal in (0, 1)
    #[arg(long, global = true, default_value_t = Theta::default())]
    theta: Theta,

    /// Where lambda comes from: measured from the gap table up to 10000,
    /// or taken from --lambda
    #[arg(long, global = true, default_value_t = LambdaMode::Empirical)]
    lambda_mode: LambdaMode,

    /// Gap constant for assumed mode (gap <= lambda * p^theta)
    #[arg(long, global = true, default_value = "1")]
    lambda: String,

    /// Working precision for interval endpoints, in bits
    #[arg(long, global = true, env = "SYSW_PRECISION_BITS")]
    precision_bits: Option<u32>,

    /// How many of the largest admissible base primes to try per genus
    #[arg(long, global = true, default_value_t = 5)]
    candidate_window: usize,

    /// Worker threads for range audits (default: logical cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

impl GlobalOpts {
    fn config(&self) -> anyhow::Result<Config> {
        let mut cfg = Config::default();
        if let Some(bits) = self.precision_bits {
            cfg.precision_bits = bits;
        }
        cfg.candidate_window = self.candidate_window;
        if let Some(jobs) = self.jobs {
            cfg.jobs = jobs;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn lambda_interval(&self, prec: u32) -> anyhow::Result<Interval> {
        match self.lambda_mode {
            LambdaMode::Assumed => {
                Ok(Interval::from_decimal(&self.lambda, prec).context("--lambda")?)
            }
            LambdaMode::Empirical => {
                let table = build_gap_table(LAMBDA_PMAX, self.theta, prec)?;
                Ok(table.lambda_emp)
            }
        }
    }

    fn certificate_context(&self, prec: u32) -> anyhow::Result<CertificateContext> {
        Ok(CertificateContext {
            theta: self.theta,
            lambda_mode: self.lambda_mode,
            lambda: self.lambda_interval(prec)?,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the best certified witness for one genus
    Witness {
        /// Target genus (at least 24 * nu + 1)
        #[arg(long)]
        genus: u64,
        /// Write the witness as a certificate file (.sysw.json)
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
    },
    /// Audit every genus in a range and report the worst ratio
    Audit {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Write per-genus rows as CSV
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        /// Write a JSON summary
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Tabulate odd-prime gaps and the empirical constant max gap / p^theta
    Gaps {
        /// Largest prime to include
        #[arg(long, default_value_t = 1_000_000)]
        pmax: u64,
        /// Write the table as CSV
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Re-verify a certificate file independently of its producer
    Verify {
        /// Certificate path (.sysw.json)
        file: PathBuf,
    },
    /// Closed-form surgery radii from the asymptotic recipe, for one prime
    ClosedForm {
        /// Odd base prime
        #[arg(long)]
        p: u64,
    },
    /// Print the exact asymptotic ratio constant (1 - theta) / 3
    Constant,
}

fn fmt_iv(iv: &Interval) -> String {
    format!(
        "[{}, {}]",
        decimal_directed(iv.lo(), 12, Round::Down),
        decimal_directed(iv.hi(), 12, Round::Up)
    )
}

fn lo12(iv: &Interval) -> String {
    decimal_directed(iv.lo(), 12, Round::Down)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let opts = &cli.opts;
    let cfg = opts.config()?;
    match cli.cmd {
        Command::Witness { genus, emit } => {
            let witness = match find_witness(genus, opts.nu, &cfg) {
                Ok(w) => w,
                Err(Error::NoWitness { genus, threshold }) => {
                    eprintln!(
                        "no witness: genus {genus} is below the construction \
                         threshold {threshold} (= 24 * nu + 1)"
                    );
                    return Ok(ExitCode::from(1));
                }
                Err(e) => return Err(e.into()),
            };
            let plan = &witness.plan;
            println!(
                "genus {genus}: p = {}, k = {} (base genus {}, nu = {})",
                plan.base.p, plan.k, plan.base.genus, plan.base.nu
            );
            println!("bound >= {}", lo12(&plan.bound));
            println!("ratio bound/log(g) >= {}", lo12(&witness.ratio));
            if plan.k == 0 {
                println!("no surgery: the base surface hits the genus exactly");
            } else {
                println!("r = {}", fmt_iv(plan.r.as_ref().unwrap().interval()));
                println!("d = {}", fmt_iv(plan.d.as_ref().unwrap().interval()));
                println!(
                    "packing: N = {} disks certified, 2k = {}",
                    plan.packing_n.as_ref().unwrap(),
                    2 * plan.k
                );
            }
            let primes: Vec<String> = witness
                .candidates_considered
                .iter()
                .map(|p| p.to_string())
                .collect();
            println!("candidate primes: {}", primes.join(", "));
            if let Some(path) = emit {
                let ctx = opts.certificate_context(cfg.precision_bits)?;
                let cert = emit_certificate(&witness, &ctx)?;
                fs::write(&path, certificate_to_json(&cert))
                    .with_context(|| format!("writing {}", path.display()))?;
                println!("certificate written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit { from, to, csv, json } => {
            let report = audit_range(from, to, opts.nu, &cfg)?;
            println!(
                "audited [{from}, {to}] at nu = {}: {} witnessed, {} failures",
                opts.nu,
                report.rows.len(),
                report.failures.len()
            );
            if let (Some(first), Some(last)) = (report.failures.first(), report.failures.last()) {
                println!("failures span {first}..{last} (below threshold or infeasible)");
            }
            if let Some(min) = &report.min_ratio {
                println!(
                    "min ratio >= {} at genus {}",
                    lo12(&min.ratio),
                    min.genus
                );
            }
            if let Some(path) = csv {
                let file = fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                write_audit_csv(&report, BufWriter::new(file))?;
                println!("rows written to {}", path.display());
            }
            if let Some(path) = json {
                let file = fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                write_audit_json(&report, BufWriter::new(file))?;
                println!("summary written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gaps { pmax, csv } => {
            let table = build_gap_table(pmax, opts.theta, cfg.precision_bits)?;
            table.cross_check()?;
            println!(
                "{} consecutive-prime gaps up to {} (theta = {})",
                table.entries.len(),
                pmax,
                opts.theta
            );
            println!(
                "lambda_emp = {} attained at p = {}",
                fmt_iv(&table.lambda_emp),
                table.argmax_p
            );
            if let Some(path) = csv {
                let file = fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                table.write_csv(BufWriter::new(file))?;
                println!("table written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { file } => {
            let text = fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let cert = match parse_certificate(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("malformed certificate: {e}");
                    return Ok(ExitCode::from(2));
                }
            };
            match verify_certificate(&cert) {
                Ok(VerifyOutcome::Accept) => {
                    let bound = Interval::from_decimal(&cert.bound.lo, cert.precision_bits)?;
                    println!(
                        "ACCEPT: genus {}, p = {}, k = {}, bound >= {}",
                        cert.genus,
                        cert.p,
                        cert.k,
                        lo12(&bound)
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Ok(VerifyOutcome::Reject { check, detail }) => {
                    println!("REJECT ({check}): {detail}");
                    Ok(ExitCode::from(1))
                }
                Err(e) => {
                    eprintln!("malformed certificate: {e}");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::ClosedForm { p } => {
            let lambda = opts.lambda_interval(cfg.precision_bits)?;
            let params =
                closed_form_parameters(p, opts.nu, &lambda, opts.theta, cfg.precision_bits)?;
            println!(
                "p = {p}, nu = {}, theta = {}, lambda = {}",
                opts.nu,
                opts.theta,
                fmt_iv(&lambda)
            );
            println!("r = {}", fmt_iv(&params.r));
            println!("C(lambda) = {}", fmt_iv(&params.c_lambda));
            println!("d = {}", fmt_iv(&params.d));
            if params.feasible {
                let bound = closed_form_floor(p, &params, cfg.precision_bits)?;
                println!("feasible: yes");
                println!("bound >= {}", lo12(&bound));
            } else {
                println!("feasible: no (d is not certainly positive at this p)");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Constant => {
            println!("{}", asymptotic_constant(opts.theta));
            Ok(ExitCode::SUCCESS)
        }
    }
}
