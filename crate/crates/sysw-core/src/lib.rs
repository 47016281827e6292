//! Certified lower bounds for the systole of closed hyperbolic surfaces.
//!
//! For a target genus `g` the pipeline picks a base surface from a family
//! of congruence covers — genus `(p^3 - p) nu + 1` and systole at least
//! `4 log p` for an odd prime `p` — attaches `k` extra handles by grafting
//! them inside disjoint embedded disks, and certifies a lower bound of the
//! form `min{4 log p, 2 pi sinh r, 2d}` for the surgered surface. Every
//! inequality in the argument is established in outward-rounded interval
//! arithmetic, and each witness can be exported as a certificate that a
//! small, independent checker re-verifies at higher precision.

pub mod audit;
pub mod certificate;
pub mod config;
pub mod congruence;
pub mod error;
pub mod hyperbolic;
pub mod interval;
pub mod primes;
pub mod surgery;

pub use audit::{AuditReport, Witness};
pub use certificate::{Certificate, VerifyOutcome};
pub use config::{Config, LambdaMode, Theta};
pub use error::{Error, Result};
pub use hyperbolic::Radius;
pub use interval::{Interval, Verdict};

pub use rug;
