use thiserror::Error;

/// Failure modes of the certified pipeline.
///
/// `Parse` covers malformed textual input (decimal literals, certificate
/// documents); `Domain` covers mathematically invalid arguments. The split
/// matters to the CLI, which maps them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no witness for genus {genus}: the smallest base genus for this nu is {threshold}")]
    NoWitness { genus: u64, threshold: u64 },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
