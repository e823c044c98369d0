//! Error type shared by all modules.

use core::fmt;

/// Errors reported by library operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    Domain(&'static str),
    /// A parameter set violates a structural invariant (e.g. overlapping
    /// packets in an array specification).
    Config(&'static str),
    /// A numerical self-consistency check failed (e.g. the imaginary
    /// residue of a Wigner transform exceeded its tolerance).
    Numerical(&'static str),
    /// Not enough samples to perform the requested analysis.
    TooFewSamples,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical error: {msg}"),
            Error::TooFewSamples => write!(f, "too few samples"),
        }
    }
}

impl core::error::Error for Error {}
