use thiserror::Error;

use crate::sparse::PeakList;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// Numerical failure (loss of unitarity or symplecticity, singular system).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Exponential-cost oracle refused an instance above its size guard.
    #[error("size guard exceeded for {what}: {got} > {limit}")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("inconsistent Fourier data: imaginary residue {residue:.3e} exceeds {limit:.1e}")]
    Inconsistent { residue: f64, limit: f64 },

    #[error("photon cutoff {cutoff} leaves mass deficit {deficit:.3e} above tolerance {tol:.1e}; raise the cutoff")]
    Cutoff { cutoff: usize, deficit: f64, tol: f64 },

    #[error("peak recovery incomplete: {unresolved} buckets unresolved, {} peaks recovered", recovered.entries.len())]
    RecoveryIncomplete {
        recovered: PeakList,
        unresolved: usize,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::Dimension {
                what,
                expected,
                found,
            })
        }
    }
}
