use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NonHermitian { defect: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("non-finite value encountered in {0}")]
    Computation(&'static str),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("channel is not endomorphic ({dim_in} -> {dim_out})")]
    NotEndomorphic { dim_in: usize, dim_out: usize },
    #[error("channel is not a qubit channel ({dim_in} -> {dim_out})")]
    NotQubit { dim_in: usize, dim_out: usize },
    #[error("transfer matrix cannot be brought to canonical form (residual {residual:e})")]
    NotCanonicalizable { residual: f64 },
    #[error("Bloch eigenvalue {value} has unit magnitude")]
    UnitEigenvalue { value: f64 },
    #[error("{name} = {value} is out of range ({expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid channel: completeness defect {defect:e}")]
    InvalidChannel { defect: f64 },
    #[error("code words are not orthonormal (defect {defect:e})")]
    NonOrthonormalWords { defect: f64 },
    #[error("Knill-Laflamme conditions violated (max violation {violation:e})")]
    KlViolated { violation: f64 },
    #[error("cutoff {cutoff} is too small (need at least {needed})")]
    CutoffTooSmall { cutoff: usize, needed: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("consistency check failed: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<V> = std::result::Result<V, Error>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            expected: "[0, 1]",
        })
    }
}
