use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A requested computation exceeds a hard memory/size guard.
    #[error("capacity guard: {what} = {requested} exceeds limit {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    /// Inconsistent or incomplete physical configuration.
    #[error("configuration: {0}")]
    Config(String),

    /// Invalid argument to an operation.
    #[error("argument: {0}")]
    Argument(String),

    /// A state vector failed a validity check (norm, sector membership).
    #[error("state: {0}")]
    State(String),

    /// Tensor-network contraction failed, usually a leg-dimension mismatch.
    #[error("contraction at bond ({}, {}): {detail}", bond.0, bond.1)]
    Contraction { bond: (usize, usize), detail: String },

    /// The effective normalization at a site is numerically zero; the PEPS
    /// tensor configuration is degenerate and the caller should reinitialize.
    #[error("singular environment at site {site}: |N_eff| = {norm:.3e}")]
    SingularEnvironment { site: usize, norm: f64 },

    /// A matrix expected to be Hermitian is not, beyond tolerance.
    #[error("matrix not Hermitian: relative asymmetry {asymmetry:.3e}")]
    NotHermitian { asymmetry: f64 },

    /// A LAPACK driver reported failure.
    #[error("LAPACK {driver} failed with info = {info}")]
    Lapack { driver: &'static str, info: i32 },

    /// Serialization / checkpoint I/O.
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
