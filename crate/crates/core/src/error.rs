use thiserror::Error;

/// Errors raised by the subsystem-recovery toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("spectra have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("polar factor mismatch: |G^dag G - S^2| = {0:.3e}")]
    FactorMismatch(f64),

    #[error("operator is not a partial isometry (residual {0:.3e})")]
    NotPartialIsometry(f64),

    #[error("columns are not orthonormal (residual {0:.3e})")]
    NotIsometry(f64),

    #[error("channel is not trace preserving (residual {0:.3e})")]
    NotTracePreserving(f64),

    #[error("channel is not unital (residual {0:.3e})")]
    NotUnital(f64),

    #[error("empty Kraus list")]
    EmptyKraus,

    #[error("certificate was not produced for this channel and subsystem")]
    CertificateMismatch,

    #[error("certificate did not pass (residual {0:.3e}); no recovery exists")]
    NotCorrectable(f64),

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("basis does not span a dagger-closed algebra (residual {0:.3e})")]
    NotAnAlgebra(f64),

    #[error("random probing was degenerate for {attempts} consecutive seeds starting at {first_seed}")]
    UnluckySeed { first_seed: u64, attempts: u32 },

    #[error("internal contradiction on candidate {candidate}: {detail} (residual {residual:.3e})")]
    InternalContradiction {
        candidate: usize,
        detail: String,
        residual: f64,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
