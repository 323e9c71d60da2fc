use thiserror::Error;

use crate::labels::ZTable;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H^dagger| entry = {max_asymmetry:e})")]
    NonHermitian { max_asymmetry: f64 },

    #[error("degenerate spectrum: eigenvalues {index} and {next} differ by {gap:e}")]
    DegenerateSpectrum { index: usize, next: usize, gap: f64 },

    #[error("Jacobi sweeps did not converge (off-diagonal norm {off_norm:e} after {sweeps} sweeps)")]
    EigenNoConvergence { off_norm: f64, sweeps: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} out of range")]
    InvalidDimension(usize),

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("basis is not orthonormal (max Gram deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("outcome {index} has probability {probability:e}, cannot project")]
    ZeroProbabilityOutcome { index: usize, probability: f64 },

    #[error("label space is empty: the observables are mutually exclusive on this state")]
    EmptyLabelSpace,

    #[error("amplitude solver did not converge (best residual {:e})", best.residual)]
    SolverDidNotConverge { best: Box<ZTable> },

    #[error("grid has {0} points, at least 16 (power of two) required")]
    GridTooSmall(usize),

    #[error("reference amplitude vanishes at index {index} ({which})")]
    ZeroReferenceAmplitude { which: &'static str, index: usize },

    #[error("{0} directions exceed the exact-enumeration limit of 16")]
    TooManyDirections(usize),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("all screen amplitudes vanish")]
    AllZeroAmplitudes,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
